//! Close functional pairs, the subspace `Z` with its maps `T_{q,p}`, and the
//! data of the `c₀` quotient, all on a truncated space.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{format_rational, row_l1_norm, sup_norm, GammaId, Rational, SparseMatrix, SparseRow};
use crate::framework::TruncatedSpace;
use crate::rank::rank;
use crate::report::VerificationReport;

const SUITE: &str = "subspace";

/// `‖(e_{γ₁}* − e_{γ₂}*) ∘ i_p‖` as a row ℓ₁ norm over `Γ_p`.
pub fn functional_distance(space: &TruncatedSpace, g1: GammaId, g2: GammaId, p: u32) -> Result<Rational> {
    let r = space.rank(g1)?.min(space.rank(g2)?);
    if g1 == g2 {
        return Ok(Rational::zero());
    }
    if p >= r {
        return Err(Error::BadInput(format!("p = {p} must be below both ranks (min {r})")));
    }
    let m = space.ext(p, space.top());
    Ok(row_l1_norm(&(&m.row(g1) - &m.row(g2))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairChoice {
    /// 1-based step index `s`.
    pub step: usize,
    pub level: u32,
    pub gamma1: GammaId,
    pub gamma2: GammaId,
    /// `(p, distance)` for every `p < level`.
    pub distances: Vec<(u32, Rational)>,
}

impl PairChoice {
    pub fn max_distance(&self) -> Rational {
        self.distances.iter().map(|(_, d)| d.clone()).max().unwrap_or_else(Rational::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSchedule {
    pub eps: Vec<Rational>,
    pub pairs: Vec<PairChoice>,
    /// First step with no pair inside the truncation.
    pub exhausted_at: Option<usize>,
}

impl PairSchedule {
    pub fn require_complete(&self) -> Result<()> {
        match self.exhausted_at {
            Some(step) => Err(Error::PairNotFound { step }),
            None => Ok(()),
        }
    }

    fn eps_of(&self, step: usize) -> &Rational {
        &self.eps[step - 1]
    }

    /// Bound for `‖r_q x − T_{q,p} x‖`: the ε of the first pair above `p`.
    fn eps_above(&self, p: u32) -> Option<&Rational> {
        self.pairs.iter().find(|c| c.level > p).map(|c| self.eps_of(c.step))
    }

    /// Independent re-check of every pair and of the schedule condition.
    pub fn recheck(&self, space: &TruncatedSpace) -> Result<VerificationReport> {
        let mut report = VerificationReport::new();
        let (lhs, ok) = schedule_condition(space, &self.eps);
        report.push(SUITE, "pair_schedule.condition", format_rational(&lhs), "< 1", ok);
        let mut prev_level = 0;
        for c in &self.pairs {
            let eps = self.eps_of(c.step);
            let same_level = space.rank(c.gamma1)? == c.level && space.rank(c.gamma2)? == c.level;
            report.push(
                SUITE,
                format!("pair_schedule.level(s={})", c.step),
                c.level,
                format!("> {prev_level}, both ranks equal"),
                same_level && c.gamma1 != c.gamma2 && c.level > prev_level,
            );
            for p in 0..c.level {
                let d = functional_distance(space, c.gamma1, c.gamma2, p)?;
                report.push(
                    SUITE,
                    format!("pair_schedule.distance(s={},p={p})", c.step),
                    format_rational(&d),
                    format!("< {}", format_rational(eps)),
                    &d < eps,
                );
            }
            prev_level = c.level;
        }
        Ok(report)
    }
}

/// `2 C² Σ ε` with `C` the truncated `sup ‖i_q‖`, and whether it is `< 1`.
fn schedule_condition(space: &TruncatedSpace, eps: &[Rational]) -> (Rational, bool) {
    let c = space.c_bound();
    let sum = eps.iter().fold(Rational::zero(), |s, e| s + e);
    let lhs = Rational::from_integer(2.into()) * c * c * sum;
    let ok = lhs < Rational::one();
    (lhs, ok)
}

/// `ε_q = 1 / (2^{q+3} C²)` for `q = 1..=Q`.
pub fn default_schedule(space: &TruncatedSpace) -> Vec<Rational> {
    let c = space.c_bound();
    (1..=space.top())
        .map(|q| Rational::one() / (Rational::from_integer((1u64 << (q + 3)).into()) * c * c))
        .collect()
}

/// Greedy selection of close pairs on successive levels.
///
/// For step `s` the levels above the previous pair level are scanned upward;
/// on the first level holding a pair with `0 < max_{p<q} dist < ε_s` the pair
/// of least distance is taken, ties going to the smallest ids. Pairs of
/// distance zero define the same functional on `Γ_{q-1}` and are skipped.
pub fn pair_search(space: &TruncatedSpace, eps: &[Rational]) -> Result<PairSchedule> {
    if eps.is_empty() {
        return Err(Error::ScheduleRejected("empty schedule".into()));
    }
    if eps.iter().any(|e| !e.is_positive()) {
        return Err(Error::ScheduleRejected("every ε must be positive".into()));
    }
    if eps.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::ScheduleRejected("ε must be non-increasing".into()));
    }
    let (lhs, ok) = schedule_condition(space, eps);
    if !ok {
        return Err(Error::ScheduleRejected(format!("2C²Σε = {} is not below 1", format_rational(&lhs))));
    }

    let top = space.top();
    let mut schedule = PairSchedule { eps: eps.to_vec(), pairs: Vec::new(), exhausted_at: None };
    let mut level = 0;
    for (i, e) in eps.iter().enumerate() {
        let step = i + 1;
        let found = (level + 1..=top).find_map(|q| closest_pair(space, q, e).map(|c| (q, c)));
        match found {
            Some((q, (g1, g2, distances))) => {
                schedule.pairs.push(PairChoice { step, level: q, gamma1: g1, gamma2: g2, distances });
                level = q;
            }
            None => {
                schedule.exhausted_at = Some(step);
                break;
            }
        }
    }
    Ok(schedule)
}

type Candidate = (GammaId, GammaId, Vec<(u32, Rational)>);

fn closest_pair(space: &TruncatedSpace, q: u32, eps: &Rational) -> Option<Candidate> {
    let ids = space.structure().level(q).to_vec();
    let top = space.top();
    let rows: Vec<Vec<SparseRow>> =
        ids.iter().map(|&id| (0..q).map(|p| space.ext(p, top).row(id)).collect()).collect();

    let best = (0..ids.len())
        .into_par_iter()
        .filter_map(|i| {
            let mut local: Option<(Rational, usize, usize)> = None;
            for j in i + 1..ids.len() {
                let d = (0..q as usize)
                    .map(|p| row_l1_norm(&(&rows[i][p] - &rows[j][p])))
                    .max()
                    .unwrap_or_else(Rational::zero);
                if d.is_zero() || &d >= eps {
                    continue;
                }
                if local.as_ref().is_none_or(|(b, _, _)| &d < b) {
                    local = Some((d, i, j));
                }
            }
            local
        })
        .reduce_with(|a, b| if (&b.0, b.1, b.2) < (&a.0, a.1, a.2) { b } else { a })?;

    let (_, i, j) = best;
    let distances = (0..q)
        .map(|p| (p, row_l1_norm(&(&rows[i][p as usize] - &rows[j][p as usize]))))
        .collect();
    Some((ids[i], ids[j], distances))
}

/// A spanning vector of `Z`: `d_γ`, or `d_{γ₁} + d_{γ₂}` for a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    /// `γ`, or `γ₁` for a pair sum.
    pub label: GammaId,
    pub level: u32,
    /// Coefficients in the basis `(d_γ)`.
    pub coeffs: SparseRow,
}

#[derive(Debug, Clone)]
pub struct ZPresentation {
    /// `n_blocks[p]` spans `N_p`.
    pub n_blocks: Vec<Vec<Generator>>,
    /// Spanning vectors of `W_q ⊂ ℓ∞(Γ_q)`.
    pub w_bases: Vec<Vec<SparseRow>>,
    /// `T_{q,p}: N_p → W_q`, columns labelled by generators.
    pub t_maps: BTreeMap<(u32, u32), SparseMatrix>,
    /// `T_q = Σ_p i_q T_{q,p} Q_{p}` into `Γ_Q` coordinates.
    pub t_total: Vec<SparseMatrix>,
    /// `dim Z_q`
    pub dims: Vec<usize>,
}

impl ZPresentation {
    pub fn generators(&self) -> impl Iterator<Item = &Generator> + '_ {
        self.n_blocks.iter().flatten()
    }

    pub fn dim(&self, q: u32) -> usize {
        self.dims[q as usize]
    }
}

fn pairs_by_level(schedule: &PairSchedule) -> BTreeMap<u32, (GammaId, GammaId)> {
    schedule.pairs.iter().map(|c| (c.level, (c.gamma1, c.gamma2))).collect()
}

/// `T_{q,p}(x)`: `r_q x` with the coordinate at `γ₂^s` replaced by the one at
/// `γ₁^s`, for every pair level `s ∈ (p, q]`.
fn t_qp(x: &SparseRow, q: u32, p: u32, pairs: &BTreeMap<u32, (GammaId, GammaId)>, space: &TruncatedSpace) -> SparseRow {
    let mut out = space.restrict(x, q);
    if p >= q {
        return out;
    }
    for (_, &(g1, g2)) in pairs.range(p + 1..=q) {
        out.set(g2, x.get(g1));
    }
    out
}

/// Builds `Z_q`, `W_q`, `T_{q,p}`, `T_q` and checks
/// (a) `‖r_q x − T_{q,p} x‖ ≤ ε‖x‖` on the generators of `N_p`,
/// (b) `T_{q,q} = r_q` on `N_q`,
/// (c) `dim Z_q = #Γ_q − #{pairs at levels ≤ q}`.
///
/// Norms of `x` are the truncated sup norms over `Γ_Q`, which are below
/// the true norms, so (a) as checked is the stronger inequality.
pub fn build_z(space: &TruncatedSpace, schedule: &PairSchedule) -> Result<(ZPresentation, VerificationReport)> {
    let top = space.top();
    let pairs = pairs_by_level(schedule);
    for c in &schedule.pairs {
        if c.level > top {
            return Err(Error::LevelUnavailable { level: c.level, available: top });
        }
        if space.rank(c.gamma1)? != c.level || space.rank(c.gamma2)? != c.level {
            return Err(Error::BadInput(format!("pair of step {} is not on level {}", c.step, c.level)));
        }
    }
    let mut report = VerificationReport::new();

    let mut n_blocks = Vec::new();
    for p in 0..=top {
        let mut block = Vec::new();
        let pair = pairs.get(&p);
        for &id in space.structure().level(p) {
            match pair {
                Some(&(_, g2)) if id == g2 => continue,
                Some(&(g1, g2)) if id == g1 => block.push(Generator {
                    label: g1,
                    level: p,
                    coeffs: SparseRow::from_entries([(g1, Rational::one()), (g2, Rational::one())]),
                }),
                _ => block.push(Generator { label: id, level: p, coeffs: SparseRow::unit(id) }),
            }
        }
        n_blocks.push(block);
    }

    let coords: BTreeMap<GammaId, SparseRow> = n_blocks
        .iter()
        .flatten()
        .map(|g| Ok((g.label, space.coords_of(&g.coeffs)?)))
        .collect::<Result<_>>()?;

    let mut w_bases = Vec::new();
    for q in 0..=top {
        let paired: BTreeSet<GammaId> = pairs.range(..=q).flat_map(|(_, &(a, b))| [a, b]).collect();
        let mut basis: Vec<SparseRow> = space
            .structure()
            .gamma(q)
            .into_iter()
            .filter(|id| !paired.contains(id))
            .map(SparseRow::unit)
            .collect();
        for (_, &(g1, g2)) in pairs.range(..=q) {
            basis.push(SparseRow::from_entries([(g1, Rational::one()), (g2, Rational::one())]));
        }
        w_bases.push(basis);
    }

    let mut t_maps = BTreeMap::new();
    let mut t_total = Vec::new();
    let mut dims = Vec::new();
    for q in 0..=top {
        let gamma_q = space.structure().gamma(q);
        let gamma_top = space.structure().gamma(top);
        let mut total_cols: BTreeMap<GammaId, SparseRow> = BTreeMap::new();
        let mut z_domain = Vec::new();
        for p in 0..=q {
            let mut cols = BTreeMap::new();
            let mut worst = Rational::zero();
            let mut ok_a = true;
            let mut in_w = true;
            let bound = schedule.eps_above(p).cloned().unwrap_or_else(Rational::zero);
            for g in &n_blocks[p as usize] {
                let x = &coords[&g.label];
                let t = t_qp(x, q, p, &pairs, space);
                let diff = sup_norm(&(&space.restrict(x, q) - &t));
                let rhs = &bound * sup_norm(x);
                ok_a &= diff <= rhs;
                if !sup_norm(x).is_zero() {
                    worst = worst.max(&diff / sup_norm(x));
                }
                in_w &= pairs.range(..=q).all(|(_, &(a, b))| t.get(a) == t.get(b));
                total_cols.insert(g.label, space.extend(q, &t));
                cols.insert(g.label, t);
            }
            report.push(
                SUITE,
                format!("build_z.a(q={q},p={p})"),
                format!("max ‖r_q x − T_{{q,p}} x‖/‖x‖ = {}", format_rational(&worst)),
                format!("≤ {}", format_rational(&bound)),
                ok_a,
            );
            report.push(SUITE, format!("build_z.range(q={q},p={p})"), in_w, "T_{q,p} x ∈ W_q", in_w);
            if p == q {
                let exact = n_blocks[p as usize].iter().all(|g| cols[&g.label] == space.restrict(&coords[&g.label], q));
                report.push(SUITE, format!("build_z.b(q={q})"), exact, "T_{q,q} = r_q on N_q", exact);
            }
            let labels: Vec<GammaId> = n_blocks[p as usize].iter().map(|g| g.label).collect();
            z_domain.extend(labels.iter().copied());
            t_maps.insert((q, p), transpose(labels, gamma_q.clone(), &cols)?);
        }

        // (c): dimension by exact rank of the generator coordinates
        let rows: Vec<SparseRow> = z_domain.iter().map(|l| coords[l].clone()).collect();
        let dim = rank(&rows);
        let expected = gamma_q.len() - pairs.range(..=q).count();
        report.push(
            SUITE,
            format!("build_z.c(q={q})"),
            format!("dim Z_{q} = {dim} ({} generators)", rows.len()),
            format!("#Γ_{q} − pairs = {expected}"),
            dim == expected && rows.len() == expected,
        );
        if pairs.contains_key(&q) {
            let codim = space.structure().level(q).len() - n_blocks[q as usize].len();
            report.push(SUITE, format!("build_z.codim(q={q})"), codim, 1, codim == 1);
        }
        dims.push(dim);

        // ‖x − T̃_{q,p} x‖ ≤ C ε ‖x‖, truncated
        let c = space.c_bound();
        let mut ok_tilde = true;
        for p in 0..=q {
            let bound = schedule.eps_above(p).cloned().unwrap_or_else(Rational::zero) * c;
            for g in &n_blocks[p as usize] {
                let x = &coords[&g.label];
                ok_tilde &= sup_norm(&(x - &total_cols[&g.label])) <= &bound * sup_norm(x);
            }
        }
        report.push(SUITE, format!("build_z.tilde(q={q})"), ok_tilde, "‖x − i_q T_{q,p} x‖ ≤ Cε‖x‖", ok_tilde);
        t_total.push(transpose(z_domain, gamma_top, &total_cols)?);
    }

    Ok((ZPresentation { n_blocks, w_bases, t_maps, t_total, dims }, report))
}

/// Matrix whose column `l` is `cols[l]`.
fn transpose(domain: Vec<GammaId>, codomain: Vec<GammaId>, cols: &BTreeMap<GammaId, SparseRow>) -> Result<SparseMatrix> {
    let mut rows: BTreeMap<GammaId, SparseRow> = BTreeMap::new();
    for (&label, col) in cols {
        for (r, v) in col.iter() {
            rows.entry(r).or_default().set(label, v.clone());
        }
    }
    SparseMatrix::new(domain, codomain, rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientData {
    /// `w_s* = ½(d_{γ₁}* − d_{γ₂}*)` over `Γ_Q`.
    pub w_star: Vec<SparseRow>,
    /// `(γ₁, γ₂)`: `y_s` is the class of `d_{γ₁} − d_{γ₂}`.
    pub y_basis: Vec<(GammaId, GammaId)>,
    /// Certified lower ℓ₁ constant: `‖Σ w_s*‖ ≥ pairing / witness norm`.
    pub ell1_lower: Option<Rational>,
}

/// Verifies (a) `w_s*` kills `Z`, (b) `w_s*(d_{γ₁} − d_{γ₂}) = 1`,
/// (c) `‖c_{γ₁}* − c_{γ₂}*‖ ≤ ε_s` and `‖w_s* − ½(e_{γ₁}* − e_{γ₂}*)‖ ≤ ½ε_s`,
/// (d) the ℓ₁ lower estimate for `Σ w_s*` with the witness `Σ (d_{γ₁} − d_{γ₂})`.
pub fn quotient_check(
    space: &TruncatedSpace,
    schedule: &PairSchedule,
    z: &ZPresentation,
) -> Result<(QuotientData, VerificationReport)> {
    let mut report = VerificationReport::new();
    let half = Rational::new(1.into(), 2.into());
    let gens: Vec<(GammaId, SparseRow)> =
        z.generators().map(|g| Ok((g.label, space.coords_of(&g.coeffs)?))).collect::<Result<_>>()?;

    let mut w_star = Vec::new();
    let mut y_basis = Vec::new();
    let mut witness = SparseRow::new();
    for c in &schedule.pairs {
        let t1 = space.dual_triple(c.gamma1)?;
        let t2 = space.dual_triple(c.gamma2)?;
        let w = (&t1.d_row - &t2.d_row).scale(&half);
        let s = c.step;

        let killed: Vec<GammaId> = gens.iter().filter(|(_, x)| !w.dot(x).is_zero()).map(|(l, _)| *l).collect();
        report.push(
            SUITE,
            format!("quotient_check.a(s={s})"),
            format!("{} generators not annihilated", killed.len()),
            "0",
            killed.is_empty(),
        );

        let y = &space.d_vector(c.gamma1)? - &space.d_vector(c.gamma2)?;
        let pairing = w.dot(&y);
        report.push(SUITE, format!("quotient_check.b(s={s})"), format_rational(&pairing), "1", pairing.is_one());

        let eps = &schedule.eps[s - 1];
        let c_gap = row_l1_norm(&(&t1.c_row - &t2.c_row));
        report.push(
            SUITE,
            format!("quotient_check.c(s={s})"),
            format_rational(&c_gap),
            format!("≤ {}", format_rational(eps)),
            &c_gap <= eps,
        );
        let e_half = (&t1.e_row - &t2.e_row).scale(&half);
        let w_gap = row_l1_norm(&(&w - &e_half));
        let half_eps = eps * &half;
        report.push(
            SUITE,
            format!("quotient_check.c_half(s={s})"),
            format_rational(&w_gap),
            format!("≤ {}", format_rational(&half_eps)),
            w_gap <= half_eps,
        );

        witness = &witness + &y;
        w_star.push(w);
        y_basis.push((c.gamma1, c.gamma2));
    }

    let m = w_star.len();
    let ell1_lower = if m == 0 {
        None
    } else {
        let sum = w_star.iter().fold(SparseRow::new(), |acc, w| &acc + w);
        let pairing = sum.dot(&witness);
        let norm = sup_norm(&witness);
        let lower = &pairing / &norm;
        let m_r = Rational::from_integer((m as i64).into());
        let floor = Rational::one() / space.c_bound();
        report.push(
            SUITE,
            "quotient_check.d.pairing",
            format_rational(&pairing),
            m,
            pairing == m_r,
        );
        report.push(
            SUITE,
            "quotient_check.d.lower",
            format_rational(&lower),
            format!("≥ {}", format_rational(&floor)),
            lower >= floor,
        );
        if m == 1 {
            report.info(SUITE, "quotient_check.d.c0_constant(m=1)", 1, "single vector");
        }
        Some(lower)
    };
    Ok((QuotientData { w_star, y_basis, ell1_lower }, report))
}

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::*;
    use crate::exact::ratio;
    use crate::x0::{build_space, Pool, X0Params};

    fn setup(q: u32) -> (Pool, TruncatedSpace) {
        let pool = Pool::exhaustive(X0Params::default(), q, &BigUint::from(10_000u32)).unwrap();
        let space = build_space(&pool, q).unwrap();
        (pool, space)
    }

    #[test]
    fn distances() {
        let (pool, space) = setup(2);
        let l1 = pool.level(1);
        let l2 = pool.level(2);
        assert_eq!(functional_distance(&space, l1[0], l1[1], 0).unwrap(), ratio(4, 5));
        assert_eq!(functional_distance(&space, l2[3], l2[3], 1).unwrap(), ratio(0, 1));
        // level 2 starts with (+{0} γ₀) for n = 1..9
        assert_eq!(functional_distance(&space, l2[7], l2[8], 1).unwrap(), ratio(1, 180));
        assert!(functional_distance(&space, l1[0], l2[0], 1).is_err());
    }

    #[test]
    fn search_q2() {
        let (pool, space) = setup(2);
        assert_eq!(space.c_bound(), &ratio(1, 1));
        let s = pair_search(&space, &[ratio(1, 10)]).unwrap();
        assert_eq!(s.exhausted_at, None);
        let c = &s.pairs[0];
        let l2 = pool.level(2);
        assert_eq!((c.gamma1, c.gamma2), (l2[7], l2[8]));
        assert_eq!(c.max_distance(), ratio(1, 180));
        assert!(s.recheck(&space).unwrap().passed());
    }

    #[test]
    fn search_q1_not_found() {
        let (_, space) = setup(1);
        let s = pair_search(&space, &[ratio(1, 10)]).unwrap();
        assert_eq!(s.exhausted_at, Some(1));
        assert!(matches!(s.require_complete(), Err(Error::PairNotFound { step: 1 })));
    }

    #[test]
    fn schedule_rejected() {
        let (_, space) = setup(1);
        assert!(matches!(pair_search(&space, &[ratio(1, 2)]), Err(Error::ScheduleRejected(_))));
        let d = default_schedule(&space);
        assert_eq!(d, vec![ratio(1, 16)]);
    }

    #[test]
    fn z_and_quotient() {
        let (_, space) = setup(2);
        let s = pair_search(&space, &[ratio(1, 10)]).unwrap();
        let (z, report) = build_z(&space, &s).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(z.dim(2), 174);
        assert_eq!(z.dim(1), 3);
        let (data, qr) = quotient_check(&space, &s, &z).unwrap();
        assert!(qr.passed(), "{qr}");
        assert_eq!(data.w_star.len(), 1);
        assert_eq!(qr.find("quotient_check.c(s=1)").next().unwrap().lhs, "1/180");
        assert_eq!(qr.find("quotient_check.c_half(s=1)").next().unwrap().lhs, "1/360");
    }

    #[test]
    fn no_pairs() {
        let (_, space) = setup(1);
        let s = PairSchedule { eps: vec![ratio(1, 10)], pairs: vec![], exhausted_at: Some(1) };
        let (z, report) = build_z(&space, &s).unwrap();
        assert!(report.passed());
        assert_eq!(z.dim(1), 3);
        for q in 0..=1 {
            for p in 0..=q {
                let t = &z.t_maps[&(q, p)];
                for g in &z.n_blocks[p as usize] {
                    let x = space.coords_of(&g.coeffs).unwrap();
                    assert_eq!(t.column(g.label), space.restrict(&x, q));
                }
            }
        }
    }
}
