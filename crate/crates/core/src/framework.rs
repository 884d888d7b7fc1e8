//! Truncated Bourgain-Delbaen spaces built from an arbitrary one-step
//! extension rule, and the structural checks every such space must pass.
//!
//! A truncation at level `Q` is modelled by `ℓ∞(Γ_Q)`: every vector is a
//! coordinate vector over `Γ_Q`, and `i_{p,Q}` plays the role of `i_p`.
//! Norms computed on `Γ_Q` coordinates are those of the truncated model;
//! report records say so where it matters.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{op_norm_inf, row_l1_norm, sup_norm, GammaId, Rational, SparseMatrix, SparseRow};
use crate::interval::{all_subintervals, Interval};
use crate::rank::rank;
use crate::report::VerificationReport;

const SUITE: &str = "framework";

/// The level sets `Δ_0, …, Δ_Q` and the rank map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStructure {
    levels: Vec<Vec<GammaId>>,
    rank: HashMap<GammaId, u32>,
}

impl LevelStructure {
    pub fn new(levels: Vec<Vec<GammaId>>) -> Result<Self> {
        let mut structure = LevelStructure { levels: Vec::new(), rank: HashMap::new() };
        for level in levels {
            structure.push(level)?;
        }
        if structure.levels.is_empty() {
            return Err(Error::BadStructure("no levels".into()));
        }
        Ok(structure)
    }

    fn push(&mut self, level: Vec<GammaId>) -> Result<()> {
        if level.is_empty() {
            return Err(Error::BadStructure(format!("level {} is empty", self.levels.len())));
        }
        let q = self.levels.len() as u32;
        for &id in &level {
            if self.rank.insert(id, q).is_some() {
                return Err(Error::BadStructure(format!("{id} appears twice")));
            }
        }
        self.levels.push(level);
        Ok(())
    }

    /// Truncation level `Q`.
    pub fn top(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn level(&self, q: u32) -> &[GammaId] {
        &self.levels[q as usize]
    }

    /// `Γ_q` in canonical order.
    pub fn gamma(&self, q: u32) -> Vec<GammaId> {
        self.levels[..=q as usize].iter().flatten().copied().collect()
    }

    pub fn gamma_len(&self, q: u32) -> usize {
        self.levels[..=q as usize].iter().map(Vec::len).sum()
    }

    pub fn rank(&self, id: GammaId) -> Option<u32> {
        self.rank.get(&id).copied()
    }

    pub fn contains(&self, id: GammaId) -> bool {
        self.rank.contains_key(&id)
    }

    pub fn all(&self) -> Vec<GammaId> {
        self.gamma(self.top())
    }
}

/// One-step extension data: the row of `c_γ*` over `Γ_{rank(γ)-1}` for every
/// `γ` of positive rank.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtensionRule {
    pub rows: BTreeMap<GammaId, SparseRow>,
}

/// `e_γ*`, `c_γ*` and `d_γ* = e_γ* − c_γ*` as rows over `Γ_Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualTriple {
    pub gamma: GammaId,
    pub e_row: SparseRow,
    pub c_row: SparseRow,
    pub d_row: SparseRow,
}

/// Certificate for the lower ℓ₁ estimate of `Σ λ_γ e_γ*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ell1Witness {
    /// `i_q(Σ sgn λ_γ e_γ)` over `Γ_Q`.
    pub witness: SparseRow,
    /// `Σ λ_γ · witness(γ)`, equal to `Σ |λ_γ|`.
    pub pairing: Rational,
    pub witness_norm: Rational,
    /// `pairing / witness_norm`; a lower bound of `‖Σ λ_γ e_γ*‖` on the truncation.
    pub lower_bound: Rational,
    /// `Σ |λ_γ|`, the coordinate ℓ₁ norm and an upper bound.
    pub upper_bound: Rational,
}

#[derive(Debug, Clone)]
pub struct FddOutcome {
    pub report: VerificationReport,
    /// Largest `‖P_[0,p] x‖ / ‖x‖` seen.
    pub max_initial_ratio: Rational,
    /// Largest `‖P_E x‖ / ‖x‖` seen.
    pub max_interval_ratio: Rational,
}

/// A truncated Bourgain-Delbaen space together with all composed extension
/// operators `i_{p,q}`, `0 ≤ p ≤ q ≤ Q`.
#[derive(Debug, Clone)]
pub struct TruncatedSpace {
    structure: LevelStructure,
    rule: ExtensionRule,
    /// `ext[q][p] = i_{p,q}`
    ext: Vec<Vec<SparseMatrix>>,
    /// `c_bounds[q] = max_p ‖i_{p,q}‖`
    c_bounds: Vec<Rational>,
}

/// Builds all `i_{p,q}` from the one-step rule.
pub fn build_truncated(structure: LevelStructure, rule: ExtensionRule) -> Result<TruncatedSpace> {
    for &id in structure.level(0) {
        if rule.rows.get(&id).is_some_and(|r| !r.is_empty()) {
            return Err(Error::InadmissibleRule(id));
        }
    }
    if let Some(stray) = rule.rows.keys().find(|id| !structure.contains(**id)) {
        return Err(Error::UnknownGamma(stray.to_string()));
    }
    let mut space = TruncatedSpace::base(structure.level(0).to_vec())?;
    for q in 1..=structure.top() {
        let ids = structure.level(q).to_vec();
        let rows = ids
            .iter()
            .map(|id| (*id, rule.rows.get(id).cloned().unwrap_or_default()))
            .collect();
        space.push_level(ids, rows)?;
    }
    Ok(space)
}

impl TruncatedSpace {
    /// The space truncated at level 0: `i_{0,0}` is the identity.
    pub fn base(level0: Vec<GammaId>) -> Result<Self> {
        let structure = LevelStructure::new(vec![level0])?;
        let id = SparseMatrix::identity(structure.gamma(0));
        Ok(TruncatedSpace {
            structure,
            rule: ExtensionRule::default(),
            ext: vec![vec![id]],
            c_bounds: vec![Rational::one()],
        })
    }

    /// Appends `Δ_{Q+1}` with the given rows of `c_γ*` over `Γ_Q`.
    pub fn push_level(&mut self, ids: Vec<GammaId>, rows: BTreeMap<GammaId, SparseRow>) -> Result<()> {
        let q = self.top();
        for (&id, row) in &rows {
            if !ids.contains(&id) {
                return Err(Error::UnknownGamma(id.to_string()));
            }
            if row.ids().any(|c| self.structure.rank(c).is_none_or(|r| r > q)) {
                return Err(Error::InadmissibleRule(id));
            }
        }
        self.structure.push(ids.clone())?;
        let new_q = q + 1;
        let old_gamma = self.structure.gamma(q);
        let new_gamma = self.structure.gamma(new_q);

        let mut step_rows: BTreeMap<GammaId, SparseRow> =
            old_gamma.iter().map(|&id| (id, SparseRow::unit(id))).collect();
        for &id in &ids {
            let row = rows.get(&id).cloned().unwrap_or_default();
            step_rows.insert(id, row.clone());
            self.rule.rows.insert(id, row);
        }
        let step = SparseMatrix::new(old_gamma, new_gamma.clone(), step_rows)?;

        let mut column: Vec<SparseMatrix> =
            (0..new_q).map(|p| step.compose(&self.ext[q as usize][p as usize])).collect();
        column.push(SparseMatrix::identity(new_gamma));
        let c = column.iter().map(op_norm_inf).max().unwrap_or_else(Rational::one);
        self.ext.push(column);
        self.c_bounds.push(c);
        Ok(())
    }

    pub fn structure(&self) -> &LevelStructure {
        &self.structure
    }

    pub fn rule(&self) -> &ExtensionRule {
        &self.rule
    }

    pub fn top(&self) -> u32 {
        self.structure.top()
    }

    pub fn rank(&self, id: GammaId) -> Result<u32> {
        self.structure.rank(id).ok_or_else(|| Error::UnknownGamma(id.to_string()))
    }

    /// `i_{p,q}`
    pub fn ext(&self, p: u32, q: u32) -> &SparseMatrix {
        &self.ext[q as usize][p as usize]
    }

    /// Mutable access to `i_{p,q}`, for fault injection.
    pub fn ext_mut(&mut self, p: u32, q: u32) -> &mut SparseMatrix {
        &mut self.ext[q as usize][p as usize]
    }

    /// `max_p ‖i_{p,Q}‖`
    pub fn c_bound(&self) -> &Rational {
        &self.c_bounds[self.top() as usize]
    }

    /// `max_p ‖i_{p,q}‖` of the truncation at `q`.
    pub fn c_bound_at(&self, q: u32) -> &Rational {
        &self.c_bounds[q as usize]
    }

    /// `r_p`
    pub fn restrict(&self, x: &SparseRow, p: u32) -> SparseRow {
        x.restrict(|id| self.structure.rank(id).is_some_and(|r| r <= p))
    }

    /// `i_{p,Q}(y)` for `y` over `Γ_p`.
    pub fn extend(&self, p: u32, y: &SparseRow) -> SparseRow {
        self.ext(p, self.top()).apply(y)
    }

    /// `P_{[0,p]} x = i_{p,Q} r_p x`
    fn initial_projection(&self, p: u32, x: &SparseRow) -> SparseRow {
        self.extend(p, &self.restrict(x, p))
    }

    /// The BD projection `P_E x = i_hi r_hi x − i_{lo-1} r_{lo-1} x`.
    pub fn bd_projection(&self, e: Interval, x: &SparseRow) -> Result<SparseRow> {
        let top = self.top();
        if e.lo > e.hi || e.hi > top {
            return Err(Error::BadInterval { lo: e.lo, hi: e.hi, max: top });
        }
        let upper = self.initial_projection(e.hi, x);
        if e.lo == 0 {
            Ok(upper)
        } else {
            Ok(&upper - &self.initial_projection(e.lo - 1, x))
        }
    }

    /// Coordinates of the basis vector `d_γ = i_{rank γ}(e_γ)` over `Γ_Q`.
    pub fn d_vector(&self, id: GammaId) -> Result<SparseRow> {
        let r = self.rank(id)?;
        Ok(self.ext(r, self.top()).column(id))
    }

    /// Coordinates of `Σ a_γ d_γ`.
    pub fn coords_of(&self, coeffs: &SparseRow) -> Result<SparseRow> {
        let mut out = SparseRow::new();
        for (id, a) in coeffs.iter() {
            out.add_scaled(a, &self.d_vector(id)?);
        }
        Ok(out)
    }

    pub fn dual_triple(&self, id: GammaId) -> Result<DualTriple> {
        self.rank(id)?;
        let e_row = SparseRow::unit(id);
        let c_row = self.rule.rows.get(&id).cloned().unwrap_or_default();
        let d_row = &e_row - &c_row;
        Ok(DualTriple { gamma: id, e_row, c_row, d_row })
    }

    pub fn dual_triples(&self) -> BTreeMap<GammaId, DualTriple> {
        self.structure
            .all()
            .into_iter()
            .map(|id| (id, self.dual_triple(id).expect("member of the structure")))
            .collect()
    }

    /// Verifies `i_p = i_q ∘ r_q ∘ i_p` on every basis vector of `ℓ∞(Γ_p)`,
    /// for the operators into every truncation `Γ_t`, together with the
    /// extension property and `i_{p,t} = i_{t-1,t} ∘ i_{p,t-1}`.
    pub fn compatibility_check(&self) -> VerificationReport {
        let mut report = VerificationReport::new();
        let top = self.top();
        for t in 0..=top {
            for p in 0..=t {
                let m = self.ext(p, t);
                let bad: Vec<GammaId> = self
                    .structure
                    .gamma(p)
                    .into_iter()
                    .filter(|&id| m.row(id) != SparseRow::unit(id))
                    .collect();
                report.push(
                    SUITE,
                    format!("compatibility_check.extension_property(p={p},t={t})"),
                    describe_failures(&bad),
                    "rows of Γ_p are unit rows",
                    bad.is_empty(),
                );
            }
            for p in 0..t {
                for q in (p + 1)..=t {
                    let lhs = self.ext(p, t);
                    let gamma_q = self.structure.gamma(q);
                    let restricted_rows =
                        gamma_q.iter().map(|&id| (id, lhs.row(id))).collect::<BTreeMap<_, _>>();
                    let restricted = SparseMatrix::new(self.structure.gamma(p), gamma_q, restricted_rows)
                        .expect("rows drawn from i_{p,t}");
                    let rhs = self.ext(q, t).compose(&restricted);
                    let bad: Vec<GammaId> = self
                        .structure
                        .gamma(p)
                        .into_iter()
                        .filter(|&col| lhs.column(col) != rhs.column(col))
                        .collect();
                    report.push(
                        SUITE,
                        format!("compatibility_check(p={p},q={q},t={t})"),
                        describe_failures(&bad),
                        "i_p = i_q∘r_q∘i_p on every basis column",
                        bad.is_empty(),
                    );
                }
            }
            if t >= 2 {
                for p in 0..(t - 1) {
                    let composed = self.ext(t - 1, t).compose(self.ext(p, t - 1));
                    let ok = &composed == self.ext(p, t);
                    report.push(
                        SUITE,
                        format!("compatibility_check.composition(p={p},q={t})"),
                        if ok { "equal".to_string() } else { "differs".to_string() },
                        format!("i_{{{p},{t}}} = i_{{{},{t}}}∘i_{{{p},{}}}", t - 1, t - 1),
                        ok,
                    );
                }
            }
        }
        report
    }

    /// For each sample (coordinates over `Γ_Q`) checks
    /// `‖P_[0,p] x‖ ≤ c·‖x‖` and `‖P_E x‖ ≤ 2c·‖x‖`, `c = c_bound`.
    pub fn fdd_check(&self, samples: &[SparseRow]) -> FddOutcome {
        let c = self.c_bound().clone();
        let two_c = &c * Rational::from_integer(2.into());
        let top = self.top();
        let intervals = all_subintervals(top);
        let mut report = VerificationReport::new();
        let mut max_initial = Rational::zero();
        let mut max_interval = Rational::zero();
        for (i, x) in samples.iter().enumerate() {
            let norm = sup_norm(x);
            let mut ok = true;
            let mut worst_initial = Rational::zero();
            let mut worst_interval = Rational::zero();
            for p in 0..=top {
                let v = sup_norm(&self.initial_projection(p, x));
                ok &= v <= &c * &norm;
                if !norm.is_zero() {
                    worst_initial = worst_initial.max(v / &norm);
                }
            }
            for e in &intervals {
                let v = sup_norm(&self.bd_projection(*e, x).expect("interval inside [0,Q]"));
                ok &= v <= &two_c * &norm;
                if !norm.is_zero() {
                    worst_interval = worst_interval.max(v / &norm);
                }
            }
            report.push(
                SUITE,
                format!("fdd_check[sample={i}]"),
                format!("max ‖P_[0,p]x‖/‖x‖={worst_initial}; max ‖P_E x‖/‖x‖={worst_interval}"),
                format!("≤ {c}; ≤ {two_c} (truncated norms)"),
                ok,
            );
            max_initial = max_initial.max(worst_initial);
            max_interval = max_interval.max(worst_interval);
        }
        FddOutcome { report, max_initial_ratio: max_initial, max_interval_ratio: max_interval }
    }

    /// Biorthogonality, row-space equality and the span property, using the
    /// space's own dual rows.
    pub fn duality_checks(&self) -> VerificationReport {
        self.duality_checks_with(&self.dual_triples())
    }

    /// Same as [`duality_checks`](Self::duality_checks) with caller-supplied
    /// rows (so that corrupted rows can be checked).
    pub fn duality_checks_with(&self, triples: &BTreeMap<GammaId, DualTriple>) -> VerificationReport {
        let mut report = VerificationReport::new();
        let all = self.structure.all();
        let vectors: Vec<(GammaId, SparseRow)> =
            all.iter().map(|&id| (id, self.d_vector(id).expect("member"))).collect();

        for &xi in &all {
            let d_row = &triples[&xi].d_row;
            let mut mismatches = Vec::new();
            for (gamma, d) in &vectors {
                let value = d_row.dot(d);
                let expected = if *gamma == xi { Rational::one() } else { Rational::zero() };
                if value != expected {
                    mismatches.push(format!("d*_{xi}(d_{gamma})={value}"));
                }
            }
            let lhs = if mismatches.is_empty() {
                format!("{} pairings exact", vectors.len())
            } else {
                mismatches.join(" ")
            };
            report.push(SUITE, format!("duality_checks.biorthogonal({xi})"), lhs, "δ_{ξγ}", mismatches.is_empty());
        }

        for q in 0..=self.top() {
            let gamma_q = self.structure.gamma(q);
            let d_rows: Vec<SparseRow> = gamma_q.iter().map(|id| triples[id].d_row.clone()).collect();
            let e_rows: Vec<SparseRow> = gamma_q.iter().map(|id| triples[id].e_row.clone()).collect();
            let rd = rank(&d_rows);
            let re = rank(&e_rows);
            let joint: Vec<SparseRow> = d_rows.iter().chain(e_rows.iter()).cloned().collect();
            let rj = rank(&joint);
            let n = gamma_q.len();
            report.push(
                SUITE,
                format!("duality_checks.row_space(q={q})"),
                format!("rank d*={rd}, rank e*={re}, rank joint={rj}"),
                format!("all equal #Γ_{q}={n}"),
                rd == n && re == n && rj == n,
            );
        }

        for q in 0..self.top() {
            let gamma_q = self.structure.gamma(q);
            let e_rows: Vec<SparseRow> = gamma_q.iter().map(|id| triples[id].e_row.clone()).collect();
            let base = rank(&e_rows);
            let mut outside = Vec::new();
            for &gamma in self.structure.level(q + 1) {
                let mut rows = e_rows.clone();
                rows.push(triples[&gamma].c_row.clone());
                if rank(&rows) != base {
                    outside.push(gamma);
                }
            }
            report.push(
                SUITE,
                format!("duality_checks.span(q={q})"),
                describe_failures(&outside),
                format!("c_γ* ∈ span{{e_δ*: δ∈Γ_{q}}} for γ∈Δ_{}", q + 1),
                outside.is_empty(),
            );
        }
        report
    }

    /// Witness `i_q(Σ sgn λ_γ e_γ)` for `‖Σ λ_γ e_γ*‖ ≥ Σ|λ_γ| / c_bound`.
    pub fn ell1_lower_witness(&self, lambda: &[(GammaId, Rational)]) -> Result<Ell1Witness> {
        if lambda.is_empty() || lambda.iter().all(|(_, l)| l.is_zero()) {
            return Err(Error::BadInput("empty or zero coefficient family".into()));
        }
        let mut q = 0;
        let mut y = SparseRow::new();
        for (id, l) in lambda {
            q = q.max(self.rank(*id)?);
            y.set(*id, l.signum());
        }
        let witness = self.extend(q, &y);
        let pairing = lambda.iter().fold(Rational::zero(), |acc, (id, l)| acc + l * witness.get(*id));
        let witness_norm = sup_norm(&witness);
        let lower_bound = &pairing / &witness_norm;
        let upper_bound = row_l1_norm(&SparseRow::from_entries(lambda.iter().cloned()));
        Ok(Ell1Witness { witness, pairing, witness_norm, lower_bound, upper_bound })
    }
}

fn describe_failures(bad: &[GammaId]) -> String {
    if bad.is_empty() {
        "none failing".to_string()
    } else {
        let ids: Vec<String> = bad.iter().map(ToString::to_string).collect();
        format!("failing columns {}", ids.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn g(i: u32) -> GammaId {
        GammaId(i)
    }

    /// Levels {0}, {1,2}, {3}: c_1 = 1/2 e_0, c_2 = -1/3 e_0, c_3 = 1/4 e_1 + 1/4 e_2.
    fn toy() -> TruncatedSpace {
        let structure = LevelStructure::new(vec![vec![g(0)], vec![g(1), g(2)], vec![g(3)]]).unwrap();
        let mut rule = ExtensionRule::default();
        rule.rows.insert(g(1), SparseRow::from_entries([(g(0), ratio(1, 2))]));
        rule.rows.insert(g(2), SparseRow::from_entries([(g(0), ratio(-1, 3))]));
        rule.rows.insert(g(3), SparseRow::from_entries([(g(1), ratio(1, 4)), (g(2), ratio(1, 4))]));
        build_truncated(structure, rule).unwrap()
    }

    #[test]
    fn single_level_space() {
        let structure = LevelStructure::new(vec![vec![g(0)]]).unwrap();
        let space = build_truncated(structure, ExtensionRule::default()).unwrap();
        assert_eq!(space.ext(0, 0), &SparseMatrix::identity(vec![g(0)]));
        assert_eq!(space.c_bound(), &int(1));
    }

    #[test]
    fn composed_rows() {
        let space = toy();
        // row 3 of i_{0,2} = 1/4 (1/2) + 1/4 (-1/3) = 1/24
        assert_eq!(space.ext(0, 2).row(g(3)), SparseRow::from_entries([(g(0), ratio(1, 24))]));
        assert!(space.compatibility_check().passed());
    }

    #[test]
    fn escaping_rule_rejected() {
        let structure = LevelStructure::new(vec![vec![g(0)], vec![g(1)]]).unwrap();
        let mut rule = ExtensionRule::default();
        rule.rows.insert(g(1), SparseRow::unit(g(1)));
        assert_eq!(build_truncated(structure, rule).unwrap_err(), Error::InadmissibleRule(g(1)));
    }

    #[test]
    fn bad_structure_rejected() {
        assert!(LevelStructure::new(vec![vec![g(0)], vec![]]).is_err());
        assert!(LevelStructure::new(vec![vec![g(0)], vec![g(0)]]).is_err());
    }

    #[test]
    fn projection_rejects_out_of_range() {
        let space = toy();
        assert!(matches!(
            space.bd_projection(Interval::new(1, 3), &SparseRow::new()),
            Err(Error::BadInterval { .. })
        ));
    }

    #[test]
    fn projections_are_idempotent_and_nested() {
        let space = toy();
        let x = SparseRow::from_entries([(g(0), ratio(3, 7)), (g(1), int(-2)), (g(2), ratio(1, 5)), (g(3), int(4))]);
        for e in all_subintervals(2) {
            let pe = space.bd_projection(e, &x).unwrap();
            assert_eq!(space.bd_projection(e, &pe).unwrap(), pe);
            for f in all_subintervals(2) {
                if let Some(meet) = e.intersect(&f) {
                    let pf = space.bd_projection(f, &x).unwrap();
                    assert_eq!(space.bd_projection(e, &pf).unwrap(), space.bd_projection(meet, &x).unwrap());
                }
            }
        }
        assert_eq!(space.bd_projection(Interval::new(0, 2), &x).unwrap(), x);
    }

    #[test]
    fn toy_duality() {
        let space = toy();
        assert!(space.duality_checks().passed());
        let t = space.dual_triple(g(3)).unwrap();
        assert_eq!(t.d_row, &t.e_row - &t.c_row);
        assert!(matches!(space.dual_triple(g(9)), Err(Error::UnknownGamma(_))));
    }

    #[test]
    fn mutated_operator_fails_compatibility() {
        let mut space = toy();
        let mut row = space.ext(0, 2).row(g(3));
        row.add_at(g(0), &int(1));
        space.ext_mut(0, 2).set_row(g(3), row);
        let report = space.compatibility_check();
        assert!(!report.passed());
        assert!(report.failures().any(|r| r.check.contains("t=2") || r.check.contains("q=2")));
    }

    #[test]
    fn ell1_witness_rejects_empty() {
        let space = toy();
        assert!(space.ell1_lower_witness(&[]).is_err());
        assert!(space.ell1_lower_witness(&[(g(1), int(0))]).is_err());
    }
}
