//! Exact evaluation of `e_γ* ∘ P_E` on vectors given in the basis `(d_γ)`,
//! certified norm intervals and the quantitative checks built on them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, GammaId, Rational, SparseRow};
use crate::framework::TruncatedSpace;
use crate::interval::Interval;
use crate::report::VerificationReport;
use crate::x0::{validate_tuple, Entry, Pool, Sign, TupleCode};

/// `Σ a_γ d_γ`, ids drawn from a pool.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockVector {
    coeffs: SparseRow,
    /// rank of every id in `coeffs`
    ranks: Vec<(GammaId, u32)>,
}

impl BlockVector {
    pub fn new(pool: &Pool, coeffs: SparseRow) -> Result<Self> {
        let ranks = coeffs.ids().map(|id| Ok((id, pool.rank(id)?))).collect::<Result<_>>()?;
        Ok(BlockVector { coeffs, ranks })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `d_γ`
    pub fn basis(pool: &Pool, id: GammaId) -> Result<Self> {
        Self::new(pool, SparseRow::unit(id))
    }

    pub fn coeffs(&self) -> &SparseRow {
        &self.coeffs
    }

    pub fn coeff(&self, id: GammaId) -> Rational {
        self.coeffs.get(id)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let coeffs = self.coeffs.scale(factor);
        let ranks = self.ranks.iter().filter(|(id, _)| !coeffs.get(*id).is_zero()).copied().collect();
        BlockVector { coeffs, ranks }
    }

    pub fn add(&self, other: &BlockVector) -> Self {
        let coeffs = &self.coeffs + &other.coeffs;
        let mut ranks: Vec<(GammaId, u32)> = self.ranks.iter().chain(&other.ranks).copied().collect();
        ranks.sort();
        ranks.dedup();
        ranks.retain(|(id, _)| !coeffs.get(*id).is_zero());
        BlockVector { coeffs, ranks }
    }

    pub fn sum<'a>(parts: impl IntoIterator<Item = &'a BlockVector>) -> Self {
        parts.into_iter().fold(BlockVector::zero(), |acc, v| acc.add(v))
    }

    /// Ranks present: the range with respect to the FDD.
    pub fn fdd_range(&self) -> BTreeSet<u32> {
        self.ranks.iter().map(|(_, r)| *r).collect()
    }

    pub fn min_rank(&self) -> Option<u32> {
        self.ranks.iter().map(|(_, r)| *r).min()
    }

    pub fn max_rank(&self) -> Option<u32> {
        self.ranks.iter().map(|(_, r)| *r).max()
    }

    /// `[min rank, max rank]`.
    pub fn window(&self) -> Option<Interval> {
        Some(Interval::new(self.min_rank()?, self.max_rank()?))
    }

    /// Smallest and largest `(rank, id)` basis keys.
    pub fn basis_span(&self) -> Option<((u32, GammaId), (u32, GammaId))> {
        let keys = self.ranks.iter().map(|(id, r)| (*r, *id));
        Some((keys.clone().min()?, keys.max()?))
    }

    /// Lower bound on the 1-based basis position of the first vector in the
    /// support: `1 + #Γ_{r-1}` for the least rank `r`.
    pub fn basis_floor(&self, pool: &Pool) -> BigUint {
        match self.min_rank() {
            None | Some(0) => BigUint::one(),
            Some(r) => BigUint::one() + pool.gamma_count(r - 1),
        }
    }

    /// Coordinates over `Γ_Q`.
    pub fn coords(&self, space: &TruncatedSpace) -> Result<SparseRow> {
        space.coords_of(&self.coeffs)
    }

    /// `digest coeff` records.
    pub fn to_records(&self, pool: &Pool) -> Result<Vec<String>> {
        self.coeffs.iter().map(|(id, a)| Ok(format!("{} {}", pool.digest(id)?, format_rational(a)))).collect()
    }

    pub fn from_records<'a>(pool: &Pool, lines: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut coeffs = SparseRow::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(id), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("vector record {line:?}")));
            };
            coeffs.add_at(pool.by_digest(id)?, &parse_rational(value)?);
        }
        Self::new(pool, coeffs)
    }
}

/// `e_γ* ∘ P_E (x)` for a fixed `x`, memoized on `(γ, E ∩ relevant ranks)`.
pub struct Evaluator<'a> {
    pool: &'a Pool,
    x: &'a BlockVector,
    weight: Rational,
    range: Option<Interval>,
    memo: HashMap<(GammaId, Interval), Rational>,
}

impl<'a> Evaluator<'a> {
    pub fn new(pool: &'a Pool, x: &'a BlockVector) -> Self {
        Evaluator { pool, x, weight: pool.params().theta_over_n(), range: x.window(), memo: HashMap::new() }
    }

    /// Only ranks in `E`, in the range of `x` and not above `top` contribute.
    fn clip(&self, e: Interval, top: u32) -> Option<Interval> {
        let range = self.range?;
        let hi = e.hi.min(top).min(range.hi);
        let lo = e.lo.max(range.lo);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    pub fn eval(&mut self, id: GammaId, e: Interval) -> Result<Rational> {
        let rank = self.pool.rank(id)?;
        let Some(e) = self.clip(e, rank) else {
            return Ok(Rational::zero());
        };
        if let Some(v) = self.memo.get(&(id, e)) {
            return Ok(v.clone());
        }
        let mut value = if e.contains(rank) { self.x.coeff(id) } else { Rational::zero() };
        if let Some(code) = self.pool.code(id)? {
            let code = code.clone();
            value += self.eval_tail(&code, e)?;
        }
        self.memo.insert((id, e), value.clone());
        Ok(value)
    }

    /// `c_γ* ∘ P_E (x)` for a code that need not be interned.
    pub fn eval_tail(&mut self, code: &TupleCode, e: Interval) -> Result<Rational> {
        let mut value = match code.base() {
            Some(base) => self.eval(base, e)?,
            None => Rational::zero(),
        };
        let mut sum = Rational::zero();
        for entry in &code.entries {
            if let Some(inner) = e.intersect(&entry.interval) {
                let v = self.eval(entry.eta, inner)?;
                match entry.sign {
                    Sign::Plus => sum += v,
                    Sign::Minus => sum -= v,
                }
            }
        }
        if !sum.is_zero() {
            value += &self.weight * sum / Rational::from_integer(code.n.clone().into());
        }
        Ok(value)
    }

    /// `e_γ* ∘ P_E (x)` for a code outside the pool (so `x` has no `d_γ` part).
    pub fn eval_code(&mut self, code: &TupleCode, e: Interval) -> Result<Rational> {
        if self.clip(e, code.rank).is_none() {
            return Ok(Rational::zero());
        }
        self.eval_tail(code, e)
    }
}

/// `e_γ* ∘ P_E (x)`
pub fn eval(pool: &Pool, id: GammaId, e: Interval, x: &BlockVector) -> Result<Rational> {
    Evaluator::new(pool, x).eval(id, e)
}

/// `max_δ |e_δ*(x)|` over the pool with its smallest-id argmax.
pub fn pool_seminorm(pool: &Pool, x: &BlockVector) -> Result<(Rational, GammaId)> {
    max_abs_over(pool, x, &pool.ids().collect::<Vec<_>>(), Interval::ALL)
}

fn max_abs_over(pool: &Pool, x: &BlockVector, ids: &[GammaId], e: Interval) -> Result<(Rational, GammaId)> {
    let first = ids.first().copied().unwrap_or(pool.gamma0());
    if x.is_zero() {
        return Ok((Rational::zero(), first));
    }
    let chunk = ids.len().div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
    let partial: Vec<Result<(Rational, GammaId)>> = ids
        .par_chunks(chunk)
        .map(|ids| {
            let mut ev = Evaluator::new(pool, x);
            let mut best = (Rational::zero(), ids[0]);
            for &id in ids {
                let v = ev.eval(id, e)?.abs();
                if v > best.0 {
                    best = (v, id);
                }
            }
            Ok(best)
        })
        .collect();
    let mut best = (Rational::zero(), first);
    for p in partial {
        let (v, id) = p?;
        if v > best.0 || (v == best.0 && id < best.1) {
            best = (v, id);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperMethod {
    /// `‖x‖ ≤ C ‖r_q x‖` with `Γ_q` fully available.
    RestrictionBound,
    /// `‖x‖ ≤ C Σ |a_γ|`.
    TriangleBound,
}

impl fmt::Display for UpperMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpperMethod::RestrictionBound => "restriction-bound",
            UpperMethod::TriangleBound => "triangle-bound",
        })
    }
}

/// `lower ≤ ‖x‖ ≤ upper` in the infinite space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormInterval {
    pub lower: Rational,
    pub upper: Rational,
    pub lower_witness: GammaId,
    pub upper_method: UpperMethod,
}

impl fmt::Display for NormInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lower), format_rational(&self.upper))
    }
}

/// Lower bound from the pool, upper bound from `C = N/(N − 2θ)`.
pub fn norm_interval(pool: &Pool, x: &BlockVector) -> Result<NormInterval> {
    let (lower, lower_witness) = pool_seminorm(pool, x)?;
    let c = pool.params().c_const();
    let triangle = x.coeffs().iter().map(|(_, a)| a.abs()).fold(Rational::zero(), |s, a| s + a) * &c;
    let mut out = NormInterval { lower, upper: triangle, lower_witness, upper_method: UpperMethod::TriangleBound };
    if let Some(q) = x.max_rank() {
        if q <= pool.complete_through() {
            let ids: Vec<GammaId> = pool.ids().filter(|id| pool.rank(*id).is_ok_and(|r| r <= q)).collect();
            let (coord_max, _) = max_abs_over(pool, x, &ids, Interval::ALL)?;
            let restriction = coord_max * &c;
            if restriction <= out.upper {
                out.upper = restriction;
                out.upper_method = UpperMethod::RestrictionBound;
            }
        }
    }
    Ok(out)
}

/// `(1/n) Σ ε_i e_{η_i}* ∘ P_{E_i}`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Average {
    pub n: BigUint,
    pub entries: Vec<Entry>,
}

impl Average {
    pub fn value(&self, pool: &Pool, x: &BlockVector) -> Result<Rational> {
        let mut ev = Evaluator::new(pool, x);
        let mut sum = Rational::zero();
        for e in &self.entries {
            let v = ev.eval(e.eta, e.interval)?;
            sum += Rational::from_integer(e.sign.as_i64().into()) * v;
        }
        Ok(sum / Rational::from_integer(self.n.clone().into()))
    }
}

/// Checks that blocks are successive in the basis order `(rank, id)`.
fn successive(blocks: &[BlockVector]) -> Result<()> {
    let mut prev: Option<(u32, GammaId)> = None;
    for (i, b) in blocks.iter().enumerate() {
        let Some((lo, hi)) = b.basis_span() else {
            return Err(Error::HypothesisViolated(format!("block {i} is zero")));
        };
        if prev.is_some_and(|p| p >= lo) {
            return Err(Error::HypothesisViolated(format!("block {i} is not after block {}", i - 1)));
        }
        prev = Some(hi);
    }
    Ok(())
}

fn certify_unit_ball(pool: &Pool, blocks: &[BlockVector]) -> Result<()> {
    for (i, b) in blocks.iter().enumerate() {
        let bound = norm_interval(pool, b)?;
        if bound.upper > Rational::one() {
            return Err(Error::HypothesisViolated(format!(
                "block {i} has certified norm bound {}, above 1",
                format_rational(&bound.upper)
            )));
        }
    }
    Ok(())
}

/// `|(1/n) Σ ε_i e_{η_i}* ∘ P_{E_i} (Σ x_j)| ≤ 4N/(N − 2θ)` for successive
/// blocks of norm at most one and `n ≥ max{m², k}`.
pub fn avg_bound_check(pool: &Pool, blocks: &[BlockVector], avg: &Average, tag: &str) -> Result<VerificationReport> {
    let k = avg.entries.len();
    let m = blocks.len();
    if k == 0 {
        return Err(Error::HypothesisViolated("average has no entries".into()));
    }
    let need = BigUint::from((m * m).max(k));
    if avg.n < need {
        return Err(Error::HypothesisViolated(format!("n = {} < max(m², k) = {need}", avg.n)));
    }
    for (i, pair) in avg.entries.windows(2).enumerate() {
        if !pair[0].interval.precedes(&pair[1].interval) {
            return Err(Error::HypothesisViolated(format!("intervals not successive at entry {}", i + 1)));
        }
    }
    for (i, e) in avg.entries.iter().enumerate() {
        if !e.interval.contains(pool.rank(e.eta)?) {
            return Err(Error::HypothesisViolated(format!("rank of eta outside its interval at entry {i}")));
        }
    }
    successive(blocks)?;
    certify_unit_ball(pool, blocks)?;

    let value = avg.value(pool, &BlockVector::sum(blocks))?.abs();
    let bound = pool.params().average_const();
    let mut report = VerificationReport::new();
    report.push(
        "norms",
        format!("avg_bound_check[{tag}]"),
        format_rational(&value),
        format_rational(&bound),
        value <= bound,
    );
    Ok(report)
}

/// `‖Σ u_i‖ ≥ pool seminorm` and the bound `K_{N,θ}` for successive
/// blocks of norm at most one with `m ≤ min supp u_1`.
pub fn asymptotic_c0_check(pool: &Pool, family: &[BlockVector], tag: &str) -> Result<VerificationReport> {
    let Some(first) = family.first() else {
        return Err(Error::HypothesisViolated("empty family".into()));
    };
    successive(family)?;
    certify_unit_ball(pool, family)?;
    let floor = first.basis_floor(pool);
    if BigUint::from(family.len()) > floor {
        return Err(Error::HypothesisViolated(format!("m = {} exceeds min supp floor {floor}", family.len())));
    }
    let (value, _) = pool_seminorm(pool, &BlockVector::sum(family))?;
    let k = pool.params().k_const();
    let mut report = VerificationReport::new();
    report.push(
        "norms",
        format!("asymptotic_c0_check[{tag}]"),
        format_rational(&value),
        format_rational(&k),
        value <= k,
    );
    Ok(report)
}

/// The next TypeII step over `base`: the smallest admissible weight and the
/// gain it allows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub base: GammaId,
    pub base_rank: u32,
    pub base_age: u32,
    /// `(#Γ_{rank base})²`
    pub n_floor: BigUint,
    /// `(θ/N) · k_max / n_floor`, where `k_max = 1` is the number of levels
    /// available at the least admissible rank `rank base + 2`.
    pub max_gain: Rational,
}

pub fn type_ii_chain_step(pool: &Pool, base: GammaId) -> Result<ChainStep> {
    let member = pool.member(base)?;
    if member.rank == 0 {
        return Err(Error::BadBaseRank { base_rank: 0, max: -1 });
    }
    if member.age >= pool.params().n() {
        return Err(Error::AgeExhausted(member.age));
    }
    let g = pool.gamma_count(member.rank);
    let n_floor = &g * &g;
    let max_gain = pool.params().theta_over_n() / Rational::from_integer(n_floor.clone().into());
    Ok(ChainStep { base, base_rank: member.rank, base_age: member.age, n_floor, max_gain })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub gamma: TupleCode,
    /// `e_γ*(Σ x_k)`
    pub achieved: Rational,
    /// `(θ/N)(1/k) Σ |e_{δ_k}* ∘ P_{E_k}(x_k)|`
    pub predicted: Rational,
    pub admissible: bool,
    /// Witness `δ_k` and window `E_k` per block.
    pub witnesses: Vec<(GammaId, Interval, Rational)>,
    /// The TypeII step that would continue from `γ`, with its weight floor.
    pub chain: ChainStepFloor,
}

/// Weight floor for a TypeII tuple over a base of the given rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStepFloor {
    pub base_rank: u32,
    pub n_floor: BigUint,
}

/// One TypeI step of the lower estimate for skipped blocks of norm at least one.
pub fn build_theta_witness(pool: &Pool, blocks: &[BlockVector]) -> Result<WitnessReport> {
    if blocks.is_empty() {
        return Err(Error::BadInput("no blocks".into()));
    }
    let mut windows = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let w = b.window().ok_or(Error::NotNormalized(i))?;
        if let Some(&prev) = windows.last() {
            let prev: Interval = prev;
            if prev.hi + 1 >= w.lo {
                return Err(Error::NotSkipped(format!("block {} ends at level {}, block {i} starts at {}", i - 1, prev.hi, w.lo)));
            }
        }
        windows.push(w);
    }

    let mut witnesses = Vec::new();
    for (i, (b, w)) in blocks.iter().zip(&windows).enumerate() {
        let ids: Vec<GammaId> = pool.ids().filter(|id| pool.rank(*id).is_ok_and(|r| w.contains(r))).collect();
        let (value, delta) = max_abs_over(pool, b, &ids, *w)?;
        if value < Rational::one() || ids.is_empty() {
            return Err(Error::NotNormalized(i));
        }
        let signed = eval(pool, delta, *w, b)?;
        witnesses.push((delta, *w, signed));
    }

    let k = blocks.len();
    let top = windows.last().expect("non-empty").hi;
    let entries = witnesses
        .iter()
        .map(|(delta, w, v)| Entry::new(Sign::of(v.is_positive()), *w, *delta))
        .collect();
    let gamma = TupleCode::type_i(top + 1, k as u64, entries);
    let admissible = validate_tuple(&gamma, pool).is_ok();

    let x = BlockVector::sum(blocks);
    let achieved = Evaluator::new(pool, &x).eval_code(&gamma, Interval::ALL)?;
    let total: Rational = witnesses.iter().map(|(_, _, v)| v.abs()).fold(Rational::zero(), |s, v| s + v);
    let predicted = pool.params().theta_over_n() * total / Rational::from_integer((k as i64).into());

    let g = pool.gamma_count(top + 1);
    let chain = ChainStepFloor { base_rank: top + 1, n_floor: &g * &g };
    Ok(WitnessReport { gamma, achieved, predicted, admissible, witnesses, chain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::x0::{build_space, X0Params};

    fn pool2() -> Pool {
        Pool::exhaustive(X0Params::default(), 2, &BigUint::from(10_000u32)).unwrap()
    }

    #[test]
    fn spec_evaluations() {
        let pool = pool2();
        let g0 = pool.gamma0();
        let plus = pool.level(1)[0];
        let d0 = BlockVector::basis(&pool, g0).unwrap();
        let dp = BlockVector::basis(&pool, plus).unwrap();
        assert_eq!(eval(&pool, g0, Interval::ALL, &d0).unwrap(), ratio(1, 1));
        assert_eq!(eval(&pool, plus, Interval::ALL, &d0).unwrap(), ratio(2, 5));
        assert_eq!(eval(&pool, g0, Interval::ALL, &dp).unwrap(), ratio(0, 1));
    }

    #[test]
    fn seminorm_and_interval() {
        let pool = pool2();
        let d0 = BlockVector::basis(&pool, pool.gamma0()).unwrap();
        assert_eq!(pool_seminorm(&pool, &d0).unwrap(), (ratio(1, 1), pool.gamma0()));
        let ni = norm_interval(&pool, &d0).unwrap();
        assert_eq!((ni.lower.clone(), ni.upper.clone()), (ratio(1, 1), ratio(5, 1)));
        assert_eq!(ni.upper_method, UpperMethod::RestrictionBound);
        let scaled = norm_interval(&pool, &d0.scale(&ratio(2, 5))).unwrap();
        assert_eq!(scaled.to_string(), "[2/5, 2]");
        assert_eq!(norm_interval(&pool, &BlockVector::zero()).unwrap().to_string(), "[0, 0]");
    }

    #[test]
    fn oracle_agreement_with_coordinates() {
        let pool = pool2();
        let space = build_space(&pool, 2).unwrap();
        let ids: Vec<GammaId> = pool.ids().collect();
        let coeffs = SparseRow::from_entries([(ids[0], ratio(1, 3)), (ids[2], ratio(-2, 1)), (ids[40], ratio(5, 7))]);
        let x = BlockVector::new(&pool, coeffs).unwrap();
        let coords = x.coords(&space).unwrap();
        let mut ev = Evaluator::new(&pool, &x);
        for &id in &ids {
            assert_eq!(ev.eval(id, Interval::ALL).unwrap(), coords.get(id), "at {id}");
        }
    }

    #[test]
    fn witness_examples() {
        let pool = pool2();
        let d0 = BlockVector::basis(&pool, pool.gamma0()).unwrap();
        let d2 = BlockVector::basis(&pool, pool.level(2)[0]).unwrap();
        let w = build_theta_witness(&pool, &[d0.clone(), d2.clone()]).unwrap();
        assert!(w.admissible);
        assert_eq!(w.achieved, ratio(2, 5));
        assert_eq!(w.predicted, ratio(2, 5));
        let single = build_theta_witness(&pool, std::slice::from_ref(&d0)).unwrap();
        assert_eq!(single.achieved, ratio(2, 5));
        let d1 = BlockVector::basis(&pool, pool.level(1)[0]).unwrap();
        assert!(matches!(build_theta_witness(&pool, &[d0, d1]), Err(Error::NotSkipped(_))));
        let small = d2.scale(&ratio(1, 2));
        assert!(matches!(build_theta_witness(&pool, &[small]), Err(Error::NotNormalized(0))));
    }

    #[test]
    fn chain_floor_rank_two() {
        let pool = pool2();
        let step = type_ii_chain_step(&pool, pool.level(2)[0]).unwrap();
        assert_eq!(step.n_floor, BigUint::from(30_625u32));
        assert_eq!(step.max_gain, ratio(2, 5 * 30_625));
    }

    #[test]
    fn average_examples() {
        let pool = pool2();
        let fifth = ratio(1, 5);
        let blocks = vec![
            BlockVector::basis(&pool, pool.gamma0()).unwrap().scale(&fifth),
            BlockVector::basis(&pool, pool.level(1)[0]).unwrap().scale(&fifth),
        ];
        let avg = Average { n: BigUint::from(4u32), entries: vec![Entry::new(Sign::Plus, Interval::new(0, 2), pool.level(1)[0])] };
        assert!(avg_bound_check(&pool, &blocks, &avg, "ex").unwrap().passed());
        let empty = Average { n: BigUint::from(4u32), entries: vec![] };
        assert!(matches!(avg_bound_check(&pool, &blocks, &empty, "ex"), Err(Error::HypothesisViolated(_))));
        let short = Average { n: BigUint::from(3u32), ..avg };
        assert!(matches!(avg_bound_check(&pool, &blocks, &short, "ex"), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn c0_examples() {
        let pool = pool2();
        let fifth = ratio(1, 5);
        let l2 = pool.level(2);
        let family: Vec<BlockVector> =
            l2[..2].iter().map(|&id| BlockVector::basis(&pool, id).unwrap().scale(&fifth)).collect();
        assert!(asymptotic_c0_check(&pool, &family, "ex").unwrap().passed());
        let one = vec![BlockVector::basis(&pool, pool.gamma0()).unwrap().scale(&fifth)];
        assert!(asymptotic_c0_check(&pool, &one, "one").unwrap().passed());
        let too_many = vec![one[0].clone(), family[0].clone()];
        assert!(matches!(asymptotic_c0_check(&pool, &too_many, "m"), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn records_round_trip() {
        let pool = pool2();
        let x = BlockVector::new(&pool, SparseRow::from_entries([(pool.gamma0(), ratio(-3, 4))])).unwrap();
        let lines = x.to_records(&pool).unwrap();
        let back = BlockVector::from_records(&pool, lines.iter().map(String::as_str)).unwrap();
        assert_eq!(back, x);
    }
}
