use std::collections::BTreeMap;

use super::pool::Pool;
use crate::error::{Error, Result};
use crate::exact::{GammaId, Rational, SparseRow};
use crate::framework::TruncatedSpace;
use crate::interval::Interval;

/// Row over `Γ_q` of `e_η* ∘ P_E` on `ℓ∞(Γ_q)`, for `rank η ∈ E ⊆ [0, q]`.
pub(crate) fn projected_eval_row(space: &TruncatedSpace, q: u32, eta: GammaId, e: Interval) -> Result<SparseRow> {
    let r = space.rank(eta)?;
    if !e.contains(r) || e.hi > q {
        return Err(Error::BadInterval { lo: e.lo, hi: e.hi, max: q });
    }
    // row η of i_{hi,q} is the unit row since rank η ≤ hi
    let mut row = SparseRow::unit(eta);
    if e.lo > 0 {
        row = &row - &space.ext(e.lo - 1, q).row(eta);
    }
    Ok(row)
}

/// The row of `c_γ*` over `Γ_{rank γ − 1}`.
pub fn extension_row(id: GammaId, pool: &Pool, space: &TruncatedSpace) -> Result<SparseRow> {
    let member = pool.member(id)?;
    let Some(code) = member.code.as_ref() else {
        return Ok(SparseRow::new());
    };
    let q = code.rank - 1;
    if space.top() < q {
        return Err(Error::LevelUnavailable { level: q, available: space.top() });
    }
    let weight = pool.params().theta_over_n() / Rational::from_integer(code.n.clone().into());
    let mut row = SparseRow::new();
    for e in &code.entries {
        let term = projected_eval_row(space, q, e.eta, e.interval)?;
        row.add_scaled(&(&weight * Rational::from_integer(e.sign.as_i64().into())), &term);
    }
    if let Some(base) = code.base() {
        space.rank(base)?;
        row.add_at(base, &Rational::from_integer(1.into()));
    }
    Ok(row)
}

/// The truncated space on the pool's members of rank `≤ top`.
///
/// Levels are pushed in order, each row computed from the already built
/// lower part. The top level may be partial.
pub fn build_space(pool: &Pool, top: u32) -> Result<TruncatedSpace> {
    let mut space = TruncatedSpace::base(vec![pool.gamma0()])?;
    for q in 1..=top {
        let ids = pool.level(q);
        if ids.is_empty() {
            return Err(Error::LevelUnavailable { level: q, available: q - 1 });
        }
        let mut rows = BTreeMap::new();
        for &id in &ids {
            rows.insert(id, extension_row(id, pool, &space)?);
        }
        space.push_level(ids, rows)?;
    }
    Ok(space)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::*;
    use crate::exact::{op_norm_inf, ratio, row_l1_norm};
    use crate::x0::{Entry, Sign, TupleCode, X0Params};

    fn pool2() -> Pool {
        Pool::exhaustive(X0Params::default(), 2, &BigUint::from(10_000u32)).unwrap()
    }

    #[test]
    fn level_one_rows() {
        let pool = pool2();
        let space = build_space(&pool, 1).unwrap();
        let g0 = pool.gamma0();
        let l1 = pool.level(1);
        assert_eq!(space.rule().rows[&l1[0]], SparseRow::from_entries([(g0, ratio(2, 5))]));
        assert_eq!(space.rule().rows[&l1[1]], SparseRow::from_entries([(g0, ratio(-2, 5))]));
        assert_eq!(op_norm_inf(space.ext(0, 1)), ratio(1, 1));
        assert_eq!(space.c_bound(), &ratio(1, 1));
    }

    #[test]
    fn level_two_bound() {
        let pool = pool2();
        let space = build_space(&pool, 2).unwrap();
        assert_eq!(space.structure().gamma_len(2), 175);
        for p in 0..=2 {
            for (_, row) in space.ext(p, 2).rows() {
                assert!(row_l1_norm(row) <= ratio(5, 1));
            }
        }
    }

    /// Independent oracle: `c_γ*` of the k = 2 tuple `(+{0} γ₀, −{1} δ⁺)`
    /// at `n = 2` is `(2/5)(1/2)(e_γ₀ − (e_δ⁺ − (2/5) e_γ₀))`.
    #[test]
    fn two_entry_row() {
        let mut pool = pool2();
        let g0 = pool.gamma0();
        let plus = pool.level(1)[0];
        let code = TupleCode::type_i(
            2,
            2u32,
            vec![Entry::new(Sign::Plus, Interval::single(0), g0), Entry::new(Sign::Minus, Interval::single(1), plus)],
        );
        let id = pool.materialize(code).unwrap();
        let space = build_space(&pool, 1).unwrap();
        let row = extension_row(id, &pool, &space).unwrap();
        let expected = SparseRow::from_entries([(g0, ratio(1, 5) + ratio(2, 25)), (plus, ratio(-1, 5))]);
        assert_eq!(row, expected);
    }

    #[test]
    fn type_ii_row_adds_base() {
        let mut pool = pool2();
        let g0 = pool.gamma0();
        let plus = pool.level(1)[0];
        // rank 3 over the rank-1 base, entry on level 2
        let eta = pool.level(2)[0];
        let n = BigUint::from(175u32 * 175);
        let id = pool
            .materialize(TupleCode::type_ii(3, plus, n.clone(), vec![Entry::new(Sign::Plus, Interval::single(2), eta)]))
            .unwrap();
        assert_eq!(pool.member(id).unwrap().age, 2);
        let space = build_space(&pool, 2).unwrap();
        let row = extension_row(id, &pool, &space).unwrap();
        // η = (+{0} γ₀, n = 1) has c-row (2/5) e_γ₀, so e_η* ∘ P_{2} = e_η − (2/5) e_γ₀
        let w = ratio(2, 5) / Rational::from_integer(n.into());
        let expected = SparseRow::from_entries([(plus, ratio(1, 1)), (eta, w.clone()), (g0, -(w * ratio(2, 5)))]);
        assert_eq!(row, expected);
    }

    #[test]
    fn missing_level() {
        let pool = Pool::new(X0Params::default());
        assert!(matches!(build_space(&pool, 1), Err(Error::LevelUnavailable { .. })));
    }
}
