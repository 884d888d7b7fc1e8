use num_bigint::BigUint;
use num_traits::One;

use super::pool::Pool;
use super::tuple::{Entry, Sign, TupleCode};
use crate::error::{Error, Result};
use crate::exact::GammaId;
use crate::interval::Interval;

/// Every admissible tuple of rank `q`, in canonical order.
///
/// Needs the pool to hold exactly `Γ_{q-1}` below rank `q`. The exact count
/// is checked against `budget` before anything is generated.
pub fn enumerate_level(pool: &Pool, q: u32, budget: &BigUint) -> Result<Vec<TupleCode>> {
    if q == 0 {
        return Err(Error::BadInput("level 0 is the atom, not a tuple level".into()));
    }
    let count = pool.gamma_count(q) - pool.gamma_count(q - 1);
    if &count > budget {
        return Err(Error::BudgetExceeded { count });
    }
    if pool.complete_through() + 1 < q {
        return Err(Error::LevelUnavailable { level: q - 1, available: pool.complete_through() });
    }

    let top = q - 1;
    let upper = {
        let g = pool.gamma_count(top);
        &g * &g
    };
    let by_rank: Vec<Vec<GammaId>> = (0..=top).map(|r| pool.level(r)).collect();
    let mut out = Vec::new();

    for_each_sequence(&by_rank, 0, top, |entries| {
        let lower = BigUint::from(entries.len());
        push_range(&mut out, &lower, &upper, |n| TupleCode::type_i(q, n, entries.to_vec()));
    });

    for base in pool.ids() {
        let member = pool.member(base)?;
        if member.rank == 0 || member.rank + 2 > q || member.age >= pool.params().n() {
            continue;
        }
        let floor = {
            let g = pool.gamma_count(member.rank);
            &g * &g
        };
        for_each_sequence(&by_rank, member.rank + 1, top, |entries| {
            let k = BigUint::from(entries.len());
            let lower = if k > floor { k } else { floor.clone() };
            push_range(&mut out, &lower, &upper, |n| TupleCode::type_ii(q, base, n, entries.to_vec()));
        });
    }
    debug_assert_eq!(BigUint::from(out.len()), count);
    Ok(out)
}

fn push_range(out: &mut Vec<TupleCode>, lower: &BigUint, upper: &BigUint, make: impl Fn(BigUint) -> TupleCode) {
    let mut n = lower.clone();
    while &n <= upper {
        out.push(make(n.clone()));
        n += BigUint::one();
    }
}

/// Visits entry sequences with intervals in `[lo, top]`, grouped by length
/// and in lexicographic order within each length.
fn for_each_sequence(by_rank: &[Vec<GammaId>], lo: u32, top: u32, mut visit: impl FnMut(&[Entry])) {
    if lo > top {
        return;
    }
    let max_k = (top - lo + 1) as usize;
    let mut stack = Vec::new();
    for k in 1..=max_k {
        extend(by_rank, lo, top, k, &mut stack, &mut visit);
    }
}

fn extend(
    by_rank: &[Vec<GammaId>],
    from: u32,
    top: u32,
    remaining: usize,
    stack: &mut Vec<Entry>,
    visit: &mut impl FnMut(&[Entry]),
) {
    if remaining == 0 {
        visit(stack);
        return;
    }
    if from > top || ((top - from + 1) as usize) < remaining {
        return;
    }
    for lo in from..=top {
        for hi in lo..=top {
            let interval = Interval::new(lo, hi);
            for r in lo..=hi {
                for &eta in &by_rank[r as usize] {
                    for sign in [Sign::Plus, Sign::Minus] {
                        stack.push(Entry::new(sign, interval, eta));
                        extend(by_rank, hi + 1, top, remaining - 1, stack, visit);
                        stack.pop();
                    }
                }
            }
        }
    }
}

impl Pool {
    /// Exhaustively enumerates and interns levels up to `q`.
    ///
    /// Fails if lazily materialized members sit above the complete levels,
    /// since that would break canonical id order.
    pub fn enumerate_through(&mut self, q: u32, budget: &BigUint) -> Result<()> {
        let done = self.complete_through();
        if self.max_rank() > done {
            return Err(Error::BadInput(format!(
                "pool holds lazily materialized members above complete level {done}"
            )));
        }
        self.ensure_counts(q);
        for level in done + 1..=q {
            let count = self.table().delta(level).clone();
            if &count > budget {
                return Err(Error::BudgetExceeded { count });
            }
        }
        for level in done + 1..=q {
            for code in enumerate_level(self, level, budget)? {
                self.materialize(code)?;
            }
            self.mark_complete(level);
        }
        Ok(())
    }

    /// The pool holding exactly `Γ_q`.
    pub fn exhaustive(params: super::X0Params, q: u32, budget: &BigUint) -> Result<Pool> {
        let mut pool = Pool::new(params);
        pool.enumerate_through(q, budget)?;
        Ok(pool)
    }
}
