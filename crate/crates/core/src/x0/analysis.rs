use num_bigint::BigUint;

use super::construct::projected_eval_row;
use super::pool::Pool;
use super::tuple::{Entry, TupleCode};
use crate::error::{Error, Result};
use crate::exact::{GammaId, Rational, SparseRow};
use crate::framework::TruncatedSpace;
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisStep {
    pub xi: GammaId,
    pub rank: u32,
    pub n: BigUint,
    pub entries: Vec<Entry>,
}

/// The decomposition `e_γ* = Σ_r d_{ξ_r}* + (θ/N) Σ_r (1/n_r) Σ_i ε_{r,i} e_{η_{r,i}}* ∘ P_{E_{r,i}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub gamma: GammaId,
    pub age: u32,
    /// `steps[r-1]` describes `ξ_r`; the last one is `γ` itself.
    pub steps: Vec<AnalysisStep>,
}

/// Unwinds the TypeII chain ending at `γ`.
pub fn analysis(id: GammaId, pool: &Pool) -> Result<Analysis> {
    let member = pool.member(id)?;
    if member.code.is_none() {
        return Err(Error::BadInput("the rank-0 atom has no analysis".into()));
    }
    let mut steps = Vec::new();
    let mut cursor = Some(id);
    while let Some(xi) = cursor {
        let code: &TupleCode = pool.member(xi)?.code.as_ref().ok_or_else(|| {
            Error::BadInput(format!("chain of {id} reaches the atom"))
        })?;
        steps.push(AnalysisStep { xi, rank: code.rank, n: code.n.clone(), entries: code.entries.clone() });
        cursor = code.base();
    }
    steps.reverse();
    Ok(Analysis { gamma: id, age: member.age, steps })
}

impl Analysis {
    /// Checks the structural invariants: chain length equals age, ordering of
    /// intervals and ranks, and the growth of the weights.
    pub fn verify(&self, pool: &Pool) -> VerificationReport {
        let mut report = VerificationReport::new();
        let suite = "x0";
        let tag = format!("analysis({})", self.gamma);
        let last = self.steps.last().map(|s| s.xi);
        report.push(suite, format!("{tag}.last"), fmt_id(last), self.gamma, last == Some(self.gamma));
        report.push(suite, format!("{tag}.age"), self.steps.len(), self.age, self.steps.len() == self.age as usize);

        let mut floor: Option<u32> = None;
        for (r, step) in self.steps.iter().enumerate() {
            let mut ordered = true;
            let mut prev_hi: Option<u32> = floor;
            for e in &step.entries {
                if prev_hi.is_some_and(|h| e.interval.lo <= h) {
                    ordered = false;
                }
                prev_hi = Some(e.interval.hi);
            }
            if prev_hi.is_some_and(|h| h >= step.rank) {
                ordered = false;
            }
            report.push(suite, format!("{tag}.order(r={})", r + 1), ordered, true, ordered);

            if r > 0 {
                let prev_rank = self.steps[r - 1].rank;
                let g = pool.gamma_count(prev_rank);
                let bound = &g * &g;
                report.push(suite, format!("{tag}.growth(r={})", r + 1), &step.n, format!(">= {bound}"), step.n >= bound);
                report.info(suite, format!("{tag}.growth_strict(r={})", r + 1), step.n > bound, true);
            }
            floor = Some(step.rank);
        }
        report
    }
}

fn fmt_id(id: Option<GammaId>) -> String {
    id.map_or_else(|| "none".to_string(), |i| i.to_string())
}

/// Right side of the analysis equation as a row over `Γ_Q`.
pub fn recompose_row(analysis: &Analysis, pool: &Pool, space: &TruncatedSpace) -> Result<SparseRow> {
    let top = space.top();
    let theta_over_n = pool.params().theta_over_n();
    let mut row = SparseRow::new();
    for step in &analysis.steps {
        if step.rank > top {
            return Err(Error::LevelUnavailable { level: step.rank, available: top });
        }
        row = &row + &space.dual_triple(step.xi)?.d_row;
        let weight = &theta_over_n / Rational::from_integer(step.n.clone().into());
        for e in &step.entries {
            let term = projected_eval_row(space, top, e.eta, e.interval)?;
            row.add_scaled(&(&weight * Rational::from_integer(e.sign.as_i64().into())), &term);
        }
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::x0::{build_space, Sign, X0Params};

    fn pool2() -> Pool {
        Pool::exhaustive(X0Params::default(), 2, &BigUint::from(10_000u32)).unwrap()
    }

    #[test]
    fn age_one_analysis() {
        let pool = pool2();
        let plus = pool.level(1)[0];
        let a = analysis(plus, &pool).unwrap();
        assert_eq!(a.age, 1);
        assert_eq!(a.steps.len(), 1);
        assert_eq!(a.steps[0].xi, plus);
        assert_eq!(a.steps[0].n, BigUint::from(1u32));
        assert_eq!(a.steps[0].entries, vec![Entry::new(Sign::Plus, Interval::single(0), pool.gamma0())]);
        assert!(a.verify(&pool).passed());
    }

    #[test]
    fn chain_of_two() {
        let mut pool = pool2();
        let plus = pool.level(1)[0];
        let eta = pool.level(2)[5];
        let code = TupleCode::type_ii(3, plus, 30_625u32, vec![Entry::new(Sign::Minus, Interval::single(2), eta)]);
        let id = pool.materialize(code).unwrap();
        let a = analysis(id, &pool).unwrap();
        assert_eq!(a.age, 2);
        assert_eq!(a.steps.iter().map(|s| s.xi).collect::<Vec<_>>(), vec![plus, id]);
        let report = a.verify(&pool);
        assert!(report.passed(), "{report}");
        // floor for r = 2 is (#Γ₁)² = 9
        assert_eq!(report.find(&format!("analysis({id}).growth(r=2)")).count(), 1);
    }

    #[test]
    fn faithful_on_level_two() {
        let pool = pool2();
        let space = build_space(&pool, 2).unwrap();
        for id in pool.ids().skip(1) {
            let a = analysis(id, &pool).unwrap();
            assert_eq!(recompose_row(&a, &pool, &space).unwrap(), SparseRow::unit(id));
        }
    }

    #[test]
    fn atom_has_no_analysis() {
        let pool = pool2();
        assert!(analysis(pool.gamma0(), &pool).is_err());
    }
}
