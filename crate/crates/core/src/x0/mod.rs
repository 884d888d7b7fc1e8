//! The asymptotic-c₀ space: tuple codes, admissibility and ages, level
//! cardinalities, exhaustive enumeration, lazy materialization, extension
//! rows and analyses.

mod analysis;
mod construct;
mod count;
mod enumerate;
mod pool;
mod tuple;

pub use analysis::{analysis, recompose_row, Analysis, AnalysisStep};
pub use construct::{build_space, extension_row};
pub use count::{level_cardinality, CardinalityTable};
pub use enumerate::enumerate_level;
pub use pool::{validate_tuple, Member, Pool};
pub use tuple::{Entry, Sign, TupleCode, TupleKind};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{int, ratio, Rational};

/// `N ≥ 3` and `1 < θ < N/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct X0Params {
    n: u32,
    theta: Rational,
}

impl Default for X0Params {
    fn default() -> Self {
        X0Params { n: 3, theta: ratio(6, 5) }
    }
}

impl X0Params {
    pub fn new(n: u32, theta: Rational) -> Result<Self> {
        if n < 3 {
            return Err(Error::BadParams(format!("N = {n} < 3")));
        }
        let half = Rational::new(BigInt::from(n), BigInt::from(2));
        if theta <= int(1) || theta >= half {
            return Err(Error::BadParams(format!("θ = {theta} violates 1 < θ < N/2 = {half}")));
        }
        Ok(X0Params { n, theta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    fn big_n(&self) -> Rational {
        int(self.n as i64)
    }

    pub fn theta_over_n(&self) -> Rational {
        &self.theta / self.big_n()
    }

    /// `N / (N − 2θ)`, the bound on `sup_q ‖i_q‖`.
    pub fn c_const(&self) -> Rational {
        let n = self.big_n();
        &n / (&n - int(2) * &self.theta)
    }

    /// `2N / (N − 2θ)`, the bound on `‖P_E‖` and `‖d_γ*‖`.
    pub fn projection_const(&self) -> Rational {
        int(2) * self.c_const()
    }

    /// `4N / (N − 2θ)`, the averaging bound.
    pub fn average_const(&self) -> Rational {
        int(4) * self.c_const()
    }

    /// `K_{N,θ} = (2N³ + 4θN² − 4θN) / (N² − 3θN + 2θ²)`.
    pub fn k_const(&self) -> Rational {
        let n = self.big_n();
        let t = &self.theta;
        let num = int(2) * &n * &n * &n + int(4) * t * &n * &n - int(4) * t * &n;
        let den = &n * &n - int(3) * t * &n + int(2) * t * t;
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_constants() {
        let p = X0Params::default();
        assert_eq!(p.theta_over_n(), ratio(2, 5));
        assert_eq!(p.c_const(), int(5));
        assert_eq!(p.projection_const(), int(10));
        assert_eq!(p.average_const(), int(20));
        assert_eq!(p.k_const(), ratio(230, 3));
    }

    #[test]
    fn parameter_bounds() {
        assert!(X0Params::new(3, ratio(3, 2)).is_err());
        assert!(X0Params::new(3, int(1)).is_err());
        assert!(X0Params::new(2, ratio(11, 10)).is_err());
        assert!(X0Params::new(5, ratio(9, 4)).is_ok());
    }
}
