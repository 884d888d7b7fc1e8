//! Exact-arithmetic truncations of Bourgain-Delbaen spaces.

pub mod error;
pub mod exact;
pub mod framework;
pub mod interval;
pub mod norm;
pub mod rank;
pub mod report;
pub mod sample;
pub mod subspace;
pub mod x0;

pub use error::{Error, Result};
pub use exact::{format_rational, op_norm_inf, parse_rational, row_l1_norm, sup_norm, GammaId, Rational, SparseMatrix, SparseRow};
pub use framework::{build_truncated, DualTriple, ExtensionRule, LevelStructure, TruncatedSpace};
pub use interval::Interval;
pub use report::{Record, Verdict, VerificationReport};
pub use x0::{Pool, TupleCode, X0Params};
pub use norm::{eval, norm_interval, pool_seminorm, Average, BlockVector, NormInterval, WitnessReport};
pub use subspace::{build_z, functional_distance, pair_search, quotient_check, PairSchedule, QuotientData, ZPresentation};
