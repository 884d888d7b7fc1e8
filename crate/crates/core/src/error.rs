use num_bigint::BigUint;
use thiserror::Error;

use crate::exact::GammaId;

/// Errors raised by construction and checking routines.
///
/// Failed *verifications* are not errors; they are recorded in a
/// [`VerificationReport`](crate::report::VerificationReport).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown gamma id {0}")]
    UnknownGamma(String),

    #[error("extension row of {0} is not supported on the previous levels")]
    InadmissibleRule(GammaId),

    #[error("bad level structure: {0}")]
    BadStructure(String),

    #[error("interval [{lo}, {hi}] is not inside [0, {max}]")]
    BadInterval { lo: u32, hi: u32, max: u32 },

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("parameters rejected: {0}")]
    BadParams(String),

    #[error("tuple parameter n = {n} outside the admissible range [{min}, {max}]")]
    BadN { n: BigUint, min: BigUint, max: BigUint },

    #[error("tuple has k = {k} entries, need 1 <= k <= n = {n}")]
    BadK { k: usize, n: BigUint },

    #[error("intervals are not successive at entry {0}")]
    NonSuccessiveIntervals(usize),

    #[error("entry {index}: interval [{lo}, {hi}] outside the allowed range [{min}, {max}]")]
    IntervalOutOfRange { index: usize, lo: u32, hi: u32, min: u32, max: u32 },

    #[error("entry {index}: rank of eta is {rank}, not inside [{lo}, {hi}]")]
    RankMismatch { index: usize, rank: u32, lo: u32, hi: u32 },

    #[error("base element already has the maximal age {0}")]
    AgeExhausted(u32),

    #[error("base element has rank {base_rank}, needs 1 <= rank <= {max}")]
    BadBaseRank { base_rank: u32, max: i64 },

    #[error("enumeration needs {count} tuples, above the budget")]
    BudgetExceeded { count: BigUint },

    #[error("level {level} is not available (truncated at {available})")]
    LevelUnavailable { level: u32, available: u32 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("blocks are not skipped: {0}")]
    NotSkipped(String),

    #[error("block {0} has no witness of value at least one in its window")]
    NotNormalized(usize),

    #[error("no pair found for step {step} within the truncation")]
    PairNotFound { step: usize },

    #[error("schedule rejected: {0}")]
    ScheduleRejected(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("digest collision on {0}")]
    DigestCollision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
