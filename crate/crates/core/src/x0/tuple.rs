use std::fmt;

use num_bigint::BigUint;

use crate::exact::GammaId;
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(positive: bool) -> Sign {
        if positive {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// One term `(ε_i, E_i, η_i)` of a tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Entry {
    pub sign: Sign,
    pub interval: Interval,
    pub eta: GammaId,
}

impl Entry {
    pub fn new(sign: Sign, interval: Interval, eta: GammaId) -> Self {
        Entry { sign, interval, eta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TupleKind {
    TypeI,
    TypeII { base: GammaId },
}

/// Symbolic code of an element of `Δ_rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleCode {
    pub kind: TupleKind,
    pub rank: u32,
    pub n: BigUint,
    pub entries: Vec<Entry>,
}

impl TupleCode {
    pub fn type_i(rank: u32, n: impl Into<BigUint>, entries: Vec<Entry>) -> Self {
        TupleCode { kind: TupleKind::TypeI, rank, n: n.into(), entries }
    }

    pub fn type_ii(rank: u32, base: GammaId, n: impl Into<BigUint>, entries: Vec<Entry>) -> Self {
        TupleCode { kind: TupleKind::TypeII { base }, rank, n: n.into(), entries }
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn base(&self) -> Option<GammaId> {
        match self.kind {
            TupleKind::TypeI => None,
            TupleKind::TypeII { base } => Some(base),
        }
    }

    /// Every id the tuple refers to.
    pub fn references(&self) -> impl Iterator<Item = GammaId> + '_ {
        self.base().into_iter().chain(self.entries.iter().map(|e| e.eta))
    }
}
