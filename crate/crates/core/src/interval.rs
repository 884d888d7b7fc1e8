use std::fmt;

/// Inclusive interval `[lo, hi]` of level indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: u32,
    pub hi: u32,
}

impl Interval {
    /// Every level.
    pub const ALL: Interval = Interval { lo: 0, hi: u32::MAX };

    pub fn new(lo: u32, hi: u32) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn single(q: u32) -> Self {
        Interval { lo: q, hi: q }
    }

    pub fn contains(&self, q: u32) -> bool {
        self.lo <= q && q <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// `self < other` in the block order: every level of `self` lies below
    /// every level of `other`.
    pub fn precedes(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Interval::ALL {
            write!(f, "[0,inf)")
        } else {
            write!(f, "[{},{}]", self.lo, self.hi)
        }
    }
}

/// All sub-intervals of `[0, top]`.
pub fn all_subintervals(top: u32) -> Vec<Interval> {
    let mut out = Vec::new();
    for lo in 0..=top {
        for hi in lo..=top {
            out.push(Interval::new(lo, hi));
        }
    }
    out
}
