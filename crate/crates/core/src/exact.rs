//! Exact scalars and sparse rows/matrices indexed by gamma ids.
//!
//! Every quantity in the crate is a [`Rational`]; nothing is ever rounded.
//! Sparse containers drop zeros eagerly, so structural equality coincides
//! with mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Builds `num / den` in lowest terms. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Formats as `p/q`, or `p` when `q = 1`; the sign sits on the numerator.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `p`, `p/q` or `-p/q`. Decimal literals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    if den.is_negative() {
        return Err(Error::Parse(format!("negative denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Index of a coordinate of some `Γ`. Ordering is the canonical
/// (rank, intra-level ordinal) order whenever ids are allocated level by level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaId(pub u32);

impl GammaId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GammaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Finite map `GammaId -> Rational` without zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SparseRow {
    entries: BTreeMap<GammaId, Rational>,
}

impl SparseRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(id: GammaId) -> Self {
        let mut row = Self::new();
        row.entries.insert(id, Rational::one());
        row
    }

    pub fn from_entries<I: IntoIterator<Item = (GammaId, Rational)>>(iter: I) -> Self {
        let mut row = Self::new();
        for (id, v) in iter {
            row.add_at(id, &v);
        }
        row
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, id: GammaId) -> Rational {
        self.entries.get(&id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (GammaId, &Rational)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn ids(&self) -> impl Iterator<Item = GammaId> + '_ {
        self.entries.keys().copied()
    }

    pub fn set(&mut self, id: GammaId, value: Rational) {
        if value.is_zero() {
            self.entries.remove(&id);
        } else {
            self.entries.insert(id, value);
        }
    }

    pub fn add_at(&mut self, id: GammaId, value: &Rational) {
        if value.is_zero() {
            return;
        }
        let slot = self.entries.entry(id).or_insert_with(Rational::zero);
        *slot += value;
        if slot.is_zero() {
            self.entries.remove(&id);
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: &Rational, other: &SparseRow) {
        if factor.is_zero() {
            return;
        }
        for (id, v) in other.iter() {
            self.add_at(id, &(factor * v));
        }
    }

    pub fn scale(&self, factor: &Rational) -> SparseRow {
        if factor.is_zero() {
            return SparseRow::new();
        }
        SparseRow {
            entries: self.entries.iter().map(|(k, v)| (*k, v * factor)).collect(),
        }
    }

    pub fn dot(&self, other: &SparseRow) -> Rational {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = Rational::zero();
        for (id, v) in small.iter() {
            if let Some(w) = large.entries.get(&id) {
                acc += v * w;
            }
        }
        acc
    }

    /// Keeps only the entries whose id satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(GammaId) -> bool) -> SparseRow {
        SparseRow {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(**k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }
}

impl Add<&SparseRow> for &SparseRow {
    type Output = SparseRow;

    fn add(self, rhs: &SparseRow) -> SparseRow {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), rhs);
        out
    }
}

impl Sub<&SparseRow> for &SparseRow {
    type Output = SparseRow;

    fn sub(self, rhs: &SparseRow) -> SparseRow {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), rhs);
        out
    }
}

impl Neg for &SparseRow {
    type Output = SparseRow;

    fn neg(self) -> SparseRow {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for SparseRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (id, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{id}: {v}")?;
        }
        write!(f, "}}")
    }
}

/// Matrix given by sparse rows; `rows` are keyed by codomain ids and the
/// entries of each row by domain ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: BTreeMap<GammaId, SparseRow>,
    domain: Vec<GammaId>,
    codomain: Vec<GammaId>,
}

impl SparseMatrix {
    /// Missing rows are zero rows. Fails if a row id or an entry id is not
    /// in the declared index sets.
    pub fn new(
        domain: Vec<GammaId>,
        codomain: Vec<GammaId>,
        rows: BTreeMap<GammaId, SparseRow>,
    ) -> Result<Self> {
        let dom: std::collections::BTreeSet<_> = domain.iter().copied().collect();
        let cod: std::collections::BTreeSet<_> = codomain.iter().copied().collect();
        for (r, row) in &rows {
            if !cod.contains(r) {
                return Err(Error::BadInput(format!("row {r} outside the codomain")));
            }
            if let Some(c) = row.ids().find(|c| !dom.contains(c)) {
                return Err(Error::BadInput(format!("entry {c} of row {r} outside the domain")));
            }
        }
        let rows = rows.into_iter().filter(|(_, row)| !row.is_empty()).collect();
        Ok(Self { rows, domain, codomain })
    }

    pub fn identity(ids: Vec<GammaId>) -> Self {
        let rows = ids.iter().map(|&id| (id, SparseRow::unit(id))).collect();
        Self { rows, domain: ids.clone(), codomain: ids }
    }

    pub fn domain(&self) -> &[GammaId] {
        &self.domain
    }

    pub fn codomain(&self) -> &[GammaId] {
        &self.codomain
    }

    pub fn row(&self, id: GammaId) -> SparseRow {
        self.rows.get(&id).cloned().unwrap_or_default()
    }

    pub fn row_ref(&self, id: GammaId) -> Option<&SparseRow> {
        self.rows.get(&id)
    }

    pub fn rows(&self) -> impl Iterator<Item = (GammaId, &SparseRow)> + '_ {
        self.rows.iter().map(|(k, v)| (*k, v))
    }

    /// Overwrites one row. Used to model corrupted operators.
    pub fn set_row(&mut self, id: GammaId, row: SparseRow) {
        if row.is_empty() {
            self.rows.remove(&id);
        } else {
            self.rows.insert(id, row);
        }
    }

    /// `self ∘ rhs`, requires `rhs.codomain == self.domain` as sets.
    pub fn compose(&self, rhs: &SparseMatrix) -> SparseMatrix {
        let mut rows = BTreeMap::new();
        for (r, row) in self.rows() {
            let mut out = SparseRow::new();
            for (mid, coeff) in row.iter() {
                if let Some(inner) = rhs.rows.get(&mid) {
                    out.add_scaled(coeff, inner);
                }
            }
            if !out.is_empty() {
                rows.insert(r, out);
            }
        }
        SparseMatrix { rows, domain: rhs.domain.clone(), codomain: self.codomain.clone() }
    }

    /// Matrix-vector product; `x` is a vector over the domain.
    pub fn apply(&self, x: &SparseRow) -> SparseRow {
        let mut out = SparseRow::new();
        for (r, row) in self.rows() {
            out.set(r, row.dot(x));
        }
        out
    }

    /// Column `id` as a vector over the codomain.
    pub fn column(&self, id: GammaId) -> SparseRow {
        let mut out = SparseRow::new();
        for (r, row) in self.rows() {
            out.set(r, row.get(id));
        }
        out
    }
}

/// `‖φ‖ = Σ |φ(γ)|` for a functional on an ℓ∞ space.
pub fn row_l1_norm(row: &SparseRow) -> Rational {
    row.iter().fold(Rational::zero(), |acc, (_, v)| acc + v.abs())
}

/// ℓ∞ → ℓ∞ operator norm: the largest row ℓ₁ norm.
pub fn op_norm_inf(m: &SparseMatrix) -> Rational {
    m.rows().map(|(_, row)| row_l1_norm(row)).max().unwrap_or_else(Rational::zero)
}

pub fn sup_norm(v: &SparseRow) -> Rational {
    v.iter().map(|(_, x)| x.abs()).max().unwrap_or_else(Rational::zero)
}
