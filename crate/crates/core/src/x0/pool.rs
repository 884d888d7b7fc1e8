//! Interned, reference-closed fragment of `Γ`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use sha2::{Digest, Sha256};

use super::count::CardinalityTable;
use super::tuple::{Entry, Sign, TupleCode, TupleKind};
use super::X0Params;
use crate::error::{Error, Result};
use crate::exact::GammaId;
use crate::interval::Interval;

/// The level-0 atom `γ₀`.
pub const GAMMA0: GammaId = GammaId(0);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    /// `None` for `γ₀`.
    pub code: Option<TupleCode>,
    pub rank: u32,
    /// 0 for `γ₀`, otherwise in `[1, N]`.
    pub age: u32,
    pub digest: String,
}

/// Materialized elements of `Γ`, ids allocated in insertion order.
///
/// Exhaustively enumerated levels are inserted in canonical order, so on
/// those levels id order is the canonical `(rank, ordinal)` order.
#[derive(Debug, Clone)]
pub struct Pool {
    params: X0Params,
    members: Vec<Member>,
    by_code: HashMap<TupleCode, GammaId>,
    by_digest: HashMap<String, GammaId>,
    table: CardinalityTable,
    complete_through: u32,
}

fn digest_of(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in hash.iter().take(8) {
        write!(out, "{byte:02x}").expect("writing to a String");
    }
    out
}

impl Pool {
    pub fn new(params: X0Params) -> Self {
        let digest = digest_of("G0");
        let atom = Member { code: None, rank: 0, age: 0, digest: digest.clone() };
        let mut by_digest = HashMap::new();
        by_digest.insert(digest, GAMMA0);
        Pool {
            table: CardinalityTable::new(&params),
            params,
            members: vec![atom],
            by_code: HashMap::new(),
            by_digest,
            complete_through: 0,
        }
    }

    pub fn params(&self) -> &X0Params {
        &self.params
    }

    pub fn gamma0(&self) -> GammaId {
        GAMMA0
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn member(&self, id: GammaId) -> Result<&Member> {
        self.members.get(id.index()).ok_or_else(|| Error::UnknownGamma(id.to_string()))
    }

    pub fn contains(&self, id: GammaId) -> bool {
        id.index() < self.members.len()
    }

    pub fn rank(&self, id: GammaId) -> Result<u32> {
        Ok(self.member(id)?.rank)
    }

    pub fn ids(&self) -> impl Iterator<Item = GammaId> + '_ {
        (0..self.members.len() as u32).map(GammaId)
    }

    /// Members of rank `q`, in id order.
    pub fn level(&self, q: u32) -> Vec<GammaId> {
        self.ids().filter(|id| self.members[id.index()].rank == q).collect()
    }

    pub fn max_rank(&self) -> u32 {
        self.members.iter().map(|m| m.rank).max().unwrap_or(0)
    }

    /// Highest level `q` such that the pool holds all of `Γ_q`.
    pub fn complete_through(&self) -> u32 {
        self.complete_through
    }

    pub(crate) fn mark_complete(&mut self, q: u32) {
        self.complete_through = q;
    }

    pub fn lookup(&self, code: &TupleCode) -> Option<GammaId> {
        self.by_code.get(code).copied()
    }

    pub fn by_digest(&self, digest: &str) -> Result<GammaId> {
        self.by_digest.get(digest).copied().ok_or_else(|| Error::UnknownGamma(digest.to_string()))
    }

    pub fn digest(&self, id: GammaId) -> Result<&str> {
        Ok(&self.member(id)?.digest)
    }

    pub fn code(&self, id: GammaId) -> Result<Option<&TupleCode>> {
        Ok(self.member(id)?.code.as_ref())
    }

    /// Exact cardinalities, computed as far as this pool needed them.
    pub fn table(&self) -> &CardinalityTable {
        &self.table
    }

    pub fn ensure_counts(&mut self, q: u32) {
        self.table.extend_to(q);
    }

    /// `#Γ_q`, computing further levels on a scratch table if necessary.
    pub fn gamma_count(&self, q: u32) -> BigUint {
        if q <= self.table.top() {
            self.table.gamma(q).clone()
        } else {
            let mut t = self.table.clone();
            t.extend_to(q);
            t.gamma(q).clone()
        }
    }

    /// Canonical text: `T1 rank n [(eps lo hi id) ...]` or
    /// `T2 rank base n [(eps lo hi id) ...]`, ids as hex digests.
    pub fn encode(&self, code: &TupleCode) -> Result<String> {
        let mut out = String::new();
        match code.kind {
            TupleKind::TypeI => write!(out, "T1 {} {} [", code.rank, code.n),
            TupleKind::TypeII { base } => write!(out, "T2 {} {} {} [", code.rank, self.digest(base)?, code.n),
        }
        .expect("writing to a String");
        for (i, e) in code.entries.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "({} {} {} {})", e.sign, e.interval.lo, e.interval.hi, self.digest(e.eta)?)
                .expect("writing to a String");
        }
        out.push(']');
        Ok(out)
    }

    /// Parses a record produced by [`encode`](Self::encode); referenced ids
    /// must already be members.
    pub fn decode(&self, text: &str) -> Result<TupleCode> {
        let cleaned: String = text
            .chars()
            .map(|c| if matches!(c, '[' | ']' | '(' | ')') { ' ' } else { c })
            .collect();
        let tokens: Vec<&str> = cleaned.split_whitespace().collect();
        let bad = |what: &str| Error::Parse(format!("{what} in tuple record {text:?}"));
        let parse_u32 = |s: &str| s.parse::<u32>().map_err(|_| bad("bad integer"));
        let parse_big = |s: &str| s.parse::<BigUint>().map_err(|_| bad("bad n"));

        let (kind, rank, n, rest) = match tokens.first() {
            Some(&"T1") if tokens.len() >= 3 => (TupleKind::TypeI, parse_u32(tokens[1])?, parse_big(tokens[2])?, &tokens[3..]),
            Some(&"T2") if tokens.len() >= 4 => {
                let base = self.by_digest(tokens[2])?;
                (TupleKind::TypeII { base }, parse_u32(tokens[1])?, parse_big(tokens[3])?, &tokens[4..])
            }
            _ => return Err(bad("unknown header")),
        };
        if rest.len() % 4 != 0 {
            return Err(bad("truncated entry"));
        }
        let mut entries = Vec::new();
        for chunk in rest.chunks(4) {
            let sign = match chunk[0] {
                "+1" | "1" => Sign::Plus,
                "-1" => Sign::Minus,
                _ => return Err(bad("bad sign")),
            };
            let lo = parse_u32(chunk[1])?;
            let hi = parse_u32(chunk[2])?;
            if lo > hi {
                return Err(bad("empty interval"));
            }
            entries.push(Entry::new(sign, Interval::new(lo, hi), self.by_digest(chunk[3])?));
        }
        Ok(TupleCode { kind, rank, n, entries })
    }

    /// Validates and interns; idempotent on equal codes.
    pub fn materialize(&mut self, code: TupleCode) -> Result<GammaId> {
        if let Some(id) = self.lookup(&code) {
            return Ok(id);
        }
        if code.rank > 0 {
            self.ensure_counts(code.rank - 1);
        }
        let age = validate_tuple(&code, self)?;
        self.insert(code, age)
    }

    /// Inserts without the admissibility check. Models a corrupted pool
    /// file; [`revalidate`](Self::revalidate) reports such members.
    pub fn insert_unvalidated(&mut self, code: TupleCode) -> Result<GammaId> {
        if let Some(id) = self.lookup(&code) {
            return Ok(id);
        }
        for r in code.references() {
            self.member(r)?;
        }
        let age = match code.base() {
            None => 1,
            Some(base) => self.member(base)?.age + 1,
        };
        self.insert(code, age)
    }

    fn insert(&mut self, code: TupleCode, age: u32) -> Result<GammaId> {
        let digest = digest_of(&self.encode(&code)?);
        if let Some(&other) = self.by_digest.get(&digest) {
            return Err(Error::DigestCollision(format!("{digest} already names {other}")));
        }
        let id = GammaId(self.members.len() as u32);
        self.members.push(Member { code: Some(code.clone()), rank: code.rank, age, digest: digest.clone() });
        self.by_code.insert(code, id);
        self.by_digest.insert(digest, id);
        Ok(id)
    }

    /// Re-runs admissibility on every member; returns the offenders.
    pub fn revalidate(&self) -> Vec<(GammaId, Error)> {
        let mut bad = Vec::new();
        for id in self.ids().skip(1) {
            let member = &self.members[id.index()];
            let code = member.code.as_ref().expect("non-atom members carry codes");
            match validate_tuple(code, self) {
                Ok(age) if age == member.age => {}
                Ok(age) => bad.push((id, Error::BadInput(format!("recorded age {} but computed {age}", member.age)))),
                Err(e) => bad.push((id, e)),
            }
            if code.references().any(|r| r >= id) {
                bad.push((id, Error::BadInput("refers to a later member".into())));
            }
        }
        bad
    }

    /// Pool file body: one canonical record per member, in id order.
    pub fn to_records(&self) -> Vec<String> {
        self.ids()
            .skip(1)
            .map(|id| self.encode(self.members[id.index()].code.as_ref().expect("code")).expect("closed pool"))
            .collect()
    }

    /// Loads records (blank lines and `#` comments skipped), validating each.
    pub fn from_records<'a>(params: X0Params, lines: impl IntoIterator<Item = &'a str>) -> Result<Pool> {
        let mut pool = Pool::new(params);
        let mut complete = true;
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let code = pool.decode(line)?;
            pool.materialize(code)?;
            complete = false;
        }
        if !complete {
            pool.recompute_completeness();
        }
        Ok(pool)
    }

    /// Marks every level whose member count equals `#Δ_q` as complete.
    pub fn recompute_completeness(&mut self) {
        let top = self.max_rank();
        self.ensure_counts(top);
        let mut q = 0;
        while q < top && BigUint::from(self.level(q + 1).len()) == *self.table.delta(q + 1) {
            q += 1;
        }
        self.complete_through = q;
    }
}

/// Checks every admissibility clause and returns the age.
pub fn validate_tuple(code: &TupleCode, pool: &Pool) -> Result<u32> {
    let params = pool.params();
    for r in code.references() {
        pool.member(r)?;
    }
    if code.rank == 0 {
        return Err(Error::BadInput("tuples have rank at least 1".into()));
    }
    let top = code.rank - 1;
    let upper = {
        let g = pool.gamma_count(top);
        &g * &g
    };
    let (allowed, lower, age) = match code.kind {
        TupleKind::TypeI => (Interval::new(0, top), BigUint::one(), 1),
        TupleKind::TypeII { base } => {
            let base_member = pool.member(base)?;
            let base_rank = base_member.rank;
            if base_rank == 0 || base_rank + 2 > code.rank {
                return Err(Error::BadBaseRank { base_rank, max: code.rank as i64 - 2 });
            }
            if base_member.age >= params.n() {
                return Err(Error::AgeExhausted(base_member.age));
            }
            let g = pool.gamma_count(base_rank);
            (Interval::new(base_rank + 1, top), &g * &g, base_member.age + 1)
        }
    };
    if code.n < lower || code.n > upper {
        return Err(Error::BadN { n: code.n.clone(), min: lower, max: upper });
    }
    let k = code.k();
    if k == 0 || BigUint::from(k) > code.n {
        return Err(Error::BadK { k, n: code.n.clone() });
    }
    for (index, e) in code.entries.iter().enumerate() {
        if !e.interval.is_subset(&allowed) || e.interval.lo > e.interval.hi {
            return Err(Error::IntervalOutOfRange {
                index,
                lo: e.interval.lo,
                hi: e.interval.hi,
                min: allowed.lo,
                max: allowed.hi,
            });
        }
        if index > 0 && !code.entries[index - 1].interval.precedes(&e.interval) {
            return Err(Error::NonSuccessiveIntervals(index));
        }
        let rank = pool.rank(e.eta)?;
        if !e.interval.contains(rank) {
            return Err(Error::RankMismatch { index, rank, lo: e.interval.lo, hi: e.interval.hi });
        }
    }
    Ok(age)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_plus(pool: &Pool) -> TupleCode {
        TupleCode::type_i(1, 1u32, vec![Entry::new(Sign::Plus, Interval::single(0), pool.gamma0())])
    }

    #[test]
    fn level_one_tuple_is_admissible() {
        let pool = Pool::new(X0Params::default());
        assert_eq!(validate_tuple(&delta_plus(&pool), &pool), Ok(1));
    }

    #[test]
    fn clause_errors() {
        let mut pool = Pool::new(X0Params::default());
        let g0 = pool.gamma0();
        let e0 = Entry::new(Sign::Plus, Interval::single(0), g0);

        let big_n = TupleCode::type_i(1, 2u32, vec![e0.clone()]);
        assert!(matches!(validate_tuple(&big_n, &pool), Err(Error::BadN { .. })));

        let no_entries = TupleCode::type_i(1, 1u32, vec![]);
        assert!(matches!(validate_tuple(&no_entries, &pool), Err(Error::BadK { .. })));

        let plus = pool.materialize(delta_plus(&pool)).unwrap();
        let type_ii = TupleCode::type_ii(2, plus, 1u32, vec![e0.clone()]);
        assert!(matches!(validate_tuple(&type_ii, &pool), Err(Error::BadBaseRank { .. })));
        let on_atom = TupleCode::type_ii(3, g0, 9u32, vec![]);
        assert!(matches!(validate_tuple(&on_atom, &pool), Err(Error::BadBaseRank { .. })));

        let overlapping = TupleCode::type_i(
            2,
            2u32,
            vec![e0.clone(), Entry::new(Sign::Plus, Interval::new(0, 1), plus)],
        );
        assert_eq!(validate_tuple(&overlapping, &pool), Err(Error::NonSuccessiveIntervals(1)));

        let mismatch = TupleCode::type_i(2, 1u32, vec![Entry::new(Sign::Minus, Interval::single(1), g0)]);
        assert!(matches!(validate_tuple(&mismatch, &pool), Err(Error::RankMismatch { .. })));

        let outside = TupleCode::type_i(2, 1u32, vec![Entry::new(Sign::Minus, Interval::new(1, 2), plus)]);
        assert!(matches!(validate_tuple(&outside, &pool), Err(Error::IntervalOutOfRange { .. })));
    }

    #[test]
    fn idempotent_materialize() {
        let mut pool = Pool::new(X0Params::default());
        let a = pool.materialize(delta_plus(&pool)).unwrap();
        let b = pool.materialize(delta_plus(&pool)).unwrap();
        assert_eq!(a, b);
        assert_eq!(pool.len(), 2);
    }

    #[test]
    fn dangling_reference() {
        let mut pool = Pool::new(X0Params::default());
        let code = TupleCode::type_i(1, 1u32, vec![Entry::new(Sign::Plus, Interval::single(0), GammaId(42))]);
        assert!(matches!(pool.materialize(code), Err(Error::UnknownGamma(_))));
    }

    #[test]
    fn record_round_trip() {
        let mut pool = Pool::new(X0Params::default());
        let code = delta_plus(&pool);
        pool.materialize(code.clone()).unwrap();
        let text = pool.encode(&code).unwrap();
        assert!(text.starts_with("T1 1 1 [(+1 0 0 "));
        assert_eq!(pool.decode(&text).unwrap(), code);
        assert!(pool.decode("T3 1 1 []").is_err());
    }

    #[test]
    fn revalidate_flags_forced_member() {
        let mut pool = Pool::new(X0Params::default());
        let bad = TupleCode::type_i(1, 2u32, vec![Entry::new(Sign::Plus, Interval::single(0), pool.gamma0())]);
        let id = pool.insert_unvalidated(bad).unwrap();
        let offenders = pool.revalidate();
        assert_eq!(offenders.len(), 1);
        assert_eq!(offenders[0].0, id);
        assert!(matches!(offenders[0].1, Error::BadN { .. }));
    }
}
