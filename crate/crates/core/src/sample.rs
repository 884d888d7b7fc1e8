//! Seeded instance generators for the property suites.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`; each generator uses
//! its own stream so suites do not perturb each other.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exact::{GammaId, Rational, SparseRow};
use crate::framework::TruncatedSpace;
use crate::interval::Interval;
use crate::norm::{norm_interval, Average, BlockVector};
use crate::x0::{Entry, Pool, Sign};

const STREAM_COORDS: u64 = 1;
const STREAM_AVG: u64 = 2;
const STREAM_C0: u64 = 3;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn small_rational(rng: &mut impl Rng) -> Rational {
    let num: i64 = rng.gen_range(-12..=12);
    let den: i64 = rng.gen_range(1..=9);
    Rational::new(num.into(), den.into())
}

/// Random vectors of `ℓ∞(Γ_Q)`; sample 0 is the zero vector.
pub fn coordinate_vectors(space: &TruncatedSpace, count: usize, seed: u64) -> Vec<SparseRow> {
    let mut rng = rng(seed, STREAM_COORDS);
    let ids = space.structure().all();
    (0..count)
        .map(|i| {
            if i == 0 {
                return SparseRow::new();
            }
            let density = rng.gen_range(1..=ids.len());
            let mut row = SparseRow::new();
            for &id in ids.choose_multiple(&mut rng, density) {
                row.set(id, small_rational(&mut rng));
            }
            row
        })
        .collect()
}

/// Scales `x` so that its certified upper norm bound is exactly one.
fn normalize(pool: &Pool, x: BlockVector) -> Result<BlockVector> {
    let upper = norm_interval(pool, &x)?.upper;
    if upper.is_zero() {
        return Ok(x);
    }
    Ok(x.scale(&(Rational::from_integer(1.into()) / upper)))
}

/// `m` successive blocks over the basis positions `order[start..]`, each of
/// one or two consecutive basis vectors, normalized.
fn blocks_from(pool: &Pool, rng: &mut impl Rng, order: &[GammaId], start: usize, m: usize) -> Result<Vec<BlockVector>> {
    let mut pos = start;
    let mut blocks = Vec::new();
    for b in 0..m {
        let remaining_blocks = m - b - 1;
        let room = order.len() - pos - remaining_blocks;
        let width = rng.gen_range(1..=room.min(2));
        let mut coeffs = SparseRow::new();
        for &id in &order[pos..pos + width] {
            let mut v = small_rational(rng);
            if v.is_zero() {
                v = Rational::from_integer(1.into());
            }
            coeffs.set(id, v);
        }
        pos += width;
        // leave a random gap when there is room for it
        if pos < order.len() - remaining_blocks && rng.gen_bool(0.3) {
            pos += 1;
        }
        blocks.push(normalize(pool, BlockVector::new(pool, coeffs)?)?);
    }
    Ok(blocks)
}

/// Basis order `(rank, id)` of the pool.
fn basis_order(pool: &Pool) -> Vec<GammaId> {
    let mut ids: Vec<GammaId> = pool.ids().collect();
    ids.sort_by_key(|&id| (pool.rank(id).expect("member"), id));
    ids
}

/// Instances `(blocks, average)` satisfying the averaging hypotheses.
pub fn avg_instances(pool: &Pool, count: usize, seed: u64) -> Result<Vec<(Vec<BlockVector>, Average)>> {
    let mut rng = rng(seed, STREAM_AVG);
    let order = basis_order(pool);
    let top = pool.max_rank();
    let mut out = Vec::new();
    for _ in 0..count {
        let m = rng.gen_range(1..=3usize.min(order.len()));
        let start = rng.gen_range(0..=order.len() - m);
        let blocks = blocks_from(pool, &mut rng, &order, start, m.min(order.len() - start))?;

        let mut entries = Vec::new();
        let mut lo = rng.gen_range(0..=top);
        while lo <= top {
            let hi = rng.gen_range(lo..=top);
            let candidates: Vec<GammaId> = order
                .iter()
                .copied()
                .filter(|id| (lo..=hi).contains(&pool.rank(*id).expect("member")))
                .collect();
            let eta = *candidates.choose(&mut rng).expect("every level is non-empty");
            entries.push(Entry::new(Sign::of(rng.gen_bool(0.5)), Interval::new(lo, hi), eta));
            if rng.gen_bool(0.4) {
                break;
            }
            lo = hi + 1 + rng.gen_range(0..=1);
        }
        let k = entries.len();
        let n = (blocks.len() * blocks.len()).max(k) + rng.gen_range(0..=2);
        out.push((blocks, Average { n: BigUint::from(n), entries }));
    }
    Ok(out)
}

/// Families of successive normalized blocks with `m ≤ basis_floor(u₁)`.
pub fn c0_families(pool: &Pool, count: usize, seed: u64) -> Result<Vec<Vec<BlockVector>>> {
    let mut rng = rng(seed, STREAM_C0);
    let order = basis_order(pool);
    let mut out = Vec::new();
    for _ in 0..count {
        let start = rng.gen_range(0..order.len());
        let floor = BlockVector::basis(pool, order[start])?.basis_floor(pool);
        let room = order.len() - start;
        let cap = room.min(4).min(floor.to_usize().unwrap_or(usize::MAX));
        let m = rng.gen_range(1..=cap);
        out.push(blocks_from(pool, &mut rng, &order, start, m)?);
    }
    Ok(out)
}
