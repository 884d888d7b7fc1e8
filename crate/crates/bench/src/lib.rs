//! Shared fixtures for the benchmarks in `benches/`.

use bdlab_core::x0::build_space;
use bdlab_core::{Pool, TruncatedSpace, X0Params};
use num_bigint::BigUint;

/// The exhaustive pool through `q` at the default parameters.
pub fn pool(q: u32) -> Pool {
    Pool::exhaustive(X0Params::default(), q, &BigUint::from(100_000u32)).expect("level within budget")
}

pub fn pool_and_space(q: u32) -> (Pool, TruncatedSpace) {
    let pool = pool(q);
    let space = build_space(&pool, q).expect("pool is complete");
    (pool, space)
}
