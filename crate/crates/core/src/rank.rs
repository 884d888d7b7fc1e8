//! Exact rank of a family of rational rows by fraction-free (Bareiss)
//! elimination over the integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{GammaId, SparseRow};

/// Rank of the span of `rows`.
pub fn rank(rows: &[SparseRow]) -> usize {
    let mut columns: BTreeMap<GammaId, usize> = BTreeMap::new();
    for row in rows {
        for id in row.ids() {
            let next = columns.len();
            columns.entry(id).or_insert(next);
        }
    }
    let width = columns.len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| integer_row(r, &columns, width))
        .collect();
    bareiss_rank(&mut m, width)
}

/// Clears denominators: multiplies the row by the lcm of its denominators.
fn integer_row(row: &SparseRow, columns: &BTreeMap<GammaId, usize>, width: usize) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut out = vec![BigInt::zero(); width];
    for (id, v) in row.iter() {
        out[columns[&id]] = v.numer() * (&lcm / v.denom());
    }
    out
}

fn bareiss_rank(m: &mut [Vec<BigInt>], width: usize) -> usize {
    let rows = m.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..width {
        if r == rows {
            break;
        }
        let Some(pivot) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in (r + 1)..rows {
            for j in (col + 1)..width {
                let v = (&m[r][col] * &m[i][j] - &m[i][col] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        r += 1;
    }
    r
}
