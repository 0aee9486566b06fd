//! Exact integer linear algebra and a fixed-width bitset.

use num_bigint::BigInt;
use num_traits::Zero;

/// Mersenne prime 2^61 - 1.
const P: u64 = (1u64 << 61) - 1;

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    let prod = a as u128 * b as u128;
    let lo = (prod as u64) & P;
    let hi = (prod >> 61) as u64;
    let s = lo + hi;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

#[inline]
fn to_mod(v: i64) -> u64 {
    let r = (v as i128).rem_euclid(P as i128);
    r as u64
}

/// Hadamard bound on any minor, as log2.
fn log2_minor_bound(rows: &[&[i64]], cols: usize) -> f64 {
    let mut norms: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt())
        .filter(|&n| n > 0.0)
        .collect();
    norms.sort_by(|a, b| b.partial_cmp(a).unwrap());
    norms.iter().take(cols).map(|n| n.log2()).sum()
}

/// Rank of an integer matrix, exact.
///
/// Elimination runs modulo 2^61 - 1. When the Hadamard bound shows that every
/// minor is smaller than the modulus in absolute value, a minor vanishes mod p
/// iff it vanishes over the integers, so the modular rank is the true rank.
/// Otherwise a fraction-free elimination over big integers is used.
pub fn integer_rank(rows: &[&[i64]]) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    if log2_minor_bound(rows, cols) < 60.0 {
        modular_rank(rows, cols, usize::MAX)
    } else {
        bareiss_rank(rows, cols)
    }
}

/// Same as [`integer_rank`] but stops early once `target` is reached.
pub fn integer_rank_at_least(rows: &[&[i64]], target: usize) -> bool {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.len() < target {
        return false;
    }
    if log2_minor_bound(rows, cols) < 60.0 {
        modular_rank(rows, cols, target) >= target
    } else {
        bareiss_rank(rows, cols) >= target
    }
}

fn modular_rank(rows: &[&[i64]], cols: usize, stop_at: usize) -> usize {
    // Row-reduce incrementally: keep a reduced basis with pivots, insert rows one by one.
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::with_capacity(cols);
    for row in rows {
        let mut v: Vec<u64> = row.iter().map(|&x| to_mod(x)).collect();
        for (piv, b) in &basis {
            let f = v[*piv];
            if f != 0 {
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = (*vi + P - mulmod(f, bi)) % P;
                }
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = powmod(v[piv], P - 2);
            for vi in v.iter_mut() {
                *vi = mulmod(*vi, inv);
            }
            basis.push((piv, v));
            if basis.len() >= stop_at || basis.len() == cols {
                break;
            }
        }
    }
    basis.len()
}

fn bareiss_rank(rows: &[&[i64]], cols: usize) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let n_rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        let Some(piv) = (rank..n_rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in (rank + 1)..n_rows {
            for c in (col + 1)..cols {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == n_rows {
            break;
        }
    }
    rank
}

/// Affine rank of a point set: rank of `{v_i - v_0}`.
pub fn affine_rank(points: &[Vec<i64>]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<i64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    let refs: Vec<&[i64]> = diffs.iter().map(Vec::as_slice).collect();
    integer_rank(&refs)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(bits: usize) -> Self {
        Bitset {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn intersection(&self, other: &Bitset) -> Bitset {
        Bitset {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    #[inline]
    pub fn intersection_count(&self, other: &Bitset) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn count(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}
