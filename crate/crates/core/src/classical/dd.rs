//! Double description: vertices of a full-dimensional polytope to facets.
//!
//! The facets of `conv{v_i}` are the extreme rays of the cone
//! `{ (a0, a) : a0 + a.v_i >= 0 for all i }`. Constraints are inserted one at
//! a time in the given order; rays are integer vectors kept primitive (gcd 1).
//! New rays are formed only from adjacent pairs, where adjacency is decided by
//! the exact rank of the constraints both rays satisfy with equality.
//!
//! Arithmetic first runs in `i128` with overflow checks and transparently
//! restarts over `BigInt` if any intermediate value overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use super::exact::{integer_rank, integer_rank_at_least, Bitset};
use crate::error::{Error, Result};

/// A facet `offset + normal . v >= 0`, primitive integer data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    pub offset: i64,
    pub normal: Vec<i64>,
}

trait RayInt: Clone + Integer + Signed + CheckedAdd + CheckedMul + CheckedSub {
    fn from_i64(v: i64) -> Self;
    fn into_i64(self) -> Option<i64>;
}

impl RayInt for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn into_i64(self) -> Option<i64> {
        i64::try_from(self).ok()
    }
}

impl RayInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn into_i64(self) -> Option<i64> {
        self.to_i64()
    }
}

struct Overflow;

struct Ray<T> {
    coords: Vec<T>,
    tight: Bitset,
}

/// Facets of the convex hull of `points`, which must affinely span their
/// ambient space. Output is sorted.
pub fn facets_of_hull(points: &[Vec<i64>]) -> Result<Vec<HalfSpace>> {
    let dim = points.first().map_or(0, Vec::len);
    if points.len() < dim + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} points cannot span dimension {dim}",
            points.len()
        )));
    }
    let rows: Vec<Vec<i64>> = points
        .iter()
        .map(|p| std::iter::once(1).chain(p.iter().copied()).collect())
        .collect();
    let mut out = match run::<i128>(&rows) {
        Ok(r) => r?,
        Err(Overflow) => match run::<BigInt>(&rows) {
            Ok(r) => r?,
            Err(Overflow) => {
                return Err(Error::InvalidArgument(
                    "facet coefficients exceed 64-bit range".into(),
                ))
            }
        },
    };
    out.sort();
    Ok(out)
}

fn dot<T: RayInt>(row: &[i64], coords: &[T]) -> std::result::Result<T, Overflow> {
    let mut acc = T::zero();
    for (&r, c) in row.iter().zip(coords) {
        if r == 0 {
            continue;
        }
        let term = if r == 1 {
            c.clone()
        } else {
            c.checked_mul(&T::from_i64(r)).ok_or(Overflow)?
        };
        acc = acc.checked_add(&term).ok_or(Overflow)?;
    }
    Ok(acc)
}

fn make_primitive<T: RayInt>(v: &mut [T]) {
    let g = v.iter().fold(T::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = x.div_floor(&g);
        }
    }
}

fn initial_rays<T: RayInt>(rows: &[Vec<i64>]) -> Result<(Vec<usize>, Vec<Vec<T>>)> {
    let n = rows[0].len();
    // greedy independent subset in insertion order
    let mut basis: Vec<usize> = Vec::with_capacity(n);
    for i in 0..rows.len() {
        let mut trial: Vec<&[i64]> = basis.iter().map(|&k| rows[k].as_slice()).collect();
        trial.push(&rows[i]);
        if integer_rank(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == n {
                break;
            }
        }
    }
    if basis.len() < n {
        return Err(Error::InvalidArgument(format!(
            "points span only dimension {}, expected {}",
            basis.len().saturating_sub(1),
            n - 1
        )));
    }
    // invert the basis matrix exactly; its columns are the initial rays
    let mut m: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|&k| {
            let mut r: Vec<BigRational> = rows[k].iter().map(|&v| BigRational::from_integer(v.into())).collect();
            r.extend((0..n).map(|j| {
                if basis[j] == k {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("basis is independent");
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &m[col][c];
                    m[r][c] = &m[r][c] - sub;
                }
            }
        }
    }
    let mut rays = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<BigRational> = (0..n).map(|r| m[r][n + j].clone()).collect();
        let lcm = col.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let mut ints: Vec<BigInt> = col.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        make_primitive(&mut ints);
        let mut coords = Vec::with_capacity(n);
        for v in ints {
            let v = v
                .to_i64()
                .ok_or_else(|| Error::InvalidArgument("initial ray too large".into()))?;
            coords.push(T::from_i64(v));
        }
        rays.push(coords);
    }
    Ok((basis, rays))
}

fn run<T: RayInt>(rows: &[Vec<i64>]) -> std::result::Result<Result<Vec<HalfSpace>>, Overflow> {
    let m = rows.len();
    let n = rows[0].len();
    let (basis, init) = match initial_rays::<T>(rows) {
        Ok(v) => v,
        Err(e) => return Ok(Err(e)),
    };
    let mut processed = Bitset::new(m);
    for &k in &basis {
        processed.set(k);
    }
    let mut rays: Vec<Ray<T>> = Vec::with_capacity(init.len());
    for coords in init {
        let mut tight = Bitset::new(m);
        for &k in &basis {
            if dot(&rows[k], &coords)?.is_zero() {
                tight.set(k);
            }
        }
        rays.push(Ray { coords, tight });
    }

    let order: Vec<usize> = (0..m).filter(|i| !processed.get(*i)).collect();
    let mut n_processed = basis.len();
    for i in order {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        let mut values = Vec::with_capacity(rays.len());
        for (idx, ray) in rays.iter().enumerate() {
            let s = dot(&rows[i], &ray.coords)?;
            if s.is_positive() {
                pos.push(idx);
            } else if s.is_negative() {
                neg.push(idx);
            } else {
                zero.push(idx);
            }
            values.push(s);
        }
        if neg.is_empty() {
            for &z in &zero {
                rays[z].tight.set(i);
            }
            processed.set(i);
            n_processed += 1;
            continue;
        }

        let mut fresh: Vec<Ray<T>> = Vec::new();
        let needed = n.saturating_sub(2);
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].tight.intersection_count(&rays[q].tight) as usize;
                if common < needed {
                    continue;
                }
                let z = rays[p].tight.intersection(&rays[q].tight);
                let zrows: Vec<&[i64]> = z.iter().map(|k| rows[k].as_slice()).collect();
                if !integer_rank_at_least(&zrows, needed) {
                    continue;
                }
                let sp = &values[p];
                let sq = &values[q];
                let mut coords = Vec::with_capacity(n);
                for (a, b) in rays[q].coords.iter().zip(&rays[p].coords) {
                    let t1 = sp.checked_mul(a).ok_or(Overflow)?;
                    let t2 = sq.checked_mul(b).ok_or(Overflow)?;
                    coords.push(t1.checked_sub(&t2).ok_or(Overflow)?);
                }
                make_primitive(&mut coords);
                let mut tight = z;
                tight.set(i);
                fresh.push(Ray { coords, tight });
            }
        }

        let mut next: Vec<Ray<T>> = Vec::with_capacity(pos.len() + zero.len() + fresh.len());
        let mut keep = vec![false; rays.len()];
        for &p in &pos {
            keep[p] = true;
        }
        for &z in &zero {
            keep[z] = true;
        }
        for (idx, mut ray) in rays.into_iter().enumerate() {
            if keep[idx] {
                if values[idx].is_zero() {
                    ray.tight.set(i);
                }
                next.push(ray);
            }
        }
        next.extend(fresh);
        rays = next;
        processed.set(i);
        n_processed += 1;
    }
    debug_assert_eq!(n_processed, m);

    let mut out = Vec::with_capacity(rays.len());
    for ray in rays {
        let mut it = ray.coords.into_iter().map(T::into_i64);
        let offset = match it.next().flatten() {
            Some(v) => v,
            None => return Err(Overflow),
        };
        let normal: Option<Vec<i64>> = it.collect();
        match normal {
            Some(normal) => out.push(HalfSpace { offset, normal }),
            None => return Err(Overflow),
        }
    }
    Ok(Ok(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        let f = facets_of_hull(&pts).unwrap();
        let expect = vec![
            HalfSpace { offset: 0, normal: vec![0, 1] },
            HalfSpace { offset: 0, normal: vec![1, 0] },
            HalfSpace { offset: 1, normal: vec![-1, 0] },
            HalfSpace { offset: 1, normal: vec![0, -1] },
        ];
        let mut expect = expect;
        expect.sort();
        assert_eq!(f, expect);
    }

    #[test]
    fn cube_and_cross_polytope() {
        let cube: Vec<Vec<i64>> = (0..8).map(|m| (0..3).map(|k| (m >> k) & 1).collect()).collect();
        assert_eq!(facets_of_hull(&cube).unwrap().len(), 6);
        let mut cross = Vec::new();
        for k in 0..3 {
            for s in [-1, 1] {
                let mut v = vec![0; 3];
                v[k] = s;
                cross.push(v);
            }
        }
        let f = facets_of_hull(&cross).unwrap();
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|h| h.offset == 1 && h.normal.iter().all(|c| c.abs() == 1)));
    }

    #[test]
    fn interior_points_do_not_create_facets() {
        let pts = vec![vec![0, 0], vec![4, 0], vec![0, 4], vec![1, 1], vec![2, 1]];
        let f = facets_of_hull(&pts).unwrap();
        assert_eq!(f.len(), 3);
        for h in &f {
            for p in &pts {
                assert!(h.offset + h.normal.iter().zip(p).map(|(a, b)| a * b).sum::<i64>() >= 0);
            }
        }
    }

    #[test]
    fn lower_dimensional_input_is_rejected() {
        let pts = vec![vec![0, 0], vec![1, 1], vec![2, 2]];
        assert!(facets_of_hull(&pts).is_err());
    }

    #[test]
    fn bigint_path_matches_i128() {
        let rows: Vec<Vec<i64>> = [vec![0, 0], vec![3, 0], vec![0, 5], vec![2, 2]]
            .iter()
            .map(|p| std::iter::once(1).chain(p.iter().copied()).collect())
            .collect();
        let a = match run::<i128>(&rows) {
            Ok(r) => r.unwrap(),
            Err(_) => panic!("overflow"),
        };
        let b = match run::<BigInt>(&rows) {
            Ok(r) => r.unwrap(),
            Err(_) => panic!("overflow"),
        };
        let (mut a, mut b) = (a, b);
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
    }
}
