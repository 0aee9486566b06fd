//! Normal forms of inequalities under relabeling of inputs and outputs.
//!
//! Two inequalities describe the same face of the polytope when they differ by
//! (a) adding a multiple of a normalization constraint `sum_b p(b|x) = 1`,
//! (b) a positive rescaling, or (c) permutations of the input and output
//! labels. The gauge (a) is fixed by shifting every row to have minimum 0,
//! (b) by dividing everything by the gcd, and (c) by taking the
//! lexicographically smallest coefficient matrix over `S_|X| x S_|B|`.

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{Inequality, Rational, Scenario};

/// Integer inequality `sum c[x][b] p(b|x) <= bound`, rows min-zero, gcd 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FacetForm {
    pub n_x: usize,
    pub n_b: usize,
    pub coeffs: Vec<Vec<i64>>,
    pub bound: i64,
}

impl FacetForm {
    /// Applies the gauge and gcd normalization.
    pub fn normalized(coeffs: Vec<Vec<i64>>, bound: i64) -> FacetForm {
        let n_x = coeffs.len();
        let n_b = coeffs.first().map_or(0, Vec::len);
        let mut coeffs = coeffs;
        let mut bound = bound;
        for row in coeffs.iter_mut() {
            let lo = *row.iter().min().unwrap_or(&0);
            for v in row.iter_mut() {
                *v -= lo;
            }
            bound -= lo;
        }
        let g = coeffs.iter().flatten().fold(bound.abs(), |g, &v| g.gcd(&v));
        if g > 1 {
            for v in coeffs.iter_mut().flatten() {
                *v /= g;
            }
            bound /= g;
        }
        FacetForm {
            n_x,
            n_b,
            coeffs,
            bound,
        }
    }

    /// Exact integer form of a rational inequality.
    pub fn from_inequality(ineq: &Inequality) -> FacetForm {
        let lcm = ineq
            .coeffs
            .iter()
            .flatten()
            .chain(std::iter::once(&ineq.bound))
            .fold(1i64, |l, q| l.lcm(q.denom()));
        let scale = |q: &Rational| (q * Rational::from_integer(lcm)).to_integer();
        let coeffs = ineq
            .coeffs
            .iter()
            .map(|r| r.iter().map(scale).collect())
            .collect();
        FacetForm::normalized(coeffs, scale(&ineq.bound))
    }

    pub fn to_inequality(&self, name: impl Into<String>, d: usize) -> Result<Inequality> {
        let scenario = Scenario::new(d, self.n_x, self.n_b)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
            .collect();
        Inequality::new(name, scenario, coeffs, Rational::from_integer(self.bound))
    }

    /// `new[x][b] = old[sigma[x]][pi[b]]`, renormalized.
    pub fn relabeled(&self, sigma: &[usize], pi: &[usize]) -> FacetForm {
        let coeffs = (0..self.n_x)
            .map(|x| (0..self.n_b).map(|b| self.coeffs[sigma[x]][pi[b]]).collect())
            .collect();
        FacetForm::normalized(coeffs, self.bound)
    }

    /// Lexicographically smallest relabeling. For a fixed output permutation
    /// the best input permutation simply sorts the rows.
    pub fn canonical(&self) -> FacetForm {
        let mut best: Option<Vec<Vec<i64>>> = None;
        for pi in permutations(self.n_b) {
            let mut rows: Vec<Vec<i64>> = self
                .coeffs
                .iter()
                .map(|r| pi.iter().map(|&b| r[b]).collect())
                .collect();
            rows.sort();
            if best.as_ref().is_none_or(|cur| rows < *cur) {
                best = Some(rows);
            }
        }
        FacetForm {
            n_x: self.n_x,
            n_b: self.n_b,
            coeffs: best.unwrap_or_default(),
            bound: self.bound,
        }
    }

    /// Equivalent to a positivity constraint `p(b|x) >= 0`: after shifting
    /// each row to maximum 0, exactly one coefficient is nonzero.
    pub fn is_trivial(&self) -> bool {
        let nonzero: usize = self
            .coeffs
            .iter()
            .map(|r| {
                let hi = *r.iter().max().unwrap_or(&0);
                r.iter().filter(|&&v| v != hi).count()
            })
            .sum();
        nonzero == 1
    }

    /// Ignores an input (constant row) or cannot tell two outputs apart
    /// (identical columns): the inequality is lifted from a smaller scenario.
    pub fn is_lifted(&self) -> bool {
        if self.coeffs.iter().any(|r| r.iter().all(|&v| v == r[0])) {
            return true;
        }
        (0..self.n_b).any(|b1| {
            ((b1 + 1)..self.n_b).any(|b2| self.coeffs.iter().all(|r| r[b1] == r[b2]))
        })
    }

    /// A guessing game: 0/1 coefficients with every output rewarding at most
    /// one input, i.e. Bob names a guess for `x`. Entanglement cannot raise
    /// the value of such games above the classical one.
    pub fn is_discrimination(&self) -> bool {
        if self.coeffs.iter().flatten().any(|&v| v != 0 && v != 1) {
            return false;
        }
        (0..self.n_b).all(|b| self.coeffs.iter().filter(|r| r[b] != 0).count() <= 1)
    }

    /// Number of distinct relabelings.
    pub fn orbit_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let sigmas = permutations(self.n_x);
        for pi in permutations(self.n_b) {
            for sigma in &sigmas {
                seen.insert(self.relabeled(sigma, &pi));
            }
        }
        seen.len()
    }

    pub fn evaluate_int(&self, p: &[Vec<u8>]) -> i64 {
        self.coeffs
            .iter()
            .zip(p)
            .flat_map(|(c, r)| c.iter().zip(r).map(|(&a, &b)| a * b as i64))
            .sum()
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Canonical class of an inequality, checking that it is integral-compatible.
pub fn canonical_form(ineq: &Inequality) -> Result<FacetForm> {
    if ineq.coeffs.iter().flatten().any(|q| q.denom().is_zero()) {
        return Err(Error::InvalidArgument("degenerate rational".into()));
    }
    Ok(FacetForm::from_inequality(ineq).canonical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin_inequality;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(5).len(), 120);
    }

    #[test]
    fn gauge_normalization() {
        let (_, t1) = builtin_inequality("T45-1").unwrap();
        let f = FacetForm::from_inequality(&t1);
        assert_eq!(f.coeffs[3], vec![1, 0, 0, 1, 0]);
        assert_eq!(f.coeffs[2], vec![1, 0, 1, 0, 0]);
        assert_eq!(f.bound, 4);
        let (_, s1) = builtin_inequality("S1").unwrap();
        let f = FacetForm::from_inequality(&s1);
        assert_eq!(f.coeffs[0], vec![2, 0, 0, 1]);
        assert_eq!(f.bound, 4);
    }

    #[test]
    fn canonical_is_relabeling_invariant() {
        let (_, t8) = builtin_inequality("T45-8").unwrap();
        let f = FacetForm::from_inequality(&t8);
        let c = f.canonical();
        let sigma = [2, 0, 3, 1];
        let pi = [4, 2, 0, 1, 3];
        assert_eq!(f.relabeled(&sigma, &pi).canonical(), c);
    }

    #[test]
    fn positivity_is_trivial() {
        let mut coeffs = vec![vec![0i64; 4]; 3];
        coeffs[1][2] = -1;
        let f = FacetForm::normalized(coeffs, 0);
        assert!(f.is_trivial());
        let (_, s1) = builtin_inequality("S1").unwrap();
        assert!(!FacetForm::from_inequality(&s1).is_trivial());
    }

    #[test]
    fn lifted_detection() {
        let (_, t10) = builtin_inequality("T45-10").unwrap();
        assert!(FacetForm::from_inequality(&t10).is_lifted());
        let (_, t1) = builtin_inequality("T45-1").unwrap();
        assert!(!FacetForm::from_inequality(&t1).is_lifted());
        let (_, s2) = builtin_inequality("S2").unwrap();
        assert!(!FacetForm::from_inequality(&s2).is_lifted());
    }

    #[test]
    fn discrimination_detection() {
        let (_, sd) = builtin_inequality("SD(2,3,3)").unwrap();
        assert!(FacetForm::from_inequality(&sd).is_discrimination());
        for name in ["S1", "S2", "S3", "T45-10", "T45-11"] {
            let (_, i) = builtin_inequality(name).unwrap();
            assert!(!FacetForm::from_inequality(&i).is_discrimination(), "{name}");
        }
    }

    #[test]
    fn orbit_of_s1() {
        let (_, s1) = builtin_inequality("S1").unwrap();
        // 3! input relabelings times a choice of which output is the discard
        // symbol, combined with consistent guess labels: 4 * 3! = 24
        assert_eq!(FacetForm::from_inequality(&s1).orbit_size(), 24);
    }
}
