//! Classical messages restricted by information content rather than alphabet
//! size.
//!
//! Preparations and measurements are diagonal in one basis, so an ensemble is
//! just a table `p(m|x)` with priors. The message alphabet matches Bob's
//! outputs for the facet family: `0..n` and the discard label `n`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{evaluate, facet_family, Behavior};

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalEnsemble {
    pub priors: Vec<f64>,
    /// `dists[x][m] = p(m|x)`.
    pub dists: Vec<Vec<f64>>,
}

fn check_distribution(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidArgument(format!("{what} has a negative or non-finite entry")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidArgument(format!("{what} sums to {s}")));
    }
    Ok(())
}

impl DiagonalEnsemble {
    pub fn new(priors: Vec<f64>, dists: Vec<Vec<f64>>) -> Result<Self> {
        let e = DiagonalEnsemble { priors, dists };
        e.validate()?;
        Ok(e)
    }

    /// Uniform priors over the rows of `dists`.
    pub fn uniform(dists: Vec<Vec<f64>>) -> Result<Self> {
        let n = dists.len();
        Self::new(vec![1.0 / n as f64; n], dists)
    }

    pub fn validate(&self) -> Result<()> {
        if self.priors.is_empty() || self.priors.len() != self.dists.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} priors for {} distributions",
                self.priors.len(),
                self.dists.len()
            )));
        }
        let k = self.dists[0].len();
        if k == 0 || self.dists.iter().any(|d| d.len() != k) {
            return Err(Error::ShapeMismatch("distributions of unequal length".into()));
        }
        check_distribution(&self.priors, "priors")?;
        for (x, d) in self.dists.iter().enumerate() {
            check_distribution(d, &format!("p(.|{x})"))?;
        }
        Ok(())
    }

    pub fn n_inputs(&self) -> usize {
        self.priors.len()
    }

    pub fn n_labels(&self) -> usize {
        self.dists[0].len()
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.n_inputs() as f64;
        self.priors.iter().all(|p| (p - u).abs() <= SUM_TOL)
    }

    /// Bob reads the label and outputs it.
    pub fn induced_behavior(&self) -> Result<Behavior> {
        Behavior::new(self.dists.clone())
    }
}

/// `P_g = sum_m max_x p_x p(m|x)`.
pub fn guessing_probability(e: &DiagonalEnsemble) -> f64 {
    (0..e.n_labels())
        .map(|m| {
            e.priors
                .iter()
                .zip(&e.dists)
                .map(|(p, d)| p * d[m])
                .fold(0.0, f64::max)
        })
        .sum()
}

/// Min-entropy information `H_min(X) - H_min(X|B)` in bits; for uniform priors
/// this is `log2 n + log2 P_g`.
pub fn accessible_info_bits(e: &DiagonalEnsemble) -> f64 {
    let pmax = e.priors.iter().copied().fold(0.0, f64::max);
    guessing_probability(e).log2() - pmax.log2()
}

/// Largest value of the facet family under a one-bit restriction,
/// `n (2n - 3) / (2 (n - 1)^2)`.
pub fn info_bound_value(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need n >= 3, got {n}")));
    }
    let n = n as f64;
    Ok(n * (2.0 * n - 3.0) / (2.0 * (n - 1.0) * (n - 1.0)))
}

/// `rho_x = |x><x| / (n-1) + (n-2)/(n-1) |discard><discard|` with uniform priors.
pub fn achieving_ensemble(n: usize) -> Result<DiagonalEnsemble> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need n >= 3, got {n}")));
    }
    let hit = 1.0 / (n - 1) as f64;
    let dists = (0..n)
        .map(|x| {
            let mut d = vec![0.0; n + 1];
            d[x] = hit;
            d[n] = 1.0 - hit;
            d
        })
        .collect();
    DiagonalEnsemble::uniform(dists)
}

/// Value of the facet family on the behavior induced by `e`.
pub fn facet_value(e: &DiagonalEnsemble, n: usize) -> Result<f64> {
    evaluate(&facet_family(n)?, &e.induced_behavior()?)
}

/// Whether `e` respects the one-bit bound. Errors if `e` does not satisfy the
/// premises (uniform priors, at most one bit, `n` inputs and `n + 1` labels).
pub fn check_info_inequality(e: &DiagonalEnsemble, n: usize) -> Result<bool> {
    e.validate()?;
    if e.n_inputs() != n || e.n_labels() != n + 1 {
        return Err(Error::ShapeMismatch(format!(
            "ensemble is {}x{}, expected {n}x{}",
            e.n_inputs(),
            e.n_labels(),
            n + 1
        )));
    }
    if !e.is_uniform() {
        return Err(Error::InvalidArgument("priors must be uniform".into()));
    }
    let info = accessible_info_bits(e);
    if info > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("ensemble carries {info} bits")));
    }
    Ok(facet_value(e, n)? <= info_bound_value(n)? + 1e-12)
}

/// Random ensemble on `n` inputs and `n + 1` labels carrying exactly one bit.
///
/// Rows are flat-Dirichlet samples. Mixing every row with the same distribution
/// moves `n P_g` linearly between 1 and its value at the sample, so the
/// weight giving `n P_g = 2` is solved for directly. Samples already below
/// one bit are redrawn.
pub fn random_one_bit_ensemble<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<DiagonalEnsemble> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    let k = n + 1;
    loop {
        let dists: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|v| v / s).collect()
            })
            .collect();
        let a: f64 = (0..k)
            .map(|m| dists.iter().map(|d| d[m]).fold(0.0, f64::max))
            .sum();
        if a <= 2.0 {
            continue;
        }
        let t = 1.0 / (a - 1.0);
        let u = 1.0 / k as f64;
        let mixed = dists
            .into_iter()
            .map(|d| d.into_iter().map(|v| t * v + (1.0 - t) * u).collect())
            .collect();
        return DiagonalEnsemble::uniform(mixed);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_bound;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perfect(n: usize) -> DiagonalEnsemble {
        DiagonalEnsemble::uniform((0..n).map(|x| (0..n).map(|m| (x == m) as u8 as f64).collect()).collect()).unwrap()
    }

    #[test]
    fn guessing_probability_examples() {
        assert!((guessing_probability(&perfect(3)) - 1.0).abs() < 1e-15);
        let same = DiagonalEnsemble::uniform(vec![vec![0.2, 0.3, 0.5]; 4]).unwrap();
        assert!((guessing_probability(&same) - 0.25).abs() < 1e-15);
        assert!((guessing_probability(&achieving_ensemble(3).unwrap()) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn information_examples() {
        assert!((accessible_info_bits(&perfect(4)) - 2.0).abs() < 1e-12);
        let same = DiagonalEnsemble::uniform(vec![vec![0.5, 0.5]; 4]).unwrap();
        assert!(accessible_info_bits(&same).abs() < 1e-12);
        assert!((accessible_info_bits(&achieving_ensemble(3).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_values() {
        assert_eq!(info_bound_value(3).unwrap(), 9.0 / 8.0);
        assert_eq!(info_bound_value(4).unwrap(), 10.0 / 9.0);
        assert!((info_bound_value(100).unwrap() - 9850.0 / 9801.0).abs() < 1e-15);
        assert!(info_bound_value(2).is_err());
    }

    #[test]
    fn achieving_ensemble_saturates() {
        for (n, want) in [(3, 9.0 / 8.0), (4, 10.0 / 9.0), (5, 35.0 / 32.0)] {
            let e = achieving_ensemble(n).unwrap();
            assert!((facet_value(&e, n).unwrap() - want).abs() < 1e-12);
            assert!((accessible_info_bits(&e) - 1.0).abs() < 1e-12);
            assert!(check_info_inequality(&e, n).unwrap());
        }
    }

    #[test]
    fn separation_from_the_classical_bound() {
        for n in 3..=50 {
            assert!(info_bound_value(n).unwrap() > 1.0, "n={n}");
        }
        for n in 3..=5 {
            let f = facet_family(n).unwrap();
            assert_eq!(classical_bound(&f, &f.scenario).unwrap(), crate::scenario::Rational::from_integer(1));
        }
    }

    #[test]
    fn deterministic_one_bit_messages_stay_classical() {
        // Alice sends x == 0 as one label, everything else as another
        let n = 4;
        let dists = (0..n)
            .map(|x| {
                let mut d = vec![0.0; n + 1];
                d[if x == 0 { 0 } else { n }] = 1.0;
                d
            })
            .collect();
        let e = DiagonalEnsemble::uniform(dists).unwrap();
        assert!(facet_value(&e, n).unwrap() <= 1.0 + 1e-12);
        assert!(check_info_inequality(&e, n).unwrap());
    }

    #[test]
    fn sampled_ensembles_carry_one_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 3..6 {
            for _ in 0..50 {
                let e = random_one_bit_ensemble(&mut rng, n).unwrap();
                assert!((accessible_info_bits(&e) - 1.0).abs() < 1e-12);
                assert!(check_info_inequality(&e, n).unwrap());
            }
        }
    }

    #[test]
    fn premises_are_enforced() {
        assert!(check_info_inequality(&perfect(3), 3).is_err());
        let e = DiagonalEnsemble::new(vec![0.5, 0.25, 0.25], achieving_ensemble(3).unwrap().dists).unwrap();
        assert!(check_info_inequality(&e, 3).is_err());
        assert!(DiagonalEnsemble::uniform(vec![vec![0.5, 0.6]]).is_err());
    }
}
