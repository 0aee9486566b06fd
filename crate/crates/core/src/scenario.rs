//! Scenarios, behaviors and linear inequalities over `p(b|x)`.
//!
//! Behaviors are stored x-major (`p[x][b]`). Where a scenario has a
//! "discard" output it is always the last output index.

use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Rational64;

/// Alphabet sizes of a prepare-and-measure scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub d: usize,
    #[serde(rename = "nX")]
    pub n_x: usize,
    #[serde(rename = "nB")]
    pub n_b: usize,
}

impl Scenario {
    pub fn new(d: usize, n_x: usize, n_b: usize) -> Result<Self> {
        let s = Scenario { d, n_x, n_b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidScenario(format!(
                "message alphabet d = {} must be at least 2",
                self.d
            )));
        }
        if self.n_x <= self.d {
            return Err(Error::InvalidScenario(format!(
                "nX must exceed d (got nX = {}, d = {})",
                self.n_x, self.d
            )));
        }
        if self.n_b < 2 {
            return Err(Error::InvalidScenario(format!(
                "nB = {} must be at least 2",
                self.n_b
            )));
        }
        Ok(())
    }

    /// Number of free parameters of a behavior, `|X| (|B| - 1)`.
    pub fn behavior_dimension(&self) -> usize {
        self.n_x * (self.n_b - 1)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.d, self.n_x, self.n_b)
    }
}

/// Conditional distribution `p(b|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    pub p: Vec<Vec<f64>>,
}

impl Behavior {
    pub const NEG_TOL: f64 = 1e-12;
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(p: Vec<Vec<f64>>) -> Result<Self> {
        let b = Behavior { p };
        b.validate()?;
        Ok(b)
    }

    pub fn n_x(&self) -> usize {
        self.p.len()
    }

    pub fn n_b(&self) -> usize {
        self.p.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let nb = self.n_b();
        for (x, row) in self.p.iter().enumerate() {
            if row.len() != nb {
                return Err(Error::ShapeMismatch(format!("row {x} has {} outputs", row.len())));
            }
            if let Some(v) = row.iter().find(|&&v| v < -Self::NEG_TOL || !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("p(.|{x}) has entry {v}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > Self::NORM_TOL {
                return Err(Error::InvalidArgument(format!("p(.|{x}) sums to {s}")));
            }
        }
        Ok(())
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Behavior, alpha: f64) -> Behavior {
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect())
            .collect();
        Behavior { p }
    }

    pub fn matches(&self, s: &Scenario) -> bool {
        self.n_x() == s.n_x && self.p.iter().all(|r| r.len() == s.n_b)
    }
}

/// `sum_{x,b} c[x][b] p(b|x) <= bound`, with exact rational data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub scenario: Scenario,
    #[serde(with = "rational_matrix")]
    pub coeffs: Vec<Vec<Rational>>,
    #[serde(with = "rational_scalar")]
    pub bound: Rational,
}

impl Inequality {
    pub fn new(
        name: impl Into<String>,
        scenario: Scenario,
        coeffs: Vec<Vec<Rational>>,
        bound: Rational,
    ) -> Result<Self> {
        let ineq = Inequality {
            name: name.into(),
            scenario,
            coeffs,
            bound,
        };
        ineq.validate()?;
        Ok(ineq)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        if self.coeffs.len() != s.n_x || self.coeffs.iter().any(|r| r.len() != s.n_b) {
            return Err(Error::ShapeMismatch(format!(
                "coefficient matrix does not match scenario {s}"
            )));
        }
        Ok(())
    }

    pub fn coeffs_f64(&self) -> Vec<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|r| r.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn bound_f64(&self) -> f64 {
        self.bound.to_f64().unwrap_or(f64::NAN)
    }

    pub fn coeff(&self, x: usize, b: usize) -> Rational {
        self.coeffs[x][b]
    }

    pub fn evaluate(&self, beh: &Behavior) -> Result<f64> {
        evaluate(self, beh)
    }

    /// Same inequality with a different bound (used to build tampered inputs).
    pub fn with_bound(&self, bound: Rational) -> Inequality {
        Inequality {
            bound,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("inequality serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ineq: Inequality = serde_json::from_str(text)?;
        ineq.scenario.validate()?;
        ineq.validate()?;
        Ok(ineq)
    }
}

/// `S = sum_{x,b} c[x][b] p(b|x)`.
pub fn evaluate(ineq: &Inequality, beh: &Behavior) -> Result<f64> {
    if !beh.matches(&ineq.scenario) {
        return Err(Error::ShapeMismatch(format!(
            "behavior is {}x{}, inequality `{}` expects {}",
            beh.n_x(),
            beh.n_b(),
            ineq.name,
            ineq.scenario
        )));
    }
    let c = ineq.coeffs_f64();
    Ok(c.iter()
        .zip(&beh.p)
        .flat_map(|(cr, pr)| cr.iter().zip(pr).map(|(a, b)| a * b))
        .sum())
}

/// The `(2, n, n+1)` family rewarding correct guesses with weight `n - 1` and
/// the discard output with weight 1, normalized so the classical bound is 1.
pub fn facet_family(n: usize) -> Result<Inequality> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("facet family needs n >= 3, got {n}")));
    }
    let scenario = Scenario::new(2, n, n + 1)?;
    let norm = Rational::new(1, 2 * (n as i64 - 1));
    let mut coeffs = vec![vec![Rational::zero(); n + 1]; n];
    for (i, row) in coeffs.iter_mut().enumerate() {
        row[i] = norm * Rational::from_integer(n as i64 - 1);
        row[n] = norm;
    }
    Inequality::new(format!("Sn({n})"), scenario, coeffs, Rational::from_integer(1))
}

/// Frozen names accepted by [`builtin_inequality`].
pub fn builtin_names() -> Vec<String> {
    let mut names: Vec<String> = ["S1", "S2", "S3", "SD(2,3,3)"].iter().map(|s| s.to_string()).collect();
    names.extend((1..=TABLE_45.len()).map(|i| format!("T45-{i}")));
    names.push("Sn(k)".into());
    names
}

/// The inequalities printed for the small scenarios, by frozen name.
pub fn builtin_inequality(name: &str) -> Result<(Scenario, Inequality)> {
    let ineq = match name {
        "S1" => {
            let s = Scenario::new(2, 3, 4)?;
            parse_inequality("S1", s, "2p(0|0) + p(3|0) + 2p(1|1) + p(3|1) + 2p(2|2) + p(3|2)", 4, 4)?
        }
        "S2" => {
            let s = Scenario::new(2, 4, 4)?;
            parse_inequality(
                "S2",
                s,
                "p(1|0) + p(2|0) + p(0|1) + p(2|1) + p(0|2) + p(1|2) + p(3|3)",
                3,
                3,
            )?
        }
        "S3" => {
            let s = Scenario::new(2, 4, 4)?;
            parse_inequality(
                "S3",
                s,
                "2p(0|0) + p(2|0) + 2p(1|1) + p(2|1) + p(2|2) + p(3|2) + p(3|3)",
                4,
                4,
            )?
        }
        "SD(2,3,3)" => {
            let s = Scenario::new(2, 3, 3)?;
            parse_inequality("SD(2,3,3)", s, "p(0|0) + p(1|1) + p(2|2)", 2, 1)?
        }
        _ => {
            if let Some(row) = name.strip_prefix("T45-") {
                let idx: usize = row.parse().map_err(|_| Error::UnknownName(name.into()))?;
                let (text, bound) = *TABLE_45
                    .get(idx.wrapping_sub(1))
                    .ok_or_else(|| Error::UnknownName(name.into()))?;
                let s = Scenario::new(2, 4, 5)?;
                parse_inequality(name, s, text, bound, 1)?
            } else if let Some(arg) = name.strip_prefix("Sn(").and_then(|r| r.strip_suffix(')')) {
                let n: usize = arg.parse().map_err(|_| Error::UnknownName(name.into()))?;
                facet_family(n)?
            } else {
                return Err(Error::UnknownName(name.into()));
            }
        }
    };
    Ok((ineq.scenario, ineq))
}

/// Non-trivial facets of the `(2,4,5)` polytope as printed, with their bounds.
pub const TABLE_45: [(&str, i64); 18] = [
    ("2p(1|0) + p(2|0) + p(3|0) + p(2|1) + p(3|1) + 2p(4|1) - p(1|2) - p(3|2) - p(4|2) - p(1|3) - p(2|3) - p(4|3)", 2),
    ("2p(1|0) + 2p(2|0) + p(3|0) + p(3|1) + 2p(4|1) - 2p(1|3) - 2p(2|3) - p(3|3) - 2p(4|3)", 2),
    ("2p(1|0) + p(2|0) + p(3|0) + p(2|1) + p(3|1) + 2p(4|1) - 2p(1|3) - p(2|3) - p(3|3) - 2p(4|3)", 2),
    ("2p(1|0) + 2p(2|0) + p(3|0) + p(3|1) + 2p(4|1) - p(1|2) - p(2|2) - p(4|2) - p(1|3) - p(2|3) - p(3|3) - p(4|3)", 2),
    ("2p(1|0) + p(2|0) + p(3|0) + p(2|1) + 2p(4|1) + p(3|2) - 2p(1|3) - p(2|3) - 2p(3|3) - 2p(4|3)", 2),
    ("2p(1|0) + p(2|0) + p(3|0) + p(2|1) + p(3|1) + 2p(4|1) - p(1|2) - p(4|2) - p(1|3) - p(2|3) - p(3|3) - p(4|3)", 2),
    ("p(1|0) + p(2|0) + p(3|0) + p(1|1) + p(2|1) + p(4|1) + p(3|2) + p(4|2) - p(1|3) - p(2|3) - p(3|3) - p(4|3)", 2),
    ("4p(1|0) + 2p(2|0) + p(3|0) + 2p(2|1) + p(3|1) + 4p(4|1) + 2p(3|2) - 4p(1|3) - 2p(2|3) - 3p(3|3) - 4p(4|3)", 4),
    ("2p(1|0) + p(2|0) + p(2|1) + 2p(3|1) - p(1|2) - p(3|2) - p(1|3) - p(2|3) - p(3|3)", 2),
    ("p(1|0) + p(2|0) + p(1|1) + p(3|1) + p(2|2) + p(3|2) - p(1|3) - p(2|3) - p(3|3)", 2),
    ("3p(1|0) + p(2|0) + p(2|1) + 3p(3|1) + p(2|2) + 3p(4|2) - 3p(1|3) - 2p(2|3) - 3p(3|3) - 3p(4|3)", 3),
    ("2p(1|0) + 2p(2|0) + p(3|0) + p(1|1) + p(3|1) + 2p(4|1) + p(2|2) + p(3|2) + p(4|2) - 2p(1|3) - 2p(2|3) - p(3|3) - 2p(4|3)", 3),
    ("2p(1|0) + p(2|0) + p(3|0) + p(1|1) + p(2|1) + 2p(4|1) + p(2|2) + 2p(3|2) + p(4|2) - 2p(1|3) - p(2|3) - 2p(3|3) - 2p(4|3)", 3),
    ("4p(1|0) + 2p(2|0) + p(3|0) + 2p(2|1) + p(3|1) + 4p(4|1) - p(1|2) + 2p(3|2) - p(4|2) - 3p(1|3) - 2p(2|3) - 3p(3|3) - 3p(4|3)", 4),
    ("3p(1|0) + 3p(2|0) + 2p(3|0) + 3p(1|1) + 2p(3|1) + 3p(4|1) + 3p(2|2) + 2p(3|2) + 3p(4|2) - 3p(1|3) - 3p(2|3) - 2p(3|3) - 3p(4|3)", 6),
    ("3p(1|0) + 2p(2|0) + p(3|0) + p(1|1) + 2p(3|1) + p(4|1) + 2p(2|2) + p(3|2) + 3p(4|2) - 3p(1|3) - 2p(2|3) - 2p(3|3) - 3p(4|3)", 4),
    ("4p(1|0) + 3p(2|0) + 2p(3|0) + 2p(1|1) + 2p(3|1) + 2p(4|1) + 3p(2|2) + 2p(3|2) + 4p(4|2) - 4p(1|3) - 3p(2|3) - 2p(3|3) - 4p(4|3)", 6),
    ("4p(1|0) + 3p(2|0) + 2p(3|0) + 2p(1|1) + 2p(3|1) + 3p(4|1) + 3p(2|2) + 2p(3|2) + 3p(4|2) - 4p(1|3) - 3p(2|3) - 2p(3|3) - 4p(4|3)", 6),
];

/// Parses `"2p(1|0) + p(2|0) - p(1|2)"` into a coefficient matrix divided by
/// `denominator`, with bound `bound_numer / denominator`.
pub fn parse_inequality(
    name: &str,
    scenario: Scenario,
    text: &str,
    bound_numer: i64,
    denominator: i64,
) -> Result<Inequality> {
    let mut coeffs = vec![vec![Rational::zero(); scenario.n_b]; scenario.n_x];
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut rest = compact.as_str();
    let bad = |msg: &str| Error::Parse(format!("{msg} in `{text}`"));
    while !rest.is_empty() {
        let (sign, tail) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ => (1, rest),
        };
        let p_at = tail.find('p').ok_or_else(|| bad("missing p(b|x)"))?;
        let mult: i64 = if p_at == 0 {
            1
        } else {
            tail[..p_at].parse().map_err(|_| bad("bad coefficient"))?
        };
        let close = tail.find(')').ok_or_else(|| bad("unclosed term"))?;
        let inner = tail[p_at + 1..close]
            .strip_prefix('(')
            .ok_or_else(|| bad("expected `(`"))?;
        let (b, x) = inner.split_once('|').ok_or_else(|| bad("expected b|x"))?;
        let b: usize = b.parse().map_err(|_| bad("bad output label"))?;
        let x: usize = x.parse().map_err(|_| bad("bad input label"))?;
        if x >= scenario.n_x || b >= scenario.n_b {
            return Err(bad("label out of range"));
        }
        coeffs[x][b] += Rational::new(sign * mult, denominator);
        rest = &tail[close + 1..];
    }
    Inequality::new(name, scenario, coeffs, Rational::new(bound_numer, denominator))
}

/// Best rational approximation with bounded denominator (continued fractions).
pub fn rational_from_f64(v: f64) -> Result<Rational> {
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite coefficient {v}")));
    }
    const MAX_DEN: i64 = 1_000_000_000;
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            return Err(Error::Parse(format!("coefficient {v} out of range")));
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > MAX_DEN as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a;
        if (h1 as f64 / k1 as f64 - v).abs() <= 1e-12 * v.abs().max(1.0) || frac < 1e-300 {
            break;
        }
        x = 1.0 / frac;
    }
    let q = Rational::new(h1 as i64, k1 as i64);
    if (q.to_f64().unwrap() - v).abs() > 1e-9 * v.abs().max(1.0) {
        return Err(Error::Parse(format!("cannot represent {v} as a small rational")));
    }
    Ok(q)
}

/// JSON numbers for integers, `"p/q"` strings otherwise; floats are read back
/// through [`rational_from_f64`].
mod rational_repr {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Int(i64),
        Float(f64),
        Text(String),
    }

    pub(super) fn to_repr(q: &Rational) -> Repr {
        if q.is_integer() {
            Repr::Int(*q.numer())
        } else {
            Repr::Text(format!("{}/{}", q.numer(), q.denom()))
        }
    }

    pub(super) fn from_repr<E: serde::de::Error>(r: Repr) -> std::result::Result<Rational, E> {
        match r {
            Repr::Int(i) => Ok(Rational::from_integer(i)),
            Repr::Float(f) => rational_from_f64(f).map_err(E::custom),
            Repr::Text(s) => {
                let s = s.trim();
                match s.split_once('/') {
                    Some((n, d)) => {
                        let n: i64 = n.trim().parse().map_err(E::custom)?;
                        let d: i64 = d.trim().parse().map_err(E::custom)?;
                        if d == 0 {
                            return Err(E::custom("zero denominator"));
                        }
                        Ok(Rational::new(n, d))
                    }
                    None => {
                        let f: f64 = s.parse().map_err(E::custom)?;
                        rational_from_f64(f).map_err(E::custom)
                    }
                }
            }
        }
    }
}

pub mod rational_scalar {
    use super::rational_repr::{from_repr, to_repr, Repr};
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        to_repr(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

mod rational_matrix {
    use super::rational_repr::{from_repr, to_repr, Repr};
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<Vec<Repr>> = m.iter().map(|r| r.iter().map(to_repr).collect()).collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw = Vec::<Vec<Repr>>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_iter().map(from_repr).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn always_last(s: &Scenario) -> Behavior {
        let mut p = vec![vec![0.0; s.n_b]; s.n_x];
        for row in &mut p {
            row[s.n_b - 1] = 1.0;
        }
        Behavior::new(p).unwrap()
    }

    #[test]
    fn scenario_guards() {
        assert!(Scenario::new(2, 3, 4).is_ok());
        assert!(matches!(Scenario::new(2, 2, 2), Err(Error::InvalidScenario(_))));
        assert!(Scenario::new(1, 3, 3).is_err());
        assert!(Scenario::new(2, 3, 1).is_err());
    }

    #[test]
    fn s1_on_always_discard() {
        let (s, s1) = builtin_inequality("S1").unwrap();
        assert!((s1.evaluate(&always_last(&s)).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_shape_mismatch() {
        let (_, s1) = builtin_inequality("S1").unwrap();
        let wrong = always_last(&Scenario::new(2, 4, 4).unwrap());
        assert!(matches!(s1.evaluate(&wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn facet_family_matches_s1_for_three() {
        let (_, s1) = builtin_inequality("S1").unwrap();
        let f3 = facet_family(3).unwrap();
        assert_eq!(f3.coeffs, s1.coeffs);
        assert_eq!(f3.bound, s1.bound);
        let f4 = facet_family(4).unwrap();
        assert_eq!(f4.coeffs[2][2], q(3, 6));
        assert_eq!(f4.coeffs[2][4], q(1, 6));
        let f5 = facet_family(5).unwrap();
        assert_eq!(f5.coeffs[0][0], q(4, 8));
        assert_eq!(f5.coeffs[0][5], q(1, 8));
        assert_eq!(f5.bound, q(1, 1));
        assert!(facet_family(2).is_err());
    }

    #[test]
    fn facet_family_on_always_discard() {
        for n in 3..12 {
            let f = facet_family(n).unwrap();
            let v = f.evaluate(&always_last(&f.scenario)).unwrap();
            assert!((v - n as f64 / (2.0 * (n as f64 - 1.0))).abs() < 1e-12);
        }
    }

    #[test]
    fn builtin_registry() {
        let (s, s2) = builtin_inequality("S2").unwrap();
        assert_eq!(s, Scenario::new(2, 4, 4).unwrap());
        let nonzero: Vec<_> = s2.coeffs.iter().flatten().filter(|c| !c.is_zero()).collect();
        assert_eq!(nonzero.len(), 7);
        assert!(nonzero.iter().all(|&&c| c == q(1, 3)));
        assert_eq!(s2.bound, q(1, 1));

        let (s, t1) = builtin_inequality("T45-1").unwrap();
        assert_eq!(s, Scenario::new(2, 4, 5).unwrap());
        assert_eq!(t1.bound, q(2, 1));
        assert_eq!(t1.coeffs[0], vec![q(0, 1), q(2, 1), q(1, 1), q(1, 1), q(0, 1)]);
        assert_eq!(t1.coeffs[3], vec![q(0, 1), q(-1, 1), q(-1, 1), q(0, 1), q(-1, 1)]);

        let (_, sd) = builtin_inequality("SD(2,3,3)").unwrap();
        assert_eq!(sd.bound, q(2, 1));
        for x in 0..3 {
            for b in 0..3 {
                assert_eq!(sd.coeffs[x][b], q((x == b) as i64, 1));
            }
        }

        let (_, s3) = builtin_inequality("S3").unwrap();
        assert_eq!(s3.coeffs[0][0], q(1, 2));
        assert_eq!(s3.coeffs[3][3], q(1, 4));

        assert!(builtin_inequality("Sn(4)").is_ok());
        assert!(matches!(builtin_inequality("T45-19"), Err(Error::UnknownName(_))));
        assert!(matches!(builtin_inequality("S9"), Err(Error::UnknownName(_))));
        for name in builtin_names().iter().filter(|n| *n != "Sn(k)") {
            assert!(builtin_inequality(name).is_ok(), "{name}");
        }
    }

    #[test]
    fn table_rows_carry_printed_bounds() {
        let bounds: Vec<i64> = (1..=18)
            .map(|i| *builtin_inequality(&format!("T45-{i}")).unwrap().1.bound.numer())
            .collect();
        assert_eq!(bounds, vec![2, 2, 2, 2, 2, 2, 2, 4, 2, 2, 3, 3, 3, 4, 6, 4, 6, 6]);
    }

    #[test]
    fn json_round_trip() {
        let (_, s1) = builtin_inequality("S1").unwrap();
        let back = Inequality::from_json(&s1.to_json()).unwrap();
        assert_eq!(back, s1);
        let text = r#"{"scenario": {"d":2,"nX":4,"nB":5}, "coeffs": [[0,2,1,1,0],[0,0,1,1,2],[0,-1,0,-1,-1],[0,-1,-1,0,-1]], "bound": 2.0, "name": "T45-1"}"#;
        let parsed = Inequality::from_json(text).unwrap();
        assert_eq!(parsed, builtin_inequality("T45-1").unwrap().1);
        let text = r#"{"scenario": {"d":2,"nX":3,"nB":4}, "coeffs": [[0.5,0,0,0.25],[0,0.5,0,0.25],[0,0,0.5,0.25]], "bound": 1.0, "name": "S1"}"#;
        assert_eq!(Inequality::from_json(text).unwrap(), s1);
        let bad = r#"{"scenario": {"d":2,"nX":3,"nB":4}, "coeffs": [[1]], "bound": 1, "name": "x"}"#;
        assert!(Inequality::from_json(bad).is_err());
    }

    #[test]
    fn rational_from_float() {
        assert_eq!(rational_from_f64(1.0 / 3.0).unwrap(), q(1, 3));
        assert_eq!(rational_from_f64(-0.25).unwrap(), q(-1, 4));
        assert_eq!(rational_from_f64(6.0).unwrap(), q(6, 1));
    }

    proptest! {
        #[test]
        fn evaluate_is_linear(
            raw1 in proptest::collection::vec(0.01f64..1.0, 20),
            raw2 in proptest::collection::vec(0.01f64..1.0, 20),
            alpha in 0.0f64..=1.0,
            row in 1usize..=18,
        ) {
            let (s, ineq) = builtin_inequality(&format!("T45-{row}")).unwrap();
            let to_beh = |raw: &[f64]| {
                let p = raw.chunks(s.n_b).map(|r| {
                    let t: f64 = r.iter().sum();
                    r.iter().map(|v| v / t).collect()
                }).collect();
                Behavior::new(p).unwrap()
            };
            let (b1, b2) = (to_beh(&raw1), to_beh(&raw2));
            let lhs = ineq.evaluate(&b1.mix(&b2, alpha)).unwrap();
            let rhs = alpha * ineq.evaluate(&b1).unwrap() + (1.0 - alpha) * ineq.evaluate(&b2).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }
}
