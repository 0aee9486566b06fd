//! The classical polytope: deterministic strategies, its vertices, exact
//! bounds, facet certificates and full facet enumeration.

pub mod canon;
pub mod dd;
pub mod exact;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{Behavior, Inequality, Rational, Scenario};
pub use canon::FacetForm;

/// Refuse facet enumeration beyond these sizes.
pub const MAX_VERTICES: usize = 2000;
pub const MAX_DIMENSION: usize = 20;

/// Deterministic encoding `f: X -> messages` and decoding `g: messages -> B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetStrategy {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
}

/// 0/1 behavior indexed `[x][b]`.
pub type IntBehavior = Vec<Vec<u8>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexSet {
    pub scenario: Scenario,
    /// Lexicographically sorted, pairwise distinct.
    pub vertices: Vec<IntBehavior>,
    /// Indices into `enumerate_strategies` order realizing each vertex.
    pub provenance: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetReport {
    #[serde(with = "crate::scenario::rational_scalar")]
    pub bound_attained: Rational,
    pub saturating_count: usize,
    pub affine_rank: usize,
    pub polytope_dimension: usize,
    /// The inequality holds on every vertex.
    pub is_valid: bool,
    /// Valid and attained with equality somewhere.
    pub is_tight: bool,
    pub is_facet: bool,
}

fn odometer(len: usize, base: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.checked_pow(len as u32).unwrap_or(0);
    (0..total).map(move |mut k| {
        let mut digits = vec![0; len];
        for slot in digits.iter_mut().rev() {
            *slot = k % base;
            k /= base;
        }
        digits
    })
}

/// All `d^|X| * |B|^d` strategies, `f` major, both in lexicographic order.
pub fn enumerate_strategies(s: &Scenario) -> Vec<DetStrategy> {
    let gs: Vec<Vec<usize>> = odometer(s.d, s.n_b).collect();
    odometer(s.n_x, s.d)
        .flat_map(|f| gs.iter().map(move |g| DetStrategy { f: f.clone(), g: g.clone() }))
        .collect()
}

pub fn strategy_behavior(st: &DetStrategy, s: &Scenario) -> Result<IntBehavior> {
    if st.f.len() != s.n_x || st.g.len() != s.d {
        return Err(Error::ShapeMismatch(format!("strategy does not fit scenario {s}")));
    }
    if st.f.iter().any(|&m| m >= s.d) || st.g.iter().any(|&b| b >= s.n_b) {
        return Err(Error::InvalidArgument("strategy entry out of range".into()));
    }
    let mut p = vec![vec![0u8; s.n_b]; s.n_x];
    for (x, &m) in st.f.iter().enumerate() {
        p[x][st.g[m]] = 1;
    }
    Ok(p)
}

pub fn to_behavior(v: &IntBehavior) -> Behavior {
    Behavior {
        p: v.iter().map(|r| r.iter().map(|&b| b as f64).collect()).collect(),
    }
}

pub fn enumerate_vertices(s: &Scenario) -> VertexSet {
    let mut map: BTreeMap<IntBehavior, Vec<usize>> = BTreeMap::new();
    for (i, st) in enumerate_strategies(s).iter().enumerate() {
        let v = strategy_behavior(st, s).expect("enumerated strategies fit");
        map.entry(v).or_default().push(i);
    }
    let (vertices, provenance) = map.into_iter().unzip();
    VertexSet {
        scenario: *s,
        vertices,
        provenance,
    }
}

fn value_at(ineq: &Inequality, v: &IntBehavior) -> Rational {
    let mut acc = Rational::zero();
    for (c, r) in ineq.coeffs.iter().zip(v) {
        for (q, &bit) in c.iter().zip(r) {
            if bit == 1 {
                acc += q;
            }
        }
    }
    acc
}

fn check_scenario(ineq: &Inequality, s: &Scenario) -> Result<()> {
    if ineq.scenario.n_x != s.n_x || ineq.scenario.n_b != s.n_b {
        return Err(Error::ShapeMismatch(format!(
            "inequality `{}` is for {}, not {s}",
            ineq.name, ineq.scenario
        )));
    }
    Ok(())
}

/// Exact maximum of the inequality over the classical polytope.
pub fn classical_bound(ineq: &Inequality, s: &Scenario) -> Result<Rational> {
    check_scenario(ineq, s)?;
    let vs = enumerate_vertices(s);
    Ok(vs
        .vertices
        .iter()
        .map(|v| value_at(ineq, v))
        .max()
        .expect("at least one vertex"))
}

/// `v` flattened without the last output of every row; those coordinates
/// determine the behavior and the polytope is full-dimensional in them.
fn reduced(v: &IntBehavior) -> Vec<i64> {
    v.iter()
        .flat_map(|r| r[..r.len() - 1].iter().map(|&b| b as i64))
        .collect()
}

/// Affine dimension of the classical polytope.
pub fn polytope_dimension(s: &Scenario) -> usize {
    let vs = enumerate_vertices(s);
    let pts: Vec<Vec<i64>> = vs.vertices.iter().map(reduced).collect();
    exact::affine_rank(&pts)
}

/// Exact facet certificate: bound, saturating vertices and their affine rank.
pub fn verify_facet(ineq: &Inequality, s: &Scenario) -> Result<FacetReport> {
    check_scenario(ineq, s)?;
    let vs = enumerate_vertices(s);
    let values: Vec<Rational> = vs.vertices.iter().map(|v| value_at(ineq, v)).collect();
    let bound_attained = *values.iter().max().expect("at least one vertex");
    let saturating: Vec<Vec<i64>> = vs
        .vertices
        .iter()
        .zip(&values)
        .filter(|(_, val)| **val == ineq.bound)
        .map(|(v, _)| reduced(v))
        .collect();
    let all: Vec<Vec<i64>> = vs.vertices.iter().map(reduced).collect();
    let dim = exact::affine_rank(&all);
    let rank = exact::affine_rank(&saturating);
    let is_valid = bound_attained <= ineq.bound;
    let is_tight = bound_attained == ineq.bound;
    Ok(FacetReport {
        bound_attained,
        saturating_count: saturating.len(),
        affine_rank: rank,
        polytope_dimension: dim,
        is_valid,
        is_tight,
        is_facet: is_tight && !saturating.is_empty() && rank + 1 == dim,
    })
}

/// One relabeling class of facets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetClass {
    pub inequality: Inequality,
    pub form: FacetForm,
    /// Facets of the polytope in this class.
    pub orbit_size: usize,
    /// Ignores an input or merges two outputs of a smaller scenario.
    pub lifted: bool,
    /// A pure guess-the-input game, see [`FacetForm::is_discrimination`].
    pub discrimination: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetEnumeration {
    pub scenario: Scenario,
    pub vertex_count: usize,
    pub dimension: usize,
    pub total_facets: usize,
    pub trivial_facets: usize,
    /// Non-trivial classes sorted by canonical form.
    pub classes: Vec<FacetClass>,
}

impl FacetEnumeration {
    /// Classes other than guessing games.
    pub fn nontrivial_classes(&self) -> impl Iterator<Item = &FacetClass> {
        self.classes.iter().filter(|c| !c.discrimination)
    }

    /// Non-trivial classes that are not lifted from a smaller scenario.
    pub fn new_classes(&self) -> impl Iterator<Item = &FacetClass> {
        self.nontrivial_classes().filter(|c| !c.lifted)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Converts `offset + normal . v >= 0` in reduced coordinates to
/// `sum c p <= bound` over the full behavior.
fn halfspace_to_form(h: &dd::HalfSpace, s: &Scenario) -> FacetForm {
    let mut coeffs = vec![vec![0i64; s.n_b]; s.n_x];
    let mut it = h.normal.iter();
    for row in coeffs.iter_mut() {
        for slot in row[..s.n_b - 1].iter_mut() {
            *slot = -*it.next().expect("normal has reduced length");
        }
    }
    FacetForm::normalized(coeffs, h.offset)
}

/// All facets of the classical polytope, grouped into relabeling classes
/// with positivity facets removed.
pub fn enumerate_facets(s: &Scenario) -> Result<FacetEnumeration> {
    s.validate()?;
    let vs = enumerate_vertices(s);
    let dim = s.behavior_dimension();
    if vs.vertices.len() > MAX_VERTICES || dim > MAX_DIMENSION {
        return Err(Error::GuardExceeded(format!(
            "scenario {s} has {} vertices in dimension {dim} (limits {MAX_VERTICES} / {MAX_DIMENSION})",
            vs.vertices.len()
        )));
    }
    let pts: Vec<Vec<i64>> = vs.vertices.iter().map(reduced).collect();
    let facets = dd::facets_of_hull(&pts)?;

    let mut classes: BTreeMap<FacetForm, usize> = BTreeMap::new();
    let mut trivial = 0;
    for h in &facets {
        let form = halfspace_to_form(h, s);
        if form.is_trivial() {
            trivial += 1;
            continue;
        }
        *classes.entry(form.canonical()).or_default() += 1;
    }

    let named = registry_names(s);
    let mut out = Vec::with_capacity(classes.len());
    for (k, (form, orbit_size)) in classes.into_iter().enumerate() {
        let name = named
            .get(&form)
            .cloned()
            .unwrap_or_else(|| format!("F{s}#{}", k + 1));
        out.push(FacetClass {
            inequality: form.to_inequality(name, s.d)?,
            lifted: form.is_lifted(),
            discrimination: form.is_discrimination(),
            form,
            orbit_size,
        });
    }
    Ok(FacetEnumeration {
        scenario: *s,
        vertex_count: vs.vertices.len(),
        dimension: dim,
        total_facets: facets.len(),
        trivial_facets: trivial,
        classes: out,
    })
}

/// Canonical forms of the registered inequalities living in scenario `s`.
pub fn registry_names(s: &Scenario) -> BTreeMap<FacetForm, String> {
    let mut names = BTreeMap::new();
    let mut candidates: Vec<String> = crate::scenario::builtin_names()
        .into_iter()
        .filter(|n| n != "Sn(k)")
        .collect();
    if s.n_b == s.n_x + 1 {
        candidates.push(format!("Sn({})", s.n_x));
    }
    for name in candidates {
        if let Ok((sc, ineq)) = crate::scenario::builtin_inequality(&name) {
            if sc.n_x == s.n_x && sc.n_b == s.n_b {
                names.entry(FacetForm::from_inequality(&ineq).canonical()).or_insert(name);
            }
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{builtin_inequality, facet_family};
    use std::collections::HashSet;

    fn sc(d: usize, x: usize, b: usize) -> Scenario {
        Scenario::new(d, x, b).unwrap()
    }

    #[test]
    fn strategy_counts() {
        assert_eq!(enumerate_strategies(&sc(2, 3, 4)).len(), 128);
        assert_eq!(enumerate_strategies(&sc(2, 4, 5)).len(), 400);
        assert_eq!(enumerate_strategies(&sc(2, 3, 3)).len(), 72);
        let st = enumerate_strategies(&sc(2, 3, 3));
        assert_eq!(st[0], DetStrategy { f: vec![0, 0, 0], g: vec![0, 0] });
        assert_eq!(st[1], DetStrategy { f: vec![0, 0, 0], g: vec![0, 1] });
        assert_eq!(st[9], DetStrategy { f: vec![0, 0, 1], g: vec![0, 0] });
    }

    #[test]
    fn strategy_behavior_examples() {
        let s = sc(2, 3, 4);
        let always_discard = strategy_behavior(&DetStrategy { f: vec![0, 0, 0], g: vec![3, 0] }, &s).unwrap();
        assert!(always_discard.iter().all(|r| r == &vec![0, 0, 0, 1]));

        let p = strategy_behavior(&DetStrategy { f: vec![0, 1, 1], g: vec![0, 1] }, &s).unwrap();
        assert_eq!(p, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 1, 0, 0]]);

        for n in 3..=5 {
            let s = sc(2, n, n + 1);
            let mut f = vec![1; n];
            f[0] = 0;
            let p = strategy_behavior(&DetStrategy { f, g: vec![0, n] }, &s).unwrap();
            assert_eq!(p[0][0], 1);
            assert!((1..n).all(|i| p[i][n] == 1));
        }
        assert!(strategy_behavior(&DetStrategy { f: vec![0, 2, 0], g: vec![0, 1] }, &s).is_err());
    }

    #[test]
    fn every_strategy_behavior_is_normalized() {
        for s in [sc(2, 3, 3), sc(2, 3, 4), sc(2, 4, 4)] {
            for st in enumerate_strategies(&s) {
                let p = strategy_behavior(&st, &s).unwrap();
                assert!(p.iter().all(|r| r.iter().map(|&b| b as u32).sum::<u32>() == 1));
            }
        }
    }

    /// Set-based dedup, independent of the map in `enumerate_vertices`.
    fn dedup_oracle(s: &Scenario) -> usize {
        let mut seen = HashSet::new();
        for f in 0..s.d.pow(s.n_x as u32) {
            for g in 0..s.n_b.pow(s.d as u32) {
                let mut key = Vec::new();
                for x in 0..s.n_x {
                    let m = (f / s.d.pow(x as u32)) % s.d;
                    let b = (g / s.n_b.pow(m as u32)) % s.n_b;
                    key.push(b);
                }
                seen.insert(key);
            }
        }
        seen.len()
    }

    #[test]
    fn vertex_counts_match_oracle() {
        for s in [sc(2, 3, 3), sc(2, 3, 4), sc(2, 4, 4), sc(2, 4, 5)] {
            let vs = enumerate_vertices(&s);
            assert_eq!(vs.vertices.len(), dedup_oracle(&s), "{s}");
            assert_eq!(vs.provenance.iter().map(Vec::len).sum::<usize>(), enumerate_strategies(&s).len());
            let uniq: HashSet<_> = vs.vertices.iter().collect();
            assert_eq!(uniq.len(), vs.vertices.len());
            assert!(vs.vertices.windows(2).all(|w| w[0] < w[1]));
        }
        // image of x -> b has at most two labels
        assert_eq!(enumerate_vertices(&sc(2, 3, 3)).vertices.len(), 3 + 3 * 6);
        assert_eq!(enumerate_vertices(&sc(2, 3, 4)).vertices.len(), 4 + 6 * 6);
    }

    #[test]
    fn bounds_of_registered_inequalities() {
        for (name, expect) in [("S1", 1), ("S2", 1), ("S3", 1), ("SD(2,3,3)", 2)] {
            let (s, ineq) = builtin_inequality(name).unwrap();
            assert_eq!(classical_bound(&ineq, &s).unwrap(), Rational::from_integer(expect), "{name}");
        }
        let (s, t1) = builtin_inequality("T45-1").unwrap();
        assert_eq!(classical_bound(&t1, &s).unwrap(), Rational::from_integer(2));
    }

    #[test]
    fn bound_equals_strategy_level_max() {
        for name in ["S1", "S2", "S3", "T45-8", "T45-15"] {
            let (s, ineq) = builtin_inequality(name).unwrap();
            let direct = enumerate_strategies(&s)
                .iter()
                .map(|st| value_at(&ineq, &strategy_behavior(st, &s).unwrap()))
                .max()
                .unwrap();
            assert_eq!(classical_bound(&ineq, &s).unwrap(), direct);
        }
    }

    #[test]
    fn polytope_dimensions() {
        assert_eq!(polytope_dimension(&sc(2, 3, 4)), 9);
        assert_eq!(polytope_dimension(&sc(2, 3, 3)), 6);
        assert_eq!(polytope_dimension(&sc(2, 4, 5)), 16);
    }

    #[test]
    fn facet_family_certificates() {
        for (n, count, rank) in [(3, 9, 8), (4, 28, 15)] {
            let f = facet_family(n).unwrap();
            let r = verify_facet(&f, &f.scenario).unwrap();
            assert_eq!(r.saturating_count, count);
            assert_eq!(r.affine_rank, rank);
            assert!(r.is_facet && r.is_valid);
        }
        let (s, sd) = builtin_inequality("SD(2,3,3)").unwrap();
        assert!(verify_facet(&sd, &s).unwrap().is_facet);
    }

    #[test]
    fn tampered_bound_is_invalid() {
        let f = facet_family(3).unwrap();
        let tampered = f.with_bound(Rational::new(9, 10));
        let r = verify_facet(&tampered, &f.scenario).unwrap();
        assert!(!r.is_valid && !r.is_facet);
        assert_eq!(r.saturating_count, 0);
        let loose = f.with_bound(Rational::new(11, 10));
        let r = verify_facet(&loose, &f.scenario).unwrap();
        assert!(r.is_valid && !r.is_tight && !r.is_facet);
    }

    #[test]
    fn minimal_scenario_has_one_class() {
        let e = enumerate_facets(&sc(2, 3, 3)).unwrap();
        assert_eq!(e.classes.len(), 1);
        assert_eq!(e.classes[0].inequality.name, "SD(2,3,3)");
    }

    #[test]
    fn guard_refuses_large_scenarios() {
        assert!(matches!(enumerate_facets(&sc(2, 6, 6)), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn scenario_mismatch_is_reported() {
        let (_, s1) = builtin_inequality("S1").unwrap();
        assert!(classical_bound(&s1, &sc(2, 4, 4)).is_err());
    }
}
