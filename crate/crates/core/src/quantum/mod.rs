//! Entanglement-assisted protocols with classical (`cc`) or qubit (`qc`)
//! messages and their behaviors.
//!
//! In a `cc` protocol Alice measures her share of `psi` with `{A_{m|x}}` and
//! sends `m`; Bob measures `{B_{b|m}}` on his share. In a `qc` protocol Alice
//! applies a channel (Kraus list) to her share and sends the output qubit; Bob
//! reads it out with `{M_m}` and then measures `{B_{b|m}}`.

mod builtin;
pub mod format;

use serde::{Deserialize, Serialize};

pub use builtin::{
    builtin_protocol, builtin_protocol_names, dichotomic, max_entangled, target_inequality,
};
pub use format::ProtocolFile;

use crate::error::{Error, Result};
use crate::matrix::{eig_hermitian, kron, reduce_with, CMatrix, Subsystem};
use crate::scenario::{evaluate, Behavior, Inequality};

pub type Povm = Vec<CMatrix>;

pub const STATE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CCProtocol {
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: CMatrix,
    /// `alice[x][m]`
    pub alice: Vec<Povm>,
    /// `bob[m][b]`
    pub bob: Vec<Povm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QCProtocol {
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: CMatrix,
    /// `kraus[x]`, each operator maps A to the message space.
    pub kraus: Vec<Vec<CMatrix>>,
    pub readout: Povm,
    pub bob: Vec<Povm>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    Cc(CCProtocol),
    Qc(QCProtocol),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Depolarizing,
    Dephasing,
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "depolarizing" | "depolarising" => Ok(NoiseKind::Depolarizing),
            "dephasing" => Ok(NoiseKind::Dephasing),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub v: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("visibility {v} outside [0, 1]")));
        }
        Ok(NoiseSpec { kind, v })
    }
}

pub fn check_state(state: &CMatrix, dim: usize) -> Result<()> {
    if state.rows() != dim || state.cols() != dim {
        return Err(Error::InvalidProtocol(format!(
            "state is {}x{}, expected {dim}x{dim}",
            state.rows(),
            state.cols()
        )));
    }
    let tr = state.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidProtocol(format!("state has trace {tr}")));
    }
    let lo = *eig_hermitian(state)?.values.last().unwrap_or(&0.0);
    if lo < -STATE_TOL {
        return Err(Error::InvalidProtocol(format!("state has eigenvalue {lo:.3e}")));
    }
    Ok(())
}

pub fn check_povm(povm: &[CMatrix], dim: usize, what: &str) -> Result<()> {
    if povm.is_empty() {
        return Err(Error::InvalidProtocol(format!("{what}: empty POVM")));
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for (k, e) in povm.iter().enumerate() {
        if e.rows() != dim || e.cols() != dim {
            return Err(Error::InvalidProtocol(format!(
                "{what}: element {k} is {}x{}, expected {dim}x{dim}",
                e.rows(),
                e.cols()
            )));
        }
        let lo = *eig_hermitian(e)
            .map_err(|err| Error::InvalidProtocol(format!("{what}: element {k}: {err}")))?
            .values
            .last()
            .unwrap_or(&0.0);
        if lo < -PSD_TOL {
            return Err(Error::InvalidProtocol(format!(
                "{what}: element {k} has eigenvalue {lo:.3e}"
            )));
        }
        sum = &sum + e;
    }
    let dev = sum.max_abs_diff(&CMatrix::identity(dim));
    if dev > COMPLETENESS_TOL {
        return Err(Error::InvalidProtocol(format!(
            "{what}: elements sum to identity only within {dev:.3e}"
        )));
    }
    Ok(())
}

pub fn check_channel(kraus: &[CMatrix], dim_in: usize, what: &str) -> Result<()> {
    let Some(first) = kraus.first() else {
        return Err(Error::InvalidProtocol(format!("{what}: no Kraus operators")));
    };
    let dim_out = first.rows();
    let mut sum = CMatrix::zeros(dim_in, dim_in);
    for k in kraus {
        if k.cols() != dim_in || k.rows() != dim_out {
            return Err(Error::InvalidProtocol(format!(
                "{what}: Kraus operator is {}x{}, expected {dim_out}x{dim_in}",
                k.rows(),
                k.cols()
            )));
        }
        sum = &sum + &(&k.adjoint() * k);
    }
    let dev = sum.max_abs_diff(&CMatrix::identity(dim_in));
    if dev > COMPLETENESS_TOL {
        return Err(Error::InvalidProtocol(format!(
            "{what}: Kraus operators are complete only within {dev:.3e}"
        )));
    }
    Ok(())
}

fn check_bob(bob: &[Povm], n_msg: usize, dim_b: usize) -> Result<usize> {
    if bob.len() != n_msg {
        return Err(Error::InvalidProtocol(format!(
            "Bob has {} measurements for {n_msg} messages",
            bob.len()
        )));
    }
    let n_b = bob[0].len();
    for (m, povm) in bob.iter().enumerate() {
        if povm.len() != n_b {
            return Err(Error::InvalidProtocol("Bob's measurements differ in outcome count".into()));
        }
        check_povm(povm, dim_b, &format!("bob[{m}]"))?;
    }
    Ok(n_b)
}

impl CCProtocol {
    pub fn validate(&self) -> Result<()> {
        check_state(&self.state, self.dim_a * self.dim_b)?;
        let d = self.bob.len();
        for (x, povm) in self.alice.iter().enumerate() {
            if povm.len() != d {
                return Err(Error::InvalidProtocol(format!(
                    "alice[{x}] has {} outcomes, Bob expects {d} messages",
                    povm.len()
                )));
            }
            check_povm(povm, self.dim_a, &format!("alice[{x}]"))?;
        }
        check_bob(&self.bob, d, self.dim_b)?;
        Ok(())
    }

    pub fn n_x(&self) -> usize {
        self.alice.len()
    }

    pub fn n_b(&self) -> usize {
        self.bob.first().map_or(0, Vec::len)
    }
}

impl QCProtocol {
    pub fn validate(&self) -> Result<()> {
        check_state(&self.state, self.dim_a * self.dim_b)?;
        let dim_msg = self.message_dim();
        for (x, ks) in self.kraus.iter().enumerate() {
            check_channel(ks, self.dim_a, &format!("kraus[{x}]"))?;
            if ks[0].rows() != dim_msg {
                return Err(Error::InvalidProtocol(format!(
                    "kraus[{x}] outputs dimension {}, expected {dim_msg}",
                    ks[0].rows()
                )));
            }
        }
        check_povm(&self.readout, dim_msg, "readout")?;
        check_bob(&self.bob, self.readout.len(), self.dim_b)?;
        Ok(())
    }

    pub fn message_dim(&self) -> usize {
        self.readout.first().map_or(0, CMatrix::rows)
    }

    pub fn n_x(&self) -> usize {
        self.kraus.len()
    }

    pub fn n_b(&self) -> usize {
        self.bob.first().map_or(0, Vec::len)
    }

    /// `tau_x = sum_j (K_j (x) I) psi (K_j (x) I)^dagger` on message (x) B.
    pub fn tau(&self, x: usize) -> CMatrix {
        let id_b = CMatrix::identity(self.dim_b);
        let n = self.message_dim() * self.dim_b;
        let mut tau = CMatrix::zeros(n, n);
        for k in &self.kraus[x] {
            let kb = kron(k, &id_b);
            tau = &tau + &(&(&kb * &self.state) * &kb.adjoint());
        }
        tau
    }
}

/// Behavior of a classical-message protocol.
pub fn eval_cc(p: &CCProtocol) -> Result<Behavior> {
    p.validate()?;
    Ok(eval_cc_unchecked(p))
}

/// [`eval_cc`] without validating the protocol first.
pub fn eval_cc_unchecked(p: &CCProtocol) -> Behavior {
    let n_b = p.n_b();
    let rows = p
        .alice
        .iter()
        .map(|povm| {
            let mut row = vec![0.0; n_b];
            for (a, bob_m) in povm.iter().zip(&p.bob) {
                let sigma = reduce_with(a, &p.state, p.dim_a, p.dim_b, Subsystem::A)
                    .expect("validated dimensions");
                for (slot, b) in row.iter_mut().zip(bob_m) {
                    *slot += b.trace_product(&sigma).re;
                }
            }
            row
        })
        .collect();
    Behavior { p: rows }
}

/// Behavior of a qubit-message protocol.
pub fn eval_qc(p: &QCProtocol) -> Result<Behavior> {
    p.validate()?;
    Ok(eval_qc_unchecked(p))
}

pub fn eval_qc_unchecked(p: &QCProtocol) -> Behavior {
    let n_b = p.n_b();
    let dim_msg = p.message_dim();
    let rows = (0..p.n_x())
        .map(|x| {
            let tau = p.tau(x);
            let mut row = vec![0.0; n_b];
            for (mm, bob_m) in p.readout.iter().zip(&p.bob) {
                let omega = reduce_with(mm, &tau, dim_msg, p.dim_b, Subsystem::A)
                    .expect("validated dimensions");
                for (slot, b) in row.iter_mut().zip(bob_m) {
                    *slot += b.trace_product(&omega).re;
                }
            }
            row
        })
        .collect();
    Behavior { p: rows }
}

/// `v rho + (1 - v) N(rho)` with `N` either the maximally mixed state or the
/// diagonal of `rho` in the computational basis.
pub fn apply_noise(state: &CMatrix, spec: NoiseSpec) -> CMatrix {
    let n = state.rows();
    let noise = match spec.kind {
        NoiseKind::Depolarizing => CMatrix::identity(n).scale_real(1.0 / n as f64),
        NoiseKind::Dephasing => {
            CMatrix::from_fn(n, n, |i, j| if i == j { state[(i, i)] } else { Default::default() })
        }
    };
    &state.scale_real(spec.v) + &noise.scale_real(1.0 - spec.v)
}

impl Protocol {
    pub fn validate(&self) -> Result<()> {
        match self {
            Protocol::Cc(p) => p.validate(),
            Protocol::Qc(p) => p.validate(),
        }
    }

    pub fn eval(&self) -> Result<Behavior> {
        match self {
            Protocol::Cc(p) => eval_cc(p),
            Protocol::Qc(p) => eval_qc(p),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Protocol::Cc(_) => "cc",
            Protocol::Qc(_) => "qc",
        }
    }

    pub fn state(&self) -> &CMatrix {
        match self {
            Protocol::Cc(p) => &p.state,
            Protocol::Qc(p) => &p.state,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            Protocol::Cc(p) => (p.dim_a, p.dim_b),
            Protocol::Qc(p) => (p.dim_a, p.dim_b),
        }
    }

    pub fn with_state(&self, state: CMatrix) -> Protocol {
        match self {
            Protocol::Cc(p) => Protocol::Cc(CCProtocol { state, ..p.clone() }),
            Protocol::Qc(p) => Protocol::Qc(QCProtocol { state, ..p.clone() }),
        }
    }

    pub fn with_noise(&self, spec: NoiseSpec) -> Protocol {
        self.with_state(apply_noise(self.state(), spec))
    }

    /// Value of `ineq` on this protocol's behavior.
    pub fn score(&self, ineq: &Inequality) -> Result<f64> {
        evaluate(ineq, &self.eval()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseThreshold {
    /// Smallest visibility at which the inequality is still violated.
    pub visibility: f64,
    pub score_at_one: f64,
    pub score_at_zero: f64,
    /// Score non-decreasing in `v` on a uniform grid.
    pub monotone: bool,
}

pub const THRESHOLD_TOL: f64 = 1e-12;

/// Visibility at which the noisy protocol's score crosses the classical bound.
pub fn noise_threshold(base: &Protocol, ineq: &Inequality, kind: NoiseKind) -> Result<NoiseThreshold> {
    base.validate()?;
    let beta = ineq.bound_f64();
    let score = |v: f64| -> Result<f64> { base.with_noise(NoiseSpec { kind, v }).score(ineq) };
    let s1 = score(1.0)?;
    if s1 <= beta {
        return Err(Error::NoViolation(format!(
            "score {s1:.12} does not exceed bound {beta} at v = 1"
        )));
    }
    let s0 = score(0.0)?;
    let grid: Vec<f64> = (0..=20)
        .map(|k| score(k as f64 / 20.0))
        .collect::<Result<_>>()?;
    let monotone = grid.windows(2).all(|w| w[1] >= w[0] - 1e-12);

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if s0 > beta {
        hi = 0.0;
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if score(mid)? > beta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(NoiseThreshold {
        visibility: hi,
        score_at_one: s1,
        score_at_zero: s0,
        monotone,
    })
}

/// Every element is a projector and distinct elements are orthogonal.
pub fn is_projective(povm: &[CMatrix]) -> bool {
    const TOL: f64 = 1e-9;
    for (i, a) in povm.iter().enumerate() {
        if (a * a).max_abs_diff(a) > TOL {
            return false;
        }
        for b in &povm[i + 1..] {
            if (a * b).max_abs() > TOL {
                return false;
            }
        }
    }
    true
}

/// A deterministic strategy embedded as a diagonal protocol: Alice measures
/// `|f(x)><f(x)|` on a shared classical bit and Bob outputs `g(m)`.
pub fn classical_embedding(f: &[usize], g: &[usize], d: usize, n_b: usize) -> CCProtocol {
    let mut state = CMatrix::zeros(d * d, d * d);
    state[(0, 0)] = crate::matrix::re(1.0);
    let alice = f
        .iter()
        .map(|&fx| {
            (0..d)
                .map(|m| if m == fx { CMatrix::identity(d) } else { CMatrix::zeros(d, d) })
                .collect()
        })
        .collect();
    let bob = g
        .iter()
        .map(|&gm| {
            (0..n_b)
                .map(|b| if b == gm { CMatrix::identity(d) } else { CMatrix::zeros(d, d) })
                .collect()
        })
        .collect();
    CCProtocol {
        dim_a: d,
        dim_b: d,
        state,
        alice,
        bob,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{enumerate_strategies, strategy_behavior};
    use crate::matrix::{partial_trace, pauli};
    use crate::scenario::{builtin_inequality, Scenario};

    fn phi_plus() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::outer(&[s.into(), 0.0.into(), 0.0.into(), s.into()])
    }

    #[test]
    fn noise_examples() {
        let rho = phi_plus();
        for kind in [NoiseKind::Depolarizing, NoiseKind::Dephasing] {
            assert!(apply_noise(&rho, NoiseSpec { kind, v: 1.0 }).max_abs_diff(&rho) < 1e-15);
        }
        let dep = apply_noise(&rho, NoiseSpec { kind: NoiseKind::Depolarizing, v: 0.0 });
        assert!(dep.max_abs_diff(&CMatrix::identity(4).scale_real(0.25)) < 1e-15);
        let deph = apply_noise(&rho, NoiseSpec { kind: NoiseKind::Dephasing, v: 0.0 });
        assert!(deph.max_abs_diff(&CMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
        assert!(NoiseSpec::new(NoiseKind::Dephasing, 1.5).is_err());
    }

    #[test]
    fn projectivity() {
        let comp = vec![CMatrix::diag_real(&[1.0, 0.0]), CMatrix::diag_real(&[0.0, 1.0])];
        assert!(is_projective(&comp));
        let s3 = 3f64.sqrt() / 2.0;
        let trine: Vec<CMatrix> = [(s3, 0.5), (-s3, 0.5), (0.0, -1.0)]
            .iter()
            .map(|&(bx, bz)| pauli::bloch(1.0 / 3.0, bx / 3.0, 0.0, bz / 3.0))
            .collect();
        assert!(!is_projective(&trine));
        let overlapping = vec![CMatrix::diag_real(&[1.0, 0.0]), CMatrix::diag_real(&[1.0, 1.0])];
        assert!(!is_projective(&overlapping));
    }

    #[test]
    fn classical_embedding_reproduces_strategies() {
        let s = Scenario::new(2, 3, 4).unwrap();
        for st in enumerate_strategies(&s) {
            let expect = strategy_behavior(&st, &s).unwrap();
            let got = eval_cc(&classical_embedding(&st.f, &st.g, 2, 4)).unwrap();
            for (r, e) in got.p.iter().zip(&expect) {
                for (a, &b) in r.iter().zip(e) {
                    assert!((a - b as f64).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn invalid_protocols_are_rejected() {
        let mut p = classical_embedding(&[0, 1, 1], &[0, 1], 2, 4);
        p.bob[0][0] = CMatrix::identity(2).scale_real(0.5);
        assert!(matches!(eval_cc(&p), Err(Error::InvalidProtocol(_))));
        let mut p = classical_embedding(&[0, 1, 1], &[0, 1], 2, 4);
        p.state = p.state.scale_real(2.0);
        assert!(eval_cc(&p).is_err());
        let mut p = classical_embedding(&[0, 1, 1], &[0, 1], 2, 4);
        p.alice[1][0] = CMatrix::diag_real(&[1.5, -0.5]);
        p.alice[1][1] = CMatrix::diag_real(&[-0.5, 1.5]);
        assert!(eval_cc(&p).is_err());
    }

    #[test]
    fn qc_message_marginal_is_untouched() {
        for name in builtin_protocol_names() {
            if let Protocol::Qc(p) = builtin_protocol(name).unwrap() {
                let rho_b = partial_trace(&p.state, p.dim_a, p.dim_b, Subsystem::A).unwrap();
                for x in 0..p.n_x() {
                    let marg = partial_trace(&p.tau(x), p.message_dim(), p.dim_b, Subsystem::A).unwrap();
                    assert!(marg.max_abs_diff(&rho_b) <= 1e-10, "{name} x={x}");
                }
            }
        }
    }

    #[test]
    fn noisy_scores_are_affine_in_visibility() {
        for name in ["S1-qubit", "S2-chsh", "S3-qubit"] {
            let p = builtin_protocol(name).unwrap();
            let (_, ineq) = builtin_inequality(target_inequality(name).unwrap()).unwrap();
            for kind in [NoiseKind::Depolarizing, NoiseKind::Dephasing] {
                let s = |v| p.with_noise(NoiseSpec { kind, v }).score(&ineq).unwrap();
                let (a, b, c) = (s(0.2), s(0.5), s(0.8));
                assert!((b - 0.5 * (a + c)).abs() < 1e-10, "{name} {kind:?}");
            }
        }
    }

    #[test]
    fn chsh_protocol_thresholds() {
        let p = builtin_protocol("S2-chsh").unwrap();
        let (_, s2) = builtin_inequality("S2").unwrap();
        let t = noise_threshold(&p, &s2, NoiseKind::Depolarizing).unwrap();
        assert!((t.visibility - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!(t.monotone);
        let at = p
            .with_noise(NoiseSpec { kind: NoiseKind::Depolarizing, v: std::f64::consts::FRAC_1_SQRT_2 })
            .score(&s2)
            .unwrap();
        assert!((at - 1.0).abs() < 1e-9);
        let t = noise_threshold(&p, &s2, NoiseKind::Dephasing).unwrap();
        assert!((t.visibility - (2f64.sqrt() - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn threshold_requires_violation() {
        let p = Protocol::Cc(classical_embedding(&[0, 0, 1, 1], &[0, 3], 2, 4));
        let (_, s2) = builtin_inequality("S2").unwrap();
        assert!(matches!(
            noise_threshold(&p, &s2, NoiseKind::Depolarizing),
            Err(Error::NoViolation(_))
        ));
    }
}
