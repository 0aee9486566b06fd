//! See-saw (alternating) maximization of an inequality over protocols of fixed
//! local dimension.
//!
//! Classical messages alternate three blocks: Alice's binary measurements
//! (closed form), Bob's decoding POVMs (a minimum-error fixed point) and the
//! shared pure state (top eigenvector). See [`qc`] for qubit messages.
//! Restarts run in parallel and are reproducible from `seed + index`.

pub mod qc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, eig_hermitian, reduce_with, CMatrix, Subsystem, C64};
use crate::quantum::{eval_cc_unchecked, CCProtocol, Povm, Protocol};
use crate::scenario::Inequality;

pub use qc::seesaw_qc;

/// Eigenvalues of `R_0 - R_1` up to this magnitude go to message 1.
pub const ALICE_ZERO_TOL: f64 = 1e-12;
pub const BOB_SHIFT_MARGIN: f64 = 0.01;
pub const BOB_MAX_ITERS: usize = 2000;
pub const BOB_TOL: f64 = 1e-12;
/// Weight of `I / |B|` mixed into a warm start so that zero elements can grow.
const BOB_REFRESH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub dim_a: usize,
    pub dim_b: usize,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
    pub message_dim: usize,
    /// Read-out outcomes for qubit messages.
    pub readout_outcomes: usize,
    /// Worker threads for restarts; `None` uses `PMBOX_THREADS` or all cores.
    pub threads: Option<usize>,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            dim_a: 2,
            dim_b: 2,
            restarts: 50,
            max_sweeps: 500,
            tol: 1e-10,
            seed: 0,
            message_dim: 2,
            readout_outcomes: 3,
            threads: None,
        }
    }
}

impl SeesawConfig {
    pub fn with_dims(dim_a: usize, dim_b: usize) -> Self {
        SeesawConfig {
            dim_a,
            dim_b,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if self.message_dim != 2 {
            return Err(Error::InvalidArgument("only binary messages are supported".into()));
        }
        if self.dim_a == 0 || self.dim_b == 0 {
            return Err(Error::InvalidArgument("dimensions must be positive".into()));
        }
        Ok(())
    }

    fn thread_count(&self) -> usize {
        self.threads
            .or_else(|| std::env::var("PMBOX_THREADS").ok().and_then(|v| v.parse().ok()))
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
    }
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub best_value: f64,
    pub best_protocol: Protocol,
    /// Value after every sweep of the best restart.
    pub trace: Vec<f64>,
    pub restart_values: Vec<f64>,
}

/// One restart: final protocol, value and the value after every sub-step.
#[derive(Debug, Clone)]
pub struct RestartRun<P> {
    pub value: f64,
    pub protocol: P,
    pub substeps: Vec<f64>,
    pub sweeps: Vec<f64>,
}

pub(crate) fn coeffs_checked(ineq: &Inequality, d: usize) -> Result<Vec<Vec<f64>>> {
    ineq.validate()?;
    if ineq.scenario.d != d {
        return Err(Error::InvalidArgument(format!(
            "see-saw supports d = {d} only, inequality has d = {}",
            ineq.scenario.d
        )));
    }
    Ok(ineq.coeffs_f64())
}

/// `sum_b c[b] B_b`.
pub(crate) fn weighted(povm: &[CMatrix], c: &[f64]) -> CMatrix {
    let dim = povm[0].rows();
    let mut w = CMatrix::zeros(dim, dim);
    for (b, &cb) in povm.iter().zip(c) {
        if cb != 0.0 {
            crate::matrix::axpy(&mut w, cb, b);
        }
    }
    w
}

pub fn objective_cc(coeffs: &[Vec<f64>], p: &CCProtocol) -> f64 {
    eval_cc_unchecked(p)
        .p
        .iter()
        .zip(coeffs)
        .map(|(r, c)| r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

/// Exact maximizer over Alice's binary measurements.
pub fn alice_step(
    coeffs: &[Vec<f64>],
    state: &CMatrix,
    bob: &[Povm],
    dim_a: usize,
    dim_b: usize,
) -> Result<Vec<Povm>> {
    if bob.len() != 2 {
        return Err(Error::InvalidArgument("Alice step needs binary messages".into()));
    }
    coeffs
        .iter()
        .map(|cx| {
            let r0 = reduce_with(&weighted(&bob[0], cx), state, dim_a, dim_b, Subsystem::B)?;
            let r1 = reduce_with(&weighted(&bob[1], cx), state, dim_a, dim_b, Subsystem::B)?;
            let diff = (&r0 - &r1).hermitian_part();
            let a0 = eig_hermitian(&diff)?.spectral_projector(|l| l > ALICE_ZERO_TOL);
            let a1 = &CMatrix::identity(dim_a) - &a0;
            Ok(vec![a0, a1])
        })
        .collect()
}

/// Maximizes `sum_b Tr(B_b S_b)` over POVMs by the fixed point
/// `B_b <- L^{-1/2} T_b B_b T_b L^{-1/2}`, `L = sum_b T_b B_b T_b`, where
/// `T_b = S_b + c I` is shifted to be positive definite. The best iterate
/// (including `init`) is returned, so the objective never decreases.
pub fn discriminate(s: &[CMatrix], init: &[CMatrix]) -> Result<Povm> {
    let n = s.len();
    let dim = s[0].rows();
    let id = CMatrix::identity(dim);
    let mut lo = f64::INFINITY;
    for sb in s {
        lo = lo.min(*eig_hermitian(&sb.hermitian_part())?.values.last().unwrap());
    }
    let shift = (-lo).max(0.0) + BOB_SHIFT_MARGIN;
    let t: Vec<CMatrix> = s
        .iter()
        .map(|sb| {
            let mut tb = sb.hermitian_part();
            crate::matrix::axpy(&mut tb, shift, &id);
            tb
        })
        .collect();
    let objective = |b: &[CMatrix]| -> f64 { b.iter().zip(s).map(|(bb, sb)| bb.trace_product(sb).re).sum() };

    let mut best = init.to_vec();
    let mut best_val = objective(&best);
    let mut cur: Vec<CMatrix> = init
        .iter()
        .map(|b| &b.scale_real(1.0 - BOB_REFRESH) + &id.scale_real(BOB_REFRESH / n as f64))
        .collect();
    let mut prev = objective(&cur);
    for _ in 0..BOB_MAX_ITERS {
        let tbt: Vec<CMatrix> = t.iter().zip(&cur).map(|(tb, bb)| &(tb * bb) * tb).collect();
        let mut lam = CMatrix::zeros(dim, dim);
        for m in &tbt {
            lam = &lam + m;
        }
        let e = eig_hermitian(&lam.hermitian_part())?;
        let inv = e.map_spectrum(|x| if x > 1e-12 { 1.0 / x.sqrt() } else { 0.0 });
        let gap = e.spectral_projector(|x| x <= 1e-12);
        let fill = gap.scale_real(1.0 / n as f64);
        cur = tbt
            .iter()
            .map(|m| &(&(&inv * m) * &inv).hermitian_part() + &fill)
            .collect();
        let val = objective(&cur);
        if val > best_val {
            best_val = val;
            best.clone_from(&cur);
        }
        if (val - prev).abs() < BOB_TOL {
            break;
        }
        prev = val;
    }
    Ok(best)
}

/// Bob's decoding step: for each message, a discrimination problem over the
/// conditional states Alice steers him into.
pub fn bob_step(
    coeffs: &[Vec<f64>],
    state: &CMatrix,
    alice: &[Povm],
    bob: &[Povm],
    dim_a: usize,
    dim_b: usize,
) -> Result<Vec<Povm>> {
    let n_b = coeffs[0].len();
    (0..bob.len())
        .map(|m| {
            let mut s = vec![CMatrix::zeros(dim_b, dim_b); n_b];
            for (cx, ax) in coeffs.iter().zip(alice) {
                let sigma = reduce_with(&ax[m], state, dim_a, dim_b, Subsystem::A)?;
                for (sb, &c) in s.iter_mut().zip(cx) {
                    if c != 0.0 {
                        crate::matrix::axpy(sb, c, &sigma);
                    }
                }
            }
            discriminate(&s, &bob[m])
        })
        .collect()
}

/// `F = sum_{x,m} A_{m|x} (x) (sum_b c[x][b] B_{b|m})`.
pub fn state_operator(coeffs: &[Vec<f64>], alice: &[Povm], bob: &[Povm]) -> CMatrix {
    let dim = alice[0][0].rows() * bob[0][0].rows();
    let mut f = CMatrix::zeros(dim, dim);
    for (cx, ax) in coeffs.iter().zip(alice) {
        for (am, bm) in ax.iter().zip(bob) {
            f = &f + &am.kron(&weighted(bm, cx));
        }
    }
    f.hermitian_part()
}

/// Top eigenvector of `m`, first nonzero amplitude made real positive.
pub fn top_eigenvector(m: &CMatrix) -> Result<Vec<C64>> {
    let e = eig_hermitian(m)?;
    let mut v = e.vectors[0].clone();
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = z.conj() / z.norm();
        for a in v.iter_mut() {
            *a *= phase;
        }
    }
    Ok(v)
}

/// Exact maximizer over pure states.
pub fn state_step(coeffs: &[Vec<f64>], alice: &[Povm], bob: &[Povm]) -> Result<CMatrix> {
    Ok(CMatrix::outer(&top_eigenvector(&state_operator(coeffs, alice, bob))?))
}

pub(crate) fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Gaussian perturbation of `I / n`, clipped to PSD and renormalized to
/// sum to the identity.
pub(crate) fn random_povm(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Result<Povm> {
    let base = CMatrix::identity(dim).scale_real(1.0 / n as f64);
    let mut elems = Vec::with_capacity(n);
    let mut sum = CMatrix::zeros(dim, dim);
    for _ in 0..n {
        let h = &base + &random_hermitian(rng, dim).scale_real(0.5 / n as f64);
        let p = crate::matrix::psd_project(&h)?;
        sum = &sum + &p;
        elems.push(p);
    }
    let norm = crate::matrix::inv_sqrt_psd(&sum.hermitian_part(), 1e-12)?;
    Ok(elems.iter().map(|p| (&(&norm * p) * &norm).hermitian_part()).collect())
}

fn run_cc(
    coeffs: &[Vec<f64>],
    cfg: &SeesawConfig,
    seed: u64,
    fixed_state: Option<&CMatrix>,
) -> Result<RestartRun<CCProtocol>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (da, db) = (cfg.dim_a, cfg.dim_b);
    let n_b = coeffs[0].len();
    let mut state = match fixed_state {
        Some(s) => s.clone(),
        None => CMatrix::outer(&random_unit_vector(&mut rng, da * db)),
    };
    let mut bob: Vec<Povm> = (0..cfg.message_dim)
        .map(|_| random_povm(&mut rng, db, n_b))
        .collect::<Result<_>>()?;
    let mut alice = alice_step(coeffs, &state, &bob, da, db)?;
    let mut substeps = Vec::new();
    let mut sweeps = Vec::new();
    let value = |s: &CMatrix, a: &[Povm], b: &[Povm]| {
        objective_cc(
            coeffs,
            &CCProtocol {
                dim_a: da,
                dim_b: db,
                state: s.clone(),
                alice: a.to_vec(),
                bob: b.to_vec(),
            },
        )
    };
    let mut last = value(&state, &alice, &bob);
    substeps.push(last);
    for sweep in 0..cfg.max_sweeps {
        if sweep > 0 {
            alice = alice_step(coeffs, &state, &bob, da, db)?;
            substeps.push(value(&state, &alice, &bob));
        }
        bob = bob_step(coeffs, &state, &alice, &bob, da, db)?;
        substeps.push(value(&state, &alice, &bob));
        if fixed_state.is_none() {
            state = state_step(coeffs, &alice, &bob)?;
            substeps.push(value(&state, &alice, &bob));
        }
        let now = *substeps.last().unwrap();
        sweeps.push(now);
        if now - last < cfg.tol && sweep > 0 {
            break;
        }
        last = now;
    }
    let protocol = CCProtocol {
        dim_a: da,
        dim_b: db,
        state,
        alice,
        bob,
    };
    Ok(RestartRun {
        value: objective_cc(coeffs, &protocol),
        protocol,
        substeps,
        sweeps,
    })
}

/// A single classical-message restart with the given seed.
pub fn seesaw_cc_restart(
    ineq: &Inequality,
    cfg: &SeesawConfig,
    seed: u64,
    fixed_state: Option<&CMatrix>,
) -> Result<RestartRun<CCProtocol>> {
    cfg.validate()?;
    let coeffs = coeffs_checked(ineq, cfg.message_dim)?;
    run_cc(&coeffs, cfg, seed, fixed_state)
}

pub(crate) fn run_restarts<P: Send>(
    cfg: &SeesawConfig,
    job: impl Fn(u64) -> Result<RestartRun<P>> + Sync + Send,
) -> Result<(RestartRun<P>, Vec<f64>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.thread_count())
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let runs: Vec<RestartRun<P>> = pool.install(|| {
        (0..cfg.restarts as u64)
            .into_par_iter()
            .map(|k| job(cfg.seed.wrapping_add(k)))
            .collect::<Result<_>>()
    })?;
    let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |bi, (i, v)| if *v > values[bi] { i } else { bi });
    let run = runs.into_iter().nth(best).expect("at least one restart");
    Ok((run, values))
}

/// Optimizes state, encodings and decodings with classical binary messages.
pub fn seesaw_cc(ineq: &Inequality, cfg: &SeesawConfig) -> Result<SeesawResult> {
    cfg.validate()?;
    let coeffs = coeffs_checked(ineq, cfg.message_dim)?;
    let (run, restart_values) = run_restarts(cfg, |seed| run_cc(&coeffs, cfg, seed, None))?;
    Ok(SeesawResult {
        best_value: run.value,
        best_protocol: Protocol::Cc(run.protocol),
        trace: run.sweeps,
        restart_values,
    })
}

/// Same as [`seesaw_cc`] with the shared state held fixed.
pub fn seesaw_cc_fixed_state(ineq: &Inequality, state: &CMatrix, cfg: &SeesawConfig) -> Result<SeesawResult> {
    cfg.validate()?;
    crate::quantum::check_state(state, cfg.dim_a * cfg.dim_b)?;
    let coeffs = coeffs_checked(ineq, cfg.message_dim)?;
    let (run, restart_values) = run_restarts(cfg, |seed| run_cc(&coeffs, cfg, seed, Some(state)))?;
    Ok(SeesawResult {
        best_value: run.value,
        best_protocol: Protocol::Cc(run.protocol),
        trace: run.sweeps,
        restart_values,
    })
}

/// Named fixed states: `phi+` and `max-entangled` (dimension from the config).
pub fn named_state(name: &str, dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    match name {
        "phi+" if dim_a == 2 && dim_b == 2 => Ok(crate::quantum::max_entangled(2)),
        "max-entangled" | "phi+" if dim_a == dim_b => Ok(crate::quantum::max_entangled(dim_a)),
        "phi+" | "max-entangled" => Err(Error::InvalidArgument(format!(
            "state `{name}` needs equal local dimensions, got {dim_a} and {dim_b}"
        ))),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}
