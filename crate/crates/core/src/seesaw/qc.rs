//! See-saw for qubit messages.
//!
//! Alice's channel only enters through the states `tau_x` she prepares on
//! message (x) B. For a fixed shared state these range over
//! `{tau >= 0, Tr_msg tau = rho_B}`, so the search runs over `tau_x` directly
//! and a channel is recovered from the optimum at the end. Each sweep updates
//! the `tau_x` (projected gradient, Dykstra projection), the read-out POVM,
//! Bob's decodings and finally the shared pure state. The state step keeps the
//! recovered channels, takes the top eigenvector of the resulting operator
//! and is accepted only when it raises the objective, since with `rho_B`
//! frozen the first three blocks stall on poor local optima.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    coeffs_checked, discriminate, random_povm, random_unit_vector, run_restarts, weighted,
    RestartRun, SeesawConfig, SeesawResult,
};
use crate::error::Result;
use crate::matrix::{
    eig_hermitian, inv_sqrt_psd, partial_trace, psd_project, reduce_with, CMatrix, Subsystem, C64,
};
use crate::quantum::{eval_qc_unchecked, Povm, Protocol, QCProtocol};
use crate::scenario::Inequality;

pub const DYKSTRA_MAX_ITERS: usize = 500;
pub const DYKSTRA_TOL: f64 = 1e-9;
/// Projected-gradient steps per tau-block.
const TAU_STEPS: usize = 30;
const SUPPORT_EPS: f64 = 1e-12;

/// `tau + (1/d) I (x) (rho_b - Tr_msg tau)`: orthogonal projection onto the
/// affine set with the prescribed B marginal.
fn affine_project(tau: &CMatrix, rho_b: &CMatrix, dim_msg: usize) -> CMatrix {
    let db = rho_b.rows();
    let marg = partial_trace(tau, dim_msg, db, Subsystem::A).expect("shape");
    let corr = (rho_b - &marg).scale_real(1.0 / dim_msg as f64);
    CMatrix::identity(dim_msg).kron(&corr) + tau.clone()
}

/// Dykstra's alternating projections onto `PSD ∩ {Tr_msg tau = rho_b}`.
/// Returns the point and whether both residuals fell below the tolerance.
pub fn dykstra_project(z: &CMatrix, rho_b: &CMatrix, dim_msg: usize) -> Result<(CMatrix, bool)> {
    let n = z.rows();
    let db = rho_b.rows();
    let mut x = z.clone();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    for _ in 0..DYKSTRA_MAX_ITERS {
        let y = psd_project(&(&x + &p).hermitian_part())?;
        p = &(&x + &p) - &y;
        let x_new = affine_project(&(&y + &q), rho_b, dim_msg);
        q = &(&y + &q) - &x_new;
        x = x_new.hermitian_part();
        // the eigensolve is only worth paying for once the cheap residual is met
        let aff_res = partial_trace(&y, dim_msg, db, Subsystem::A)?.max_abs_diff(rho_b);
        if aff_res < DYKSTRA_TOL {
            let psd_res = -eig_hermitian(&x)?.values.last().copied().unwrap_or(0.0);
            if psd_res < DYKSTRA_TOL {
                return Ok((x, true));
            }
        }
    }
    Ok((x, false))
}

fn tau_operator(coeffs_x: &[f64], readout: &[CMatrix], bob: &[Povm]) -> CMatrix {
    let dm = readout[0].rows();
    let db = bob[0][0].rows();
    let mut g = CMatrix::zeros(dm * db, dm * db);
    for (mm, bm) in readout.iter().zip(bob) {
        g = &g + &mm.kron(&weighted(bm, coeffs_x));
    }
    g.hermitian_part()
}

/// Projected gradient ascent of `Tr(tau G)`; only non-decreasing, feasible
/// steps are accepted.
fn tau_block(tau: &CMatrix, g: &CMatrix, rho_b: &CMatrix, dim_msg: usize, eta: &mut f64) -> Result<CMatrix> {
    let mut cur = tau.clone();
    let mut val = cur.trace_product(g).re;
    for _ in 0..TAU_STEPS {
        let step = &cur + &g.scale_real(*eta);
        let (cand, ok) = dykstra_project(&step, rho_b, dim_msg)?;
        let v = cand.trace_product(g).re;
        if ok && v >= val {
            let gain = v - val;
            cur = cand;
            val = v;
            *eta *= 2.0;
            if gain < 1e-13 {
                break;
            }
        } else {
            *eta /= 4.0;
            if *eta < 1e-8 {
                *eta = 1e-8;
                break;
            }
        }
    }
    Ok(cur)
}

struct QcState {
    psi: Vec<C64>,
    rho_b: CMatrix,
    tau: Vec<CMatrix>,
    readout: Povm,
    bob: Vec<Povm>,
}

fn objective(coeffs: &[Vec<f64>], s: &QcState) -> f64 {
    coeffs
        .iter()
        .zip(&s.tau)
        .map(|(cx, t)| t.trace_product(&tau_operator(cx, &s.readout, &s.bob)).re)
        .sum()
}

fn readout_block(coeffs: &[Vec<f64>], s: &QcState, dim_msg: usize, db: usize) -> Result<Povm> {
    let n_r = s.readout.len();
    let mut t = vec![CMatrix::zeros(dim_msg, dim_msg); n_r];
    for (cx, tau) in coeffs.iter().zip(&s.tau) {
        for (tm, bm) in t.iter_mut().zip(&s.bob) {
            *tm = &*tm + &reduce_with(&weighted(bm, cx), tau, dim_msg, db, Subsystem::B)?;
        }
    }
    discriminate(&t, &s.readout)
}

fn bob_block(coeffs: &[Vec<f64>], s: &QcState, dim_msg: usize, db: usize) -> Result<Vec<Povm>> {
    let n_b = coeffs[0].len();
    s.readout
        .iter()
        .zip(&s.bob)
        .map(|(mm, bm)| {
            let mut sb = vec![CMatrix::zeros(db, db); n_b];
            for (cx, tau) in coeffs.iter().zip(&s.tau) {
                let omega = reduce_with(mm, tau, dim_msg, db, Subsystem::A)?;
                for (acc, &c) in sb.iter_mut().zip(cx) {
                    if c != 0.0 {
                        crate::matrix::axpy(acc, c, &omega);
                    }
                }
            }
            discriminate(&sb, bm)
        })
        .collect()
}

/// Schmidt data of `psi` on `dim_a (x) dim_b`: `(lambda_i, a_i, e_i)` for the
/// nonzero coefficients, and an orthonormal basis of the rest of A.
#[allow(clippy::type_complexity)]
fn schmidt(psi: &[C64], da: usize, db: usize) -> Result<(Vec<(f64, Vec<C64>, Vec<C64>)>, Vec<Vec<C64>>)> {
    let m = CMatrix::from_fn(da, db, |i, j| psi[i * db + j]);
    let rho_a = (&m * &m.adjoint()).hermitian_part();
    let e = eig_hermitian(&rho_a)?;
    let mut terms = Vec::new();
    let mut rest = Vec::new();
    for (lam, a) in e.values.iter().zip(&e.vectors) {
        if *lam > SUPPORT_EPS {
            let s = lam.sqrt();
            let ev: Vec<C64> = (0..db)
                .map(|j| (0..da).map(|k| a[k].conj() * m[(k, j)]).sum::<C64>() / s)
                .collect();
            terms.push((*lam, a.clone(), ev));
        } else {
            rest.push(a.clone());
        }
    }
    Ok((terms, rest))
}

/// Kraus operators of a channel on A with `(Lambda (x) I)[psi] = tau`.
pub fn recover_channel(psi: &[C64], tau: &CMatrix, da: usize, db: usize, dim_msg: usize) -> Result<Vec<CMatrix>> {
    let (terms, rest) = schmidt(psi, da, db)?;
    let mut rho_inv_sqrt = CMatrix::zeros(db, db);
    for (lam, _, e) in &terms {
        rho_inv_sqrt = &rho_inv_sqrt + &CMatrix::outer(e).scale_real(1.0 / lam.sqrt());
    }
    let lift = CMatrix::identity(dim_msg).kron(&rho_inv_sqrt);
    let omega = psd_project(&(&(&lift * tau) * &lift).hermitian_part())?;
    let eo = eig_hermitian(&omega)?;
    let mut kraus = Vec::new();
    for (mu, w) in eo.values.iter().zip(&eo.vectors) {
        if *mu <= 1e-14 {
            continue;
        }
        let amp = mu.sqrt();
        let mut k = CMatrix::zeros(dim_msg, da);
        for (_, a, e) in &terms {
            for s in 0..dim_msg {
                let coef: C64 = (0..db).map(|j| e[j].conj() * w[s * db + j]).sum::<C64>() * amp;
                for (col, ak) in a.iter().enumerate() {
                    k[(s, col)] += coef * ak.conj();
                }
            }
        }
        kraus.push(k);
    }
    for v in &rest {
        let mut k = CMatrix::zeros(dim_msg, da);
        for (col, vk) in v.iter().enumerate() {
            k[(0, col)] = vk.conj();
        }
        kraus.push(k);
    }
    let mut sum = CMatrix::zeros(da, da);
    for k in &kraus {
        sum = &sum + &(&k.adjoint() * k);
    }
    let fix = inv_sqrt_psd(&sum.hermitian_part(), 1e-12)?;
    Ok(kraus.iter().map(|k| k * &fix).collect())
}

/// Re-optimizes the shared state for the channels behind the current `tau_x`,
/// then moves the `tau_x` along with it.
fn state_block(coeffs: &[Vec<f64>], s: &mut QcState, da: usize, db: usize, dim_msg: usize) -> Result<()> {
    let kraus = s
        .tau
        .iter()
        .map(|t| recover_channel(&s.psi, t, da, db, dim_msg))
        .collect::<Result<Vec<_>>>()?;
    let id_b = CMatrix::identity(db);
    let lifted: Vec<Vec<CMatrix>> = kraus
        .iter()
        .map(|ks| ks.iter().map(|k| k.kron(&id_b)).collect())
        .collect();
    let mut f = CMatrix::zeros(da * db, da * db);
    for (cx, ks) in coeffs.iter().zip(&lifted) {
        let g = tau_operator(cx, &s.readout, &s.bob);
        for k in ks {
            f = &f + &(&(&k.adjoint() * &g) * k);
        }
    }
    let f = f.hermitian_part();
    let psi = super::top_eigenvector(&f)?;
    let rho = CMatrix::outer(&psi);
    let tau: Vec<CMatrix> = lifted
        .iter()
        .map(|ks| {
            let mut t = CMatrix::zeros(dim_msg * db, dim_msg * db);
            for k in ks {
                t = &t + &(&(k * &rho) * &k.adjoint());
            }
            t.hermitian_part()
        })
        .collect();
    let before = objective(coeffs, s);
    let rho_b = partial_trace(&rho, da, db, Subsystem::A)?.hermitian_part();
    let cand = QcState { psi, rho_b, tau, readout: s.readout.clone(), bob: s.bob.clone() };
    if objective(coeffs, &cand) > before {
        *s = cand;
    }
    Ok(())
}

fn to_protocol(s: &QcState, da: usize, db: usize, dim_msg: usize) -> Result<QCProtocol> {
    let kraus = s
        .tau
        .iter()
        .map(|t| recover_channel(&s.psi, t, da, db, dim_msg))
        .collect::<Result<_>>()?;
    Ok(QCProtocol {
        dim_a: da,
        dim_b: db,
        state: CMatrix::outer(&s.psi),
        kraus,
        readout: s.readout.clone(),
        bob: s.bob.clone(),
    })
}

pub fn objective_qc(coeffs: &[Vec<f64>], p: &QCProtocol) -> f64 {
    eval_qc_unchecked(p)
        .p
        .iter()
        .zip(coeffs)
        .map(|(r, c)| r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

fn run_qc(coeffs: &[Vec<f64>], cfg: &SeesawConfig, seed: u64) -> Result<RestartRun<QCProtocol>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (da, db, dm) = (cfg.dim_a, cfg.dim_b, cfg.message_dim);
    let n_b = coeffs[0].len();
    let psi = random_unit_vector(&mut rng, da * db);
    let rho_b = partial_trace(&CMatrix::outer(&psi), da, db, Subsystem::A)?.hermitian_part();
    let readout = random_povm(&mut rng, dm, cfg.readout_outcomes)?;
    let bob = (0..cfg.readout_outcomes)
        .map(|_| random_povm(&mut rng, db, n_b))
        .collect::<Result<Vec<_>>>()?;
    let start = CMatrix::identity(dm).scale_real(1.0 / dm as f64).kron(&rho_b);
    let mut s = QcState {
        psi,
        tau: vec![start; coeffs.len()],
        rho_b,
        readout,
        bob,
    };
    let mut etas = vec![1.0; coeffs.len()];
    let mut substeps = vec![objective(coeffs, &s)];
    let mut sweeps = Vec::new();
    let mut last = substeps[0];
    for sweep in 0..cfg.max_sweeps {
        for (x, cx) in coeffs.iter().enumerate() {
            let g = tau_operator(cx, &s.readout, &s.bob);
            s.tau[x] = tau_block(&s.tau[x], &g, &s.rho_b, dm, &mut etas[x])?;
        }
        substeps.push(objective(coeffs, &s));
        s.readout = readout_block(coeffs, &s, dm, db)?;
        substeps.push(objective(coeffs, &s));
        s.bob = bob_block(coeffs, &s, dm, db)?;
        substeps.push(objective(coeffs, &s));
        state_block(coeffs, &mut s, da, db, dm)?;
        let now = objective(coeffs, &s);
        substeps.push(now);
        sweeps.push(now);
        if now - last < cfg.tol && sweep > 0 {
            break;
        }
        last = now;
    }
    let protocol = to_protocol(&s, da, db, dm)?;
    Ok(RestartRun {
        value: objective_qc(coeffs, &protocol),
        protocol,
        substeps,
        sweeps,
    })
}

/// A single qubit-message restart with the given seed.
pub fn seesaw_qc_restart(ineq: &Inequality, cfg: &SeesawConfig, seed: u64) -> Result<RestartRun<QCProtocol>> {
    cfg.validate()?;
    let coeffs = coeffs_checked(ineq, cfg.message_dim)?;
    run_qc(&coeffs, cfg, seed)
}

/// Optimizes qubit-message protocols; the shared state is sampled per restart.
pub fn seesaw_qc(ineq: &Inequality, cfg: &SeesawConfig) -> Result<SeesawResult> {
    cfg.validate()?;
    let coeffs = coeffs_checked(ineq, cfg.message_dim)?;
    let (run, restart_values) = run_restarts(cfg, |seed| run_qc(&coeffs, cfg, seed))?;
    Ok(SeesawResult {
        best_value: run.value,
        best_protocol: Protocol::Qc(run.protocol),
        trace: run.sweeps,
        restart_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::builtin_protocol;

    #[test]
    fn dykstra_lands_in_the_feasible_set() {
        let rho_b = CMatrix::diag_real(&[0.36, 0.64]);
        let z = CMatrix::from_fn(4, 4, |i, j| crate::matrix::c((i + j) as f64 * 0.3 - 0.5, (i as f64 - j as f64) * 0.2));
        let (x, ok) = dykstra_project(&z.hermitian_part(), &rho_b, 2).unwrap();
        assert!(ok);
        assert!(partial_trace(&x, 2, 2, Subsystem::A).unwrap().max_abs_diff(&rho_b) < 1e-9);
        assert!(crate::matrix::min_eigenvalue(&x).unwrap() > -1e-9);
        // feasible points are fixed
        let f = CMatrix::identity(2).scale_real(0.5).kron(&rho_b);
        let (y, _) = dykstra_project(&f, &rho_b, 2).unwrap();
        assert!(y.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn channels_are_recovered_from_their_outputs() {
        for name in ["S1-trine-qc", "S2-qc", "S3-qc"] {
            let Protocol::Qc(p) = builtin_protocol(name).unwrap() else { unreachable!() };
            let psi = crate::seesaw::top_eigenvector(&p.state).unwrap();
            for x in 0..p.n_x() {
                let tau = p.tau(x);
                let ks = recover_channel(&psi, &tau, 2, 2, 2).unwrap();
                crate::quantum::check_channel(&ks, 2, "recovered").unwrap();
                let q = QCProtocol { kraus: vec![ks], ..p.clone() };
                assert!(q.tau(0).max_abs_diff(&tau) < 1e-9, "{name} x={x}");
            }
        }
    }

    #[test]
    fn recovery_with_schmidt_rank_deficit() {
        // |psi> = |0>|+> on 3 (x) 2 leaves two directions of A unused
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![C64::new(0.0, 0.0); 6];
        psi[0] = C64::new(h, 0.0);
        psi[1] = C64::new(h, 0.0);
        let rho_b = partial_trace(&CMatrix::outer(&psi), 3, 2, Subsystem::A).unwrap();
        let tau = CMatrix::diag_real(&[0.0, 1.0]).kron(&rho_b);
        let ks = recover_channel(&psi, &tau, 3, 2, 2).unwrap();
        crate::quantum::check_channel(&ks, 3, "recovered").unwrap();
    }
}
