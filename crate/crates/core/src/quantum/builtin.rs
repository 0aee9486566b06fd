//! Closed-form protocols.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{CCProtocol, Povm, Protocol, QCProtocol};
use crate::error::{Error, Result};
use crate::matrix::{inv_sqrt_psd, kron_vec, pauli, re, CMatrix, C64};

const NAMES: [(&str, &str); 6] = [
    ("S1-qubit", "S1"),
    ("S2-chsh", "S2"),
    ("S1-trine-qc", "S1"),
    ("S2-qc", "S2"),
    ("S3-qubit", "S3"),
    ("S3-qc", "S3"),
];

pub fn builtin_protocol_names() -> Vec<&'static str> {
    NAMES.iter().map(|(n, _)| *n).collect()
}

/// The inequality a built-in protocol was designed for.
pub fn target_inequality(name: &str) -> Result<&'static str> {
    NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, i)| *i)
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

pub fn builtin_protocol(name: &str) -> Result<Protocol> {
    Ok(match name {
        "S1-qubit" => Protocol::Cc(s1_qubit()),
        "S2-chsh" => Protocol::Cc(s2_chsh()),
        "S3-qubit" => Protocol::Cc(s3_qubit()),
        "S1-trine-qc" => Protocol::Qc(s1_trine()),
        "S2-qc" => Protocol::Qc(s2_qc()),
        "S3-qc" => Protocol::Qc(s3_qc()),
        _ => return Err(Error::UnknownName(name.to_string())),
    })
}

/// Two-outcome measurement of a +-1 observable, with the `+1` and `-1`
/// projectors placed at the given output labels among `n` outcomes.
pub fn dichotomic(obs: &CMatrix, plus: Option<usize>, minus: Option<usize>, n: usize) -> Povm {
    let dim = obs.rows();
    let id = CMatrix::identity(dim);
    let mut out = vec![CMatrix::zeros(dim, dim); n];
    if let Some(b) = plus {
        out[b] = &out[b] + &(&id + obs).scale_real(0.5);
    }
    if let Some(b) = minus {
        out[b] = &out[b] + &(&id - obs).scale_real(0.5);
    }
    out
}

/// Message fixed to `m` regardless of the measured state.
fn deterministic(m: usize, d: usize, dim: usize) -> Povm {
    (0..d)
        .map(|k| if k == m { CMatrix::identity(dim) } else { CMatrix::zeros(dim, dim) })
        .collect()
}

/// `(a Z + b X) / |(a, b)|`.
fn zx(a: f64, b: f64) -> CMatrix {
    let n = a.hypot(b);
    pauli::bloch(0.0, b / n, 0.0, a / n)
}

fn schmidt2(a: f64, b: f64) -> Vec<C64> {
    let n = a.hypot(b);
    vec![re(a / n), re(0.0), re(0.0), re(b / n)]
}

fn ket_bra(ket: [f64; 2], bra: [f64; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| re(ket[i] * bra[j]))
}

/// Nearest unitary `W (W^dagger W)^{-1/2}`.
fn polar_unitary(w: &CMatrix) -> CMatrix {
    let h = (&w.adjoint() * w).hermitian_part();
    w * &inv_sqrt_psd(&h, 1e-14).expect("Hermitian by construction")
}

fn s1_qubit() -> CCProtocol {
    let psi = schmidt2(2f64.sqrt(), 1.0);
    let mut alice = Vec::new();
    for sign in [1.0, -1.0] {
        let o = pauli::bloch(0.0, sign * (2.0f64 / 3.0).sqrt(), 0.0, 1.0 / 3f64.sqrt());
        alice.push(dichotomic(&o, Some(0), Some(1), 2));
    }
    alice.push(deterministic(1, 2, 2));
    CCProtocol {
        dim_a: 2,
        dim_b: 2,
        state: CMatrix::outer(&psi),
        alice,
        bob: vec![
            dichotomic(&pauli::x(), Some(0), Some(1), 4),
            dichotomic(&pauli::z(), Some(2), Some(3), 4),
        ],
    }
}

fn s2_chsh() -> CCProtocol {
    let psi = schmidt2(1.0, 1.0);
    CCProtocol {
        dim_a: 2,
        dim_b: 2,
        state: CMatrix::outer(&psi),
        alice: vec![
            // the -1 outcome of Z is sent as m = 0
            dichotomic(&pauli::z(), Some(1), Some(0), 2),
            dichotomic(&pauli::x(), Some(0), Some(1), 2),
            deterministic(0, 2, 2),
            deterministic(1, 2, 2),
        ],
        bob: vec![
            dichotomic(&zx(1.0, 1.0), Some(0), Some(1), 4),
            dichotomic(&zx(1.0, -1.0), Some(2), Some(3), 4),
        ],
    }
}

/// Printed to about three digits; the local unitaries are re-unitarized and
/// the observables renormalized.
fn s3_qubit() -> CCProtocol {
    let u1 = polar_unitary(
        &(&pauli::z().scale(C64::new(-0.418, 0.478)) + &pauli::x().scale(C64::new(-0.509, 0.581))),
    );
    let u2 = polar_unitary(
        &(&pauli::i2().scale(C64::new(-0.555, 0.634)) - &pauli::y().scale(C64::new(0.405, 0.355))),
    );
    let psi = u1.kron(&u2).apply(&schmidt2(0.7737, 0.6335));
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
    CCProtocol {
        dim_a: 2,
        dim_b: 2,
        state: CMatrix::outer(&psi),
        alice: vec![
            dichotomic(&zx(0.998, -0.06), Some(0), Some(1), 2),
            deterministic(0, 2, 2),
            dichotomic(&zx(-0.237, -0.972), Some(0), Some(1), 2),
            deterministic(1, 2, 2),
        ],
        bob: vec![
            dichotomic(&pauli::x(), Some(2), Some(1), 4),
            dichotomic(&zx(0.984, 0.1784), Some(3), Some(0), 4),
        ],
    }
}

/// Measure Z and send `|ket_m>` for outcome `m`.
fn measure_and_prepare(kets: [[f64; 2]; 2]) -> Vec<CMatrix> {
    vec![ket_bra(kets[0], [1.0, 0.0]), ket_bra(kets[1], [0.0, 1.0])]
}

fn s1_trine() -> QCProtocol {
    let s3 = 3f64.sqrt() / 2.0;
    let readout = [(s3, 0.5), (-s3, 0.5), (0.0, -1.0)]
        .iter()
        .map(|&(bx, bz)| pauli::bloch(1.0 / 3.0, bx / 3.0, 0.0, bz / 3.0))
        .collect();
    QCProtocol {
        dim_a: 2,
        dim_b: 2,
        state: CMatrix::outer(&schmidt2(3.0, 4.0)),
        kraus: vec![
            measure_and_prepare([[0.0, 1.0], [0.0, 1.0]]),
            vec![pauli::x()],
            vec![pauli::y()],
        ],
        readout,
        bob: vec![
            dichotomic(&pauli::x(), Some(1), Some(2), 4),
            dichotomic(&pauli::x(), Some(2), Some(1), 4),
            dichotomic(&pauli::z(), Some(3), Some(0), 4),
        ],
    }
}

fn s2_qc() -> QCProtocol {
    let h = FRAC_1_SQRT_2;
    QCProtocol {
        dim_a: 2,
        dim_b: 2,
        state: CMatrix::outer(&schmidt2(1.0, 1.0)),
        kraus: vec![
            measure_and_prepare([[0.0, 1.0], [0.0, 1.0]]),
            vec![pauli::x()],
            vec![pauli::y()],
            // +1 -> |0>, -1 -> maximally mixed
            vec![
                ket_bra([1.0, 0.0], [1.0, 0.0]),
                ket_bra([h, 0.0], [0.0, 1.0]),
                ket_bra([0.0, h], [0.0, 1.0]),
            ],
        ],
        readout: vec![
            pauli::bloch(3.0 / 8.0, 0.0, 0.0, 3.0 / 8.0),
            pauli::bloch(5.0 / 16.0, -4.0 / 16.0, 0.0, -3.0 / 16.0),
            pauli::bloch(5.0 / 16.0, 4.0 / 16.0, 0.0, -3.0 / 16.0),
        ],
        bob: vec![
            dichotomic(&pauli::z(), Some(3), Some(0), 4),
            dichotomic(&pauli::x(), Some(1), Some(2), 4),
            dichotomic(&pauli::x(), Some(2), Some(1), 4),
        ],
    }
}

fn s3_qc() -> QCProtocol {
    let h = FRAC_1_SQRT_2;
    let t = 10f64.sqrt();
    QCProtocol {
        dim_a: 2,
        dim_b: 2,
        state: CMatrix::outer(&schmidt2(1.0, 1.0)),
        kraus: vec![
            vec![pauli::x()],
            vec![pauli::y()],
            measure_and_prepare([[h, h], [h, h]]),
            measure_and_prepare([[3.0 / t, 1.0 / t], [1.0 / t, 3.0 / t]]),
        ],
        readout: vec![
            pauli::bloch(3.0 / 8.0, -3.0 / 8.0, 0.0, 0.0),
            pauli::bloch(5.0 / 16.0, 3.0 / 16.0, 0.0, -4.0 / 16.0),
            pauli::bloch(5.0 / 16.0, 3.0 / 16.0, 0.0, 4.0 / 16.0),
        ],
        bob: vec![
            dichotomic(&pauli::x(), Some(1), Some(0), 4),
            dichotomic(&pauli::z(), Some(2), Some(3), 4),
            dichotomic(&pauli::z(), Some(3), Some(2), 4),
        ],
    }
}

/// Maximally entangled state `sum_i |ii> / sqrt(dim)`.
pub fn max_entangled(dim: usize) -> CMatrix {
    let amp = re(1.0 / (dim as f64).sqrt());
    let basis = |i: usize| (0..dim).map(|k| if k == i { re(1.0) } else { re(0.0) }).collect::<Vec<_>>();
    let mut v = vec![re(0.0); dim * dim];
    for i in 0..dim {
        for (slot, a) in v.iter_mut().zip(kron_vec(&basis(i), &basis(i))) {
            *slot += a * amp;
        }
    }
    CMatrix::outer(&v)
}
