//! Dense complex matrices sized for few-qubit / few-qudit work.
//!
//! Everything here is row-major and allocation-based; the largest operator the
//! rest of the crate builds is 16x16 (two ququarts), so no attempt is made at
//! blocking or SIMD. The Hermitian eigensolver is a cyclic complex Jacobi
//! sweep, which is accurate to a few ulps at these sizes.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance used to accept an input as Hermitian before diagonalizing it.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::DimensionMismatch("ragged rows".into()));
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Real 2-D array literal, handy for tests and fixed protocols.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().map(|&x| re(x))).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = re(x);
        }
        m
    }

    /// `|v><v|` for a (not necessarily normalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.cols.max(1)).map(<[C64]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |M_ij - conj(M_ji)|`, or infinity for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * v` for a column vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `A X A^dagger`.
    pub fn conjugate_by(&self, a: &CMatrix) -> Self {
        a.matmul(self).matmul(&a.adjoint())
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        kron(self, other)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: CMatrix) -> CMatrix {
        &self + &rhs
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: CMatrix) -> CMatrix {
        &self - &rhs
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        self.matmul(&rhs)
    }
}

/// In-place accumulation `acc += s * m`.
pub fn axpy(acc: &mut CMatrix, s: f64, m: &CMatrix) {
    assert_eq!((acc.rows, acc.cols), (m.rows, m.cols));
    for (a, b) in acc.data.iter_mut().zip(&m.data) {
        *a += b * s;
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let x = a[(ia, ja)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out[(ia * b.rows + ib, ja * b.cols + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Partial trace of an operator on `A (x) B` with the given factor dimensions.
pub fn partial_trace(
    m: &CMatrix,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<CMatrix, MatrixError> {
    let n = dim_a * dim_b;
    if m.rows != n || m.cols != n {
        return Err(MatrixError::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix over {dim_a}x{dim_b}",
            m.rows, m.cols
        )));
    }
    Ok(match traced {
        Subsystem::A => CMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
    })
}

/// `Tr_A[(op (x) I) m]` for `op` on A, or `Tr_B[(I (x) op) m]` for `op` on B,
/// without forming the tensor product.
pub fn reduce_with(
    op: &CMatrix,
    m: &CMatrix,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<CMatrix, MatrixError> {
    let n = dim_a * dim_b;
    let k = match traced {
        Subsystem::A => dim_a,
        Subsystem::B => dim_b,
    };
    if m.rows != n || m.cols != n || op.rows != k || op.cols != k {
        return Err(MatrixError::DimensionMismatch(format!(
            "weighted partial trace of {}x{} with a {}x{} operator over {dim_a}x{dim_b}",
            m.rows, m.cols, op.rows, op.cols
        )));
    }
    Ok(match traced {
        Subsystem::A => CMatrix::from_fn(dim_b, dim_b, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for u in 0..dim_a {
                for v in 0..dim_a {
                    s += op[(u, v)] * m[(v * dim_b + i, u * dim_b + j)];
                }
            }
            s
        }),
        Subsystem::B => CMatrix::from_fn(dim_a, dim_a, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for u in 0..dim_b {
                for v in 0..dim_b {
                    s += op[(u, v)] * m[(i * dim_b + v, j * dim_b + u)];
                }
            }
            s
        }),
    })
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `sum_k f(lambda_k) v_k v_k^dagger`.
    pub fn map_spectrum(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|x| x)
    }

    /// Projector onto eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projector(&self, mut keep: impl FnMut(f64) -> bool) -> CMatrix {
        self.map_spectrum(|x| if keep(x) { 1.0 } else { 0.0 })
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn eig_hermitian(h: &CMatrix) -> Result<EigDecomposition, MatrixError> {
    if !h.is_square() {
        return Err(MatrixError::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            h.rows, h.cols
        )));
    }
    let scale = h.max_abs().max(1.0);
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(MatrixError::NotHermitian(defect));
    }
    let n = h.rows;
    let mut a = h.hermitian_part();
    for i in 0..n {
        a[(i, i)] = re(a[(i, i)].re);
    }
    let mut v = CMatrix::identity(n);
    let off_tol = JACOBI_OFF_TOL * h.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= off_tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let tau = (gamma - alpha) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let j_pp = re(cs);
                let j_pq = re(sn);
                let j_qp = phase.conj() * (-sn);
                let j_qq = phase.conj() * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = re(0.0);
                a[(q, p)] = re(0.0);
                a[(p, p)] = re(alpha - t * mag);
                a[(q, q)] = re(gamma + t * mag);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their original index order
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    Ok(EigDecomposition { values, vectors })
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to zero).
pub fn psd_project(h: &CMatrix) -> Result<CMatrix, MatrixError> {
    Ok(eig_hermitian(h)?.map_spectrum(|x| x.max(0.0)))
}

/// Pseudo-inverse square root: eigenvalues at or below `eps` map to zero.
pub fn inv_sqrt_psd(h: &CMatrix, eps: f64) -> Result<CMatrix, MatrixError> {
    Ok(eig_hermitian(h)?.map_spectrum(|x| if x > eps { 1.0 / x.sqrt() } else { 0.0 }))
}

pub fn sqrt_psd(h: &CMatrix) -> Result<CMatrix, MatrixError> {
    Ok(eig_hermitian(h)?.map_spectrum(|x| x.max(0.0).sqrt()))
}

pub fn min_eigenvalue(h: &CMatrix) -> Result<f64, MatrixError> {
    Ok(*eig_hermitian(h)?.values.last().unwrap_or(&0.0))
}

/// Pauli matrices and small fixed operators.
pub mod pauli {
    use super::{c, re, CMatrix};

    pub fn i2() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows(&[vec![re(0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), re(0.0)]]).unwrap()
    }

    pub fn z() -> CMatrix {
        CMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    /// `a I + bx X + by Y + bz Z`.
    pub fn bloch(a: f64, bx: f64, by: f64, bz: f64) -> CMatrix {
        let mut m = i2().scale_real(a);
        super::axpy(&mut m, bx, &x());
        super::axpy(&mut m, by, &y());
        super::axpy(&mut m, bz, &z());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ket(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| re(x)).collect()
    }

    fn random_hermitian(n: usize, entries: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        let mut it = entries.iter().cycle();
        for i in 0..n {
            m[(i, i)] = re(*it.next().unwrap());
            for j in (i + 1)..n {
                let z = c(*it.next().unwrap(), *it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn reduce_with_matches_explicit_product() {
        let rho = CMatrix::from_fn(6, 6, |i, j| c((i * 7 + j * 3) as f64 % 5.0, (i as f64) - (j as f64)));
        let a = CMatrix::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64 - 0.5));
        let b = CMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, 0.25 * i as f64));
        let lhs = reduce_with(&a, &rho, 2, 3, Subsystem::A).unwrap();
        let rhs = partial_trace(&(&a.kron(&CMatrix::identity(3)) * &rho), 2, 3, Subsystem::A).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let lhs = reduce_with(&b, &rho, 2, 3, Subsystem::B).unwrap();
        let rhs = partial_trace(&(&CMatrix::identity(2).kron(&b) * &rho), 2, 3, Subsystem::B).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        assert_eq!(
            kron(&pauli::z(), &pauli::z()),
            CMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0])
        );
        let p0 = CMatrix::outer(&ket(&[1.0, 0.0]));
        let p1 = CMatrix::outer(&ket(&[0.0, 1.0]));
        let k = kron(&p0, &p1);
        let mut expect = CMatrix::zeros(4, 4);
        expect[(1, 1)] = re(1.0);
        assert_eq!(k, expect);
    }

    #[test]
    fn partial_trace_examples() {
        let s = 0.5f64.sqrt();
        let phi = CMatrix::outer(&ket(&[s, 0.0, 0.0, s]));
        let ra = partial_trace(&phi, 2, 2, Subsystem::A).unwrap();
        assert!(ra.max_abs_diff(&CMatrix::diag_real(&[0.5, 0.5])) < 1e-15);

        let rho_a = CMatrix::from_rows(&[vec![re(0.7), c(0.1, 0.2)], vec![c(0.1, -0.2), re(0.3)]])
            .unwrap();
        let rho_b = CMatrix::diag_real(&[0.25, 0.25, 0.5]);
        let prod = kron(&rho_a, &rho_b);
        let back = partial_trace(&prod, 2, 3, Subsystem::B).unwrap();
        assert!(back.max_abs_diff(&rho_a) < 1e-15);

        let psi = ket(&[(2.0f64 / 3.0).sqrt(), 0.0, 0.0, (1.0f64 / 3.0).sqrt()]);
        let rb = partial_trace(&CMatrix::outer(&psi), 2, 2, Subsystem::A).unwrap();
        assert!(rb.max_abs_diff(&CMatrix::diag_real(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_shape() {
        let m = CMatrix::identity(5);
        assert!(matches!(
            partial_trace(&m, 2, 2, Subsystem::A),
            Err(MatrixError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn eig_pauli_examples() {
        let e = eig_hermitian(&pauli::z()).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);

        let e = eig_hermitian(&pauli::x()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
        let plus = e.vectors[0].clone();
        // |+> up to a global phase
        let overlap = (plus[0] + plus[1]).norm() / 2f64.sqrt();
        assert!((overlap - 1.0).abs() < 1e-12);

        let h = (pauli::z() + pauli::x()).scale_real(0.5f64.sqrt());
        let e = eig_hermitian(&h).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m), Err(MatrixError::NotHermitian(_))));
    }

    #[test]
    fn psd_project_examples() {
        let p = psd_project(&CMatrix::diag_real(&[1.0, -1.0])).unwrap();
        assert!(p.max_abs_diff(&CMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
        let p = psd_project(&CMatrix::diag_real(&[2.0, -3.0, 0.5])).unwrap();
        assert!(p.max_abs_diff(&CMatrix::diag_real(&[2.0, 0.0, 0.5])) < 1e-15);
        let rho = CMatrix::from_rows(&[vec![re(0.7), c(0.1, 0.2)], vec![c(0.1, -0.2), re(0.3)]])
            .unwrap();
        assert!(psd_project(&rho).unwrap().max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn inv_sqrt_examples() {
        let i4 = CMatrix::identity(4);
        assert!(inv_sqrt_psd(&i4, 1e-12).unwrap().max_abs_diff(&i4) < 1e-15);
        let r = inv_sqrt_psd(&CMatrix::diag_real(&[4.0, 1.0]), 1e-12).unwrap();
        assert!(r.max_abs_diff(&CMatrix::diag_real(&[0.5, 1.0])) < 1e-15);
        let r = inv_sqrt_psd(&CMatrix::diag_real(&[1.0, 0.0]), 1e-12).unwrap();
        assert!(r.max_abs_diff(&CMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn inv_sqrt_projects_onto_support() {
        let v = vec![c(0.3, 0.1), c(-0.5, 0.2), re(0.4)];
        let w = vec![re(0.1), c(0.2, -0.7), c(0.3, 0.3)];
        let h = CMatrix::outer(&v) + CMatrix::outer(&w).scale_real(2.0);
        let r = inv_sqrt_psd(&h, 1e-12).unwrap();
        let proj = r.matmul(&h).matmul(&r);
        assert!(proj.matmul(&proj).max_abs_diff(&proj) < 1e-8);
        assert!((proj.trace().re - 2.0).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn eig_reconstructs_random_hermitian(
            n in 1usize..=8,
            entries in proptest::collection::vec(-2.0f64..2.0, 64..80),
        ) {
            let h = random_hermitian(n, &entries);
            let e = eig_hermitian(&h).unwrap();
            let norm = h.frobenius_norm().max(1e-300);
            prop_assert!((&h - &e.reconstruct()).frobenius_norm() <= 1e-9 * norm.max(1.0));
            for w in e.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            for (k, (lam, v)) in e.values.iter().zip(&e.vectors).enumerate() {
                let hv = h.apply(v);
                let res: f64 = hv.iter().zip(v).map(|(a, b)| (a - b * *lam).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(res <= 1e-10 * norm.max(1.0));
                for v2 in &e.vectors[k..] {
                    let ip: C64 = v.iter().zip(v2).map(|(a, b)| a.conj() * b).sum();
                    let expect = if std::ptr::eq(v, v2) { 1.0 } else { 0.0 };
                    prop_assert!((ip - re(expect)).norm() <= 1e-10);
                }
            }
        }

        #[test]
        fn partial_trace_preserves_trace(
            da in 1usize..=4,
            db in 1usize..=4,
            entries in proptest::collection::vec(-1.0f64..1.0, 300),
        ) {
            let h = random_hermitian(da * db, &entries);
            let t = h.trace();
            for side in [Subsystem::A, Subsystem::B] {
                let r = partial_trace(&h, da, db, side).unwrap();
                prop_assert!((r.trace() - t).norm() <= 1e-12);
            }
        }

        #[test]
        fn kron_is_associative(
            entries in proptest::collection::vec(-1.0f64..1.0, 60),
        ) {
            let a = random_hermitian(2, &entries[0..]);
            let b = random_hermitian(3, &entries[10..]);
            let cc = random_hermitian(2, &entries[30..]);
            let l = kron(&kron(&a, &b), &cc);
            let r = kron(&a, &kron(&b, &cc));
            prop_assert!(l.max_abs_diff(&r) <= 1e-14);
        }

        #[test]
        fn psd_project_is_idempotent(
            n in 1usize..=6,
            entries in proptest::collection::vec(-2.0f64..2.0, 40),
        ) {
            let h = random_hermitian(n, &entries);
            let p = psd_project(&h).unwrap();
            let pp = psd_project(&p).unwrap();
            prop_assert!(p.max_abs_diff(&pp) <= 1e-10);
            prop_assert!(min_eigenvalue(&p).unwrap() >= -1e-10);
        }
    }
}
