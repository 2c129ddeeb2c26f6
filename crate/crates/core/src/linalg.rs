//! Dense complex linear algebra for the 2-, 4- and 8-dimensional spaces of
//! one to three qubits.
//!
//! Basis ordering follows the usual big-endian convention: the state
//! `|j1 j2 j3>` has index `4*j1 + 2*j2 + j3`, so qubit 1 is the most
//! significant bit.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::config::{
    DET_TOL, EIGEN_HERMITIAN_TOL, HERMITIAN_TOL, NORM_TOL, PSD_CLIP_TOL, SINGULAR_TOL, TRACE_TOL,
};
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// 2x2 matrix from its four entries, row by row.
    pub fn m2(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: vec![a, b, c, d],
        }
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { ZERO })
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m[i][j] - conj(m[j][i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c_) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c_, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// `a * self * a^dagger`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        &(a * self) * &a.adjoint()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn det2(&self) -> C64 {
        assert_eq!((self.rows, self.cols), (2, 2));
        self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::m2(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::m2(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::m2(ONE, ZERO, ZERO, -ONE)
}

fn check_2x2(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "2x2".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    Ok(())
}

/// `a ⊗ b ⊗ c` with qubit 1 as the most significant index.
pub fn kron3(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_2x2(a)?;
    check_2x2(b)?;
    check_2x2(c)?;
    Ok(a.kron(b).kron(c))
}

/// Single-qubit reduced matrix of qubit `keep` (1-based).
pub fn partial_trace(rho: &ComplexMatrix, keep: usize) -> Result<ComplexMatrix> {
    if rho.rows() != 8 || rho.cols() != 8 {
        return Err(Error::DimensionMismatch {
            expected: "8x8".into(),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    if !(1..=3).contains(&keep) {
        return Err(Error::QubitIndex(keep));
    }
    let shift = 3 - keep;
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..8 {
        for j in 0..8 {
            // the other two qubits must agree
            let mask = !(1usize << shift) & 7;
            if i & mask == j & mask {
                out[((i >> shift) & 1, (j >> shift) & 1)] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `sum_k f(lambda_k) v_k v_k^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k])
                .sum()
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigensystem by cyclic complex Jacobi rotations.
pub fn herm_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let dev = m.hermitian_deviation();
    if dev > EIGEN_HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 || r <= 1e-18 * norm {
                    continue;
                }
                // phase the pair so that a[p][q] becomes real and positive
                let ph = apq / r;
                for k in 0..n {
                    a[(k, q)] *= ph.conj();
                }
                for k in 0..n {
                    a[(q, k)] *= ph;
                }
                for k in 0..n {
                    v[(k, q)] *= ph.conj();
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * sn;
                    a[(k, q)] = akp * sn + akq * cs;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * sn;
                    a[(q, k)] = apk * sn + aqk * cs;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs - vkq * sn;
                    v[(k, q)] = vkp * sn + vkq * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigensystem { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eigensystem(m)?.values[0])
}

/// `m^{-1/2}` for a Hermitian positive-definite 2x2 matrix.
pub fn inv_sqrt_2x2(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_2x2(m)?;
    let es = herm_eigensystem(m)?;
    if es.values[0] <= SINGULAR_TOL {
        return Err(Error::NearSingularMarginal(es.values[0]));
    }
    Ok(es.reconstruct_with(|l| 1.0 / l.sqrt()))
}

/// An 8x8 Hermitian positive-semidefinite operator with trace in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps an 8x8 matrix. Eigenvalues in `[-1e-10, 0)` are clipped to zero.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 8 || m.cols() != 8 {
            return Err(Error::DimensionMismatch {
                expected: "8x8".into(),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite matrix entry".into()));
        }
        let dev = m.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let mut mat = m.hermitian_part();
        let es = herm_eigensystem(&mat)?;
        let lmin = es.values[0];
        if lmin < -PSD_CLIP_TOL {
            return Err(Error::NotPositive(lmin));
        }
        if lmin < 0.0 {
            mat = es.reconstruct_with(|l| l.max(0.0)).hermitian_part();
        }
        let tr = mat.trace().re;
        if !(tr > 0.0 && tr <= 1.0 + TRACE_TOL) {
            return Err(Error::InvalidTrace(tr));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix known to be a valid (possibly sub-normalized) state.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert_eq!((m.rows(), m.cols()), (8, 8));
        Self {
            mat: m.hermitian_part(),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self::from_trusted(ComplexMatrix::outer(psi.amplitudes()))
    }

    /// Convex mixture `sum_k w_k |psi_k><psi_k|`.
    pub fn mixture(terms: &[(f64, &PureState)]) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(8, 8);
        for (w, psi) in terms {
            m = &m + &ComplexMatrix::outer(psi.amplitudes()).scale_re(*w);
        }
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        Self::from_trusted(ComplexMatrix::identity(8).scale_re(0.125))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// The state rescaled to unit trace.
    pub fn normalized(&self) -> Self {
        Self::from_trusted(self.mat.scale_re(1.0 / self.trace()))
    }

    pub fn partial_trace(&self, keep: usize) -> Result<ComplexMatrix> {
        partial_trace(&self.mat, keep)
    }

    pub fn eigensystem(&self) -> Eigensystem {
        herm_eigensystem(&self.mat).expect("density matrices are Hermitian")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigensystem().values[0]
    }

    /// `<psi| rho |psi>`.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        let a = psi.amplitudes();
        let rv = self.mat.apply(a);
        a.iter().zip(&rv).map(|(x, y)| x.conj() * y).sum::<C64>().re
    }

    /// `tr(rho * op)`.
    pub fn expect_op(&self, op: &ComplexMatrix) -> C64 {
        (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .map(|(i, j)| self.mat[(i, j)] * op[(j, i)])
            .sum()
    }

    pub(crate) fn require_unit_trace(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > crate::config::UNIT_TRACE_TOL {
            return Err(Error::NotNormalized(tr));
        }
        Ok(())
    }
}

/// Normalized pure three-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amp: [C64; 8],
}

impl PureState {
    pub fn new(amp: [C64; 8]) -> Result<Self> {
        let n: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amp })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalize(amp: [C64; 8]) -> Result<Self> {
        let n: f64 = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self {
            amp: amp.map(|z| z / n),
        })
    }

    pub fn from_real(amp: [f64; 8]) -> Result<Self> {
        Self::normalize(amp.map(|x| c(x, 0.0)))
    }

    pub fn basis(index: usize) -> Self {
        let mut amp = [ZERO; 8];
        amp[index] = ONE;
        Self { amp }
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amp
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Three single-qubit operators with unit determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    ops: [ComplexMatrix; 3],
}

impl LocalOperator {
    pub fn new(a1: ComplexMatrix, a2: ComplexMatrix, a3: ComplexMatrix) -> Result<Self> {
        for a in [&a1, &a2, &a3] {
            check_2x2(a)?;
            let d = (a.det2() - ONE).norm();
            if d > DET_TOL {
                return Err(Error::NotUnitDeterminant(d));
            }
        }
        Ok(Self { ops: [a1, a2, a3] })
    }

    pub(crate) fn from_trusted(ops: [ComplexMatrix; 3]) -> Self {
        Self { ops }
    }

    pub fn identity() -> Self {
        let id = ComplexMatrix::identity(2);
        Self {
            ops: [id.clone(), id.clone(), id],
        }
    }

    pub fn factor(&self, qubit: usize) -> &ComplexMatrix {
        &self.ops[qubit - 1]
    }

    pub fn factors(&self) -> &[ComplexMatrix; 3] {
        &self.ops
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.ops[0].kron(&self.ops[1]).kron(&self.ops[2])
    }

    /// `A rho A^dagger` as a raw matrix.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        rho.conjugate_by(&self.matrix())
    }

    pub fn apply_pure(&self, psi: &[C64; 8]) -> [C64; 8] {
        let v = self.matrix().apply(psi);
        let mut out = [ZERO; 8];
        out.copy_from_slice(&v);
        out
    }

    /// True when every factor is unitary within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.ops.iter().all(|a| {
            (&(a * &a.adjoint()) - &ComplexMatrix::identity(2)).max_abs() <= tol
        })
    }

    /// Largest `|det(a_j) - 1|`.
    pub fn det_deviation(&self) -> f64 {
        self.ops
            .iter()
            .map(|a| (a.det2() - ONE).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    #[test]
    fn kron3_identity_and_flip() {
        let id = ComplexMatrix::identity(2);
        let k = kron3(&id, &id, &id).unwrap();
        assert!(k.max_abs_diff(&ComplexMatrix::identity(8)) == 0.0);

        let x1 = kron3(&pauli_x(), &id, &id).unwrap();
        let mut e0 = [ZERO; 8];
        e0[0] = ONE;
        let out = x1.apply(&e0);
        assert_eq!(out[4], ONE);
        assert_eq!(out.iter().filter(|z| **z != ZERO).count(), 1);
    }

    #[test]
    fn kron3_zzz_diagonal() {
        let z = pauli_z();
        let k = kron3(&z, &z, &z).unwrap();
        let expected = [1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0];
        assert!(k.max_abs_diff(&ComplexMatrix::diag_real(&expected)) == 0.0);
    }

    #[test]
    fn kron3_rejects_wrong_dimension() {
        let id = ComplexMatrix::identity(2);
        assert!(matches!(
            kron3(&ComplexMatrix::identity(3), &id, &id),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let ghz = ghz_plus().projector();
        for q in 1..=3 {
            let m = ghz.partial_trace(q).unwrap();
            assert!(m.max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);
        }
        let p001 = PureState::basis(1).projector();
        let m = p001.partial_trace(3).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::diag_real(&[0.0, 1.0])) == 0.0);

        let w = w_state().projector();
        let m = w.partial_trace(1).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::diag_real(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        assert!(matches!(w.partial_trace(4), Err(Error::QubitIndex(4))));
        assert!(matches!(w.partial_trace(0), Err(Error::QubitIndex(0))));
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = rng(7);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 2).scale_re(0.5);
        let cc = random_density(&mut rng, 2).scale_re(0.25);
        let prod = kron3(&a, &b, &cc).unwrap();
        let tb = b.trace();
        let tc = cc.trace();
        let ta = a.trace();
        assert!(partial_trace(&prod, 1).unwrap().max_abs_diff(&a.scale(tb * tc)) < 1e-14);
        assert!(partial_trace(&prod, 2).unwrap().max_abs_diff(&b.scale(ta * tc)) < 1e-14);
        assert!(partial_trace(&prod, 3).unwrap().max_abs_diff(&cc.scale(ta * tb)) < 1e-14);
    }

    #[test]
    fn eigensystem_diagonal() {
        let d: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let es = herm_eigensystem(&ComplexMatrix::diag_real(&d)).unwrap();
        assert_eq!(es.values, d);
        assert!(es.vectors.max_abs_diff(&ComplexMatrix::identity(8)) == 0.0);
    }

    #[test]
    fn eigensystem_ghz_projector() {
        let es = ghz_plus().projector().eigensystem();
        assert!((es.values[7] - 1.0).abs() < 1e-14);
        for k in 0..7 {
            assert!(es.values[k].abs() < 1e-14);
        }
        let v = es.vector(7);
        let overlap: C64 = v
            .iter()
            .zip(ghz_plus().amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigensystem_symmetric_block() {
        // raw GHZ-symmetric shape with a = b = 1/8 and x = 1/4
        let mut m = ComplexMatrix::identity(8).scale_re(0.125);
        m[(0, 7)] = c(0.25, 0.0);
        m[(7, 0)] = c(0.25, 0.0);
        let es = herm_eigensystem(&m).unwrap();
        assert!((es.values[0] + 0.125).abs() < 1e-14);
        assert!((es.values[7] - 0.375).abs() < 1e-14);
        for k in 1..7 {
            assert!((es.values[k] - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(4);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(herm_eigensystem(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigensystem_random_reconstruction() {
        let mut rng = rng(11);
        for n in [2, 4, 8] {
            for _ in 0..20 {
                let m = random_hermitian(&mut rng, n);
                let es = herm_eigensystem(&m).unwrap();
                let norm = m.frobenius_norm();
                let rec = es.reconstruct_with(|l| l);
                assert!(rec.max_abs_diff(&m) < 1e-12 * norm.max(1.0));
                let vv = &es.vectors.adjoint() * &es.vectors;
                assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
                for k in 0..n {
                    let v = es.vector(k);
                    let mv = m.apply(&v);
                    let res = mv
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| (a - b * es.values[k]).norm())
                        .fold(0.0, f64::max);
                    assert!(res < 1e-9 * norm);
                }
                assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn inv_sqrt_examples() {
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        let r = inv_sqrt_2x2(&half).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale_re(2f64.sqrt())) < 1e-14);
        let r = inv_sqrt_2x2(&ComplexMatrix::diag_real(&[4.0, 1.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 1.0])) < 1e-14);
        assert!(matches!(
            inv_sqrt_2x2(&ComplexMatrix::diag_real(&[1e-16, 1.0])),
            Err(Error::NearSingularMarginal(_))
        ));
    }

    #[test]
    fn inv_sqrt_random() {
        let mut rng = rng(3);
        for _ in 0..50 {
            let m = &random_density(&mut rng, 2) + &ComplexMatrix::identity(2).scale_re(0.01);
            let r = inv_sqrt_2x2(&m).unwrap();
            assert!(r.hermitian_deviation() < 1e-14);
            let check = &(&r * &r) * &m;
            assert!(check.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-9);
        }
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((DensityMatrix::maximally_mixed().min_eigenvalue() - 0.125).abs() < 1e-15);
        assert!(ghz_plus().projector().min_eigenvalue().abs() < 1e-15);
        let m = &ghz_plus().projector().into_matrix() - &w_state().projector().into_matrix().scale_re(0.1);
        assert!((min_eigenvalue(&m).unwrap() + 0.1).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = ComplexMatrix::identity(8).scale_re(0.125);
        m[(0, 0)] = c(0.125 - 0.2, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPositive(_))));

        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::zeros(8, 8)),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::identity(8).scale_re(0.2)),
            Err(Error::InvalidTrace(_))
        ));

        // tiny negative eigenvalues are clipped
        let mut m = ComplexMatrix::zeros(8, 8);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(-5e-11, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(rho.min_eigenvalue() >= 0.0);

        let mut m = ComplexMatrix::identity(8).scale_re(0.125);
        m[(0, 1)] = c(1e-6, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn pure_state_norm() {
        assert!(PureState::new([c(1.0, 0.0); 8]).is_err());
        assert!(PureState::normalize([ZERO; 8]).is_err());
    }

    #[test]
    fn local_operator_determinant() {
        let id = ComplexMatrix::identity(2);
        let bad = ComplexMatrix::diag_real(&[2.0, 1.0]);
        assert!(LocalOperator::new(id.clone(), bad, id.clone()).is_err());
        let ok = ComplexMatrix::diag_real(&[2.0, 0.5]);
        let a = LocalOperator::new(id.clone(), ok, id).unwrap();
        assert!(!a.is_unitary(1e-9));
        assert!(a.det_deviation() < 1e-15);
    }
}
