//! Dense complex matrices of dimension 2, 4 and 8.
//!
//! Everything in the crate that is an operator or a state lives in a
//! [`CMatrix`]: single-qubit inputs and outputs (2), the two-qubit channel
//! and measurement projectors (4), and the full three-qubit state (8).
//! Hermitian matrices are diagonalized with a cyclic complex Jacobi sweep,
//! which converges in a handful of sweeps at these sizes.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-10;

/// Tolerances for [`DensityMatrix`] validation.
pub const DM_HERMITIAN_TOL: f64 = 1e-12;
pub const DM_TRACE_TOL: f64 = 1e-12;
pub const DM_MIN_EIGEN: f64 = -1e-10;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Row-major square complex matrix with `dim` in {2, 4, 8}.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Ok(m)
    }

    /// `|v⟩⟨v|` for a ket of length 2, 4 or 8.
    pub fn outer(ket: &[C64]) -> Result<Self> {
        let dim = ket.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m[i][j] - conj(m[j][i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let n = self.dim;
        let mut out = self.clone();
        for k in 0..n * n {
            out.data[k] = (self.data[k] + adj.data[k]) * 0.5;
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul: dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `self · v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        assert_eq!(v.len(), n, "apply: length mismatch");
        (0..n)
            .map(|i| (0..n).map(|k| self.data[i * n + k] * v[k]).sum())
            .collect()
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "add: dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "sub: dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Pauli matrices in the computational basis, `σz|0⟩ = |0⟩`.
pub mod pauli {
    use super::{CMatrix, C64, ONE, ZERO};

    fn m2(a: C64, b: C64, c: C64, d: C64) -> CMatrix {
        CMatrix::from_rows(&[vec![a, b], vec![c, d]]).expect("2x2 is supported")
    }

    pub fn identity() -> CMatrix {
        m2(ONE, ZERO, ZERO, ONE)
    }

    pub fn x() -> CMatrix {
        m2(ZERO, ONE, ONE, ZERO)
    }

    pub fn y() -> CMatrix {
        let i = C64::new(0.0, 1.0);
        m2(ZERO, -i, i, ZERO)
    }

    pub fn z() -> CMatrix {
        m2(ONE, ZERO, ZERO, -ONE)
    }
}

/// Kronecker product. The result must fit in dimension 8.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    if n > 8 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut out = CMatrix::zeros(n)?;
    for i in 0..na {
        for j in 0..na {
            let aij = a.data[i * na + j];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out.data[(i * nb + k) * n + (j * nb + l)] = aij * b.data[k * nb + l];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the leading factor of dimension `m.dim() / keep`, keeping the
/// trailing factor of dimension `keep`. Works on any operator, not only states.
pub fn partial_trace_leading(m: &CMatrix, keep: usize) -> Result<CMatrix> {
    check_dim(keep)?;
    if !m.dim.is_multiple_of(keep) || m.dim <= keep {
        return Err(Error::DimensionMismatch {
            expected: keep * 2,
            found: m.dim,
        });
    }
    let traced = m.dim / keep;
    let mut out = CMatrix::zeros(keep)?;
    for t in 0..traced {
        for a in 0..keep {
            for b in 0..keep {
                out.data[a * keep + b] += m[(t * keep + a, t * keep + b)];
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.dim;
        let w: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n).expect("dimension already validated");
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, &wk) in w.iter().enumerate() {
                    acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * wk;
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.data[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a[p][q]` with a
/// diagonal unitary and then applies the real symmetric Jacobi rotation.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim;
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n)?;
    let scale = a.max_abs().max(1.0);

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                // Phase removal: column q *= e^{-iθ}, row q *= e^{iθ}.
                let phase = apq / r;
                let phase_c = phase.conj();
                for k in 0..n {
                    a.data[k * n + q] *= phase_c;
                }
                for k in 0..n {
                    a.data[q * n + k] *= phase;
                }
                for k in 0..n {
                    v.data[k * n + q] *= phase_c;
                }

                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A' = Gᵀ A G with G_pp = G_qq = c, G_pq = s, G_qp = -s.
                for k in 0..n {
                    let akp = a.data[k * n + p];
                    let akq = a.data[k * n + q];
                    a.data[k * n + p] = akp * c - akq * s;
                    a.data[k * n + q] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a.data[p * n + k];
                    let aqk = a.data[q * n + k];
                    a.data[p * n + k] = apk * c - aqk * s;
                    a.data[q * n + k] = apk * s + aqk * c;
                }
                a.data[p * n + q] = ZERO;
                a.data[q * n + p] = ZERO;
                for k in 0..n {
                    let vkp = v.data[k * n + p];
                    let vkq = v.data[k * n + q];
                    v.data[k * n + p] = vkp * c - vkq * s;
                    v.data[k * n + q] = vkp * s + vkq * c;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > JACOBI_TOL * scale {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n)?;
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// `e^{scale·m}` written as `e^{log_factor} · mat`, where `mat` has largest
/// eigenvalue exactly 1. Callers that normalize afterwards can drop the factor.
#[derive(Clone, Debug)]
pub struct ShiftedExp {
    pub log_factor: f64,
    pub mat: CMatrix,
}

pub fn expm_hermitian_shifted(m: &CMatrix, scale: f64) -> Result<ShiftedExp> {
    let eig = hermitian_eigen(m)?;
    let exponents: Vec<f64> = eig.values.iter().map(|&l| scale * l).collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mat = eig.reconstruct_with(|l| (scale * l - top).exp());
    Ok(ShiftedExp {
        log_factor: top,
        mat,
    })
}

/// `e^{scale·m}` for Hermitian `m`.
pub fn expm_hermitian(m: &CMatrix, scale: f64) -> Result<CMatrix> {
    let shifted = expm_hermitian_shifted(m, scale)?;
    Ok(shifted.mat.scale_real(shifted.log_factor.exp()))
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let dm = Self { mat };
        dm.validate()?;
        Ok(dm)
    }

    /// Wraps `mat` after symmetrizing it, skipping the spectral checks.
    /// Used on hot paths where the construction guarantees the invariants.
    pub(crate) fn new_trusted(mat: CMatrix) -> Self {
        Self {
            mat: mat.hermitian_part(),
        }
    }

    pub fn from_pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > DM_TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "ket norm² = {norm} is not 1"
            )));
        }
        Self::new(CMatrix::outer(ket)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim)?.scale_real(1.0 / dim as f64))
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.mat.hermitian_defect();
        if h > DM_HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {h:.3e})"
            )));
        }
        let tr = self.mat.trace();
        if (tr - ONE).norm() > DM_TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min = self.min_eigenvalue()?;
        if min < DM_MIN_EIGEN {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigen(&self.mat)?.values[0])
    }

    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            mat: kron(&self.mat, &other.mat)?,
        })
    }

    /// Reduced state of the third qubit of a three-qubit state.
    pub fn partial_trace_first_two(&self) -> Result<DensityMatrix> {
        if self.mat.dim != 8 {
            return Err(Error::DimensionMismatch {
                expected: 8,
                found: self.mat.dim,
            });
        }
        Ok(DensityMatrix::new_trusted(partial_trace_leading(&self.mat, 2)?))
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty mixture".into()))?;
        let mut acc = CMatrix::zeros(first.1.dim())?;
        for &(w, rho) in parts {
            if w < 0.0 {
                return Err(Error::InvalidInput(format!("negative weight {w}")));
            }
            acc = &acc + &rho.mat.scale_real(w);
        }
        DensityMatrix::new(acc)
    }

    /// `⟨ψ|ρ|ψ⟩`, real part.
    pub fn overlap(&self, ket: &[C64]) -> f64 {
        self.mat.expectation(ket).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = CMatrix::identity(2).unwrap();
        let i4 = kron(&i2, &i2).unwrap();
        assert_eq!(i4.max_abs_diff(&CMatrix::identity(4).unwrap()), 0.0);
    }

    #[test]
    fn kron_zz_is_parity_diagonal() {
        let zz = kron(&pauli::z(), &pauli::z()).unwrap();
        let expected = CMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]).unwrap();
        assert_eq!(zz.max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn kron_rejects_dimension_16() {
        let i4 = CMatrix::identity(4).unwrap();
        assert!(matches!(
            kron(&i4, &i4),
            Err(Error::UnsupportedDimension(16))
        ));
    }

    #[test]
    fn kron_of_input_and_mixed_channel_has_unit_trace() {
        let zero = DensityMatrix::from_pure(&[ONE, ZERO]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        let total = zero.kron(&mixed).unwrap();
        assert!((total.mat().trace() - ONE).norm() < 1e-15);
    }

    #[test]
    fn unsupported_dimensions_rejected() {
        assert!(CMatrix::zeros(3).is_err());
        assert!(CMatrix::zeros(16).is_err());
    }

    #[test]
    fn partial_trace_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(8).unwrap();
        let red = rho.partial_trace_first_two().unwrap();
        let half = CMatrix::identity(2).unwrap().scale_real(0.5);
        assert!(red.mat().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_returns_last_factor() {
        let a = DensityMatrix::from_pure(&[c(0.6), c(0.8)]).unwrap();
        let b = DensityMatrix::maximally_mixed(2).unwrap();
        let cc = DensityMatrix::new(
            CMatrix::from_rows(&[
                vec![c(0.7), C64::new(0.1, 0.2)],
                vec![C64::new(0.1, -0.2), c(0.3)],
            ])
            .unwrap(),
        )
        .unwrap();
        let abc = a.kron(&b).unwrap().kron(&cc).unwrap();
        let red = abc.partial_trace_first_two().unwrap();
        assert!(red.mat().max_abs_diff(cc.mat()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_input_times_bell_pair_is_maximally_mixed() {
        // Direct index computation: Tr_12 of |ψ⟩⟨ψ| ⊗ |Φ+⟩⟨Φ+|.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DensityMatrix::from_pure(&[c(0.6), C64::new(0.0, 0.8)]).unwrap();
        let bell = DensityMatrix::from_pure(&[c(s), ZERO, ZERO, c(s)]).unwrap();
        let red = psi.kron(&bell).unwrap().partial_trace_first_two().unwrap();
        let half = CMatrix::identity(2).unwrap().scale_real(0.5);
        assert!(red.mat().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(rho.partial_trace_first_two().is_err());
    }

    #[test]
    fn eigen_of_pauli_x() {
        let e = hermitian_eigen(&pauli::x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_of_diagonal_sorted() {
        let m = CMatrix::from_real_diag(&[3.0, 1.0, 2.0, 0.0]).unwrap();
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigen_of_complex_hermitian_reconstructs() {
        let i = C64::new(0.0, 1.0);
        let m = CMatrix::from_rows(&[
            vec![c(2.0), c(1.0) + i, ZERO, i * 0.5],
            vec![c(1.0) - i, c(-1.0), c(0.3), ZERO],
            vec![ZERO, c(0.3), c(0.5), c(2.0) - i],
            vec![-i * 0.5, ZERO, c(2.0) + i, c(4.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&m).unwrap();
        assert!(e.reconstruct_with(|l| l).max_abs_diff(&m) < 1e-12);
        let vtv = &e.vectors.adjoint() * &e.vectors;
        assert!(vtv.max_abs_diff(&CMatrix::identity(4).unwrap()) < 1e-12);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMatrix::zeros(4).unwrap();
        let e = expm_hermitian(&z, 3.7).unwrap();
        assert!(e.max_abs_diff(&CMatrix::identity(4).unwrap()) < 1e-15);
    }

    #[test]
    fn expm_of_sigma_z() {
        let e = expm_hermitian(&pauli::z(), 1.0).unwrap();
        let expected = CMatrix::from_real_diag(&[std::f64::consts::E, (-1.0f64).exp()]).unwrap();
        assert!(e.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn shifted_expm_survives_huge_scale() {
        let h = CMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]).unwrap();
        let s = expm_hermitian_shifted(&h, -1e3).unwrap();
        assert!(s.mat.max_abs().is_finite());
        assert!((s.log_factor - 1e3).abs() < 1e-9);
        assert!((s.mat[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation_catches_bad_trace_and_negativity() {
        let m = CMatrix::from_real_diag(&[0.7, 0.7]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
        let m = CMatrix::from_real_diag(&[1.2, -0.2]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }
}
