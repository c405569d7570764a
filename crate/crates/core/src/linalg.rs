//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The decompositions themselves
//! (Hermitian eigensolver, complex Schur, SVD) come from nalgebra; this module
//! adds the tolerance policy, clamping and ordering conventions on top.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::linalg::{Schur, SymmetricEigen, SVD};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_CLAMP` are clamped to zero when a PSD input is expected.
pub const PSD_CLAMP: f64 = 1e-10;
/// Relative singular-value cutoff of the pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-12;
/// Tolerance on `max |UU^* - I|` for inputs that must be unitary.
pub const UNITARY_TOL: f64 = 1e-8;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Largest entry modulus, `||A||_max`.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<usize> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}

/// `max |A_ij - conj(A_ji)|`.
pub fn hermitian_asymmetry(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian(a: &ComplexMatrix) -> Result<()> {
    ensure_square(a)?;
    let asymmetry = hermitian_asymmetry(a);
    if asymmetry > HERMITIAN_TOL * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

/// `(A + A^*) / 2`.
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * c64(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(lambda)) V^*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        hermitian_part(&(scaled * self.vectors.adjoint()))
    }
}

pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen> {
    ensure_hermitian(a)?;
    Ok(eig_hermitian_unchecked(a))
}

/// Same as [`eig_hermitian`] for inputs that are Hermitian by construction.
pub fn eig_hermitian_unchecked(a: &ComplexMatrix) -> HermitianEigen {
    let n = a.nrows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.nrows();
    if n == 0 {
        return vec![];
    }
    let mut values: Vec<f64> = SymmetricEigen::new(hermitian_part(a)).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

fn psd_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let eig = eig_hermitian(a)?;
    if eig.min() < -PSD_CLAMP {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    Ok(eig)
}

/// Principal square root of a PSD Hermitian matrix.
pub fn hermitian_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.map(|l| l.max(0.0).sqrt()))
}

/// `A^{-1/2}` for a positive definite Hermitian matrix; eigenvalues at or below
/// `floor` are reported as [`Error::NotPositive`].
pub fn hermitian_inv_sqrt(a: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(a)?;
    if eig.min() <= floor {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    Ok(eig.map(|l| 1.0 / l.sqrt()))
}

/// Moore-Penrose pseudo-inverse through the SVD.
pub fn pseudo_inverse(a: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = a.shape();
    if m == 0 || n == 0 || max_abs(a) == 0.0 {
        return zeros(n, m);
    }
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let cutoff = PINV_CUTOFF * sigma_max;
    let mut out = zeros(n, m);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            let vik = v_t[(k, i)].conj() * inv;
            for j in 0..m {
                out[(i, j)] += vik * u[(j, k)].conj();
            }
        }
    }
    out
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = SVD::new(a.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Spectral (operator) norm.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    a.clone().try_inverse().ok_or(Error::Conditioning {
        index: 0,
        detail: "matrix is singular".into(),
    })
}

/// `max |UU^* - I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u * u.adjoint()), &identity(n))
}

pub fn ensure_unitary(u: &ComplexMatrix, tol: f64) -> Result<()> {
    ensure_square(u)?;
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Eigendecomposition `U = V diag(e^{i angle}) V^*` of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    /// Angles in `(-pi, pi]`, ascending.
    pub angles: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `angles`.
    pub vectors: ComplexMatrix,
}

impl UnitaryEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.angles.len();
        let mut scaled = self.vectors.clone();
        for (j, &theta) in self.angles.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, theta);
            for i in 0..n {
                scaled[(i, j)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Maps an angle to `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Unitary eigendecomposition via the complex Schur form. For a normal matrix the
/// triangular factor is diagonal, so the Schur vectors are eigenvectors.
pub fn eig_unitary(u: &ComplexMatrix) -> Result<UnitaryEigen> {
    ensure_unitary(u, UNITARY_TOL)?;
    let n = u.nrows();
    if n == 0 {
        return Ok(UnitaryEigen { angles: vec![], vectors: zeros(0, 0) });
    }
    let schur = Schur::try_new(u.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let raw: Vec<f64> = (0..n).map(|k| normalize_angle(t[(k, k)].arg())).collect();

    let modulus_key = |col: usize| -> Vec<f64> { (0..n).map(|i| q[(i, col)].norm()).collect() };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| match raw[a].total_cmp(&raw[b]) {
        Ordering::Equal => {
            let (ka, kb) = (modulus_key(a), modulus_key(b));
            ka.iter()
                .zip(kb.iter())
                .map(|(x, y)| y.total_cmp(x))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        }
        other => other,
    });
    let angles = order.iter().map(|&k| raw[k]).collect();
    let mut vectors = ComplexMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    // phase convention: the first entry of largest modulus is real and positive
    for c in 0..n {
        let top = (0..n).fold(0.0f64, |acc, r| acc.max(vectors[(r, c)].norm()));
        let pivot = (0..n).find(|&r| vectors[(r, c)].norm() >= top * (1.0 - 1e-12)).unwrap_or(0);
        let z = vectors[(pivot, c)];
        if z.norm() > 0.0 {
            let phase = z.conj() / z.norm();
            for r in 0..n {
                vectors[(r, c)] *= phase;
            }
        }
    }
    Ok(UnitaryEigen { angles, vectors })
}

/// Cholesky factor `L` (lower triangular, `L L^* = A`) of a PSD Hermitian matrix.
///
/// Pivots below `1e-12 * trace(A)` are treated as exact zeros and their column is
/// zeroed, so rank-deficient inputs are accepted. Because the factorization
/// proceeds column by column, the leading `k x k` block of `L` is the factor of the
/// leading `k x k` block of `A`.
pub fn cholesky_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_hermitian(a)?;
    let n = a.nrows();
    let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
    let tol = 1e-12 * trace.abs();
    let mut l = zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= tol {
            continue;
        }
        let pivot = d.sqrt();
        l[(j, j)] = c64(pivot, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / pivot;
        }
    }
    Ok(l)
}

/// Solves `A X = B` for Hermitian positive definite `A`. Returns `None` when a
/// pivot falls below `rel_tol` times the largest diagonal entry.
pub fn solve_hpd(a: &ComplexMatrix, b: &ComplexMatrix, rel_tol: f64) -> Option<ComplexMatrix> {
    let n = a.nrows();
    let scale = (0..n).fold(0.0f64, |acc, i| acc.max(a[(i, i)].re));
    let mut l = zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= rel_tol * scale {
            return None;
        }
        let pivot = d.sqrt();
        l[(j, j)] = c64(pivot, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / pivot;
        }
    }
    let y = l.solve_lower_triangular(b)?;
    l.adjoint().solve_upper_triangular(&y)
}

/// `log det A` of a Hermitian matrix from its eigenvalues; `None` unless every
/// eigenvalue is strictly positive.
pub fn log_det_hermitian(a: &ComplexMatrix) -> Option<f64> {
    let values = hermitian_eigenvalues(a);
    if values.iter().any(|&l| l.is_nan() || l <= 0.0) {
        return None;
    }
    Some(values.iter().map(|l| l.ln()).sum())
}

/// Copy of the `p x p` block `(i, j)` of a block matrix.
pub fn block(a: &ComplexMatrix, i: usize, j: usize, p: usize) -> ComplexMatrix {
    a.view((i * p, j * p), (p, p)).into_owned()
}

pub fn set_block(a: &mut ComplexMatrix, i: usize, j: usize, value: &ComplexMatrix) {
    let (r, c) = value.shape();
    a.view_mut((i * r, j * c), (r, c)).copy_from(value);
}

/// A unitary map that can act on blocks of column vectors without being
/// materialized as a dense matrix.
pub trait UnitaryOperator {
    fn dim(&self) -> usize;

    /// `U X` for an `N x k` matrix `X`.
    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix;

    fn to_dense(&self) -> ComplexMatrix {
        self.apply(&identity(self.dim()))
    }
}

impl UnitaryOperator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self * x
    }

    fn to_dense(&self) -> ComplexMatrix {
        self.clone()
    }
}
