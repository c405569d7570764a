//! Random matrix samplers: Ginibre, Haar unitaries, Haar corners and the
//! Gaussian construction of spectral weights.

use libm::lgamma;
use nalgebra::linalg::QR;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, identity, zeros, ComplexMatrix, UnitaryOperator};
use crate::rng::RngStream;

/// `n x n` matrix of independent standard complex Gaussians.
pub fn sample_ginibre(n: usize, rng: &mut RngStream) -> ComplexMatrix {
    sample_gaussian_matrix(n, n, rng)
}

pub fn sample_gaussian_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> ComplexMatrix {
    // filled row by row so the draw order matches the row-major wire format
    let mut m = zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = rng.complex_gaussian();
        }
    }
    m
}

fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        c64(1.0, 0.0)
    } else {
        z / r
    }
}

/// Haar unitary from the QR factorization of a Ginibre matrix, with the columns
/// of `Q` rotated by the phases of `diag(R)`.
pub fn sample_haar(n: usize, rng: &mut RngStream) -> ComplexMatrix {
    let g = sample_ginibre(n, rng);
    let qr = QR::new(g);
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let phase = unit_phase(r[(j, j)]);
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar unitary held as a product of Householder reflections and a diagonal
/// of phases, `U = H_0 H_1 ... H_{n-2} D`. Sampling costs `O(n^2)` and applying it
/// to `k` columns costs `O(n^2 k)`, which makes large-`n` experiments cheap when
/// only a few columns of `U` (or of its powers) are needed.
#[derive(Clone, Debug)]
pub struct HouseholderUnitary {
    n: usize,
    /// Unit reflection vectors; `reflectors[k]` acts on coordinates `k..n`.
    reflectors: Vec<Vec<Complex64>>,
    phases: Vec<Complex64>,
}

impl HouseholderUnitary {
    pub fn sample(n: usize, rng: &mut RngStream) -> Self {
        let mut reflectors = Vec::with_capacity(n.saturating_sub(1));
        let mut phases = Vec::with_capacity(n);
        for k in 0..n {
            let len = n - k;
            let x: Vec<Complex64> = (0..len).map(|_| rng.complex_gaussian()).collect();
            if len == 1 {
                phases.push(unit_phase(x[0]));
                break;
            }
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let e = unit_phase(x[0]);
            let mut w = x;
            w[0] += e * norm;
            let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut w {
                *z /= wn;
            }
            reflectors.push(w);
            phases.push(-e);
        }
        Self { n, reflectors, phases }
    }
}

impl UnitaryOperator for HouseholderUnitary {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.nrows(), self.n, "operand has the wrong number of rows");
        let mut y = x.clone();
        for (i, &d) in self.phases.iter().enumerate() {
            for j in 0..y.ncols() {
                y[(i, j)] *= d;
            }
        }
        for (k, w) in self.reflectors.iter().enumerate().rev() {
            for j in 0..y.ncols() {
                let mut s = c64(0.0, 0.0);
                for (t, wt) in w.iter().enumerate() {
                    s += wt.conj() * y[(k + t, j)];
                }
                s *= 2.0;
                for (t, wt) in w.iter().enumerate() {
                    y[(k + t, j)] -= wt * s;
                }
            }
        }
        y
    }
}

/// How Haar unitaries are represented inside experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HaarBackend {
    /// Dense QR of a Ginibre matrix.
    #[default]
    Dense,
    /// Implicit product of Householder reflections.
    Householder,
}

/// A Haar unitary produced by either backend.
#[derive(Clone, Debug)]
pub enum SampledUnitary {
    Dense(ComplexMatrix),
    Householder(HouseholderUnitary),
}

impl HaarBackend {
    pub fn sample(self, n: usize, rng: &mut RngStream) -> SampledUnitary {
        match self {
            HaarBackend::Dense => SampledUnitary::Dense(sample_haar(n, rng)),
            HaarBackend::Householder => SampledUnitary::Householder(HouseholderUnitary::sample(n, rng)),
        }
    }
}

impl UnitaryOperator for SampledUnitary {
    fn dim(&self) -> usize {
        match self {
            SampledUnitary::Dense(u) => u.nrows(),
            SampledUnitary::Householder(h) => h.dim(),
        }
    }

    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            SampledUnitary::Dense(u) => u * x,
            SampledUnitary::Householder(h) => h.apply(x),
        }
    }

    fn to_dense(&self) -> ComplexMatrix {
        match self {
            SampledUnitary::Dense(u) => u.clone(),
            SampledUnitary::Householder(h) => h.to_dense(),
        }
    }
}

/// Top-left `p x p` block of `U`, read through `p` applications to basis vectors.
pub fn operator_corner<U: UnitaryOperator + ?Sized>(u: &U, p: usize) -> ComplexMatrix {
    let n = u.dim();
    let cols = u.apply(&identity(n).columns(0, p).into_owned());
    cols.rows(0, p).into_owned()
}

/// Top-left `p x p` corner of a Haar unitary of size `n`, for any `n >= p`.
pub fn haar_corner(n: usize, p: usize, backend: HaarBackend, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if p == 0 || n < p {
        return Err(Error::InvalidArgument(format!("corner of size {p} needs 1 <= p <= n = {n}")));
    }
    Ok(match backend {
        HaarBackend::Dense => sample_haar(n, rng).view((0, 0), (p, p)).into_owned(),
        HaarBackend::Householder => operator_corner(&HouseholderUnitary::sample(n, rng), p),
    })
}

/// Draw from `Cor(n, p)`: the literal corner of `sample_haar(n)`. Requires the
/// density regime `n > 2p`.
pub fn sample_corner(n: usize, p: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    check_density_regime(n, p)?;
    haar_corner(n, p, HaarBackend::Dense, rng)
}

fn check_density_regime(n: usize, p: usize) -> Result<()> {
    if p == 0 || n <= 2 * p {
        return Err(Error::InvalidArgument(format!(
            "corner density needs n > 2p, got n = {n}, p = {p}"
        )));
    }
    Ok(())
}

/// `log K_{p,n}` with `K_{p,n} = pi^{-p^2} prod_{i<p} (n-p+i)! / (n-2p+i)!`.
pub fn log_corner_normalization(n: usize, p: usize) -> Result<f64> {
    check_density_regime(n, p)?;
    let (nf, pf) = (n as f64, p as f64);
    let mut acc = -pf * pf * std::f64::consts::PI.ln();
    for i in 0..p {
        let i = i as f64;
        acc += lgamma(nf - pf + i + 1.0) - lgamma(nf - 2.0 * pf + i + 1.0);
    }
    Ok(acc)
}

/// Log-density of `Cor(n, p)` with respect to Lebesgue measure on `p x p`
/// complex matrices: `log K_{p,n} + (n - 2p) log det(I - vv^*)`. Outside the open
/// ball the density vanishes and `-inf` is returned.
pub fn corner_log_density(v: &ComplexMatrix, n: usize, p: usize) -> Result<f64> {
    if v.shape() != (p, p) {
        return Err(Error::DimensionMismatch(format!(
            "expected a {p}x{p} matrix, got {}x{}",
            v.nrows(),
            v.ncols()
        )));
    }
    let log_k = log_corner_normalization(n, p)?;
    let gap = identity(p) - v * v.adjoint();
    match linalg::log_det_hermitian(&gap) {
        Some(ld) => Ok(log_k + (n - 2 * p) as f64 * ld),
        None => Ok(f64::NEG_INFINITY),
    }
}

/// Spectral weights built from Gaussian vectors: `w_k = h^{-1/2} a_k a_k^* h^{-1/2}`
/// with `h = sum_k a_k a_k^*`. Their joint law matches the weights of the spectral
/// measure of a Haar unitary of size `n`.
pub fn sample_weights(n: usize, p: usize, rng: &mut RngStream) -> Result<Vec<ComplexMatrix>> {
    if p == 0 || n < p {
        return Err(Error::InvalidArgument(format!("need n >= p >= 1, got n = {n}, p = {p}")));
    }
    let a = sample_gaussian_matrix(p, n, rng);
    let h = linalg::hermitian_part(&(&a * a.adjoint()));
    let eig = linalg::eig_hermitian_unchecked(&h);
    let trace: f64 = eig.values.iter().sum();
    if eig.min() < 1e-12 * trace {
        return Err(Error::SingularSample);
    }
    let h_inv_sqrt = eig.map(|l| 1.0 / l.sqrt());
    let b = h_inv_sqrt * a;
    Ok((0..n)
        .map(|k| {
            let col = b.column(k);
            col * col.adjoint()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_defect};

    #[test]
    fn haar_is_unitary() {
        for seed in 0..5 {
            let u = sample_haar(20, &mut RngStream::new(seed, 0));
            assert!(unitarity_defect(&u) <= 1e-12);
        }
    }

    #[test]
    fn householder_is_unitary_and_dense_matches_apply() {
        let h = HouseholderUnitary::sample(17, &mut RngStream::new(3, 0));
        let u = h.to_dense();
        assert!(unitarity_defect(&u) <= 1e-12);
        let x = sample_gaussian_matrix(17, 3, &mut RngStream::new(4, 0));
        assert!(max_abs_diff(&(&u * &x), &h.apply(&x)) < 1e-12);
    }

    #[test]
    fn householder_size_one() {
        let h = HouseholderUnitary::sample(1, &mut RngStream::new(3, 0));
        let u = h.to_dense();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic() {
        let a = sample_haar(6, &mut RngStream::new(11, 2));
        let b = sample_haar(6, &mut RngStream::new(11, 2));
        assert_eq!(a, b);
    }

    #[test]
    fn corner_is_literal_corner() {
        let v = sample_corner(9, 2, &mut RngStream::new(5, 1)).unwrap();
        let u = sample_haar(9, &mut RngStream::new(5, 1));
        assert_eq!(v, u.view((0, 0), (2, 2)).into_owned());
    }

    #[test]
    fn corner_rejects_small_n() {
        assert!(sample_corner(4, 2, &mut RngStream::new(0, 0)).is_err());
        assert!(corner_log_density(&zeros(2, 2), 4, 2).is_err());
    }

    #[test]
    fn scalar_normalization_at_zero() {
        for n in [3usize, 5, 10, 50] {
            let ld = corner_log_density(&zeros(1, 1), n, 1).unwrap();
            assert!((ld - ((n as f64 - 1.0) / std::f64::consts::PI).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn density_outside_ball() {
        let v = ComplexMatrix::from_element(1, 1, c64(1.0, 0.0));
        assert_eq!(corner_log_density(&v, 5, 1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn weights_sum_to_identity_and_rank_one() {
        let w = sample_weights(10, 3, &mut RngStream::new(8, 0)).unwrap();
        let total = w.iter().fold(zeros(3, 3), |acc, x| acc + x);
        assert!(max_abs_diff(&total, &identity(3)) < 1e-10);
        for wk in &w {
            let ev = linalg::hermitian_eigenvalues(wk);
            assert!(ev[1].abs() < 1e-10);
        }
    }

    #[test]
    fn weights_need_enough_vectors() {
        assert!(sample_weights(1, 2, &mut RngStream::new(0, 0)).is_err());
    }
}
