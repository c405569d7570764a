use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs_diff, zeros, ComplexMatrix};

/// Slack allowed on `I - αα^* >= 0` before a coefficient counts as outside the ball.
pub const BALL_TOL: f64 = 1e-9;
/// Defects with a singular value below this are treated as singular.
pub const DEFECT_SINGULAR_TOL: f64 = 1e-10;

fn clamped_sqrt(gap: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let eig = linalg::eig_hermitian_unchecked(gap);
    (eig.map(|l| l.max(0.0).sqrt()), eig.min())
}

/// `ρ^R = (I - αα^*)^{1/2}`. Fails when `α` is outside the closed unit ball.
pub fn defect_r(alpha: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = linalg::ensure_square(alpha)?;
    let (rho, min) = clamped_sqrt(&linalg::hermitian_part(&(identity(p) - alpha * alpha.adjoint())));
    if min < -BALL_TOL {
        return Err(Error::OutsideBall { index: 0 });
    }
    Ok(rho)
}

/// `ρ^L = (I - α^*α)^{1/2}`.
pub fn defect_l(alpha: &ComplexMatrix) -> Result<ComplexMatrix> {
    defect_r(&alpha.adjoint())
}

/// Smallest singular value of a Hermitian PSD defect matrix.
pub fn defect_floor(rho: &ComplexMatrix) -> f64 {
    linalg::hermitian_eigenvalues(rho).first().copied().unwrap_or(1.0).max(0.0)
}

/// Verblunsky coefficients `α_0..α_{n-1}` with their defect matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct VerblunskySeq {
    p: usize,
    coeffs: Vec<ComplexMatrix>,
    rho_r: Vec<ComplexMatrix>,
    rho_l: Vec<ComplexMatrix>,
}

impl VerblunskySeq {
    pub fn new(p: usize, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("dimension p must be positive".into()));
        }
        let mut rho_r = Vec::with_capacity(coeffs.len());
        let mut rho_l = Vec::with_capacity(coeffs.len());
        for (index, a) in coeffs.iter().enumerate() {
            if a.shape() != (p, p) {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient {index} is {}x{}, expected {p}x{p}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            rho_r.push(defect_r(a).map_err(|_| Error::OutsideBall { index })?);
            rho_l.push(defect_l(a).map_err(|_| Error::OutsideBall { index })?);
        }
        Ok(Self { p, coeffs, rho_r, rho_l })
    }

    /// `n` zero coefficients (the sequence of `λ_p`).
    pub fn zeros(p: usize, n: usize) -> Self {
        Self::new(p, vec![zeros(p, p); n]).expect("zero is inside the ball")
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ComplexMatrix> {
        self.coeffs
    }

    pub fn alpha(&self, j: usize) -> &ComplexMatrix {
        &self.coeffs[j]
    }

    pub fn rho_r(&self, j: usize) -> &ComplexMatrix {
        &self.rho_r[j]
    }

    pub fn rho_l(&self, j: usize) -> &ComplexMatrix {
        &self.rho_l[j]
    }

    /// `α_j`, or zero past the end of the sequence.
    pub fn alpha_padded(&self, j: usize) -> ComplexMatrix {
        self.coeffs.get(j).cloned().unwrap_or_else(|| zeros(self.p, self.p))
    }

    pub fn rho_r_padded(&self, j: usize) -> ComplexMatrix {
        self.rho_r.get(j).cloned().unwrap_or_else(|| identity(self.p))
    }

    pub fn rho_l_padded(&self, j: usize) -> ComplexMatrix {
        self.rho_l.get(j).cloned().unwrap_or_else(|| identity(self.p))
    }

    /// Sequence with the first `k` coefficients dropped.
    pub fn tail(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self {
            p: self.p,
            coeffs: self.coeffs[k..].to_vec(),
            rho_r: self.rho_r[k..].to_vec(),
            rho_l: self.rho_l[k..].to_vec(),
        }
    }

    /// `max_j |α_j ρ^L_j - ρ^R_j α_j|`.
    pub fn intertwining_residual(&self) -> f64 {
        (0..self.len())
            .map(|j| max_abs_diff(&(&self.coeffs[j] * &self.rho_l[j]), &(&self.rho_r[j] * &self.coeffs[j])))
            .fold(0.0, f64::max)
    }

    /// First index whose defect is singular, if any.
    pub fn first_boundary(&self) -> Option<usize> {
        (0..self.len()).find(|&j| defect_floor(&self.rho_r[j]) < DEFECT_SINGULAR_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn rejects_outside_ball() {
        let a = ComplexMatrix::from_element(1, 1, c64(1.5, 0.0));
        let err = VerblunskySeq::new(1, vec![zeros(1, 1), a]).unwrap_err();
        assert_eq!(err, Error::OutsideBall { index: 1 });
    }

    #[test]
    fn boundary_is_allowed() {
        let a = ComplexMatrix::from_element(1, 1, c64(0.0, 1.0));
        let s = VerblunskySeq::new(1, vec![a]).unwrap();
        assert_eq!(s.first_boundary(), Some(0));
        assert_eq!(s.rho_r(0)[(0, 0)], c64(0.0, 0.0));
    }

    #[test]
    fn scalar_defects() {
        let a = ComplexMatrix::from_element(1, 1, c64(0.6, 0.0));
        let s = VerblunskySeq::new(1, vec![a]).unwrap();
        assert!((s.rho_r(0)[(0, 0)].re - 0.8).abs() < 1e-15);
        assert!((s.rho_l(0)[(0, 0)].re - 0.8).abs() < 1e-15);
    }
}
