use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, identity, zeros, ComplexMatrix};

use super::verblunsky::{defect_floor, VerblunskySeq, DEFECT_SINGULAR_TOL};

/// Polynomial `Σ_k z^k C_k` with `p x p` matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<ComplexMatrix>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        Self { coeffs }
    }

    pub fn constant(c: ComplexMatrix) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Formal degree (number of coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ComplexMatrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| zeros(self.dim(), self.dim()))
    }

    pub fn leading(&self) -> &ComplexMatrix {
        self.coeffs.last().unwrap()
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: Complex64) -> ComplexMatrix {
        let mut acc = self.leading().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    /// `P^*(z) = z^n P(1/z̄)^*` at the formal degree: reverse and adjoint.
    pub fn reversed(&self) -> Self {
        Self { coeffs: self.coeffs.iter().rev().map(|c| c.adjoint()).collect() }
    }

    /// `z P(z)`.
    pub fn shift(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(zeros(self.dim(), self.dim()));
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn mul_right(&self, a: &ComplexMatrix) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn mul_left(&self, a: &ComplexMatrix) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| a * c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self { coeffs: (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect() }
    }

    /// Right inner product `⟨⟨F, G⟩⟩_R = ∫ F^* dμ G` written through moments,
    /// `⟨⟨z^i A, z^j B⟩⟩_R = A^* m_{j-i} B`.
    pub fn inner_r(&self, other: &Self, moment: impl Fn(i64) -> ComplexMatrix) -> ComplexMatrix {
        let p = self.dim();
        let mut acc = zeros(p, p);
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                acc += a.adjoint() * moment(j as i64 - i as i64) * b;
            }
        }
        acc
    }
}

/// Monic and normalized orthogonal polynomials generated by the Szegő recursion
/// from a Verblunsky sequence.
///
/// Conventions: `φ^R_n = Φ^R_n κ^R_n`, `φ^L_n = κ^L_n Φ^L_n`, with
/// `κ^R_{n+1} = κ^R_n (ρ^R_n)^{-1}` and `κ^L_{n+1} = (ρ^L_n)^{-1} κ^L_n`. The monic
/// recursion is
///
/// ```text
/// Φ^R_{n+1} = z Φ^R_n - Φ^{L,*}_n (κ^L_n)^* α_n^* (κ^R_n)^{-1}
/// Φ^L_{n+1} = z Φ^L_n - (κ^L_n)^{-1} α_n^* (κ^R_n)^* Φ^{R,*}_n
/// ```
///
/// so that `α_n^* = ((κ^L_n)^*)^{-1} (-Φ^R_{n+1}(0)) κ^R_n`.
#[derive(Clone, Debug)]
pub struct OrthoPolyBasis {
    pub p: usize,
    pub monic_r: Vec<MatrixPolynomial>,
    pub monic_l: Vec<MatrixPolynomial>,
    pub kappa_r: Vec<ComplexMatrix>,
    pub kappa_l: Vec<ComplexMatrix>,
}

impl OrthoPolyBasis {
    /// Polynomials of degree `0..=seq.len()`. Every defect must be invertible
    /// except possibly the last one.
    pub fn from_verblunsky(seq: &VerblunskySeq) -> Result<Self> {
        let p = seq.dim();
        let n = seq.len();
        let mut monic_r = vec![MatrixPolynomial::constant(identity(p))];
        let mut monic_l = vec![MatrixPolynomial::constant(identity(p))];
        let mut kappa_r = vec![identity(p)];
        let mut kappa_l = vec![identity(p)];
        for k in 0..n {
            let a_adj = seq.alpha(k).adjoint();
            let (kr, kl) = (&kappa_r[k], &kappa_l[k]);
            let kr_inv = linalg::inverse(kr)?;
            let kl_inv = linalg::inverse(kl)?;
            let phi_r = &monic_r[k];
            let phi_l = &monic_l[k];
            let next_r = phi_r.shift().sub(&phi_l.reversed().mul_right(&(kl.adjoint() * &a_adj * &kr_inv)));
            let next_l = phi_l.shift().sub(&phi_r.reversed().mul_left(&(&kl_inv * &a_adj * kr.adjoint())));
            monic_r.push(next_r);
            monic_l.push(next_l);
            if k + 1 < n && defect_floor(seq.rho_r(k)) < DEFECT_SINGULAR_TOL {
                return Err(Error::BoundaryCoefficient { index: k });
            }
            let rr_inv = linalg::inverse(seq.rho_r(k)).unwrap_or_else(|_| zeros(p, p));
            let rl_inv = linalg::inverse(seq.rho_l(k)).unwrap_or_else(|_| zeros(p, p));
            kappa_r.push(kr * rr_inv);
            kappa_l.push(rl_inv * kl);
        }
        Ok(Self { p, monic_r, monic_l, kappa_r, kappa_l })
    }

    pub fn degree(&self) -> usize {
        self.monic_r.len() - 1
    }

    /// `φ^R_n = Φ^R_n κ^R_n`.
    pub fn normalized_r(&self, n: usize) -> MatrixPolynomial {
        self.monic_r[n].mul_right(&self.kappa_r[n])
    }

    /// `φ^L_n = κ^L_n Φ^L_n`.
    pub fn normalized_l(&self, n: usize) -> MatrixPolynomial {
        self.monic_l[n].mul_left(&self.kappa_l[n])
    }
}
