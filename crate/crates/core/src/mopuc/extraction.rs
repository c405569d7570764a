//! Verblunsky coefficients from matrix moments by block Gram–Schmidt.

use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs_diff, zeros, ComplexMatrix};
use crate::measures::MatrixMeasure;

use super::polynomial::MatrixPolynomial;
use super::verblunsky::{defect_floor, defect_l, defect_r, VerblunskySeq, DEFECT_SINGULAR_TOL};

/// Relative pivot below which a block Gram matrix counts as singular.
pub const GRAM_PIVOT_TOL: f64 = 1e-12;

fn moment_at(moments: &[ComplexMatrix], l: i64) -> ComplexMatrix {
    if l >= 0 {
        moments[l as usize].clone()
    } else {
        moments[(-l) as usize].adjoint()
    }
}

fn validate(moments: &[ComplexMatrix]) -> Result<usize> {
    let first = moments
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty moment sequence".into()))?;
    let p = linalg::ensure_square(first)?;
    if moments.iter().any(|m| m.shape() != (p, p)) {
        return Err(Error::DimensionMismatch("moments must all be p x p".into()));
    }
    let deviation = max_abs_diff(first, &identity(p));
    if deviation > 1e-9 {
        return Err(Error::BadNormalization { deviation });
    }
    Ok(p)
}

/// Monic right orthogonal polynomial `Φ^R_d` determined by `m_0..m_d`:
/// `Σ_{k<d} m_{k-j} C_k = -m_{d-j}` for `j < d`.
pub fn monic_right_from_moments(moments: &[ComplexMatrix], d: usize) -> Result<MatrixPolynomial> {
    let p = validate(moments)?;
    if d >= moments.len() {
        return Err(Error::InvalidArgument(format!("degree {d} needs moments up to m_{d}")));
    }
    if d == 0 {
        return Ok(MatrixPolynomial::constant(identity(p)));
    }
    let mut gram = zeros(d * p, d * p);
    let mut rhs = zeros(d * p, p);
    for j in 0..d {
        for k in 0..d {
            linalg::set_block(&mut gram, j, k, &moment_at(moments, k as i64 - j as i64));
        }
        linalg::set_block(&mut rhs, j, 0, &(-moment_at(moments, (d - j) as i64)));
    }
    let x = linalg::solve_hpd(&gram, &rhs, GRAM_PIVOT_TOL).ok_or(Error::SupportExhausted { degree: d })?;
    let mut coeffs: Vec<ComplexMatrix> = (0..d).map(|k| linalg::block(&x, k, 0, p)).collect();
    coeffs.push(identity(p));
    Ok(MatrixPolynomial::new(coeffs))
}

/// First `count` Verblunsky coefficients of the measure with moments `m_0..m_J`
/// (`count <= J`).
///
/// Each `Φ^R_{n+1}` is obtained by solving its Hermitian positive definite
/// block Gram system; the coefficient is read off the constant term,
/// `α_n^* = ((κ^L_n)^*)^{-1} (-Φ^R_{n+1}(0)) κ^R_n`. With this convention
/// `α_0^* = m_1`.
pub fn verblunsky_from_moments(moments: &[ComplexMatrix], count: usize) -> Result<VerblunskySeq> {
    let p = validate(moments)?;
    if count >= moments.len() {
        return Err(Error::InvalidArgument(format!(
            "{count} coefficients need moments up to m_{count}, got m_0..m_{}",
            moments.len() - 1
        )));
    }
    let mut coeffs = Vec::with_capacity(count);
    let mut kappa_r = identity(p);
    let mut kappa_l = identity(p);
    for n in 0..count {
        let phi = monic_right_from_moments(&moments[..=n + 1], n + 1)?;
        let beta = -phi.coeff(0);
        let kl_adj_inv = linalg::inverse(&kappa_l.adjoint()).map_err(|_| Error::Conditioning {
            index: n,
            detail: "left normalizer is singular".into(),
        })?;
        let alpha = (kl_adj_inv * beta * &kappa_r).adjoint();
        let rho_r = defect_r(&alpha).map_err(|_| Error::Conditioning {
            index: n,
            detail: "extracted coefficient is outside the unit ball".into(),
        })?;
        coeffs.push(alpha);
        if n + 1 < count {
            if defect_floor(&rho_r) < DEFECT_SINGULAR_TOL {
                return Err(Error::SupportExhausted { degree: n + 2 });
            }
            let rho_l = defect_l(&coeffs[n])?;
            kappa_r = &kappa_r * linalg::inverse(&rho_r)?;
            kappa_l = linalg::inverse(&rho_l)? * &kappa_l;
        }
    }
    VerblunskySeq::new(p, coeffs)
}

/// [`verblunsky_from_moments`] applied to the moments of a measure.
pub fn verblunsky_of_measure<M: MatrixMeasure + ?Sized>(measure: &M, count: usize) -> Result<VerblunskySeq> {
    verblunsky_from_moments(&measure.moments(count), count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn scalar(re: f64, im: f64) -> ComplexMatrix {
        ComplexMatrix::from_element(1, 1, c64(re, im))
    }

    #[test]
    fn lebesgue_gives_zero_coefficients() {
        let moments = vec![identity(2), zeros(2, 2), zeros(2, 2), zeros(2, 2)];
        let seq = verblunsky_from_moments(&moments, 3).unwrap();
        assert!(seq.coeffs().iter().all(|a| linalg::max_abs(a) < 1e-15));
    }

    #[test]
    fn point_mass_at_one() {
        let moments = vec![scalar(1.0, 0.0), scalar(1.0, 0.0)];
        let seq = verblunsky_from_moments(&moments, 1).unwrap();
        assert!((seq.alpha(0)[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn first_coefficient_is_adjoint_of_first_moment() {
        let m1 = ComplexMatrix::from_row_slice(2, 2, &[c64(0.1, 0.2), c64(0.0, -0.1), c64(0.3, 0.0), c64(-0.2, 0.1)]);
        let seq = verblunsky_from_moments(&[identity(2), m1.clone()], 1).unwrap();
        assert!(max_abs_diff(seq.alpha(0), &m1.adjoint()) < 1e-15);
    }

    #[test]
    fn two_atoms_exhaust_support() {
        let moments = vec![scalar(1.0, 0.0), scalar(0.0, 0.0), scalar(1.0, 0.0), scalar(0.0, 0.0)];
        let seq = verblunsky_from_moments(&moments, 2).unwrap();
        assert!(seq.alpha(0)[(0, 0)].norm() < 1e-15);
        assert!((seq.alpha(1)[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(verblunsky_from_moments(&moments, 3).unwrap_err(), Error::SupportExhausted { degree: 3 });
    }

    #[test]
    fn rejects_unnormalized_and_short_input() {
        assert!(matches!(
            verblunsky_from_moments(&[scalar(2.0, 0.0), scalar(0.0, 0.0)], 1),
            Err(Error::BadNormalization { .. })
        ));
        assert!(verblunsky_from_moments(&[scalar(1.0, 0.0)], 1).is_err());
    }
}
