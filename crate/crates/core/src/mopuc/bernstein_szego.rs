use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{grid_nodes, GridDensityMeasure};

use super::polynomial::OrthoPolyBasis;
use super::verblunsky::{defect_floor, VerblunskySeq, DEFECT_SINGULAR_TOL};

/// Absolutely continuous measure whose Verblunsky coefficients are
/// `α_0, .., α_{n-1}, 0, 0, ..`, sampled on an `M`-point grid.
///
/// The density is `W = (φ^R_n φ^R_n^*)^{-1}` on the circle, with the normalized
/// right polynomial `φ^R_n` evaluated by Horner's scheme.
pub fn bernstein_szego_density(seq: &VerblunskySeq, grid_size: usize) -> Result<GridDensityMeasure> {
    if let Some(index) = (0..seq.len()).find(|&j| defect_floor(seq.rho_r(j)) < DEFECT_SINGULAR_TOL) {
        return Err(Error::BoundaryCoefficient { index });
    }
    if grid_size == 0 || !grid_size.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("grid size must be a power of two, got {grid_size}")));
    }
    let p = seq.dim();
    if seq.is_empty() {
        return GridDensityMeasure::lebesgue(p, grid_size);
    }
    let basis = OrthoPolyBasis::from_verblunsky(seq)?;
    let phi = basis.normalized_r(seq.len());
    let densities = grid_nodes(grid_size)
        .into_par_iter()
        .map(|theta| {
            let v = phi.eval(Complex64::from_polar(1.0, theta));
            let v_inv = linalg::inverse(&v)?;
            Ok(linalg::hermitian_part(&(v_inv.adjoint() * v_inv)))
        })
        .collect::<Result<Vec<_>>>()?;
    GridDensityMeasure::new(p, densities, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, identity, max_abs_diff, ComplexMatrix};
    use crate::measures::MatrixMeasure;
    use crate::mopuc::extraction::verblunsky_of_measure;

    #[test]
    fn empty_sequence_is_lebesgue() {
        let mu = bernstein_szego_density(&VerblunskySeq::zeros(2, 0), 16).unwrap();
        assert!(mu.densities().iter().all(|w| max_abs_diff(w, &identity(2)) < 1e-15));
    }

    #[test]
    fn scalar_roundtrip() {
        let a = ComplexMatrix::from_element(1, 1, c64(0.4, 0.0));
        let mu = bernstein_szego_density(&VerblunskySeq::new(1, vec![a.clone()]).unwrap(), 1024).unwrap();
        assert!(max_abs_diff(&mu.moment(0), &identity(1)) < 1e-12);
        let back = verblunsky_of_measure(&mu, 3).unwrap();
        assert!(max_abs_diff(back.alpha(0), &a) < 1e-10);
        assert!(linalg::max_abs(back.alpha(1)) < 1e-10);
        assert!(linalg::max_abs(back.alpha(2)) < 1e-10);
    }

    #[test]
    fn rejects_boundary() {
        let a = ComplexMatrix::from_element(1, 1, c64(1.0, 0.0));
        let err = bernstein_szego_density(&VerblunskySeq::new(1, vec![a]).unwrap(), 64).unwrap_err();
        assert_eq!(err, Error::BoundaryCoefficient { index: 0 });
    }
}
