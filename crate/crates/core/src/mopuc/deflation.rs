//! Verblunsky coefficients of `(U, span{e_1..e_p})` by repeated deflation.
//!
//! Step `j` reads `α_j = (ε^* W_j ε)^*` off the current frame `ε`, builds the
//! orthonormal frame `ξ = (W_j ε - ε α_j^*)(ρ^R_j)^{-1}`, and removes the block
//! rotation `V_j` that acts as `Θ(α_j)` on `span{ε, ξ}`: `W_{j+1} = V_j^* W_j`,
//! `ε <- ξ`. The rotations are kept as low-rank updates, so `U` is only ever
//! applied to `p` columns at a time.

use crate::error::{Error, Result};
use crate::linalg::{self, identity, zeros, ComplexMatrix, UnitaryOperator};

use super::ggt::theta;
use super::verblunsky::{defect_floor, defect_r, VerblunskySeq, DEFECT_SINGULAR_TOL};

/// `V = I + B (Θ - I) B^*` stored as `B` and `Θ^* - I`.
struct Rotation {
    basis: ComplexMatrix,
    theta_adj_minus_id: ComplexMatrix,
}

impl Rotation {
    /// `V^* x`.
    fn apply_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x + &self.basis * (&self.theta_adj_minus_id * (self.basis.adjoint() * x))
    }
}

/// One step from `(W, ε)`: `α`, the next frame `ξ`, and the new `W` applied to
/// the next frame.
fn step(we: &ComplexMatrix, eps: &ComplexMatrix, index: usize, need_next: bool) -> Result<(ComplexMatrix, Option<(ComplexMatrix, Rotation)>)> {
    let p = eps.ncols();
    let alpha = (eps.adjoint() * we).adjoint();
    let rho_r = defect_r(&alpha).map_err(|_| Error::Conditioning {
        index,
        detail: "coefficient left the unit ball".into(),
    })?;
    if !need_next {
        return Ok((alpha, None));
    }
    if defect_floor(&rho_r) < DEFECT_SINGULAR_TOL {
        return Err(Error::BoundaryCoefficient { index });
    }
    let xi = (we - eps * alpha.adjoint()) * linalg::inverse(&rho_r)?;
    let mut basis = zeros(eps.nrows(), 2 * p);
    basis.columns_mut(0, p).copy_from(eps);
    basis.columns_mut(p, p).copy_from(&xi);
    let th = theta(&alpha)?;
    let rotation = Rotation { basis, theta_adj_minus_id: th.adjoint() - identity(2 * p) };
    Ok((alpha, Some((xi, rotation))))
}

/// First `count` Verblunsky coefficients of `(U, ε)` for an orthonormal `N x p`
/// frame `ε`. Needs `p (count + 1) <= N`.
pub fn verblunsky_by_deflation_with_frame<U: UnitaryOperator + ?Sized>(
    u: &U,
    frame: &ComplexMatrix,
    count: usize,
) -> Result<VerblunskySeq> {
    let n = u.dim();
    let p = frame.ncols();
    if frame.nrows() != n {
        return Err(Error::DimensionMismatch(format!("frame has {} rows, operator has {n}", frame.nrows())));
    }
    if p == 0 || p * (count + 1) > n {
        return Err(Error::InvalidArgument(format!(
            "deflation of {count} coefficients needs p (count + 1) <= N, got p = {p}, N = {n}"
        )));
    }
    let mut eps = frame.clone();
    let mut rotations: Vec<Rotation> = Vec::with_capacity(count);
    let mut coeffs = Vec::with_capacity(count);
    for j in 0..count {
        let mut we = u.apply(&eps);
        for r in &rotations {
            we = r.apply_adjoint(&we);
        }
        let (alpha, next) = step(&we, &eps, j, j + 1 < count)?;
        coeffs.push(alpha);
        if let Some((xi, rotation)) = next {
            rotations.push(rotation);
            eps = xi;
        }
    }
    VerblunskySeq::new(p, coeffs)
}

/// First `count` Verblunsky coefficients of `(U, span{e_1..e_p})`.
pub fn verblunsky_by_deflation<U: UnitaryOperator + ?Sized>(u: &U, p: usize, count: usize) -> Result<VerblunskySeq> {
    let n = u.dim();
    if p == 0 || p > n {
        return Err(Error::InvalidArgument(format!("need 1 <= p <= N = {n}, got p = {p}")));
    }
    let frame = identity(n).columns(0, p).into_owned();
    verblunsky_by_deflation_with_frame(u, &frame, count)
}

/// A single deflation step on a dense unitary: returns `(α, ξ, W)` with
/// `W = V^* U`.
pub fn deflate_once(u: &ComplexMatrix, frame: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let we = u * frame;
    let (alpha, next) = step(&we, frame, 0, true)?;
    let (xi, rotation) = next.expect("next frame requested");
    let w = rotation.apply_adjoint(u);
    Ok((alpha, xi, w))
}
