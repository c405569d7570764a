use crate::error::{Error, Result};
use crate::linalg::{self, identity, ComplexMatrix};

/// Eigenvalues of `I - GG^*` below this are rounding noise: their square roots
/// would be about `1e-8` and dominate the pseudo-inverse.
pub const GAP_CUTOFF: f64 = 1e-12;

/// Pseudo-inverse of `gap^{1/2}` with small eigenvalues of `gap` treated as zero,
/// and whether any were.
fn defect_pinv(gap: &ComplexMatrix) -> (ComplexMatrix, bool) {
    let eig = linalg::eig_hermitian_unchecked(&linalg::hermitian_part(gap));
    let pinv = eig.map(|l| if l > GAP_CUTOFF { 1.0 / l.sqrt() } else { 0.0 });
    (pinv, eig.min() <= GAP_CUTOFF)
}

/// Second Verblunsky coefficient read directly off a unitary.
#[derive(Clone, Debug)]
pub struct ArlinskiiAlpha1 {
    /// From the off-diagonal blocks: `U = [[G, C], [B, *]]`.
    pub from_blocks: ComplexMatrix,
    /// Same formula with `CB` replaced by `m_2 - m_1^2`.
    pub from_moments: ComplexMatrix,
    /// `CB` and `m_2 - m_1^2` as computed, for inspection.
    pub cb: ComplexMatrix,
    pub moment_form: ComplexMatrix,
    /// Whether the first defect matrix is singular; pseudo-inverses are used
    /// either way.
    pub rho0_singular: bool,
}

/// `α_1` of `(U, span{e_1..e_p})` in closed form.
///
/// With `G` the `p x p` corner (so `α_0 = G^*`),
/// `α_1^* = (I - GG^*)^{+1/2} C B (I - G^*G)^{+1/2}`, where `^{+1/2}` is the
/// pseudo-inverse of the square root.
pub fn arlinskii_alpha1(u: &ComplexMatrix, p: usize) -> Result<ArlinskiiAlpha1> {
    let n = linalg::ensure_square(u)?;
    if p == 0 || n < p + 1 {
        return Err(Error::InvalidArgument(format!("need N >= p + 1, got N = {n}, p = {p}")));
    }
    let g = u.view((0, 0), (p, p)).into_owned();
    let c = u.view((0, p), (p, n - p)).into_owned();
    let b = u.view((p, 0), (n - p, p)).into_owned();
    let cb = &c * &b;
    let m2 = u.rows(0, p) * u.columns(0, p);
    let moment_form = m2 - &g * &g;

    let (left_pinv, left_singular) = defect_pinv(&(identity(p) - &g * g.adjoint()));
    let (right_pinv, _) = defect_pinv(&(identity(p) - g.adjoint() * &g));
    let form = |x: &ComplexMatrix| (&left_pinv * x * &right_pinv).adjoint();
    Ok(ArlinskiiAlpha1 {
        from_blocks: form(&cb),
        from_moments: form(&moment_form),
        cb,
        moment_form,
        rho0_singular: left_singular,
    })
}
