use crate::error::{Error, Result};
use crate::linalg::{self, identity, zeros, ComplexMatrix};

use super::verblunsky::{defect_l, defect_r, VerblunskySeq};

/// `Θ(α) = [[α^*, ρ^L], [ρ^R, -α]]`, unitary for every `α` in the closed ball.
pub fn theta(alpha: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = linalg::ensure_square(alpha)?;
    let rho_r = defect_r(alpha)?;
    let rho_l = defect_l(alpha)?;
    let mut t = zeros(2 * p, 2 * p);
    linalg::set_block(&mut t, 0, 0, &alpha.adjoint());
    linalg::set_block(&mut t, 0, 1, &rho_l);
    linalg::set_block(&mut t, 1, 0, &rho_r);
    linalg::set_block(&mut t, 1, 1, &(-alpha));
    Ok(t)
}

/// `M x M` block GGT matrix. Block `(k, ℓ)` with `k <= ℓ` is
/// `-α_{k-1} ρ^L_k ... ρ^L_{ℓ-1} α_ℓ^*` (with `α_{-1} = -I`), block `(ℓ+1, ℓ)` is
/// `ρ^R_ℓ`, and everything further below vanishes. Coefficients past the end of
/// `seq` are taken to be zero.
pub fn ggt(seq: &VerblunskySeq, blocks: usize) -> ComplexMatrix {
    let p = seq.dim();
    let mut g = zeros(blocks * p, blocks * p);
    for k in 0..blocks {
        let left = if k == 0 { -identity(p) } else { seq.alpha_padded(k - 1) };
        // running product -α_{k-1} ρ^L_k ... ρ^L_{ℓ-1}
        let mut prefix = -left;
        for l in k..blocks {
            linalg::set_block(&mut g, k, l, &(&prefix * seq.alpha_padded(l).adjoint()));
            prefix *= seq.rho_l_padded(l);
        }
        if k + 1 < blocks {
            linalg::set_block(&mut g, k + 1, k, &seq.rho_r_padded(k));
        }
    }
    g
}

/// `max |G(α_0..) - (Θ(α_0) ⊕ I)(I_p ⊕ G(α_1..))|` for `M`-block truncations.
pub fn factorization_residual(seq: &VerblunskySeq, blocks: usize) -> Result<f64> {
    if blocks < 2 {
        return Err(Error::InvalidArgument("factorization needs at least two blocks".into()));
    }
    let p = seq.dim();
    let size = blocks * p;
    let mut left = identity(size);
    left.view_mut((0, 0), (2 * p, 2 * p)).copy_from(&theta(&seq.alpha_padded(0))?);
    let mut right = identity(size);
    right
        .view_mut((p, p), (size - p, size - p))
        .copy_from(&ggt(&seq.tail(1), blocks - 1));
    Ok(linalg::max_abs_diff(&ggt(seq, blocks), &(left * right)))
}
