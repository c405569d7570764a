//! Matrix-valued measures on the unit circle and their moments.
//!
//! The reference measure is normalized arclength `dθ/2π`, so the Lebesgue
//! measure `λ_p` has the constant density `I_p`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, identity, max_abs_diff, zeros, ComplexMatrix};

/// Normalization tolerance for atomic probability measures.
pub const ATOMIC_NORMALIZATION_TOL: f64 = 1e-9;
/// Normalization tolerance for gridded measures (quadrature level).
pub const GRID_NORMALIZATION_TOL: f64 = 1e-6;
/// Eigenvalues closer than this are merged into one atom.
pub const ATOM_MERGE_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Anything with matrix moments `m_ℓ = ∫ e^{iℓθ} dμ(θ)`.
pub trait MatrixMeasure {
    fn dim(&self) -> usize;

    fn moment(&self, l: i64) -> ComplexMatrix;

    /// `m_0, ..., m_j`.
    fn moments(&self, j: usize) -> Vec<ComplexMatrix> {
        (0..=j as i64).map(|l| self.moment(l)).collect()
    }
}

fn check_psd_weight(w: &ComplexMatrix, p: usize, what: &str) -> Result<()> {
    if w.shape() != (p, p) {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be {p}x{p}, got {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    let eig = linalg::eig_hermitian(w)?;
    if eig.min() < -linalg::PSD_CLAMP {
        return Err(Error::NotPositive { min_eigenvalue: eig.min() });
    }
    Ok(())
}

/// Finitely many atoms on the circle with PSD matrix masses, not necessarily
/// normalized. Used on its own as the singular part of a gridded measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixAtoms {
    p: usize,
    atoms: Vec<f64>,
    weights: Vec<ComplexMatrix>,
}

impl MatrixAtoms {
    pub fn new(p: usize, atoms: Vec<f64>, weights: Vec<ComplexMatrix>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("dimension p must be positive".into()));
        }
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        for (k, &theta) in atoms.iter().enumerate() {
            if !(theta > -PI && theta <= PI) {
                return Err(Error::InvalidArgument(format!("atom {k} = {theta} is not in (-pi, pi]")));
            }
            if k > 0 && theta <= atoms[k - 1] {
                return Err(Error::InvalidArgument("atoms must be strictly increasing".into()));
            }
        }
        for w in &weights {
            check_psd_weight(w, p, "weight")?;
        }
        Ok(Self { p, atoms, weights })
    }

    pub fn empty(p: usize) -> Self {
        Self { p, atoms: vec![], weights: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[ComplexMatrix] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> ComplexMatrix {
        self.weights.iter().fold(zeros(self.p, self.p), |acc, w| acc + w)
    }

    pub fn moment(&self, l: i64) -> ComplexMatrix {
        if l < 0 {
            return self.moment(-l).adjoint();
        }
        let mut m = zeros(self.p, self.p);
        for (&theta, w) in self.atoms.iter().zip(&self.weights) {
            m += w * Complex64::from_polar(1.0, l as f64 * theta);
        }
        m
    }
}

/// Matrix probability measure with finitely many atoms: `Σ_k w_k δ_{θ_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMatrixMeasure {
    inner: MatrixAtoms,
}

impl AtomicMatrixMeasure {
    pub fn new(p: usize, atoms: Vec<f64>, weights: Vec<ComplexMatrix>) -> Result<Self> {
        let inner = MatrixAtoms::new(p, atoms, weights)?;
        let deviation = max_abs_diff(&inner.total_mass(), &identity(p));
        if deviation > ATOMIC_NORMALIZATION_TOL {
            return Err(Error::BadNormalization { deviation });
        }
        Ok(Self { inner })
    }

    pub fn atoms(&self) -> &[f64] {
        self.inner.atoms()
    }

    pub fn weights(&self) -> &[ComplexMatrix] {
        self.inner.weights()
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn as_atoms(&self) -> &MatrixAtoms {
        &self.inner
    }
}

impl MatrixMeasure for AtomicMatrixMeasure {
    fn dim(&self) -> usize {
        self.inner.p
    }

    fn moment(&self, l: i64) -> ComplexMatrix {
        self.inner.moment(l)
    }
}

/// Grid nodes `θ_j = -π + 2πj/M`.
pub fn grid_nodes(m: usize) -> Vec<f64> {
    (0..m).map(|j| -PI + 2.0 * PI * j as f64 / m as f64).collect()
}

/// Absolutely continuous part sampled on a uniform grid, plus an optional
/// singular part.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensityMeasure {
    p: usize,
    densities: Vec<ComplexMatrix>,
    singular: Option<MatrixAtoms>,
}

impl GridDensityMeasure {
    pub fn new(p: usize, densities: Vec<ComplexMatrix>, singular: Option<MatrixAtoms>) -> Result<Self> {
        let m = densities.len();
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("grid size must be a power of two, got {m}")));
        }
        if p == 0 {
            return Err(Error::InvalidArgument("dimension p must be positive".into()));
        }
        for w in &densities {
            check_psd_weight(w, p, "density")?;
        }
        if let Some(s) = &singular {
            if s.dim() != p {
                return Err(Error::DimensionMismatch("singular part has the wrong dimension".into()));
            }
        }
        let measure = Self { p, densities, singular };
        let deviation = max_abs_diff(&measure.moment(0), &identity(p));
        if deviation > GRID_NORMALIZATION_TOL {
            return Err(Error::BadNormalization { deviation });
        }
        Ok(measure)
    }

    /// Density `f(θ_j)` at every grid node, no singular part.
    pub fn from_fn(p: usize, grid_size: usize, f: impl Fn(f64) -> ComplexMatrix) -> Result<Self> {
        let densities = grid_nodes(grid_size).into_iter().map(f).collect();
        Self::new(p, densities, None)
    }

    /// The Lebesgue measure `λ_p` (density `I_p`).
    pub fn lebesgue(p: usize, grid_size: usize) -> Result<Self> {
        Self::from_fn(p, grid_size, |_| identity(p))
    }

    pub fn grid_size(&self) -> usize {
        self.densities.len()
    }

    pub fn densities(&self) -> &[ComplexMatrix] {
        &self.densities
    }

    pub fn singular(&self) -> Option<&MatrixAtoms> {
        self.singular.as_ref()
    }

    pub fn nodes(&self) -> Vec<f64> {
        grid_nodes(self.grid_size())
    }

    /// Total mass of the singular part (zero if absent).
    pub fn singular_mass(&self) -> ComplexMatrix {
        self.singular.as_ref().map_or_else(|| zeros(self.p, self.p), |s| s.total_mass())
    }
}

impl MatrixMeasure for GridDensityMeasure {
    fn dim(&self) -> usize {
        self.p
    }

    fn moment(&self, l: i64) -> ComplexMatrix {
        if l < 0 {
            return self.moment(-l).adjoint();
        }
        let m = self.grid_size();
        let mut acc = zeros(self.p, self.p);
        for (theta, w) in grid_nodes(m).into_iter().zip(&self.densities) {
            acc += w * Complex64::from_polar(1.0, l as f64 * theta);
        }
        acc /= Complex64::new(m as f64, 0.0);
        if let Some(s) = &self.singular {
            acc += s.moment(l);
        }
        acc
    }
}

/// Spectral measure of `U` relative to the first `p` coordinates: atoms at the
/// eigenvalue angles, weights `(P v_k)(P v_k)^*`. Eigenvalues closer than
/// [`ATOM_MERGE_TOL`] (also across `±π`) form one atom whose weight sums the
/// outer products, so the result does not depend on the eigenbasis chosen.
pub fn spectral_measure(u: &ComplexMatrix, p: usize) -> Result<AtomicMatrixMeasure> {
    let n = linalg::ensure_square(u)?;
    if p == 0 || p > n {
        return Err(Error::InvalidArgument(format!("need 1 <= p <= N = {n}, got p = {p}")));
    }
    let eig = linalg::eig_unitary(u)?;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(g) if eig.angles[k] - eig.angles[*g.last().unwrap()] <= ATOM_MERGE_TOL => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    if groups.len() > 1 {
        let first = eig.angles[groups[0][0]];
        let last = eig.angles[*groups.last().unwrap().last().unwrap()];
        if first + 2.0 * PI - last <= ATOM_MERGE_TOL {
            let head = groups.remove(0);
            groups.last_mut().unwrap().extend(head);
        }
    }

    let mut atoms = Vec::with_capacity(groups.len());
    let mut weights = Vec::with_capacity(groups.len());
    for g in &groups {
        let anchor = eig.angles[g[0]];
        // unwrap members that crossed ±π so the mean stays near the anchor
        let mean = g
            .iter()
            .map(|&k| {
                let t = eig.angles[k];
                if t - anchor < -PI {
                    t + 2.0 * PI
                } else {
                    t
                }
            })
            .sum::<f64>()
            / g.len() as f64;
        atoms.push(linalg::normalize_angle(mean));
        let mut w = zeros(p, p);
        for &k in g {
            let pv = eig.vectors.view((0, k), (p, 1));
            w += pv * pv.adjoint();
        }
        weights.push(linalg::hermitian_part(&w));
    }
    // merging may have moved a wrapped atom; restore increasing order
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| atoms[a].total_cmp(&atoms[b]));
    let atoms = order.iter().map(|&k| atoms[k]).collect();
    let weights = order.iter().map(|&k| weights[k].clone()).collect();
    AtomicMatrixMeasure::new(p, atoms, weights)
}

/// Location of a moment sequence relative to the moment space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentPosition {
    Interior,
    Boundary,
    Outside,
}

/// Block Toeplitz matrix with block `(i, j) = m_{i-j}`, `m_{-k} = m_k^*`.
pub fn block_toeplitz(moments: &[ComplexMatrix]) -> ComplexMatrix {
    let j = moments.len();
    let p = moments[0].nrows();
    let mut t = zeros(j * p, j * p);
    for r in 0..j {
        for c in 0..j {
            let block = if r >= c { moments[r - c].clone() } else { moments[c - r].adjoint() };
            linalg::set_block(&mut t, r, c, &block);
        }
    }
    t
}

/// Classifies `m_0..m_J` by the smallest eigenvalue of the block Toeplitz matrix,
/// with tolerance `1e-9 (J+1) p`.
pub fn moment_space_position(moments: &[ComplexMatrix]) -> Result<MomentPosition> {
    let (position, _) = moment_space_position_detail(moments)?;
    Ok(position)
}

/// As [`moment_space_position`], also returning the smallest eigenvalue.
pub fn moment_space_position_detail(moments: &[ComplexMatrix]) -> Result<(MomentPosition, f64)> {
    let first = moments
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty moment sequence".into()))?;
    let p = linalg::ensure_square(first)?;
    if moments.iter().any(|m| m.shape() != (p, p)) {
        return Err(Error::DimensionMismatch("moments must all be p x p".into()));
    }
    let deviation = max_abs_diff(first, &identity(p));
    if deviation > ATOMIC_NORMALIZATION_TOL {
        return Err(Error::BadNormalization { deviation });
    }
    let t = block_toeplitz(moments);
    let min_eig = linalg::hermitian_eigenvalues(&t)[0];
    let tol = 1e-9 * (moments.len() * p) as f64;
    let position = if min_eig > tol {
        MomentPosition::Interior
    } else if min_eig >= -tol {
        MomentPosition::Boundary
    } else {
        MomentPosition::Outside
    };
    Ok((position, min_eig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn scalar(x: f64) -> ComplexMatrix {
        ComplexMatrix::from_element(1, 1, c64(x, 0.0))
    }

    #[test]
    fn spectral_measure_of_identity() {
        let mu = spectral_measure(&identity(5), 2).unwrap();
        assert_eq!(mu.atoms(), &[0.0]);
        assert!(max_abs_diff(&mu.weights()[0], &identity(2)) < 1e-12);
    }

    #[test]
    fn spectral_measure_of_reflection() {
        let mut u = identity(2);
        u[(1, 1)] = c64(-1.0, 0.0);
        let mu = spectral_measure(&u, 1).unwrap();
        assert_eq!(mu.atoms(), &[0.0, PI]);
        assert!((mu.weights()[0][(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(mu.weights()[1][(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn two_atom_moments() {
        let mu = AtomicMatrixMeasure::new(1, vec![0.0, PI], vec![scalar(0.5), scalar(0.5)]).unwrap();
        assert!(mu.moment(1).norm() < 1e-15);
        assert!((mu.moment(2)[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(mu.moment(0), scalar(1.0));
    }

    #[test]
    fn atomic_validation() {
        assert!(matches!(
            AtomicMatrixMeasure::new(1, vec![0.0], vec![scalar(0.5)]),
            Err(Error::BadNormalization { .. })
        ));
        assert!(AtomicMatrixMeasure::new(1, vec![0.1, 0.0], vec![scalar(0.5), scalar(0.5)]).is_err());
        assert!(AtomicMatrixMeasure::new(1, vec![-PI], vec![scalar(1.0)]).is_err());
        assert!(MatrixAtoms::new(1, vec![0.0], vec![scalar(-0.1)]).is_err());
    }

    #[test]
    fn lebesgue_moments_vanish() {
        let lam = GridDensityMeasure::lebesgue(2, 64).unwrap();
        assert!(max_abs_diff(&lam.moment(0), &identity(2)) < 1e-14);
        assert!(linalg::max_abs(&lam.moment(3)) < 1e-10);
    }

    #[test]
    fn grid_rejects_bad_size_and_mass() {
        assert!(GridDensityMeasure::new(1, vec![scalar(1.0); 3], None).is_err());
        assert!(matches!(
            GridDensityMeasure::new(1, vec![scalar(2.0); 4], None),
            Err(Error::BadNormalization { .. })
        ));
    }

    #[test]
    fn grid_with_singular_part() {
        let s = MatrixAtoms::new(1, vec![0.0], vec![scalar(0.25)]).unwrap();
        let mu = GridDensityMeasure::new(1, vec![scalar(0.75); 8], Some(s)).unwrap();
        assert!((mu.moment(1)[(0, 0)] - c64(0.25, 0.0)).norm() < 1e-14);
        assert!((mu.singular_mass()[(0, 0)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn moment_positions() {
        let free = vec![identity(2), zeros(2, 2), zeros(2, 2)];
        assert_eq!(moment_space_position(&free).unwrap(), MomentPosition::Interior);
        assert_eq!(moment_space_position(&[scalar(1.0), scalar(1.0)]).unwrap(), MomentPosition::Boundary);
        assert_eq!(moment_space_position(&[scalar(1.0), scalar(1.2)]).unwrap(), MomentPosition::Outside);
        assert!(matches!(
            moment_space_position(&[scalar(2.0)]),
            Err(Error::BadNormalization { .. })
        ));
    }

    #[test]
    fn degenerate_eigenvalues_merge_across_pi() {
        let mut u = zeros(3, 3);
        u[(0, 0)] = Complex64::from_polar(1.0, PI);
        u[(1, 1)] = Complex64::from_polar(1.0, -PI + 1e-12);
        u[(2, 2)] = c64(1.0, 0.0);
        let mu = spectral_measure(&u, 2).unwrap();
        assert_eq!(mu.len(), 2);
        let k = mu.atoms().iter().position(|t| t.abs() > 3.0).unwrap();
        assert!(max_abs_diff(&mu.weights()[k], &identity(2)) < 1e-12);
    }
}
