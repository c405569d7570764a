//! Large-deviation rate functions: `-log det(I - vv^*)` on the ball, its sum over
//! Verblunsky sequences, and the Szegő entropy `-∫ log det W dθ/2π` of a gridded
//! density together with its finite-section truncations.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, identity, zeros, ComplexMatrix};
use crate::measures::GridDensityMeasure;
use crate::mopuc::VerblunskySeq;

/// `I - vv^*` must have all eigenvalues above this for a finite rate.
pub const BALL_INTERIOR_TOL: f64 = 1e-14;
/// `det W` at or below this counts as zero.
pub const DET_FLOOR: f64 = 1e-300;
/// Slack on monotonicity of truncated rates.
pub const MONOTONE_SLACK: f64 = 1e-9;
pub const NESTING_TOL: f64 = 1e-10;
pub const SUB_PROBABILITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rate {
    Finite(f64),
    Infinite,
}

impl Rate {
    pub fn is_finite(self) -> bool {
        matches!(self, Rate::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Rate::Finite(x) => Some(x),
            Rate::Infinite => None,
        }
    }

    /// `a <= b + slack`, with `+∞` above every finite value.
    pub fn le_with_slack(self, other: Rate, slack: f64) -> bool {
        match (self, other) {
            (_, Rate::Infinite) => true,
            (Rate::Infinite, Rate::Finite(_)) => false,
            (Rate::Finite(a), Rate::Finite(b)) => a <= b + slack,
        }
    }
}

impl std::ops::Add for Rate {
    type Output = Rate;

    fn add(self, rhs: Rate) -> Rate {
        match (self, rhs) {
            (Rate::Finite(a), Rate::Finite(b)) => Rate::Finite(a + b),
            _ => Rate::Infinite,
        }
    }
}

impl std::iter::Sum for Rate {
    fn sum<I: Iterator<Item = Rate>>(iter: I) -> Rate {
        iter.fold(Rate::Finite(0.0), |a, b| a + b)
    }
}

impl std::fmt::Display for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rate::Finite(x) => write!(f, "{x}"),
            Rate::Infinite => f.write_str("+inf"),
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Finite(x) => s.serialize_f64(*x),
            Rate::Infinite => s.serialize_str("+inf"),
        }
    }
}

/// A rate together with the per-coefficient or per-node terms that sum to it.
#[derive(Clone, Debug, PartialEq)]
pub struct RateValue {
    pub value: Rate,
    pub breakdown: Vec<Rate>,
    /// Trace of the singular mass ignored by the entropy, when relevant.
    pub singular_mass: Option<f64>,
}

impl RateValue {
    fn from_terms(breakdown: Vec<Rate>) -> Self {
        let value = breakdown.iter().copied().sum();
        Self { value, breakdown, singular_mass: None }
    }

    /// Index of the first divergent term.
    pub fn first_infinite(&self) -> Option<usize> {
        self.breakdown.iter().position(|r| !r.is_finite())
    }
}

impl Serialize for RateValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RateValue", 4)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("breakdown", &self.breakdown)?;
        st.serialize_field("first_infinite", &self.first_infinite())?;
        st.serialize_field("singular_mass", &self.singular_mass)?;
        st.end()
    }
}

fn neg_log_det(gap: &ComplexMatrix, floor_eig: f64) -> Rate {
    let values = linalg::hermitian_eigenvalues(&linalg::hermitian_part(gap));
    if values.first().is_some_and(|&l| l <= floor_eig) {
        return Rate::Infinite;
    }
    Rate::Finite(-values.iter().map(|l| l.ln()).sum::<f64>())
}

/// `-log det(I - vv^*)`, or `+∞` unless `vv^* < I` strictly.
pub fn rate_ball(v: &ComplexMatrix) -> RateValue {
    let gap = identity(v.nrows()) - v * v.adjoint();
    RateValue::from_terms(vec![neg_log_det(&gap, BALL_INTERIOR_TOL)])
}

/// `-Σ_j log det(I - α_j^* α_j)`.
pub fn rate_seq(seq: &VerblunskySeq) -> RateValue {
    let p = seq.dim();
    RateValue::from_terms(
        seq.coeffs()
            .iter()
            .map(|a| neg_log_det(&(identity(p) - a.adjoint() * a), BALL_INTERIOR_TOL))
            .collect(),
    )
}

/// `-log det W` at one node, `+∞` when `det W <= DET_FLOOR`.
fn node_entropy(w: &ComplexMatrix) -> Rate {
    let values = linalg::hermitian_eigenvalues(&linalg::hermitian_part(w));
    if values.first().is_some_and(|&l| l <= 0.0) {
        return Rate::Infinite;
    }
    let log_det: f64 = values.iter().map(|l| l.ln()).sum();
    if log_det <= DET_FLOOR.ln() {
        Rate::Infinite
    } else {
        Rate::Finite(-log_det)
    }
}

/// Trapezoid average of `-log det W(θ_j)`; `breakdown` holds the node values.
fn grid_entropy(densities: &[ComplexMatrix]) -> RateValue {
    let m = densities.len() as f64;
    let breakdown: Vec<Rate> = densities.iter().map(node_entropy).collect();
    let value = match breakdown.iter().copied().sum::<Rate>() {
        Rate::Finite(total) => Rate::Finite(total / m),
        Rate::Infinite => Rate::Infinite,
    };
    RateValue { value, breakdown, singular_mass: None }
}

/// Szegő entropy `-∫ log det W dθ/2π` of the absolutely continuous part. The
/// singular part does not enter; its trace is reported in `singular_mass`.
pub fn rate_ac_measure(measure: &GridDensityMeasure) -> RateValue {
    let mut rate = grid_entropy(measure.densities());
    rate.singular_mass = Some(measure.singular_mass().trace().re);
    rate
}

/// Bounds `C^{-1} <= det W^k(θ_j) <= C` measured over all nodes and sections.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionC {
    pub min_det: f64,
    pub max_det: f64,
    /// `max(max_det, 1/min_det)`, infinite when some determinant vanishes.
    pub constant: f64,
    pub bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationRates {
    /// Entropies of the leading `1x1, 2x2, ..` sections.
    pub rates: Vec<RateValue>,
    /// Largest `|det W^k - det W^{k-1} |ℓ_kk|^2| / max(1, det W^k)` over nodes and `k`.
    pub bartlett_residual: f64,
    pub condition_c: ConditionC,
}

impl TruncationRates {
    pub fn last(&self) -> Option<Rate> {
        self.rates.last().map(|r| r.value)
    }
}

/// Leading `k x k` sections of every node, `k = 1..=k_max`.
pub fn leading_sections(grid: &[ComplexMatrix]) -> Vec<Vec<ComplexMatrix>> {
    let k_max = grid.first().map_or(0, |w| w.nrows());
    (1..=k_max)
        .map(|k| grid.iter().map(|w| w.view((0, 0), (k, k)).into_owned()).collect())
        .collect()
}

fn det_hermitian(w: &ComplexMatrix) -> f64 {
    linalg::hermitian_eigenvalues(w).iter().product()
}

/// Entropies `𝓘^{(1)}, .., 𝓘^{(k_max)}` of nested sections. `sections[k-1]` holds
/// the `k x k` densities at every node. Fails if the inputs are not nested, not
/// PSD or not sub-probability, or if the computed sequence decreases.
pub fn rate_truncations(sections: &[Vec<ComplexMatrix>]) -> Result<TruncationRates> {
    let k_max = sections.len();
    if k_max == 0 {
        return Err(Error::InvalidArgument("no sections given".into()));
    }
    let m = sections[0].len();
    if m == 0 {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    for (idx, section) in sections.iter().enumerate() {
        let k = idx + 1;
        if section.len() != m {
            return Err(Error::DimensionMismatch(format!("section {k} has {} nodes, expected {m}", section.len())));
        }
        for (j, w) in section.iter().enumerate() {
            if w.shape() != (k, k) {
                return Err(Error::DimensionMismatch(format!("section {k} node {j} is not {k}x{k}")));
            }
            if k > 1 {
                let outer = w.view((0, 0), (k - 1, k - 1)).into_owned();
                let gap = linalg::max_abs_diff(&outer, &sections[idx - 1][j]);
                if gap > NESTING_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "section {} is not the leading corner of section {k} at node {j} (gap {gap:e})",
                        k - 1
                    )));
                }
            }
        }
    }
    let full = &sections[k_max - 1];
    let mut cholesky = Vec::with_capacity(m);
    for w in full {
        let eig = linalg::eig_hermitian(w)?;
        if eig.min() < -linalg::PSD_CLAMP {
            return Err(Error::NotPositive { min_eigenvalue: eig.min() });
        }
        cholesky.push(linalg::cholesky_psd(w)?);
    }
    let mean = full.iter().fold(zeros(k_max, k_max), |acc, w| acc + w) / linalg::c64(m as f64, 0.0);
    let headroom = linalg::hermitian_eigenvalues(&(identity(k_max) - mean))[0];
    if headroom < -SUB_PROBABILITY_TOL {
        return Err(Error::InvalidArgument(format!(
            "densities exceed a probability measure (min eigenvalue of I - mean = {headroom:e})"
        )));
    }

    let rates: Vec<RateValue> = sections.iter().map(|s| grid_entropy(s)).collect();
    for k in 1..k_max {
        if !rates[k - 1].value.le_with_slack(rates[k].value, MONOTONE_SLACK) {
            return Err(Error::Postcondition(format!(
                "truncated rates decrease from section {k} ({}) to {} ({})",
                rates[k - 1].value,
                k + 1,
                rates[k].value
            )));
        }
    }

    let mut bartlett_residual = 0.0f64;
    let (mut min_det, mut max_det) = (f64::INFINITY, 0.0f64);
    for (j, l) in cholesky.iter().enumerate() {
        let mut prev = 1.0;
        for (idx, section) in sections.iter().enumerate() {
            let det = det_hermitian(&section[j]);
            let predicted = prev * l[(idx, idx)].norm_sqr();
            bartlett_residual = bartlett_residual.max((det - predicted).abs() / det.abs().max(1.0));
            min_det = min_det.min(det);
            max_det = max_det.max(det);
            prev = det;
        }
    }
    let bounded = min_det > 0.0 && max_det.is_finite();
    let constant = if bounded { max_det.max(1.0 / min_det) } else { f64::INFINITY };
    Ok(TruncationRates {
        rates,
        bartlett_residual,
        condition_c: ConditionC { min_det, max_det, constant, bounded },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn scalar(x: f64) -> ComplexMatrix {
        ComplexMatrix::from_element(1, 1, c64(x, 0.0))
    }

    #[test]
    fn ball_examples() {
        assert_eq!(rate_ball(&zeros(2, 2)).value, Rate::Finite(0.0));
        let r = rate_ball(&scalar(0.5)).value.finite().unwrap();
        assert!((r - 0.287682072451781).abs() < 1e-12);
        assert_eq!(rate_ball(&identity(2)).value, Rate::Infinite);
        assert_eq!(rate_ball(&scalar(2.0)).value, Rate::Infinite);
    }

    #[test]
    fn seq_is_additive() {
        let seq = VerblunskySeq::new(1, vec![scalar(0.5), scalar(0.5)]).unwrap();
        let r = rate_seq(&seq).value.finite().unwrap();
        assert!((r - 0.575364144903562).abs() < 1e-12);
    }

    #[test]
    fn boundary_coefficient_is_infinite_and_located() {
        let seq = VerblunskySeq::new(1, vec![scalar(0.1), scalar(1.0)]).unwrap();
        let r = rate_seq(&seq);
        assert_eq!(r.value, Rate::Infinite);
        assert_eq!(r.first_infinite(), Some(1));
    }

    #[test]
    fn lebesgue_entropy_is_zero() {
        let lam = GridDensityMeasure::lebesgue(2, 32).unwrap();
        assert!(rate_ac_measure(&lam).value.finite().unwrap().abs() < 1e-15);
    }

    #[test]
    fn vanishing_density_is_infinite() {
        let mut d = vec![scalar(2.0); 4];
        d[1] = scalar(0.0);
        d[3] = scalar(0.0);
        let mu = GridDensityMeasure::new(1, d, None).unwrap();
        assert_eq!(rate_ac_measure(&mu).value, Rate::Infinite);
    }

    #[test]
    fn identity_sections() {
        let grid = vec![identity(3); 8];
        let t = rate_truncations(&leading_sections(&grid)).unwrap();
        assert!(t.rates.iter().all(|r| r.value == Rate::Finite(0.0)));
        assert!(t.bartlett_residual < 1e-15);
        assert!(t.condition_c.bounded);
    }

    #[test]
    fn rejects_non_nested() {
        let sections = vec![vec![scalar(0.5); 2], vec![identity(2); 2]];
        assert!(rate_truncations(&sections).is_err());
    }

    #[test]
    fn rejects_super_probability() {
        let grid = vec![identity(2) * c64(1.5, 0.0); 4];
        assert!(rate_truncations(&leading_sections(&grid)).is_err());
    }

    #[test]
    fn rate_ordering() {
        assert!(Rate::Finite(1.0).le_with_slack(Rate::Infinite, 0.0));
        assert!(!Rate::Infinite.le_with_slack(Rate::Finite(1.0), 0.0));
        assert!(Rate::Finite(1.0).le_with_slack(Rate::Finite(1.0 - 1e-10), 1e-9));
    }
}
