use std::f64::consts::PI;

use mopuc::linalg::{self, c64, zeros, ComplexMatrix};
use mopuc::RngStream;
use num_complex::Complex64;

/// Random trigonometric polynomial `Σ_{|t|<=d} c_t e^{itθ}`.
fn trig_poly(rng: &mut RngStream, degree: i32) -> Vec<(i32, Complex64)> {
    (-degree..=degree).map(|t| (t, rng.complex_gaussian())).collect()
}

fn eval_trig(poly: &[(i32, Complex64)], theta: f64) -> Complex64 {
    poly.iter().map(|&(t, c)| c * Complex64::from_polar(1.0, t as f64 * theta)).sum()
}

/// Nested densities `L(θ) L(θ)^*` from a random lower-triangular trigonometric
/// `L`, scaled so the mean density is at most `0.9 I`.
pub fn random_nested_density(rng: &mut RngStream, k_max: usize, grid: usize) -> Vec<ComplexMatrix> {
    let entries: Vec<Vec<Vec<(i32, Complex64)>>> =
        (0..k_max).map(|i| (0..=i).map(|_| trig_poly(rng, 3)).collect()).collect();
    let nodes: Vec<f64> = (0..grid).map(|j| -PI + 2.0 * PI * j as f64 / grid as f64).collect();
    let mut densities: Vec<ComplexMatrix> = nodes
        .iter()
        .map(|&t| {
            let mut l = zeros(k_max, k_max);
            for i in 0..k_max {
                for j in 0..=i {
                    l[(i, j)] = eval_trig(&entries[i][j], t);
                }
            }
            linalg::hermitian_part(&(&l * l.adjoint()))
        })
        .collect();
    let mean = densities.iter().fold(zeros(k_max, k_max), |acc, w| acc + w) / c64(grid as f64, 0.0);
    let top = *linalg::hermitian_eigenvalues(&mean).last().unwrap();
    for w in &mut densities {
        *w *= c64(0.9 / top, 0.0);
    }
    densities
}
