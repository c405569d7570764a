use std::f64::consts::PI;

use mopuc::linalg::{self, c64, identity, zeros, ComplexMatrix};
use mopuc::measures::GridDensityMeasure;
use mopuc::mopuc::{bernstein_szego_density, VerblunskySeq};
use mopuc::rates::{leading_sections, rate_ac_measure, rate_ball, rate_seq, rate_truncations, Rate};
use mopuc::sampling::{corner_log_density, sample_ginibre, sample_haar};
use mopuc::RngStream;
use num_complex::Complex64;

mod common;
use common::random_nested_density;

fn scalar(x: f64) -> ComplexMatrix {
    ComplexMatrix::from_element(1, 1, c64(x, 0.0))
}

fn finite(r: Rate) -> f64 {
    r.finite().expect("finite rate")
}

/// `-∫ log(1 + a cos θ) dθ/2π = -log((1 + sqrt(1 - a^2)) / 2)` for `|a| < 1`.
fn cosine_entropy(a: f64) -> f64 {
    -((1.0 + (1.0 - a * a).sqrt()) / 2.0).ln()
}

#[test]
fn cosine_density_entropy_matches_closed_form() {
    for a in [0.3, 0.5, 0.9] {
        let mu = GridDensityMeasure::from_fn(1, 4096, |t| scalar(1.0 + a * t.cos())).unwrap();
        assert!((finite(rate_ac_measure(&mu).value) - cosine_entropy(a)).abs() < 1e-10, "a = {a}");
    }
}

#[test]
fn density_vanishing_at_a_node_is_infinite() {
    // 1 + cos θ is zero at the node θ = -π
    let mu = GridDensityMeasure::from_fn(1, 4096, |t| scalar(1.0 + t.cos())).unwrap();
    let r = rate_ac_measure(&mu);
    assert_eq!(r.value, Rate::Infinite);
    assert_eq!(r.first_infinite(), Some(0));
}

#[test]
fn entropy_approaches_log_two_as_the_zero_sharpens() {
    // a -> 1 limit of the closed form is log 2
    assert!((cosine_entropy(1.0 - 1e-12) - 2f64.ln()).abs() < 1e-5);
}

#[test]
fn entropy_is_stable_under_refinement() {
    let f = |t: f64| {
        let mut w = identity(2);
        w[(0, 0)] = c64(1.0 + 0.4 * t.cos(), 0.0);
        w[(0, 1)] = Complex64::from_polar(0.2, t);
        w[(1, 0)] = Complex64::from_polar(0.2, -t);
        w[(1, 1)] = c64(1.0 - 0.3 * (2.0 * t).sin(), 0.0);
        w
    };
    let coarse = finite(rate_ac_measure(&GridDensityMeasure::from_fn(2, 1024, f).unwrap()).value);
    let fine = finite(rate_ac_measure(&GridDensityMeasure::from_fn(2, 2048, f).unwrap()).value);
    assert!((coarse - fine).abs() < 1e-6);
}

#[test]
fn singular_part_is_reported_not_counted() {
    let s = mopuc::measures::MatrixAtoms::new(1, vec![0.5], vec![scalar(0.5)]).unwrap();
    let mu = GridDensityMeasure::new(1, vec![scalar(0.5); 16], Some(s)).unwrap();
    let r = rate_ac_measure(&mu);
    assert!((finite(r.value) - 2f64.ln()).abs() < 1e-14);
    assert_eq!(r.singular_mass, Some(0.5));
}

#[test]
fn szego_identity_on_random_sequences() {
    let mut rng = RngStream::new(30, 0);
    for trial in 0..20 {
        let p = 1 + trial % 3;
        let coeffs: Vec<ComplexMatrix> = (0..1 + trial % 4)
            .map(|_| {
                let g = sample_ginibre(p, &mut rng);
                let s = 0.7 * rng.uniform() / linalg::operator_norm(&g);
                g * c64(s, 0.0)
            })
            .collect();
        let seq = VerblunskySeq::new(p, coeffs).unwrap();
        let lhs = finite(rate_seq(&seq).value);
        let rhs = finite(rate_ac_measure(&bernstein_szego_density(&seq, 4096).unwrap()).value);
        assert!((lhs - rhs).abs() < 1e-6, "trial {trial}: {lhs} vs {rhs}");
    }
}

#[test]
fn rate_ball_unitary_invariance() {
    let mut rng = RngStream::new(31, 0);
    for _ in 0..20 {
        let g = sample_ginibre(3, &mut rng);
        let v = &g * c64(0.9 / linalg::operator_norm(&g), 0.0);
        let (a, b) = (sample_haar(3, &mut rng), sample_haar(3, &mut rng));
        let r0 = finite(rate_ball(&v).value);
        let r1 = finite(rate_ball(&(&a * &v * &b)).value);
        assert!((r0 - r1).abs() < 1e-10);
    }
}

#[test]
fn rate_seq_sums_ball_rates() {
    let mut rng = RngStream::new(32, 0);
    let coeffs: Vec<ComplexMatrix> = (0..4)
        .map(|_| {
            let g = sample_ginibre(2, &mut rng);
            &g * c64(0.8 / linalg::operator_norm(&g), 0.0)
        })
        .collect();
    let seq = VerblunskySeq::new(2, coeffs.clone()).unwrap();
    let total: f64 = coeffs.iter().map(|a| finite(rate_ball(a).value)).sum();
    assert!((finite(rate_seq(&seq).value) - total).abs() < 1e-12);
}

#[test]
fn scalar_density_decay() {
    let v = scalar(0.5);
    let rate = finite(rate_ball(&v).value);
    assert!((rate + 0.75f64.ln()).abs() < 1e-15);
    for n in [200usize, 400, 800] {
        let decay = -corner_log_density(&v, n, 1).unwrap() / n as f64;
        let nf = n as f64;
        assert!((decay - rate).abs() <= 2.0 * nf.ln() / nf, "N = {n}");
    }
}

#[test]
fn truncated_rates_are_monotone() {
    let mut rng = RngStream::new(33, 0);
    for _ in 0..10 {
        let grid = random_nested_density(&mut rng, 4, 256);
        let t = rate_truncations(&leading_sections(&grid)).unwrap();
        for k in 1..t.rates.len() {
            assert!(t.rates[k - 1].value.le_with_slack(t.rates[k].value, 1e-9));
        }
        assert!(t.bartlett_residual < 1e-9);
    }
}

#[test]
fn block_diagonal_truncation_adds_scalar_rates() {
    let w1 = |t: f64| 1.0 + 0.5 * t.cos();
    let w2 = |t: f64| 1.0 - 0.8 * (2.0 * t).sin();
    let grid: Vec<ComplexMatrix> = (0..512)
        .map(|j| {
            let t = -PI + 2.0 * PI * j as f64 / 512.0;
            let mut w = zeros(2, 2);
            w[(0, 0)] = c64(w1(t), 0.0);
            w[(1, 1)] = c64(w2(t), 0.0);
            w
        })
        .collect();
    let t = rate_truncations(&leading_sections(&grid)).unwrap();
    let r1 = finite(t.rates[0].value);
    let r2 = finite(t.rates[1].value);
    assert!((r1 - cosine_entropy(0.5)).abs() < 1e-10);
    assert!((r2 - r1 - cosine_entropy(0.8)).abs() < 1e-10);
    assert!(t.condition_c.bounded);
}
