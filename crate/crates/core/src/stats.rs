//! Kolmogorov–Smirnov tests and small statistical helpers.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

pub const KS_MIN_SAMPLES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size used in the asymptotic distribution.
    pub effective_n: f64,
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series converges fast for small λ
        let c = -PI * PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=6).map(|k| (((2 * k - 1) * (2 * k - 1)) as f64 * c).exp()).sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

fn p_value(d: f64, n_e: f64) -> f64 {
    let sq = n_e.sqrt();
    kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("samples contain NaN".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample test of `samples` against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let n = samples.len();
    if n < KS_MIN_SAMPLES {
        return Err(Error::TooFewSamples { needed: KS_MIN_SAMPLES, got: n });
    }
    let xs = sorted(samples)?;
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    Ok(KsResult { statistic: d, p_value: p_value(d, nf), effective_n: nf })
}

/// Two-sample test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    for s in [a, b] {
        if s.len() < KS_MIN_SAMPLES {
            return Err(Error::TooFewSamples { needed: KS_MIN_SAMPLES, got: s.len() });
        }
    }
    let (xa, xb) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_e = na * nb / (na + nb);
    Ok(KsResult { statistic: d, p_value: p_value(d, n_e), effective_n: n_e })
}

/// CDF of a centered normal with the given variance.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    0.5 * libm::erfc(-x / (2.0 * variance).sqrt())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Pearson sample correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Per-test threshold for a family-wise level `alpha` over `tests` tests.
pub fn bonferroni(alpha: f64, tests: usize) -> f64 {
    alpha / tests.max(1) as f64
}
