//! Seeded, splittable random streams.
//!
//! Each stream is a ChaCha8 generator keyed by `seed` and positioned on its own
//! `stream_id`, so Monte Carlo trials can run on any thread in any order and
//! still reproduce bit-exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Independent stream under the same seed, labelled by `(family, index)`.
    pub fn substream(seed: u64, family: u32, index: u64) -> Self {
        Self::new(seed, ((family as u64) << 40) ^ index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`, safe to take logarithms of.
    pub fn uniform_open(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Standard real normal.
    pub fn normal(&mut self) -> f64 {
        let r = (-2.0 * self.uniform_open().ln()).sqrt();
        r * (2.0 * PI * self.uniform()).cos()
    }

    /// Standard complex Gaussian: independent real and imaginary parts with
    /// variance 1/2 each, so `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let r = (-self.uniform_open().ln()).sqrt();
        Complex64::from_polar(r, 2.0 * PI * self.uniform())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_reproduces() {
        let mut a = RngStream::new(42, 3);
        let mut b = RngStream::new(42, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn uniform_range_and_moments() {
        let mut rng = RngStream::new(1, 0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 3.0 * (1.0 / 12.0f64 / n as f64).sqrt() * 1.5);
    }

    #[test]
    fn complex_gaussian_variance() {
        let mut rng = RngStream::new(9, 0);
        let n = 100_000;
        let (mut re2, mut im2) = (0.0, 0.0);
        for _ in 0..n {
            let z = rng.complex_gaussian();
            re2 += z.re * z.re;
            im2 += z.im * z.im;
        }
        // var of z.re^2 is 2 * (1/2)^2 = 1/2
        let se = (0.5f64 / n as f64).sqrt();
        assert!((re2 / n as f64 - 0.5).abs() < 4.0 * se);
        assert!((im2 / n as f64 - 0.5).abs() < 4.0 * se);
    }
}
