//! Matrix orthogonal polynomials on the unit circle, spectral measures of Haar
//! unitaries and the large-deviation rate functions attached to them.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex linear algebra (eigensolvers, square roots,
//!   pseudo-inverse, Cholesky).
//! - [`rng`] and [`sampling`]: seeded streams, Ginibre/Haar/corner samplers and
//!   the Gaussian weight construction.
//! - [`measures`]: atomic and gridded matrix measures, moments, the block
//!   Toeplitz positivity test.
//! - [`mopuc`]: Szegő recursion, Verblunsky coefficients (from moments and by
//!   deflation), `Θ(α)`, GGT matrices, Bernstein–Szegő synthesis.
//! - [`rates`]: rate functions and truncated Szegő entropies.
//! - [`stats`] and [`experiments`]: Kolmogorov–Smirnov tests and the Monte Carlo
//!   verification suite behind the `mopuc verify` command.

pub mod error;
pub mod experiments;
pub mod json;
pub mod linalg;
pub mod measures;
pub mod mopuc;
pub mod rates;
pub mod rng;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use rng::RngStream;
