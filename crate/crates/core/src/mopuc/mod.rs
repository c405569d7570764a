//! Szegő recursion, Verblunsky coefficients and the operators built from them.

pub mod arlinskii;
pub mod bernstein_szego;
pub mod deflation;
pub mod extraction;
pub mod ggt;
pub mod polynomial;
pub mod verblunsky;

pub use arlinskii::{arlinskii_alpha1, ArlinskiiAlpha1};
pub use bernstein_szego::bernstein_szego_density;
pub use deflation::{deflate_once, verblunsky_by_deflation, verblunsky_by_deflation_with_frame};
pub use extraction::{monic_right_from_moments, verblunsky_from_moments, verblunsky_of_measure};
pub use ggt::{factorization_residual, ggt, theta};
pub use polynomial::{MatrixPolynomial, OrthoPolyBasis};
pub use verblunsky::VerblunskySeq;
