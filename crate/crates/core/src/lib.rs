//! Wiener-Hopf factor of strictly stable Lévy processes.
//!
//! The ladder exponent `kappa(gamma, beta) = gamma^rho exp(g(beta gamma^(-1/alpha)))`
//! is driven by
//!
//! ```text
//! g(beta) = sin(pi rho)/pi int_0^inf beta log(1 + x^alpha) / (x^2 + 2 x beta cos(pi rho) + beta^2) dx
//! ```
//!
//! which this crate evaluates by adaptive quadrature ([`quadrature`]), by a
//! double power series with small-divisor control ([`series`],
//! [`diophantine`]) and by closed forms for special parameters
//! ([`special`]). [`kappa`] ties them together.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diophantine;
pub mod error;
pub mod kappa;
pub mod params;
pub mod quadrature;
pub mod reduce;
pub mod series;
pub mod special;
pub mod sum;

pub use diophantine::{classify, classify_at, AlphaClass, AlphaKind, ContinuedFraction};
pub use error::{Error, Result};
pub use kappa::{exit_transform, g_any_beta, gprime_any_beta, kappa, kappa_with, KappaQuery};
pub use params::{BoundKind, EvalResult, MethodChoice, Quantity, StableParams, Tolerance};
pub use quadrature::QuadConfig;
pub use series::SeriesReport;
pub use special::{DoneyCase, RationalAlpha};
