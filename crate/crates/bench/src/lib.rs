//! Shared parameter points for the benchmarks.

use stable_ladder::StableParams;

/// `(alpha, rho, beta)` points covering the well-conditioned, Doney and
/// rational regimes.
pub const POINTS: [(&str, f64, f64, f64); 3] = [
    ("sqrt2", std::f64::consts::SQRT_2, 0.5, 0.3),
    ("doney", 0.8, 0.25, 0.5),
    ("half", 0.5, 0.3, 0.4),
];

pub fn params(alpha: f64, rho: f64) -> StableParams {
    StableParams::new(alpha, rho).expect("benchmark parameters are admissible")
}
