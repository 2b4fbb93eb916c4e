//! Domain types shared by every evaluator.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Index of stability `alpha` and positivity parameter `rho = P(X_1 > 0)` of
/// a strictly stable process.
///
/// Construct through [`StableParams::new`]; the fields are read-only once
/// validated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    alpha: f64,
    rho: f64,
}

impl StableParams {
    /// Validates `(alpha, rho)`.
    ///
    /// Admissible pairs satisfy `0 < alpha <= 2` and
    /// `rho in [1 - 1/alpha, 1/alpha] ∩ (0, 1)`. The interval endpoints
    /// (spectrally one-sided processes) are accepted. Endpoint comparison is
    /// exact, with `1/alpha` computed once in double precision.
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                reason: "alpha must lie in (0, 2]".into(),
            });
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::OutOfRange {
                name: "rho",
                value: rho,
                reason: "rho must lie in (0, 1)".into(),
            });
        }
        let inv = 1.0 / alpha;
        let lower = 1.0 - inv;
        if rho < lower || rho > inv {
            return Err(Error::OutOfRange {
                name: "rho",
                value: rho,
                reason: format!("rho must lie in [{lower}, {inv}] for alpha = {alpha}"),
            });
        }
        Ok(Self { alpha, rho })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `rho == 1/alpha`, the spectrally one-sided endpoint where `g(beta)`
    /// collapses to `log(1 + beta)`.
    pub fn is_upper_endpoint(&self) -> bool {
        self.rho == 1.0 / self.alpha
    }

    /// `rho == 1 - 1/alpha` (only possible for `alpha > 1`).
    pub fn is_lower_endpoint(&self) -> bool {
        self.alpha > 1.0 && self.rho == 1.0 - 1.0 / self.alpha
    }
}

/// Evaluator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodChoice {
    Auto,
    Series,
    Quadrature,
    Rational,
    Doney,
}

impl MethodChoice {
    pub const ALL: [MethodChoice; 5] = [
        MethodChoice::Auto,
        MethodChoice::Series,
        MethodChoice::Quadrature,
        MethodChoice::Rational,
        MethodChoice::Doney,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodChoice::Auto => "auto",
            MethodChoice::Series => "series",
            MethodChoice::Quadrature => "quadrature",
            MethodChoice::Rational => "rational",
            MethodChoice::Doney => "doney",
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        MethodChoice::ALL
            .iter()
            .copied()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown method '{s}' (expected auto, series, quadrature, rational or doney)")
            })
    }
}

/// Which function is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `g(beta)`
    G,
    /// `g'(beta)`
    GPrime,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::G => "g",
            Quantity::GPrime => "gprime",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How much trust the reported error bound deserves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Follows from the algorithm without unverified assumptions.
    Rigorous,
    /// An a posteriori estimate (embedded quadrature rule).
    Estimate,
    /// Depends on an estimated irrationality exponent beyond the range where
    /// the small-divisor floor was checked.
    Heuristic,
}

/// A computed value with its error bound and work counter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_bound: f64,
    pub method: MethodChoice,
    pub terms_or_nodes_used: usize,
    pub bound_kind: BoundKind,
}

impl EvalResult {
    pub fn new(
        value: f64,
        abs_error_bound: f64,
        method: MethodChoice,
        terms_or_nodes_used: usize,
        bound_kind: BoundKind,
    ) -> Self {
        Self {
            value,
            abs_error_bound,
            method,
            terms_or_nodes_used,
            bound_kind,
        }
    }
}

/// Accuracy targets and work budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub max_terms: usize,
    pub max_quad_refinements: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_terms: 10_000,
            max_quad_refinements: 30,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, max_terms: usize, max_quad_refinements: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(Error::InvalidArgument {
                name: "abs_tol",
                value: abs_tol,
                reason: "tolerance must be positive and finite".into(),
            });
        }
        if max_terms == 0 {
            return Err(Error::InvalidArgument {
                name: "max_terms",
                value: 0.0,
                reason: "must be positive".into(),
            });
        }
        if max_quad_refinements == 0 {
            return Err(Error::InvalidArgument {
                name: "max_quad_refinements",
                value: 0.0,
                reason: "must be positive".into(),
            });
        }
        Ok(Self {
            abs_tol,
            max_terms,
            max_quad_refinements,
        })
    }

    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}
