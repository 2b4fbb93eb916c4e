//! `g` on all of `beta >= 0`, the ladder exponent `kappa(gamma, beta)` and
//! the exit-problem transform built from it.
//!
//! Below [`REFLECT_LOW`] the evaluators run directly. Above [`REFLECT_HIGH`]
//! the identity `g(beta) = g(1/beta) + alpha rho ln(beta)` maps the point back
//! into the unit interval; in between only quadrature is used.

use crate::diophantine::{classify_at, AlphaClass, AlphaKind};
use crate::error::{Error, Result};
use crate::params::{BoundKind, EvalResult, MethodChoice, Quantity, StableParams, Tolerance};
use crate::quadrature::{quad, QuadConfig};
use crate::reduce::{sin_pi, TwoTerm};
use crate::series;
use crate::special::{find_doney_case, g_doney, gprime_doney, gprime_rational, RationalAlpha, DONEY_K_MAX};

pub const REFLECT_LOW: f64 = 0.95;
pub const REFLECT_HIGH: f64 = 1.05;

/// Point at which `kappa` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaQuery {
    gamma: f64,
    beta: f64,
}

impl KappaQuery {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument {
                name: "gamma",
                value: gamma,
                reason: "gamma must be positive and finite".into(),
            });
        }
        check_beta(beta)?;
        Ok(Self { gamma, beta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "beta must be finite and non-negative".into(),
        });
    }
    Ok(())
}

/// `g(beta)` for any `beta >= 0`.
pub fn g_any_beta(params: &StableParams, beta: f64, method: MethodChoice, tol: &Tolerance) -> Result<EvalResult> {
    evaluate(params, beta, method, tol, Quantity::G)
}

/// `g'(beta)` for any `beta >= 0` (`beta = 0` only when `alpha > 1`).
pub fn gprime_any_beta(
    params: &StableParams,
    beta: f64,
    method: MethodChoice,
    tol: &Tolerance,
) -> Result<EvalResult> {
    evaluate(params, beta, method, tol, Quantity::GPrime)
}

/// Either quantity with the given method.
pub fn evaluate(
    params: &StableParams,
    beta: f64,
    method: MethodChoice,
    tol: &Tolerance,
    quantity: Quantity,
) -> Result<EvalResult> {
    check_beta(beta)?;
    if beta == 0.0 {
        return at_zero(params, quantity);
    }
    let cfg = QuadConfig::from(tol);
    let reflect = match method {
        MethodChoice::Quadrature => false,
        MethodChoice::Auto => {
            if beta > REFLECT_LOW && beta < REFLECT_HIGH {
                return quad(params, beta, &cfg, quantity);
            }
            beta >= REFLECT_HIGH
        }
        _ => beta >= 1.0,
    };
    if !reflect {
        return unit_interval(params, beta, method, tol, quantity);
    }
    let inner = unit_interval(params, 1.0 / beta, method, tol, quantity)?;
    let slope = params.alpha() * params.rho();
    let (value, bound) = match quantity {
        Quantity::G => {
            let shift = slope * beta.ln();
            let value = inner.value + shift;
            (value, inner.abs_error_bound + 2.0 * f64::EPSILON * (shift.abs() + value.abs()))
        }
        Quantity::GPrime => {
            let scaled = inner.value / (beta * beta);
            let value = slope / beta - scaled;
            (
                value,
                inner.abs_error_bound / (beta * beta) + 4.0 * f64::EPSILON * (scaled.abs() + value.abs()),
            )
        }
    };
    Ok(EvalResult { value, abs_error_bound: bound, ..inner })
}

fn at_zero(params: &StableParams, quantity: Quantity) -> Result<EvalResult> {
    match quantity {
        Quantity::G => Ok(EvalResult::new(0.0, 0.0, MethodChoice::Series, 0, BoundKind::Rigorous)),
        Quantity::GPrime if params.is_upper_endpoint() => {
            Ok(EvalResult::new(1.0, 0.0, MethodChoice::Series, 1, BoundKind::Rigorous))
        }
        Quantity::GPrime if params.alpha() > 1.0 => {
            // only the first term of the first series survives
            let value = sin_pi(params.rho()) / TwoTerm::recip(params.alpha()).sin_pi_mul(1.0);
            Ok(EvalResult::new(
                value,
                2.0 * f64::EPSILON * value.abs(),
                MethodChoice::Series,
                1,
                BoundKind::Rigorous,
            ))
        }
        Quantity::GPrime => Err(Error::InvalidArgument {
            name: "beta",
            value: 0.0,
            reason: format!("g'(beta) is unbounded as beta -> 0 for alpha = {}", params.alpha()),
        }),
    }
}

fn classification(params: &StableParams, beta: f64, tol: &Tolerance) -> Result<AlphaClass> {
    classify_at(params.alpha(), beta, tol)
}

/// Dispatch for `0 < beta < 1` (quadrature also accepts larger `beta`).
fn unit_interval(
    params: &StableParams,
    beta: f64,
    method: MethodChoice,
    tol: &Tolerance,
    quantity: Quantity,
) -> Result<EvalResult> {
    let cfg = QuadConfig::from(tol);
    match method {
        MethodChoice::Quadrature => quad(params, beta, &cfg, quantity),
        MethodChoice::Series => {
            let class = classification(params, beta, tol)?;
            series::series(params, beta, tol, &class, quantity)
        }
        MethodChoice::Doney => {
            let case = find_doney_case(params, DONEY_K_MAX)?.ok_or_else(|| Error::NotApplicable {
                method: MethodChoice::Doney,
                reason: format!("no k <= {DONEY_K_MAX} with rho + k = l / alpha"),
            })?;
            doney(params, beta, case, quantity)
        }
        MethodChoice::Rational => match quantity {
            Quantity::G => Err(Error::NotApplicable {
                method: MethodChoice::Rational,
                reason: "the rational-alpha series is available for g' only".into(),
            }),
            Quantity::GPrime => {
                let ra = RationalAlpha::from_alpha(params.alpha())?;
                gprime_rational(ra, params.rho(), beta, tol)
            }
        },
        MethodChoice::Auto => auto(params, beta, tol, quantity, &cfg),
    }
}

fn doney(
    params: &StableParams,
    beta: f64,
    case: crate::special::DoneyCase,
    quantity: Quantity,
) -> Result<EvalResult> {
    match quantity {
        Quantity::G => g_doney(params, beta, case),
        Quantity::GPrime => gprime_doney(params, beta, case),
    }
}

fn auto(params: &StableParams, beta: f64, tol: &Tolerance, quantity: Quantity, cfg: &QuadConfig) -> Result<EvalResult> {
    if let Some(case) = find_doney_case(params, DONEY_K_MAX)? {
        if let Ok(r) = doney(params, beta, case, quantity) {
            if r.abs_error_bound <= tol.abs_tol {
                return Ok(r);
            }
        }
    }
    let class = classification(params, beta, tol)?;
    match class.kind {
        AlphaKind::Rational { p, q } => match quantity {
            Quantity::GPrime => {
                let ra = RationalAlpha::new(p, q)?;
                gprime_rational(ra, params.rho(), beta, tol).or_else(|_| quad(params, beta, cfg, quantity))
            }
            Quantity::G if params.is_upper_endpoint() || params.is_lower_endpoint() => {
                series::series(params, beta, tol, &class, quantity).or_else(|_| quad(params, beta, cfg, quantity))
            }
            Quantity::G => quad(params, beta, cfg, quantity),
        },
        AlphaKind::Irrational { .. } => {
            series::series(params, beta, tol, &class, quantity).or_else(|_| quad(params, beta, cfg, quantity))
        }
        AlphaKind::IllConditioned { .. } => quad(params, beta, cfg, quantity),
    }
}

/// `kappa(gamma, beta) = gamma^rho exp(g(beta gamma^(-1/alpha)))` with the
/// automatic method.
pub fn kappa(params: &StableParams, q: KappaQuery, tol: &Tolerance) -> Result<EvalResult> {
    kappa_with(params, q, MethodChoice::Auto, tol)
}

/// [`kappa`] with an explicit evaluator for `g`.
pub fn kappa_with(params: &StableParams, q: KappaQuery, method: MethodChoice, tol: &Tolerance) -> Result<EvalResult> {
    let scale = q.gamma.powf(params.rho());
    let scaled_beta = q.beta * q.gamma.powf(-1.0 / params.alpha());
    let g = g_any_beta(params, scaled_beta, method, tol)?;
    let value = scale * g.value.exp();
    // |exp(g + e) - exp(g)| <= exp(g) (exp(|e|) - 1)
    let bound = value * g.abs_error_bound.exp_m1() + 3.0 * f64::EPSILON * value;
    Ok(EvalResult {
        value,
        abs_error_bound: if q.beta == 0.0 { 0.0 } else { bound },
        ..g
    })
}

/// `1 / ((theta + gamma) kappa(eta, gamma) kappa(eta, theta))`, the double
/// Laplace transform of the killed semigroup on the half-line.
pub fn exit_transform(
    params: &StableParams,
    eta: f64,
    gamma: f64,
    theta: f64,
    method: MethodChoice,
    tol: &Tolerance,
) -> Result<EvalResult> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument {
            name: "eta",
            value: eta,
            reason: "eta must be positive and finite".into(),
        });
    }
    for (name, v) in [("gamma", gamma), ("theta", theta)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument {
                name,
                value: v,
                reason: "must be finite and non-negative".into(),
            });
        }
    }
    let sum = theta + gamma;
    if sum == 0.0 {
        return Err(Error::DivisionByZero);
    }
    let a = kappa_with(params, KappaQuery::new(eta, gamma)?, method, tol)?;
    let b = kappa_with(params, KappaQuery::new(eta, theta)?, method, tol)?;
    let value = 1.0 / (sum * (a.value * b.value));
    let rel = a.abs_error_bound / a.value + b.abs_error_bound / b.value;
    let bound = value * (rel / (1.0 - rel).max(f64::EPSILON)) + 4.0 * f64::EPSILON * value;
    let method = if a.method == b.method { a.method } else { MethodChoice::Auto };
    let bound_kind = match (a.bound_kind, b.bound_kind) {
        (BoundKind::Heuristic, _) | (_, BoundKind::Heuristic) => BoundKind::Heuristic,
        (BoundKind::Estimate, _) | (_, BoundKind::Estimate) => BoundKind::Estimate,
        _ => BoundKind::Rigorous,
    };
    Ok(EvalResult::new(
        value,
        bound,
        method,
        a.terms_or_nodes_used + b.terms_or_nodes_used,
        bound_kind,
    ))
}

/// Result of one method in [`compare_methods`].
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: MethodChoice,
    pub outcome: Result<EvalResult>,
}

/// Every concrete method at one point, in a fixed order.
pub fn compare_methods(params: &StableParams, beta: f64, tol: &Tolerance, quantity: Quantity) -> Vec<MethodOutcome> {
    [
        MethodChoice::Series,
        MethodChoice::Quadrature,
        MethodChoice::Rational,
        MethodChoice::Doney,
    ]
    .into_iter()
    .map(|method| MethodOutcome {
        method,
        outcome: evaluate(params, beta, method, tol, quantity),
    })
    .collect()
}
