//! The double power series for `g` and `g'` on `0 < beta < 1`.
//!
//! ```text
//! g(b)  = sum_m (-1)^(m+1) b^m sin(rho m pi) / (m sin(m pi / alpha))
//!       + sum_k (-1)^(k+1) b^(alpha k) sin(rho alpha k pi) / (k sin(alpha k pi))
//! g'(b) = sum_m (-1)^(m+1) b^(m-1) sin(rho m pi) / sin(m pi / alpha)
//!       + alpha sum_k (-1)^(k+1) b^(alpha k - 1) sin(rho alpha k pi) / sin(alpha k pi)
//! ```
//!
//! Each series is truncated once the envelope tail from the divisor profile
//! drops below half the tolerance. At the two one-sided endpoints of `rho`,
//! and whenever `rho + k = l / alpha`, the divisor ratios are known exactly
//! (signs, or Chebyshev values `U_{l-1}`, `U_{k-1}`) and no profile is needed.

mod aux;
mod kernels;

pub use aux::{aux_int0b, aux_intbinfty};
pub use kernels::{kernel_poisson, kernel_tmp1, kernel_tmp2, kernel_tmp3, KernelEval};

use crate::diophantine::{AlphaClass, AlphaKind, Divisor, TermEnvelope, ROUNDING_PER_ABS_SUM};
use crate::error::{Error, Result};
use crate::params::{BoundKind, EvalResult, MethodChoice, Quantity, StableParams, Tolerance};
use crate::reduce::{sin_pi, TwoTerm};
use crate::special::{chebyshev_u_prev, find_doney_case, DoneyCase, DONEY_K_MAX};
use crate::sum::NeumaierSum;

/// Outcome of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesReport {
    pub value: f64,
    pub terms_first_series: usize,
    pub terms_second_series: usize,
    /// Bound on the two truncated tails together.
    pub tail_bound: f64,
    /// Smallest divisor floor the tail bound relied on; 1 when no divisor
    /// entered.
    pub divisor_floor_used: f64,
    /// Accumulated floating-point error of the partial sums.
    pub rounding_bound: f64,
    pub bound_kind: BoundKind,
}

impl SeriesReport {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }

    pub fn to_eval(&self) -> EvalResult {
        EvalResult::new(
            self.value,
            self.error_bound(),
            MethodChoice::Series,
            self.terms_first_series + self.terms_second_series,
            self.bound_kind,
        )
    }
}

impl From<SeriesReport> for EvalResult {
    fn from(r: SeriesReport) -> Self {
        r.to_eval()
    }
}

/// `g(beta)` by the double series.
///
/// `aclass` must be the classification of `params.alpha()`. Rational `alpha`
/// is only accepted where both divisor ratios are exact: the one-sided
/// endpoints of `rho` and the family `rho + k = l / alpha`.
pub fn g_series(params: &StableParams, beta: f64, tol: &Tolerance, aclass: &AlphaClass) -> Result<SeriesReport> {
    evaluate(params, beta, tol, aclass, Quantity::G)
}

/// `g'(beta)` by the differentiated double series.
///
/// At `beta = 0` returns the limit `sin(rho pi) / sin(pi / alpha)`, which is
/// finite only for `alpha > 1`.
pub fn gprime_series(
    params: &StableParams,
    beta: f64,
    tol: &Tolerance,
    aclass: &AlphaClass,
) -> Result<SeriesReport> {
    evaluate(params, beta, tol, aclass, Quantity::GPrime)
}

/// Either quantity, as an [`EvalResult`].
pub fn series(
    params: &StableParams,
    beta: f64,
    tol: &Tolerance,
    aclass: &AlphaClass,
    quantity: Quantity,
) -> Result<EvalResult> {
    evaluate(params, beta, tol, aclass, quantity).map(|r| r.to_eval())
}

/// Partial sums `(first, second)` with exactly `first_terms` and
/// `second_terms` terms and no truncation logic; `alpha` must avoid the
/// resonances `sin(m pi / alpha) = 0`, `sin(alpha k pi) = 0` in range.
pub fn partial_sums(
    params: &StableParams,
    beta: f64,
    first_terms: usize,
    second_terms: usize,
    quantity: Quantity,
) -> (f64, f64) {
    let terms = Terms::general(params, beta.ln(), quantity);
    let first: NeumaierSum = (1..=first_terms).map(|m| (terms.first)(m as f64)).collect();
    let second: NeumaierSum = (1..=second_terms).map(|k| (terms.second)(k as f64)).collect();
    (first.sum(), second.sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Upper,
    Lower,
    Doney(DoneyCase),
    General,
}

type TermFn<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

struct Terms<'a> {
    first: TermFn<'a>,
    second: TermFn<'a>,
}

fn alternating(m: f64) -> f64 {
    if m % 2.0 == 1.0 {
        1.0
    } else {
        -1.0
    }
}

impl<'a> Terms<'a> {
    fn general(params: &StableParams, ln_beta: f64, quantity: Quantity) -> Terms<'a> {
        let alpha = params.alpha();
        let rho = TwoTerm::new(params.rho());
        let rho_alpha = TwoTerm::product(params.rho(), alpha);
        let inverse = TwoTerm::recip(alpha);
        let direct = TwoTerm::new(alpha);
        match quantity {
            Quantity::G => Terms {
                first: Box::new(move |m| {
                    alternating(m) * (m * ln_beta).exp() * rho.sin_pi_mul(m) / (m * inverse.sin_pi_mul(m))
                }),
                second: Box::new(move |k| {
                    alternating(k) * (alpha * k * ln_beta).exp() * rho_alpha.sin_pi_mul(k)
                        / (k * direct.sin_pi_mul(k))
                }),
            },
            Quantity::GPrime => Terms {
                first: Box::new(move |m| {
                    alternating(m) * ((m - 1.0) * ln_beta).exp() * rho.sin_pi_mul(m) / inverse.sin_pi_mul(m)
                }),
                second: Box::new(move |k| {
                    alpha * alternating(k) * ((alpha * k - 1.0) * ln_beta).exp() * rho_alpha.sin_pi_mul(k)
                        / direct.sin_pi_mul(k)
                }),
            },
        }
    }

    /// `rho = l/alpha - k`: the ratios are `(-1)^(k m) U_{l-1}(cos(m pi / alpha))`
    /// and `(-1)^(l j + 1) U_{k-1}(cos(alpha j pi))`.
    fn doney(alpha: f64, case: DoneyCase, ln_beta: f64, quantity: Quantity) -> Terms<'a> {
        let inverse = TwoTerm::recip(alpha);
        let direct = TwoTerm::new(alpha);
        let (k, l) = (case.k, case.l);
        let first_sign = move |m: f64| alternating(m) * if k % 2 == 1 { alternating(m + 1.0) } else { 1.0 };
        let second_sign = move |j: f64| if l % 2 == 0 { alternating(j) } else { 1.0 };
        match quantity {
            Quantity::G => Terms {
                first: Box::new(move |m| {
                    first_sign(m) * (m * ln_beta).exp() * chebyshev_u_prev(l, inverse.cos_pi_mul(m)) / m
                }),
                second: Box::new(move |j| {
                    second_sign(j) * (alpha * j * ln_beta).exp() * chebyshev_u_prev(k, direct.cos_pi_mul(j)) / j
                }),
            },
            Quantity::GPrime => Terms {
                first: Box::new(move |m| {
                    first_sign(m) * ((m - 1.0) * ln_beta).exp() * chebyshev_u_prev(l, inverse.cos_pi_mul(m))
                }),
                second: Box::new(move |j| {
                    alpha
                        * second_sign(j)
                        * ((alpha * j - 1.0) * ln_beta).exp()
                        * chebyshev_u_prev(k, direct.cos_pi_mul(j))
                }),
            },
        }
    }

    /// `rho = 1/alpha`: the first ratio is 1, the second series vanishes.
    fn upper(ln_beta: f64, quantity: Quantity) -> Terms<'a> {
        let first: TermFn = match quantity {
            Quantity::G => Box::new(move |m| alternating(m) * (m * ln_beta).exp() / m),
            Quantity::GPrime => Box::new(move |m| alternating(m) * ((m - 1.0) * ln_beta).exp()),
        };
        Terms {
            first,
            second: Box::new(|_| 0.0),
        }
    }

    /// `rho = 1 - 1/alpha`: the ratios are `(-1)^(m+1)` and `(-1)^k`.
    fn lower(alpha: f64, ln_beta: f64, quantity: Quantity) -> Terms<'a> {
        match quantity {
            Quantity::G => Terms {
                first: Box::new(move |m| (m * ln_beta).exp() / m),
                second: Box::new(move |k| -(alpha * k * ln_beta).exp() / k),
            },
            Quantity::GPrime => Terms {
                first: Box::new(move |m| ((m - 1.0) * ln_beta).exp()),
                second: Box::new(move |k| -alpha * ((alpha * k - 1.0) * ln_beta).exp()),
            },
        }
    }
}

struct Partial {
    acc: NeumaierSum,
    terms: usize,
    tail: f64,
}

fn sum_until(term: &dyn Fn(f64) -> f64, env: &TermEnvelope, budget: f64, max_terms: usize) -> Result<Partial> {
    let mut acc = NeumaierSum::new();
    let mut tail = f64::INFINITY;
    for m in 1..=max_terms {
        acc += term(m as f64);
        if let Some(t) = env.tail_after(m) {
            tail = t;
            if t < budget {
                return Ok(Partial { acc, terms: m, tail: t });
            }
        }
    }
    Err(Error::ConvergenceFailure {
        method: MethodChoice::Series,
        work: max_terms,
        achieved: tail,
        target: budget,
    })
}

fn evaluate(
    params: &StableParams,
    beta: f64,
    tol: &Tolerance,
    aclass: &AlphaClass,
    quantity: Quantity,
) -> Result<SeriesReport> {
    let alpha = params.alpha();
    if aclass.alpha != alpha {
        return Err(Error::InvalidArgument {
            name: "alpha",
            value: aclass.alpha,
            reason: format!("classification was computed for a different alpha ({alpha})"),
        });
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "the series converges only for 0 <= beta < 1".into(),
        });
    }
    let shape = if params.is_upper_endpoint() {
        Shape::Upper
    } else if params.is_lower_endpoint() {
        Shape::Lower
    } else if let Some(case) = find_doney_case(params, DONEY_K_MAX)? {
        Shape::Doney(case)
    } else {
        Shape::General
    };
    let profile = match (shape, aclass.kind, aclass.profile) {
        (Shape::General, AlphaKind::Rational { p, q }, _) => {
            return Err(Error::NotApplicable {
                method: MethodChoice::Series,
                reason: format!("alpha = {p}/{q} is rational and its divisors vanish"),
            })
        }
        (Shape::General, AlphaKind::IllConditioned { exponent_estimate }, _) => {
            return Err(Error::IllConditioned {
                alpha,
                reason: format!(
                    "series projected beyond budget (estimated irrationality exponent {exponent_estimate:.3})"
                ),
            })
        }
        (Shape::General, _, None) => {
            return Err(Error::InvalidArgument {
                name: "alpha",
                value: alpha,
                reason: "classification carries no divisor profile".into(),
            })
        }
        (_, _, profile) => profile,
    };

    if beta == 0.0 {
        return at_zero(params, shape, quantity);
    }

    let ln_beta = beta.ln();
    let budget = 0.5 * tol.abs_tol;
    let (terms, first_env, second_env) = match shape {
        Shape::General => {
            let profile = profile.expect("checked above");
            let (first_env, second_env) = match quantity {
                Quantity::G => (
                    profile.envelope(Divisor::Inverse, ln_beta, 0.0, -1.0),
                    profile.envelope(Divisor::Direct, alpha * ln_beta, 0.0, -1.0),
                ),
                Quantity::GPrime => (
                    profile.envelope(Divisor::Inverse, ln_beta, -ln_beta, 0.0),
                    profile.envelope(Divisor::Direct, alpha * ln_beta, alpha.ln() - ln_beta, 0.0),
                ),
            };
            (Terms::general(params, ln_beta, quantity), first_env, Some(second_env))
        }
        Shape::Upper | Shape::Lower | Shape::Doney(_) => {
            // Chebyshev factors are bounded by their degree
            let (first_ln, second_ln) = match shape {
                Shape::Doney(case) => (f64::from(case.l.max(1)).ln(), f64::from(case.k.max(1)).ln()),
                _ => (0.0, 0.0),
            };
            let (first_env, second_env) = match quantity {
                Quantity::G => (
                    TermEnvelope { ln_base: ln_beta, ln_scale: first_ln, power: -1.0 },
                    TermEnvelope { ln_base: alpha * ln_beta, ln_scale: second_ln, power: -1.0 },
                ),
                Quantity::GPrime => (
                    TermEnvelope { ln_base: ln_beta, ln_scale: first_ln - ln_beta, power: 0.0 },
                    TermEnvelope { ln_base: alpha * ln_beta, ln_scale: second_ln + alpha.ln() - ln_beta, power: 0.0 },
                ),
            };
            match shape {
                Shape::Upper => (Terms::upper(ln_beta, quantity), first_env, None),
                Shape::Doney(case) => (Terms::doney(alpha, case, ln_beta, quantity), first_env, Some(second_env)),
                _ => (Terms::lower(alpha, ln_beta, quantity), first_env, Some(second_env)),
            }
        }
    };

    let first = sum_until(&terms.first, &first_env, budget, tol.max_terms)?;
    let second = match second_env {
        Some(env) => sum_until(&terms.second, &env, budget, tol.max_terms)?,
        None => Partial {
            acc: NeumaierSum::new(),
            terms: 0,
            tail: 0.0,
        },
    };

    let value = first.acc.sum() + second.acc.sum();
    let rounding_bound =
        ROUNDING_PER_ABS_SUM * (first.acc.abs_sum() + second.acc.abs_sum()) + f64::EPSILON * value.abs();
    let (divisor_floor_used, bound_kind) = match (shape, profile) {
        (Shape::General, Some(profile)) => (
            profile
                .floor(Divisor::Inverse, (first.terms + 1) as f64)
                .min(profile.floor(Divisor::Direct, (second.terms + 1) as f64)),
            BoundKind::Heuristic,
        ),
        _ => (1.0, BoundKind::Rigorous),
    };
    Ok(SeriesReport {
        value,
        terms_first_series: first.terms,
        terms_second_series: second.terms,
        tail_bound: first.tail + second.tail,
        divisor_floor_used,
        rounding_bound,
        bound_kind,
    })
}

fn at_zero(params: &StableParams, shape: Shape, quantity: Quantity) -> Result<SeriesReport> {
    let alpha = params.alpha();
    let value = match (quantity, shape) {
        (Quantity::G, _) => 0.0,
        (Quantity::GPrime, Shape::Upper) => 1.0,
        (Quantity::GPrime, _) if alpha > 1.0 => {
            sin_pi(params.rho()) / TwoTerm::recip(alpha).sin_pi_mul(1.0)
        }
        (Quantity::GPrime, _) => {
            return Err(Error::InvalidArgument {
                name: "beta",
                value: 0.0,
                reason: format!("g'(beta) is unbounded as beta -> 0 for alpha = {alpha} <= 1"),
            })
        }
    };
    Ok(SeriesReport {
        value,
        terms_first_series: 0,
        terms_second_series: 0,
        tail_bound: 0.0,
        divisor_floor_used: 1.0,
        rounding_bound: f64::EPSILON * value.abs(),
        bound_kind: BoundKind::Rigorous,
    })
}
