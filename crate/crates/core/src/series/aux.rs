//! Series for `int_0^b y^p/(1+y) dy` and `int_b^inf y^(-p)/(1+y) dy`.

use crate::error::{Error, Result};
use crate::params::{BoundKind, EvalResult, MethodChoice, Tolerance};
use crate::reduce::sin_pi;
use crate::sum::NeumaierSum;

/// Hard cap on terms; independent of `tol.max_terms` since both series are
/// alternating with a known remainder.
const TERM_CAP: usize = 10_000_000;

/// Terms summed directly at `b = 1` before the alternating tail is estimated.
const DIRECT_TERMS_AT_ONE: usize = 1000;

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument {
            name: "p",
            value: p,
            reason: "exponent must be positive and finite".into(),
        });
    }
    Ok(())
}

/// `int_0^b y^p / (1 + y) dy = sum_k (-1)^k b^(k+1+p) / (k+1+p)` for `p > 0`,
/// `0 <= b < 1`.
pub fn aux_int0b(p: f64, b: f64, tol: &Tolerance) -> Result<EvalResult> {
    check_p(p)?;
    if !(0.0..1.0).contains(&b) {
        return Err(Error::InvalidArgument {
            name: "b",
            value: b,
            reason: "upper limit must lie in [0, 1)".into(),
        });
    }
    if b == 0.0 {
        return Ok(EvalResult::new(0.0, 0.0, MethodChoice::Series, 0, BoundKind::Rigorous));
    }
    let ln_b = b.ln();
    let term = |k: usize| {
        let e = k as f64 + 1.0 + p;
        (e * ln_b).exp() / e
    };
    let mut acc = NeumaierSum::new();
    let mut k = 0;
    // terms decrease in magnitude, so the first omitted one bounds the remainder
    loop {
        let t = term(k);
        if t < tol.abs_tol || t == 0.0 || k >= TERM_CAP {
            let value = acc.sum();
            let bound = t + 4.0 * f64::EPSILON * acc.abs_sum();
            return Ok(EvalResult::new(value, bound, MethodChoice::Series, k, BoundKind::Rigorous));
        }
        acc += if k % 2 == 0 { t } else { -t };
        k += 1;
    }
}

/// `int_b^inf y^(-p) / (1 + y) dy` for `p > 0`, `0 < b <= 1`.
///
/// Non-integer `p` uses `pi / sin(p pi) + sum_k (-1)^(k+1) b^(k+1-p) / (k+1-p)`.
/// When `p` is within four machine epsilons (relative) of an integer `n` the
/// singular `k = n - 1` term and the reflection constant are replaced by
/// their limit `(-1)^n ln b`.
pub fn aux_intbinfty(p: f64, b: f64, tol: &Tolerance) -> Result<EvalResult> {
    check_p(p)?;
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::InvalidArgument {
            name: "b",
            value: b,
            reason: "lower limit must lie in (0, 1]".into(),
        });
    }
    let n = p.round();
    let integer = n >= 1.0 && (p - n).abs() <= 4.0 * f64::EPSILON * p;
    let skip = if integer { Some(n as usize - 1) } else { None };

    let constant = if integer {
        let sign = if n % 2.0 == 0.0 { 1.0 } else { -1.0 };
        sign * b.ln()
    } else {
        std::f64::consts::PI / sin_pi(p)
    };
    let shift = if integer { 1.0 - n } else { 1.0 - p };

    let mut acc = NeumaierSum::new();
    acc += constant;
    let ln_b = b.ln();
    let signed = |k: usize| if k.is_multiple_of(2) { -1.0 } else { 1.0 };

    if b == 1.0 {
        let cut = DIRECT_TERMS_AT_ONE.max(p.ceil() as usize + DIRECT_TERMS_AT_ONE);
        for k in 0..cut {
            if Some(k) != skip {
                acc += signed(k) / (k as f64 + shift);
            }
        }
        let (tail, err) = alternating_tail(cut as f64 + shift);
        acc += signed(cut) * tail;
        let bound = err + 4.0 * f64::EPSILON * acc.abs_sum();
        return Ok(EvalResult::new(acc.sum(), bound, MethodChoice::Series, cut, BoundKind::Estimate));
    }

    // the magnitudes b^e / e are decreasing once e exceeds 1 / ln(1/b)
    let monotone_from = (-1.0 / ln_b - shift).max(0.0).ceil() as usize;
    let mut k = 0;
    loop {
        if Some(k) == skip {
            k += 1;
            continue;
        }
        let e = k as f64 + shift;
        let mag = (e * ln_b).exp() / e.abs();
        if k >= monotone_from && (mag < tol.abs_tol || mag == 0.0) {
            let bound = mag + 4.0 * f64::EPSILON * acc.abs_sum();
            return Ok(EvalResult::new(acc.sum(), bound, MethodChoice::Series, k, BoundKind::Rigorous));
        }
        if k >= TERM_CAP {
            return Err(Error::ConvergenceFailure {
                method: MethodChoice::Series,
                work: k,
                achieved: mag,
                target: tol.abs_tol,
            });
        }
        acc += signed(k) * (e * ln_b).exp() / e;
        k += 1;
    }
}

/// `sum_{j >= 0} (-1)^j / (x + j)` for large `x` by the Boole expansion
/// `f/2 - f'/4 + f'''/48 - f^(5)/480 + 17 f^(7)/80640`, with the magnitude of
/// the next correction as error estimate.
fn alternating_tail(x: f64) -> (f64, f64) {
    // f^(j)(x) = (-1)^j j! / x^(j+1) for f = 1/x
    let inv = 1.0 / x;
    let d = |j: i32, fact: f64| {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * fact * inv.powi(j + 1)
    };
    let value = d(0, 1.0) / 2.0 - d(1, 1.0) / 4.0 + d(3, 6.0) / 48.0 - d(5, 120.0) / 480.0
        + 17.0 * d(7, 5040.0) / 80640.0;
    let next = 31.0 * 362_880.0 * inv.powi(10) / 1_451_520.0;
    (value, next)
}
