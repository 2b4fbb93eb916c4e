//! Closed forms: the Doney family `rho + k = l / alpha`, and `g'` for
//! rational `alpha`.

use std::f64::consts::PI;

use crate::diophantine::{cf_expand, RATIONAL_MAX_DENOMINATOR};
use crate::error::{Error, Result};
use crate::params::{BoundKind, EvalResult, MethodChoice, StableParams, Tolerance};
use crate::reduce::{cos_pi, sin_pi, TwoTerm};
use crate::sum::NeumaierSum;

/// Default search range for [`find_doney_case`].
pub const DONEY_K_MAX: u32 = 32;

/// Relative tolerance on `|rho + k - l / alpha|`.
const MATCH_EPS: f64 = 4.0 * f64::EPSILON;

/// Integers with `rho + k = l / alpha`, `k >= 1`, `l >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoneyCase {
    pub k: u32,
    pub l: u32,
}

impl DoneyCase {
    pub fn new(k: u32, l: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument {
                name: "k",
                value: 0.0,
                reason: "k must be at least 1".into(),
            });
        }
        Ok(Self { k, l })
    }

    /// Whether `rho + k = l / alpha` holds to the matching tolerance.
    pub fn matches(&self, params: &StableParams) -> bool {
        let lhs = params.rho() + f64::from(self.k);
        let rhs = f64::from(self.l) / params.alpha();
        (lhs - rhs).abs() <= MATCH_EPS * lhs.max(rhs)
    }
}

/// Smallest `k in [1, k_max]` with a matching `l`, if any.
pub fn find_doney_case(params: &StableParams, k_max: u32) -> Result<Option<DoneyCase>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument {
            name: "k_max",
            value: 0.0,
            reason: "must be at least 1".into(),
        });
    }
    let (alpha, rho) = (params.alpha(), params.rho());
    for k in 1..=k_max {
        let l = (alpha * (rho + f64::from(k))).round();
        if l < 0.0 || l > f64::from(u32::MAX) {
            continue;
        }
        let case = DoneyCase { k, l: l as u32 };
        if case.matches(params) {
            return Ok(Some(case));
        }
    }
    Ok(None)
}

/// `U_{k-1}(c)` by the three-term recurrence, with `U_{-1} = 0`.
pub(crate) fn chebyshev_u_prev(k: u32, c: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let (mut before, mut current) = (0.0, 1.0);
    for _ in 1..k {
        let next = 2.0 * c * current - before;
        before = current;
        current = next;
    }
    current
}

fn check_x(x: f64) -> Result<()> {
    if !(x.abs() < 1.0) {
        return Err(Error::InvalidArgument {
            name: "x",
            value: x,
            reason: "requires |x| < 1".into(),
        });
    }
    Ok(())
}

/// Partial sum `sum_{m=1}^M x^m U_{k-1}(cos(m pi a)) / m`.
pub fn g_k_series(a: f64, x: f64, k: u32, big_m: usize) -> Result<f64> {
    check_x(x)?;
    let a = TwoTerm::new(a);
    let mut acc = NeumaierSum::new();
    let mut power = 1.0;
    for m in 1..=big_m {
        power *= x;
        let mf = m as f64;
        acc += power * chebyshev_u_prev(k, a.cos_pi_mul(mf)) / mf;
    }
    Ok(acc.sum())
}

/// `g_k` from its finite logarithmic form, with a rounding estimate and
/// the derivative in `x`.
#[derive(Debug, Clone, Copy)]
struct LogForm {
    value: f64,
    rounding: f64,
    d_dx: f64,
    logs: usize,
}

fn g_k_form(a: TwoTerm, x: f64, k: u32) -> Result<LogForm> {
    check_x(x)?;
    let mut neg = NeumaierSum::new();
    let mut deriv = NeumaierSum::new();
    let mut rounding = 0.0;
    let mut logs = 0;
    let degenerate = || Error::DegenerateLog { k, x };

    // x^2 - 2 x cos(theta) + 1 = (x - cos)^2 + sin^2
    let mut add_angle = |multiple: f64| -> Result<()> {
        let (c, s) = (a.cos_pi_mul(multiple), a.sin_pi_mul(multiple));
        let arg = (x - c).powi(2) + s * s;
        if !(arg > 0.0) || !arg.is_finite() {
            return Err(degenerate());
        }
        let t = x * (x - 2.0 * c);
        let lg = if t > -0.5 { t.ln_1p() } else { arg.ln() };
        neg += lg;
        deriv += 2.0 * (x - c) / arg;
        rounding += f64::EPSILON * (lg.abs() + 2.0 + 4.0 * x.abs() * (x.abs() + 1.0) / arg);
        logs += 1;
        Ok(())
    };

    if k.is_multiple_of(2) {
        for n in 0..k / 2 {
            add_angle(f64::from(2 * n + 1))?;
        }
    } else {
        for n in 1..=(k - 1) / 2 {
            add_angle(f64::from(2 * n))?;
        }
        if 1.0 - x == 0.0 {
            return Err(degenerate());
        }
        let lg = (-x).ln_1p();
        neg += lg;
        deriv += -1.0 / (1.0 - x);
        rounding += f64::EPSILON * (lg.abs() + 1.0 + x.abs() / (1.0 - x));
        logs += 1;
    }
    Ok(LogForm {
        value: -neg.sum(),
        rounding,
        d_dx: -deriv.sum(),
        logs,
    })
}

/// `g_k(a, x)` from the finite logarithmic sums; `g_0 = 0`.
pub fn g_k_closed(a: f64, x: f64, k: u32) -> Result<f64> {
    g_k_form(TwoTerm::new(a), x, k).map(|f| f.value)
}

fn sign_pow(e: u32) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn doney_parts(params: &StableParams, beta: f64, case: DoneyCase) -> Result<(LogForm, LogForm, f64, f64)> {
    if !case.matches(params) {
        return Err(Error::InvalidArgument {
            name: "rho",
            value: params.rho(),
            reason: format!(
                "rho + {} != {} / alpha for alpha = {}",
                case.k,
                case.l,
                params.alpha()
            ),
        });
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "the closed form is used for 0 <= beta < 1".into(),
        });
    }
    let alpha = params.alpha();
    let x_direct = sign_pow(case.l + 1) * beta.powf(alpha);
    let x_inverse = sign_pow(case.k + 1) * beta;
    let direct = g_k_form(TwoTerm::new(alpha), x_direct, case.k)?;
    let inverse = g_k_form(TwoTerm::recip(alpha), x_inverse, case.l)?;
    Ok((direct, inverse, x_direct, x_inverse))
}

/// `g(beta) = g_k(alpha, (-1)^(l+1) beta^alpha) - g_l(1/alpha, (-1)^(k+1) beta)`.
pub fn g_doney(params: &StableParams, beta: f64, case: DoneyCase) -> Result<EvalResult> {
    let (direct, inverse, x_direct, _) = doney_parts(params, beta, case)?;
    let value = direct.value - inverse.value;
    // beta^alpha carries one extra rounding
    let bound = direct.rounding
        + inverse.rounding
        + f64::EPSILON * (direct.d_dx * x_direct).abs()
        + f64::EPSILON * value.abs();
    Ok(EvalResult::new(
        value,
        bound,
        MethodChoice::Doney,
        direct.logs + inverse.logs,
        BoundKind::Estimate,
    ))
}

/// `g'(beta)` from the derivative of the Doney closed form, `0 < beta < 1`.
pub fn gprime_doney(params: &StableParams, beta: f64, case: DoneyCase) -> Result<EvalResult> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "the derivative form needs beta > 0".into(),
        });
    }
    let (direct, inverse, x_direct, x_inverse) = doney_parts(params, beta, case)?;
    let alpha = params.alpha();
    // d/dbeta of (-1)^(l+1) beta^alpha is alpha x_direct / beta
    let chain_direct = alpha * x_direct / beta;
    let chain_inverse = x_inverse / beta;
    let a = direct.d_dx * chain_direct;
    let b = inverse.d_dx * chain_inverse;
    let value = a - b;
    let bound = 8.0 * f64::EPSILON * (a.abs() + b.abs()) * f64::from(case.k.max(case.l).max(1))
        + f64::EPSILON * value.abs();
    Ok(EvalResult::new(
        value,
        bound,
        MethodChoice::Doney,
        direct.logs + inverse.logs,
        BoundKind::Estimate,
    ))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `alpha = p / q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalAlpha {
    pub p: u64,
    pub q: u64,
}

impl RationalAlpha {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 || p > 2 * q {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: p as f64 / q.max(1) as f64,
                reason: "p / q must lie in (0, 2]".into(),
            });
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidArgument {
                name: "alpha",
                value: p as f64 / q as f64,
                reason: format!("{p}/{q} is not in lowest terms"),
            });
        }
        Ok(Self { p, q })
    }

    /// Recovers `p / q` from a double whose continued fraction terminates
    /// with denominator at most 10^6.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        let cf = cf_expand(alpha, 64)?;
        let (p, q) = cf.last();
        if !cf.terminated || q > RATIONAL_MAX_DENOMINATOR {
            return Err(Error::NotApplicable {
                method: MethodChoice::Rational,
                reason: format!("alpha = {alpha} is not a rational with denominator <= {RATIONAL_MAX_DENOMINATOR}"),
            });
        }
        Self::new(p, q)
    }

    pub fn alpha(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// `g'(beta)` for rational `alpha = p / q`, `0 < beta < 1`.
///
/// Indices with `p | m` or `q | k` have vanishing divisors; their
/// contributions are the limits
/// `-(alpha ln beta / pi) (-1)^(m + m/alpha) beta^(m-1) sin(rho m pi)` and
/// `-alpha rho (-1)^(k (alpha+1)) beta^(alpha k - 1) cos(alpha rho k pi)`.
/// All other divisors are bounded below by `sin(pi/p)` and `sin(pi/q)`, so
/// both series converge geometrically.
pub fn gprime_rational(ra: RationalAlpha, rho: f64, beta: f64, tol: &Tolerance) -> Result<EvalResult> {
    let alpha = ra.alpha();
    let params = StableParams::new(alpha, rho)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "the rational-alpha series needs 0 < beta < 1".into(),
        });
    }
    let (p, q) = (ra.p, ra.q);
    let rho2 = TwoTerm::new(params.rho());
    let ln_beta = beta.ln();
    let budget = 0.5 * tol.abs_tol;

    // sin(m pi q / p) from the exact residue m q mod 2p
    let sin_ratio = |m: u64, num: u64, den: u64| -> f64 {
        let r = ((m % (2 * den)) * num) % (2 * den);
        sin_pi(r as f64 / den as f64)
    };
    let parity = |e: u64| if e.is_multiple_of(2) { 1.0 } else { -1.0 };
    let inv_floor = |d: u64| if d > 1 { 1.0 / sin_pi(1.0 / d as f64) } else { 0.0 };

    // first series in m with weights beta^(m-1)
    let first_scale = inv_floor(p).max(alpha * ln_beta.abs() / PI);
    let mut first = NeumaierSum::new();
    let mut m_used = 0;
    let mut first_tail = f64::INFINITY;
    for m in 1..=tol.max_terms as u64 {
        let w = ((m - 1) as f64 * ln_beta).exp();
        let s = rho2.sin_pi_mul(m as f64);
        first += if m % p != 0 {
            parity(m + 1) * w * s / sin_ratio(m, q, p)
        } else {
            -(alpha * ln_beta / PI) * parity(m + (m / p) * q) * w * s
        };
        m_used = m as usize;
        first_tail = first_scale * (m as f64 * ln_beta).exp() / -ln_beta.exp_m1();
        if first_tail < budget {
            break;
        }
    }

    // second series in k with weights alpha beta^(alpha k - 1)
    let second_scale = alpha * inv_floor(q).max(params.rho());
    let ln_ratio = alpha * ln_beta;
    let mut second = NeumaierSum::new();
    let mut k_used = 0;
    let mut second_tail = f64::INFINITY;
    for k in 1..=tol.max_terms as u64 {
        let w = alpha * ((alpha * k as f64 - 1.0) * ln_beta).exp();
        second += if k % q != 0 {
            // alpha k = k p / q
            let s = TwoTerm::product(params.rho(), alpha).sin_pi_mul(k as f64);
            parity(k + 1) * w * s / sin_ratio(k, p, q)
        } else {
            let n = k / q;
            -params.rho() * parity(n * (p + q)) * w * rho2.cos_pi_mul((n * p) as f64)
        };
        k_used = k as usize;
        second_tail = second_scale * ((alpha * (k + 1) as f64 - 1.0) * ln_beta).exp() / -ln_ratio.exp_m1();
        if second_tail < budget {
            break;
        }
    }

    if !(first_tail < budget && second_tail < budget) {
        return Err(Error::ConvergenceFailure {
            method: MethodChoice::Rational,
            work: m_used + k_used,
            achieved: first_tail + second_tail,
            target: tol.abs_tol,
        });
    }
    let value = first.sum() + second.sum();
    let bound = first_tail
        + second_tail
        + 8.0 * f64::EPSILON * (first.abs_sum() + second.abs_sum())
        + f64::EPSILON * value.abs();
    Ok(EvalResult::new(value, bound, MethodChoice::Rational, m_used + k_used, BoundKind::Rigorous))
}

/// Closed form of `g'(beta)` for `alpha = 1/2`:
///
/// ```text
/// ((1 - b) sin(pi rho / 2) / (2 sqrt b) + rho (b + cos(pi rho)) / 2 + ln(b) sin(pi rho) / (2 pi))
///     / (b^2 + 2 b cos(pi rho) + 1)
/// ```
///
/// obtained by summing the two geometric series left by [`gprime_rational`]
/// at `p = 1, q = 2`.
pub fn gprime_half_closed(rho: f64, beta: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::OutOfRange {
            name: "rho",
            value: rho,
            reason: "rho must lie in (0, 1)".into(),
        });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "requires 0 < beta < 1".into(),
        });
    }
    let (c, s) = (cos_pi(rho), sin_pi(rho));
    let den = (beta + c).powi(2) + s * s;
    let num = (1.0 - beta) * sin_pi(0.5 * rho) / (2.0 * beta.sqrt())
        + rho * (beta + c) / 2.0
        + beta.ln() * s / (2.0 * PI);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{g_quad, gprime_quad, QuadConfig};

    fn p(a: f64, r: f64) -> StableParams {
        StableParams::new(a, r).unwrap()
    }

    fn quad_cfg() -> QuadConfig {
        QuadConfig::with_abs_tol(1e-13)
    }

    #[test]
    fn finds_example_cases() {
        assert_eq!(
            find_doney_case(&p(0.8, 0.25), DONEY_K_MAX).unwrap(),
            Some(DoneyCase { k: 1, l: 1 })
        );
        assert_eq!(
            find_doney_case(&p(2.0, 0.5), DONEY_K_MAX).unwrap(),
            Some(DoneyCase { k: 1, l: 3 })
        );
        assert_eq!(find_doney_case(&p(2f64.sqrt(), 0.5), 20).unwrap(), None);
        assert!(find_doney_case(&p(0.8, 0.25), 0).is_err());
    }

    #[test]
    fn chebyshev_matches_trig_identity() {
        for k in 1..10u32 {
            for theta in [0.3, 1.1, 2.9] {
                let expected = ((f64::from(k)) * theta).sin() / theta.sin();
                assert!((chebyshev_u_prev(k, theta.cos()) - expected).abs() < 1e-12);
            }
        }
        assert_eq!(chebyshev_u_prev(0, 0.4), 0.0);
    }

    #[test]
    fn g_one_is_minus_log() {
        for x in [-0.7, 0.2, 0.9] {
            let closed = g_k_closed(0.37, x, 1).unwrap();
            assert!((closed + (-x).ln_1p()).abs() < 1e-15);
            let series = g_k_series(0.37, x, 1, 600).unwrap();
            assert!((series - closed).abs() < 1e-12);
        }
        assert_eq!(g_k_closed(0.4, 0.5, 0).unwrap(), 0.0);
        assert_eq!(g_k_series(0.4, 0.5, 0, 50).unwrap(), 0.0);
    }

    #[test]
    fn g_two_at_half() {
        let x = 0.6f64;
        let v = g_k_closed(0.5, x, 2).unwrap();
        assert!((v + (x * x).ln_1p()).abs() < 1e-15);
    }

    #[test]
    fn series_matches_closed_forms() {
        let s = g_k_series(0.37, 0.5, 2, 80).unwrap();
        assert!((s - g_k_closed(0.37, 0.5, 2).unwrap()).abs() < 1e-12);
        let s = g_k_series(0.21, 0.6, 4, 400).unwrap();
        assert!((s - g_k_closed(0.21, 0.6, 4).unwrap()).abs() < 1e-10);
        for k in 0..=8u32 {
            for x in [-0.9, -0.3, 0.5, 0.9] {
                let m = 300;
                let gap = (g_k_series(0.63, x, k, m).unwrap() - g_k_closed(0.63, x, k).unwrap()).abs();
                let bound = f64::from(k) * 0.9f64.powi(m as i32 + 1) / 0.1;
                assert!(gap <= bound + 1e-13, "k {k} x {x}");
            }
        }
    }

    #[test]
    fn degenerate_argument() {
        assert!(g_k_closed(0.3, 1.0, 1).is_err());
        // the closest double below 1 still has a representable argument
        let near = g_k_closed(0.0, 1.0 - f64::EPSILON / 2.0, 3).unwrap();
        assert!(near.is_finite() && near > 100.0);
    }

    #[test]
    fn doney_example() {
        let r = g_doney(&p(0.8, 0.25), 0.5, DoneyCase::new(1, 1).unwrap()).unwrap();
        assert!((r.value - 0.160_988_753_751_733_8).abs() < 1e-15);
        let d = gprime_doney(&p(0.8, 0.25), 0.5, DoneyCase::new(1, 1).unwrap()).unwrap();
        assert!((d.value - 0.158_949_625_885_962_8).abs() < 1e-14);
    }

    #[test]
    fn doney_brownian_case() {
        let params = p(2.0, 0.5);
        let case = DoneyCase::new(1, 3).unwrap();
        let r = g_doney(&params, 0.4, case).unwrap();
        let q = g_quad(&params, 0.4, &quad_cfg()).unwrap();
        assert!((r.value - q.value).abs() < 1e-9);
        assert!((r.value - 0.4f64.ln_1p()).abs() < 1e-15);
    }

    #[test]
    fn doney_irrational_alpha() {
        // rho + 3 = 6 / sqrt(3)
        let a = 3f64.sqrt();
        let rho = 6.0 / a - 3.0;
        let params = p(a, rho);
        let case = find_doney_case(&params, DONEY_K_MAX).unwrap().unwrap();
        assert_eq!(case, DoneyCase { k: 3, l: 6 });
        let r = g_doney(&params, 0.3, case).unwrap();
        let q = g_quad(&params, 0.3, &quad_cfg()).unwrap();
        assert!((r.value - q.value).abs() < 1e-10);
        let d = gprime_doney(&params, 0.3, case).unwrap();
        let dq = gprime_quad(&params, 0.3, &quad_cfg()).unwrap();
        assert!((d.value - dq.value).abs() < 1e-10);
    }

    #[test]
    fn doney_rejects_wrong_case() {
        assert!(g_doney(&p(0.8, 0.3), 0.5, DoneyCase::new(1, 1).unwrap()).is_err());
    }

    #[test]
    fn rational_alpha_construction() {
        assert_eq!(RationalAlpha::from_alpha(0.5).unwrap(), RationalAlpha { p: 1, q: 2 });
        assert_eq!(RationalAlpha::from_alpha(1.5).unwrap(), RationalAlpha { p: 3, q: 2 });
        assert!(RationalAlpha::from_alpha(2f64.sqrt()).is_err());
        assert!(RationalAlpha::new(2, 4).is_err());
        assert!(RationalAlpha::new(5, 2).is_err());
    }

    #[test]
    fn half_closed_form_agrees() {
        let tol = Tolerance::with_abs_tol(1e-14);
        let ra = RationalAlpha::new(1, 2).unwrap();
        for (rho, beta) in [(0.5, 0.25), (0.3, 0.4), (0.9, 0.8)] {
            let closed = gprime_half_closed(rho, beta).unwrap();
            let series = gprime_rational(ra, rho, beta, &tol).unwrap();
            assert!((closed - series.value).abs() < 1e-12, "{rho} {beta}");
            let q = gprime_quad(&p(0.5, rho), beta, &quad_cfg()).unwrap();
            assert!((closed - q.value).abs() < 1e-9);
        }
    }

    #[test]
    fn half_closed_form_vanishes_with_rho() {
        let v = gprime_half_closed(1e-9, 0.3).unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn rational_against_quadrature() {
        let tol = Tolerance::with_abs_tol(1e-13);
        for (pp, qq, rho, beta) in [(1, 1, 0.5, 0.5), (3, 2, 0.5, 0.5), (4, 3, 0.6, 0.7), (2, 3, 0.9, 0.3), (2, 1, 0.5, 0.3)] {
            let ra = RationalAlpha::new(pp, qq).unwrap();
            let r = gprime_rational(ra, rho, beta, &tol).unwrap();
            let q = gprime_quad(&p(ra.alpha(), rho), beta, &quad_cfg()).unwrap();
            assert!((r.value - q.value).abs() < 1e-10, "{pp}/{qq}: {} vs {}", r.value, q.value);
        }
    }

    #[test]
    fn rational_one_sided() {
        let ra = RationalAlpha::new(3, 2).unwrap();
        let r = gprime_rational(ra, 2.0 / 3.0, 0.5, &Tolerance::with_abs_tol(1e-14)).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn resonant_sums_reindex_to_limit_expression() {
        // the m = n p and k = n q resonant terms combine into
        // -(-1)^(nq+1) (-b)^(np-1) p (pi rho cos(np pi rho) + ln b sin(np pi rho)) / (pi q)
        let (pp, qq, rho, b) = (3u64, 2u64, 0.55f64, 0.6f64);
        let alpha = pp as f64 / qq as f64;
        for n in 1..=20u64 {
            let m = n * pp;
            let third = -(alpha * b.ln() / PI)
                * sign_pow((m + n * qq) as u32)
                * b.powi(m as i32 - 1)
                * (PI * rho * m as f64).sin();
            let fourth = -alpha * rho * sign_pow((n * (pp + qq)) as u32) * b.powf(alpha * (n * qq) as f64 - 1.0)
                * (PI * alpha * rho * (n * qq) as f64).cos();
            let npf = (n * pp) as f64;
            let limit = -sign_pow((n * qq + 1) as u32)
                * (-b).powi(npf as i32 - 1)
                * pp as f64
                * (PI * rho * (PI * npf * rho).cos() + b.ln() * (PI * npf * rho).sin())
                / (PI * qq as f64);
            assert!((third + fourth - limit).abs() < 1e-14, "n {n}");
        }
    }
}
