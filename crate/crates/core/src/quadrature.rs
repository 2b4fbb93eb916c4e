//! Reference evaluation of `g` and `g'` by adaptive Gauss–Kronrod quadrature.
//!
//! `g(beta) = sin(pi rho)/pi * int_0^inf beta log(1 + x^alpha) / (x^2 + 2 x beta cos(pi rho) + beta^2) dx`
//!
//! `g'(beta) = alpha sin(pi rho)/pi * int_0^inf x^alpha/(1 + x^alpha) / (x^2 + 2 x beta cos(pi rho) + beta^2) dx`
//!
//! The half line is cut at `beta` and at 1 (plus a window around `beta` when
//! the denominator nearly has a double root). Panels beyond 1 are integrated
//! in `y = 1/x`, so the infinite tail becomes the bounded interval `(0, 1/s]`.
//! Interior panels are integrated in `ln x` (or `ln y`), since a panel can
//! span many decades when `beta` is far from 1.
//! The two panels touching `x = 0` and `y = 0` carry `x^alpha` and
//! `log y` endpoint behaviour; they are additionally graded with `u -> u^4`,
//! which keeps the transformed integrand smooth enough for GK15.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{BoundKind, EvalResult, MethodChoice, Quantity, StableParams};
use crate::reduce::{cos_pi, sin_pi};
use crate::sum::NeumaierSum;

/// Kronrod abscissae on `[-1, 1]`, non-negative half, descending.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const NODES_PER_RULE: usize = 15;

/// Hard cap on live subintervals, independent of the depth budget.
const MAX_INTERVALS: usize = 5_000;

/// Relative half-width of the extra window around `x = beta`.
const NEAR_ROOT_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_refinements: usize,
    /// Extra cut points in `x`; `beta` and 1 are always used.
    pub split_points: Vec<f64>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-13,
            max_refinements: 30,
            split_points: Vec::new(),
        }
    }
}

impl QuadConfig {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument {
                    name,
                    value: v,
                    reason: "quadrature tolerances must be positive".into(),
                });
            }
        }
        if self.max_refinements == 0 {
            return Err(Error::InvalidArgument {
                name: "max_refinements",
                value: 0.0,
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

impl From<&crate::params::Tolerance> for QuadConfig {
    fn from(t: &crate::params::Tolerance) -> Self {
        Self {
            abs_tol: t.abs_tol,
            max_refinements: t.max_quad_refinements,
            ..Self::default()
        }
    }
}

/// Output of one GK15 application.
#[derive(Debug, Clone, Copy)]
struct RuleResult {
    value: f64,
    error: f64,
    abs_value: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> RuleResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = fc.abs() * WGK[7];
    let mut fv = [0.0f64; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let h = half.abs();
    RuleResult {
        value: kronrod * half,
        error: rescale_error((kronrod - gauss) * half, abs_k * h, asc * h),
        abs_value: abs_k * h,
    }
}

/// QUADPACK's scaling of `|K - G|` into an error estimate.
fn rescale_error(diff: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = diff.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

struct Interval {
    panel: usize,
    a: f64,
    b: f64,
    depth: usize,
    rule: RuleResult,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    // largest error first; ties broken by position so the order is total
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule
            .error
            .total_cmp(&other.rule.error)
            .then_with(|| other.panel.cmp(&self.panel))
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// An integrand with its interval.
pub type Panel<'a> = (&'a dyn Fn(f64) -> f64, f64, f64);

/// Result of [`integrate_panels`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive GK15 over several panels at once: the subinterval with
/// the largest error estimate is bisected until the summed estimate meets
/// `max(abs_tol, rel_tol |I|)`.
///
/// The stopping state is the first state in a fixed bisection sequence that
/// meets the target, so a tighter tolerance never reports a larger error.
pub fn integrate_panels(
    panels: &[Panel<'_>],
    abs_tol: f64,
    rel_tol: f64,
    max_depth: usize,
) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for (i, &(f, a, b)) in panels.iter().enumerate() {
        if b > a {
            heap.push(Interval {
                panel: i,
                a,
                b,
                depth: 0,
                rule: gk15(&f, a, b),
            });
            evaluations += NODES_PER_RULE;
        }
    }
    loop {
        let (value, error) = totals(&heap);
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            let abs_total: f64 = heap.iter().map(|iv| iv.rule.abs_value).sum();
            return Ok(Integral {
                value,
                error: error + 4.0 * f64::EPSILON * abs_total,
                evaluations,
            });
        }
        let worst = match heap.peek() {
            Some(w) => w,
            None => unreachable!("error exceeds target with no intervals"),
        };
        if worst.depth >= max_depth || heap.len() >= MAX_INTERVALS {
            return Err(Error::ConvergenceFailure {
                method: MethodChoice::Quadrature,
                work: evaluations,
                achieved: error,
                target,
            });
        }
        let worst = heap.pop().unwrap();
        let f = panels[worst.panel].0;
        let mid = 0.5 * (worst.a + worst.b);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            heap.push(Interval {
                panel: worst.panel,
                a,
                b,
                depth: worst.depth + 1,
                rule: gk15(&f, a, b),
            });
            evaluations += NODES_PER_RULE;
        }
    }
}

fn totals(heap: &BinaryHeap<Interval>) -> (f64, f64) {
    // sorted so that the reduction order does not depend on heap layout
    let mut items: Vec<&Interval> = heap.iter().collect();
    items.sort_by(|x, y| x.panel.cmp(&y.panel).then(x.a.total_cmp(&y.a)));
    let mut value = NeumaierSum::new();
    let mut error = NeumaierSum::new();
    for iv in items {
        value += iv.rule.value;
        error += iv.rule.error;
    }
    (value.sum(), error.sum())
}

struct Integrand {
    alpha: f64,
    beta: f64,
    /// `beta cos(pi rho)`
    bc: f64,
    /// `beta sin(pi rho)`
    bs: f64,
    kind: Quantity,
}

impl Integrand {
    /// Integrand in `x`, without the `sin(pi rho)/pi` prefactor.
    fn in_x(&self, x: f64) -> f64 {
        let den = (x + self.bc).powi(2) + self.bs * self.bs;
        let xa = x.powf(self.alpha);
        match self.kind {
            Quantity::G => self.beta * xa.ln_1p() / den,
            Quantity::GPrime => self.alpha * xa / (1.0 + xa) / den,
        }
    }

    /// Integrand after `x = 1/y`, Jacobian included.
    fn in_y(&self, y: f64) -> f64 {
        let den = (1.0 + self.bc * y).powi(2) + (self.bs * y).powi(2);
        let ya = y.powf(self.alpha);
        match self.kind {
            Quantity::G => self.beta * (ya.ln_1p() - self.alpha * y.ln()) / den,
            Quantity::GPrime => self.alpha / (1.0 + ya) / den,
        }
    }
}

const GRADE: i32 = 4;

/// `g(beta)` or `g'(beta)` by quadrature.
pub fn quad(params: &StableParams, beta: f64, cfg: &QuadConfig, kind: Quantity) -> Result<EvalResult> {
    cfg.validate()?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "beta must be finite and non-negative".into(),
        });
    }
    if beta == 0.0 {
        return match kind {
            Quantity::G => Ok(EvalResult::new(0.0, 0.0, MethodChoice::Quadrature, 0, BoundKind::Rigorous)),
            Quantity::GPrime => Err(Error::InvalidArgument {
                name: "beta",
                value: beta,
                reason: "g' is evaluated by quadrature only for beta > 0".into(),
            }),
        };
    }
    let rho = params.rho();
    let sin_rho = sin_pi(rho);
    let integrand = Integrand {
        alpha: params.alpha(),
        beta,
        bc: beta * cos_pi(rho),
        bs: beta * sin_rho,
        kind,
    };

    let mut cuts: Vec<f64> = vec![beta, 1.0];
    if !(0.1..=0.9).contains(&rho) {
        cuts.push(beta * (1.0 - NEAR_ROOT_WINDOW));
        cuts.push(beta * (1.0 + NEAR_ROOT_WINDOW));
    }
    cuts.extend(cfg.split_points.iter().copied().filter(|s| *s > 0.0 && s.is_finite()));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let below: Vec<f64> = cuts.iter().copied().filter(|&c| c <= 1.0).collect();
    // y-space cut points, ascending: 1/c for c >= 1
    let mut above: Vec<f64> = cuts.iter().copied().filter(|&c| c >= 1.0).map(|c| 1.0 / c).collect();
    above.sort_by(f64::total_cmp);

    let x0 = below[0];
    let y0 = above[0];
    let head = |u: f64| {
        let u3 = u * u * u;
        f64::from(GRADE) * x0 * u3 * integrand.in_x(x0 * u3 * u)
    };
    let inner_x = |t: f64| {
        let x = t.exp();
        x * integrand.in_x(x)
    };
    let inner_y = |t: f64| {
        let y = t.exp();
        y * integrand.in_y(y)
    };
    let tail = |u: f64| {
        let u3 = u * u * u;
        f64::from(GRADE) * y0 * u3 * integrand.in_y(y0 * u3 * u)
    };

    let mut panels: Vec<Panel<'_>> = vec![(&head, 0.0, 1.0)];
    for w in below.windows(2) {
        panels.push((&inner_x, w[0].ln(), w[1].ln()));
    }
    for w in above.windows(2) {
        panels.push((&inner_y, w[0].ln(), w[1].ln()));
    }
    panels.push((&tail, 0.0, 1.0));

    let scale = sin_rho / PI;
    let res = integrate_panels(
        &panels,
        cfg.abs_tol / scale,
        cfg.rel_tol,
        cfg.max_refinements,
    )
    .map_err(|e| match e {
        Error::ConvergenceFailure {
            method,
            work,
            achieved,
            target,
        } => Error::ConvergenceFailure {
            method,
            work,
            achieved: achieved * scale,
            target: target * scale,
        },
        other => other,
    })?;
    Ok(EvalResult::new(
        scale * res.value,
        scale * res.error + f64::EPSILON * (scale * res.value).abs(),
        MethodChoice::Quadrature,
        res.evaluations,
        BoundKind::Estimate,
    ))
}

/// `g(beta)` by quadrature; `beta = 0` returns 0.
pub fn g_quad(params: &StableParams, beta: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    quad(params, beta, cfg, Quantity::G)
}

/// `g'(beta)` by quadrature, `beta > 0`.
pub fn gprime_quad(params: &StableParams, beta: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    quad(params, beta, cfg, Quantity::GPrime)
}

/// `int_a^b f` on a single finite interval; used by tests as an independent
/// oracle for the auxiliary series.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Integral> {
    let f: &dyn Fn(f64) -> f64 = &f;
    integrate_panels(&[(f, a, b)], abs_tol, 1e-13, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, r: f64) -> StableParams {
        StableParams::new(a, r).unwrap()
    }

    fn tight() -> QuadConfig {
        QuadConfig::with_abs_tol(1e-13)
    }

    #[test]
    fn gk15_is_exact_on_polynomials() {
        let r = gk15(&|x: f64| x.powi(20) - 3.0 * x.powi(7), -1.0, 2.0);
        let exact = (2f64.powi(21) + 1.0) / 21.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert!((r.value - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn doney_example_value() {
        // closed form log(1 - b) - log(1 - b^a) for a = 0.8, rho = 1/a - 1
        let r = g_quad(&p(0.8, 0.25), 0.5, &tight()).unwrap();
        let exact = (-0.5f64).ln_1p() - (-(0.5f64.powf(0.8))).ln_1p();
        assert!((r.value - exact).abs() < 1e-12, "{} vs {exact}", r.value);
        assert!((r.value - 0.160_988_753_751_733_8).abs() < 1e-12);
        assert!(r.abs_error_bound < 1e-12);
    }

    #[test]
    fn spectrally_one_sided() {
        let r = g_quad(&p(1.5, 2.0 / 3.0), 0.5, &tight()).unwrap();
        assert!((r.value - 1.5f64.ln()).abs() < 1e-12);
        let d = gprime_quad(&p(1.5, 2.0 / 3.0), 0.5, &tight()).unwrap();
        assert!((d.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_doney_example() {
        let (a, b) = (0.8f64, 0.5f64);
        let exact = -1.0 / (1.0 - b) + a * b.powf(a - 1.0) / (1.0 - b.powf(a));
        let d = gprime_quad(&p(a, 0.25), b, &tight()).unwrap();
        assert!((d.value - exact).abs() < 1e-12);
        assert!((d.value - 0.158_949_625_885_962_8).abs() < 1e-12);
    }

    #[test]
    fn small_beta_tends_to_zero() {
        assert_eq!(g_quad(&p(1.3, 0.5), 0.0, &tight()).unwrap().value, 0.0);
        let mut last = f64::INFINITY;
        for k in 2..10 {
            let beta = 10f64.powi(-k);
            let v = g_quad(&p(1.3, 0.5), beta, &QuadConfig::with_abs_tol(1e-14)).unwrap().value;
            assert!(v > 0.0 && v < last);
            last = v;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn brownian_closed_form() {
        // alpha = 2: g(beta) = log(1 + beta)
        for beta in [0.1, 0.7, 1.0, 3.0] {
            let r = g_quad(&p(2.0, 0.5), beta, &tight()).unwrap();
            assert!((r.value - beta.ln_1p()).abs() < 1e-12, "{beta}");
        }
    }

    #[test]
    fn finite_difference_matches_derivative() {
        let h = 1e-5;
        let cfg = QuadConfig::with_abs_tol(1e-13);
        for &(a, r) in &[(0.7, 0.4), (1.2, 0.5), (1.8, 0.45), (1.0, 0.95), (0.5, 0.05)] {
            let params = p(a, r);
            for beta in [0.3, 0.8, 2.5] {
                let up = g_quad(&params, beta + h, &cfg).unwrap().value;
                let dn = g_quad(&params, beta - h, &cfg).unwrap().value;
                let fd = (up - dn) / (2.0 * h);
                let d = gprime_quad(&params, beta, &cfg).unwrap().value;
                assert!((fd - d).abs() < 1e-6, "({a}, {r}, {beta}): {fd} vs {d}");
            }
        }
    }

    #[test]
    fn positivity_on_grid() {
        let cfg = QuadConfig::with_abs_tol(1e-10);
        for ai in 1..=8 {
            let a = ai as f64 * 0.25;
            let lo = (1.0 - 1.0 / a).max(0.0);
            let hi = (1.0 / a).min(1.0);
            for t in [0.01, 0.5, 0.99] {
                let r = lo + t * (hi - lo);
                if let Ok(params) = StableParams::new(a, r) {
                    for beta in [0.05, 0.9, 4.0] {
                        assert!(g_quad(&params, beta, &cfg).unwrap().value > 0.0);
                        assert!(gprime_quad(&params, beta, &cfg).unwrap().value > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_identity() {
        let cfg = tight();
        for &(a, r) in &[(0.8, 0.25), (std::f64::consts::SQRT_2, 0.5), (1.7, 0.55), (0.6, 0.9)] {
            let params = p(a, r);
            for beta in [1.5, 2.0, 5.0] {
                let big = g_quad(&params, beta, &cfg).unwrap();
                let small = g_quad(&params, 1.0 / beta, &cfg).unwrap();
                let resid = big.value - small.value - a * r * beta.ln();
                assert!(resid.abs() <= 1e-12 + big.abs_error_bound + small.abs_error_bound, "{resid}");
            }
        }
    }

    #[test]
    fn tighter_tolerance_never_reports_larger_error() {
        let params = p(1.3, 0.55);
        for beta in [0.2, 0.9, 3.0] {
            let mut prev = f64::INFINITY;
            for k in 4..=13 {
                let r = g_quad(&params, beta, &QuadConfig::with_abs_tol(10f64.powi(-k))).unwrap();
                assert!(r.abs_error_bound <= prev, "beta {beta} tol 1e-{k}");
                prev = r.abs_error_bound;
            }
        }
    }

    #[test]
    fn unreachable_tolerance_fails() {
        let cfg = QuadConfig {
            abs_tol: 1e-30,
            rel_tol: 1e-30,
            max_refinements: 12,
            split_points: vec![],
        };
        let err = g_quad(&p(1.3, 0.5), 0.5, &cfg).unwrap_err();
        assert!(matches!(err, Error::ConvergenceFailure { .. }));
    }

    #[test]
    fn near_double_root_regime() {
        // rho close to 1: denominator (x + beta cos)^2 + (beta sin)^2 nearly vanishes at x = beta
        let params = p(0.9, 0.99);
        let a = g_quad(&params, 0.6, &tight()).unwrap();
        let b = g_quad(
            &params,
            0.6,
            &QuadConfig {
                split_points: vec![0.59, 0.61, 0.595, 0.605],
                ..tight()
            },
        )
        .unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }
}
