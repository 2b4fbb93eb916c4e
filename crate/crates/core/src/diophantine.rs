//! Continued fractions, irrationality-exponent estimates and small-divisor
//! conditioning of the stability index.
//!
//! A double is always rational, so none of this certifies number-theoretic
//! membership. [`classify`] answers a narrower question: is `alpha` an exact
//! small-denominator rational, and if not, can the power series in `beta` be
//! summed to the requested tolerance within the term budget and without the
//! small divisors `sin(m pi / alpha)`, `sin(k pi alpha)` destroying the result
//! through cancellation?

use crate::error::{Error, Result};
use crate::params::Tolerance;
use crate::reduce::TwoTerm;

/// Largest denominator reported as [`AlphaKind::Rational`].
pub const RATIONAL_MAX_DENOMINATOR: u64 = 1_000_000;

/// Number of indices over which the divisor floor constant is calibrated.
pub const PROFILE_CALIBRATION: usize = 2048;

/// Partial quotients requested by [`classify`].
pub const CLASSIFY_CF_TERMS: usize = 64;

/// `beta` used by [`classify`] when the caller does not supply one.
pub const REFERENCE_BETA: f64 = 0.9;

const EXACT_LIMIT: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    /// `[a0; a1, a2, ...]`; only `a0` may be zero.
    pub quotients: Vec<u64>,
    /// Convergents `p_k / q_k`, one per quotient.
    pub convergents: Vec<(u64, u64)>,
    /// The last convergent reproduces the input to working precision.
    pub terminated: bool,
}

impl ContinuedFraction {
    pub fn last(&self) -> (u64, u64) {
        *self.convergents.last().expect("at least one convergent")
    }
}

/// Expands `x > 0` into a continued fraction.
///
/// Quotients are derived from the exact residuals `q_k x - p_k` (one rounding
/// each, via fused multiply-add) rather than by iterating `1/(x - a)`, so the
/// expansion is that of the double `x` itself. Stops after `max_terms`
/// quotients, when the residual drops below four machine epsilons of `x q_k`,
/// or when the next convergent would leave the exactly representable range.
pub fn cf_expand(x: f64, max_terms: usize) -> Result<ContinuedFraction> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument {
            name: "x",
            value: x,
            reason: "continued fractions need a positive finite input".into(),
        });
    }
    if max_terms == 0 {
        return Err(Error::InvalidArgument {
            name: "max_terms",
            value: 0.0,
            reason: "must be at least 1".into(),
        });
    }
    let a0 = x.floor();
    if a0 >= EXACT_LIMIT as f64 {
        return Err(Error::InvalidArgument {
            name: "x",
            value: x,
            reason: "too large for exact convergents".into(),
        });
    }
    let a0 = a0 as u64;
    let mut quotients = vec![a0];
    let mut convergents = vec![(a0, 1u64)];
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let mut r_prev = -1.0f64;
    let mut terminated = false;

    loop {
        let (p, q) = *convergents.last().unwrap();
        let r = (q as f64).mul_add(x, -(p as f64));
        if r == 0.0 || r.abs() <= 4.0 * f64::EPSILON * x * q as f64 {
            terminated = true;
            break;
        }
        if quotients.len() >= max_terms {
            break;
        }
        let ratio = -r_prev / r;
        if !ratio.is_finite() || ratio >= EXACT_LIMIT as f64 {
            break;
        }
        let a = ratio.floor().max(1.0) as u64;
        let next = a
            .checked_mul(p)
            .and_then(|v| v.checked_add(p_prev))
            .zip(a.checked_mul(q).and_then(|v| v.checked_add(q_prev)));
        match next {
            Some((pn, qn)) if pn < EXACT_LIMIT && qn < EXACT_LIMIT => {
                quotients.push(a);
                convergents.push((pn, qn));
                p_prev = p;
                q_prev = q;
                r_prev = r;
            }
            _ => break,
        }
    }

    Ok(ContinuedFraction {
        quotients,
        convergents,
        terminated,
    })
}

/// Denominators below this carry no asymptotic information about the
/// approximation exponent and are skipped when larger ones exist.
const EXPONENT_MIN_DENOMINATOR: u64 = 10;

/// Estimates the irrationality exponent `N` in `|x - p/q| > c / q^N` from the
/// growth of convergent denominators: `1 + ln q_{k+1} / ln q_k`, maximised
/// over consecutive pairs and clamped below at 2.
pub fn estimate_exponent(cf: &ContinuedFraction) -> Result<f64> {
    let n = cf.convergents.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, have: n });
    }
    let qs: Vec<u64> = cf.convergents.iter().map(|&(_, q)| q).collect();
    let ratio_max = |min_q: u64| {
        qs.windows(2)
            .filter(|w| w[0] >= min_q && w[1] > w[0])
            .map(|w| 1.0 + (w[1] as f64).ln() / (w[0] as f64).ln())
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    };
    let est = ratio_max(EXPONENT_MIN_DENOMINATOR)
        .or_else(|| ratio_max(2))
        .unwrap_or(2.0);
    Ok(est.max(2.0))
}

/// `min_{1 <= m <= big_m} |sin(m pi x)|`.
pub fn min_abs_sin(x: f64, big_m: usize) -> f64 {
    min_abs_sin_at(TwoTerm::new(x), big_m).0
}

/// Like [`min_abs_sin`] for an extended-precision `x`; also returns the
/// minimising index. For `big_m == 0` returns `(1.0, 0)`.
pub fn min_abs_sin_at(x: TwoTerm, big_m: usize) -> (f64, usize) {
    let mut best = (1.0f64, 0usize);
    for m in 1..=big_m {
        let s = x.abs_sin_pi_mul(m as f64);
        if s < best.0 {
            best = (s, m);
        }
    }
    best
}

/// Which small divisor a series term carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divisor {
    /// `sin(m pi / alpha)`, first series.
    Inverse,
    /// `sin(k pi alpha)`, second series.
    Direct,
}

/// Lower envelope `|sin(m pi x)| >= c / m^(N-1)` for `x in {1/alpha, alpha}`.
///
/// `c` is the exact minimum of `|sin(m pi x)| m^(N-1)` over
/// `m <= calibrated_to`; beyond that the envelope rests on the estimated
/// exponent and is heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorProfile {
    pub exponent: f64,
    pub c_inverse: f64,
    pub c_direct: f64,
    pub calibrated_to: usize,
    pub inverse: TwoTerm,
    pub direct: TwoTerm,
}

impl DivisorProfile {
    pub fn new(alpha: f64, exponent: f64, calibrate_to: usize) -> Self {
        let inverse = TwoTerm::recip(alpha);
        let direct = TwoTerm::new(alpha);
        let e = exponent - 1.0;
        let calib = |x: TwoTerm| {
            (1..=calibrate_to)
                .map(|m| {
                    let m = m as f64;
                    x.abs_sin_pi_mul(m).ln() + e * m.ln()
                })
                .fold(f64::INFINITY, f64::min)
                .exp()
        };
        Self {
            exponent,
            c_inverse: calib(inverse),
            c_direct: calib(direct),
            calibrated_to: calibrate_to,
            inverse,
            direct,
        }
    }

    pub fn constant(&self, which: Divisor) -> f64 {
        match which {
            Divisor::Inverse => self.c_inverse,
            Divisor::Direct => self.c_direct,
        }
    }

    /// Lower bound for `|sin(m pi x)|`.
    pub fn floor(&self, which: Divisor, m: f64) -> f64 {
        self.constant(which) * m.powf(1.0 - self.exponent)
    }

    /// Envelope for terms `scale * base^m * m^extra_power / |sin(m pi x)|`.
    pub fn envelope(&self, which: Divisor, ln_base: f64, ln_scale: f64, extra_power: f64) -> TermEnvelope {
        TermEnvelope {
            ln_base,
            ln_scale: ln_scale - self.constant(which).ln(),
            power: extra_power + self.exponent - 1.0,
        }
    }
}

/// Majorant `b(m) = exp(m ln_base + ln_scale) m^power` with `ln_base < 0`,
/// `power >= 0` assumed by [`TermEnvelope::tail_after`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEnvelope {
    pub ln_base: f64,
    pub ln_scale: f64,
    pub power: f64,
}

impl TermEnvelope {
    pub fn bound(&self, m: f64) -> f64 {
        (m * self.ln_base + self.ln_scale + self.power * m.ln()).exp()
    }

    /// Bound on `sum_{m > last} b(m)`, or `None` while the majorant is not yet
    /// geometrically decreasing.
    pub fn tail_after(&self, last: usize) -> Option<f64> {
        let next = (last + 1) as f64;
        let ln_ratio = self.ln_base + self.power.max(0.0) * (1.0 / next).ln_1p();
        if ln_ratio >= 0.0 {
            return None;
        }
        Some(self.bound(next) / -ln_ratio.exp_m1())
    }
}

/// Terms needed and magnitude summed by one series at a given tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub terms: usize,
    pub tail: f64,
    pub majorant_sum: f64,
    pub within_budget: bool,
}

/// Walks the envelope until its tail drops below `budget` or `max_terms` is
/// reached.
pub fn project(env: &TermEnvelope, budget: f64, max_terms: usize) -> Projection {
    let mut sum = 0.0;
    for m in 1..=max_terms {
        sum += env.bound(m as f64);
        if let Some(t) = env.tail_after(m) {
            if t < budget {
                return Projection {
                    terms: m,
                    tail: t,
                    majorant_sum: sum + t,
                    within_budget: true,
                };
            }
        }
    }
    Projection {
        terms: max_terms,
        tail: env.tail_after(max_terms).unwrap_or(f64::INFINITY),
        majorant_sum: sum,
        within_budget: false,
    }
}

/// Rounding error of a compensated sum of terms each carrying a few relative
/// roundings, per unit of `sum |term|`.
pub const ROUNDING_PER_ABS_SUM: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaKind {
    /// `alpha = p / q` in lowest terms.
    Rational { p: u64, q: u64 },
    Irrational { exponent_estimate: f64 },
    /// Projected series work or cancellation exceeds the budget.
    IllConditioned { exponent_estimate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaClass {
    pub alpha: f64,
    pub kind: AlphaKind,
    pub cf: ContinuedFraction,
    /// Absent for rationals, whose resonant divisors vanish.
    pub profile: Option<DivisorProfile>,
    /// Series projections (first, second) at the classification `beta`.
    pub projection: Option<(Projection, Projection)>,
}

impl AlphaClass {
    pub fn is_rational(&self) -> bool {
        matches!(self.kind, AlphaKind::Rational { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            AlphaKind::Rational { .. } => "rational",
            AlphaKind::Irrational { .. } => "irrational",
            AlphaKind::IllConditioned { .. } => "ill-conditioned",
        }
    }
}

/// [`classify_at`] with `beta = REFERENCE_BETA`.
pub fn classify(alpha: f64, tol: &Tolerance) -> Result<AlphaClass> {
    classify_at(alpha, REFERENCE_BETA, tol)
}

/// Classifies `alpha` for series evaluation of `g` at `beta`.
///
/// Rational when the continued fraction terminates at a denominator no larger
/// than [`RATIONAL_MAX_DENOMINATOR`]. Otherwise the divisor profile is
/// calibrated and both series of `g` are projected: ill-conditioned if either
/// needs more than `tol.max_terms` terms or if the summed term majorant times
/// [`ROUNDING_PER_ABS_SUM`] exceeds half the tolerance.
pub fn classify_at(alpha: f64, beta: f64, tol: &Tolerance) -> Result<AlphaClass> {
    let cf = cf_expand(alpha, CLASSIFY_CF_TERMS)?;
    let (p, q) = cf.last();
    if cf.terminated && q <= RATIONAL_MAX_DENOMINATOR {
        return Ok(AlphaClass {
            alpha,
            kind: AlphaKind::Rational { p, q },
            cf,
            profile: None,
            projection: None,
        });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument {
            name: "beta",
            value: beta,
            reason: "classification beta must lie in (0, 1)".into(),
        });
    }
    let exponent = estimate_exponent(&cf).unwrap_or(2.0);
    let profile = DivisorProfile::new(alpha, exponent, PROFILE_CALIBRATION);
    let ln_beta = beta.ln();
    let budget = 0.5 * tol.abs_tol;
    let first = project(
        &profile.envelope(Divisor::Inverse, ln_beta, 0.0, -1.0),
        budget,
        tol.max_terms,
    );
    let second = project(
        &profile.envelope(Divisor::Direct, alpha * ln_beta, 0.0, -1.0),
        budget,
        tol.max_terms,
    );
    let rounding = ROUNDING_PER_ABS_SUM * (first.majorant_sum + second.majorant_sum);
    let ok = first.within_budget && second.within_budget && rounding <= budget;
    let kind = if ok {
        AlphaKind::Irrational {
            exponent_estimate: exponent,
        }
    } else {
        AlphaKind::IllConditioned {
            exponent_estimate: exponent,
        }
    };
    Ok(AlphaClass {
        alpha,
        kind,
        cf,
        profile: Some(profile),
        projection: Some((first, second)),
    })
}
