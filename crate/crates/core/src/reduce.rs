//! Accurate evaluation of `sin(pi * m * x)` for large integer `m`.
//!
//! Small divisors such as `sin(m pi / alpha)` are only meaningful if `m x` is
//! reduced modulo 2 without losing the low-order bits of `x`. `x` is carried as
//! an unevaluated sum `hi + lo` and the product `m * hi` is split exactly with
//! a fused multiply-add.

use std::f64::consts::PI;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTerm {
    pub hi: f64,
    pub lo: f64,
}

impl TwoTerm {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// `1 / x` to roughly twice working precision.
    pub fn recip(x: f64) -> Self {
        let hi = 1.0 / x;
        let r = (-x).mul_add(hi, 1.0);
        Self { hi, lo: r / x }
    }

    /// Exact product of two doubles.
    pub fn product(a: f64, b: f64) -> Self {
        let hi = a * b;
        let lo = a.mul_add(b, -hi);
        Self { hi, lo }
    }

    /// `self / d` for a double `d`.
    pub fn div_f64(self, d: f64) -> Self {
        let hi = self.hi / d;
        let r = (-hi).mul_add(d, self.hi);
        let lo = (r + self.lo) / d;
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    /// `m * self` reduced modulo 2 into `[-1, 1]`.
    pub fn mul_mod2(&self, m: f64) -> f64 {
        let t = m * self.hi;
        let e = m.mul_add(self.hi, -t);
        let f = reduce_mod2(t) + e + m * self.lo;
        reduce_mod2(f)
    }

    pub fn sin_pi_mul(&self, m: f64) -> f64 {
        sin_pi(self.mul_mod2(m))
    }

    pub fn cos_pi_mul(&self, m: f64) -> f64 {
        cos_pi(self.mul_mod2(m))
    }

    /// `|sin(pi m x)|`, relatively accurate even when tiny.
    pub fn abs_sin_pi_mul(&self, m: f64) -> f64 {
        self.sin_pi_mul(m).abs()
    }
}

/// `t - 2 round(t / 2)`; exact for `|t| < 2^53`.
fn reduce_mod2(t: f64) -> f64 {
    t - 2.0 * (0.5 * t).round()
}

/// `sin(pi x)`, relatively accurate near every zero.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = reduce_mod2(x);
    // sin(pi r) = sin(pi (1 - r)) for r in [1/2, 1]; the subtraction is exact there.
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// `cos(pi x)`, relatively accurate near every zero.
pub fn cos_pi(x: f64) -> f64 {
    let r = reduce_mod2(x).abs();
    if r < 0.25 {
        (PI * r).cos()
    } else {
        sin_pi(0.5 - r)
    }
}
