//! Classical trigonometric series identities, each returned as a partial sum
//! next to its closed form. They double as oracles for the main series.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::reduce::sin_pi;
use crate::sum::NeumaierSum;

/// A partial sum, the closed form it converges to, and a bound on
/// `|partial - closed|` from truncation alone (`inf` when none applies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub partial: f64,
    pub closed: f64,
    pub envelope: f64,
}

impl KernelEval {
    pub fn gap(&self) -> f64 {
        (self.partial - self.closed).abs()
    }
}

fn not_integer(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v == v.round() {
        return Err(Error::InvalidArgument {
            name,
            value: v,
            reason: "must be a finite non-integer".into(),
        });
    }
    Ok(())
}

fn sign(m: usize) -> f64 {
    if m % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `sum_{m=1}^M (-1)^(m+1) m sin(m z) / (m^2 - w^2) = (pi/2) sin(z w) / sin(w pi)`
/// for `|z| < pi`.
///
/// The envelope comes from Abel summation: partial sums of
/// `(-1)^(m+1) sin(m z)` over any window are bounded by `1 / |cos(z/2)|` and
/// `m / (m^2 - w^2)` decreases once `m > |w|`.
pub fn kernel_tmp1(z: f64, w: f64, big_m: usize) -> Result<KernelEval> {
    if !(z.abs() < PI) {
        return Err(Error::InvalidArgument {
            name: "z",
            value: z,
            reason: "must lie in (-pi, pi)".into(),
        });
    }
    not_integer("w", w)?;
    let w2 = w * w;
    let partial: NeumaierSum = (1..=big_m)
        .map(|m| {
            let mf = m as f64;
            sign(m) * mf * (mf * z).sin() / (mf * mf - w2)
        })
        .collect();
    let closed = 0.5 * PI * (z * w).sin() / sin_pi(w);
    let next = (big_m + 1) as f64;
    let envelope = if next > w.abs() {
        next / (next * next - w2) / (0.5 * z).cos().abs()
    } else {
        f64::INFINITY
    };
    Ok(KernelEval {
        partial: partial.sum(),
        closed,
        envelope,
    })
}

/// `1/z - sum_{k=1}^K (-1)^k 2 z / (k^2 - z^2) = pi / sin(pi z)`.
pub fn kernel_tmp2(z: f64, big_k: usize) -> Result<KernelEval> {
    not_integer("z", z)?;
    let z2 = z * z;
    let mut acc = NeumaierSum::new();
    acc += 1.0 / z;
    for k in 1..=big_k {
        let kf = k as f64;
        acc += sign(k) * 2.0 * z / (kf * kf - z2);
    }
    let next = (big_k + 1) as f64;
    let envelope = if next > z.abs() {
        2.0 * z.abs() / (next * next - z2)
    } else {
        f64::INFINITY
    };
    Ok(KernelEval {
        partial: acc.sum(),
        closed: PI / sin_pi(z),
        envelope,
    })
}

/// `sum_{k=1}^{n-1} p^k sin(k x)` against
/// `(p sin x - p^n sin(n x) + p^(n+1) sin((n-1) x)) / (1 - 2 p cos x + p^2)`.
///
/// The denominator is evaluated as `((p - 1) + 2 sin^2(x/2))^2 + sin^2 x`,
/// which keeps its relative accuracy near `p = 1, x = 0`. Where it vanishes
/// the finite sum is identically zero and so is the returned closed form.
pub fn kernel_tmp3(p: f64, x: f64, n: usize) -> Result<KernelEval> {
    if n == 0 {
        return Err(Error::InvalidArgument {
            name: "n",
            value: 0.0,
            reason: "must be at least 1".into(),
        });
    }
    let partial: NeumaierSum = (1..n).map(|k| p.powi(k as i32) * (k as f64 * x).sin()).collect();
    let nf = n as f64;
    let half = (0.5 * x).sin();
    let shifted = (p - 1.0) + 2.0 * half * half;
    let den = shifted * shifted + x.sin().powi(2);
    let num = p * x.sin() - p.powi(n as i32) * (nf * x).sin() + p.powi(n as i32 + 1) * ((nf - 1.0) * x).sin();
    let closed = if den == 0.0 { 0.0 } else { num / den };
    Ok(KernelEval {
        partial: partial.sum(),
        closed,
        envelope: 0.0,
    })
}

/// `sum_{m=0}^M (-1)^m x^m sin((m+1) z) = sin z / (x^2 + 2 x cos z + 1)` for
/// `|x| < 1`, with the geometric envelope `|x|^(M+1) / (1 - |x|)`.
pub fn kernel_poisson(x: f64, z: f64, big_m: usize) -> Result<KernelEval> {
    if !(x.abs() < 1.0) {
        return Err(Error::InvalidArgument {
            name: "x",
            value: x,
            reason: "must satisfy |x| < 1".into(),
        });
    }
    let mut acc = NeumaierSum::new();
    let mut power = 1.0;
    for m in 0..=big_m {
        acc += power * ((m + 1) as f64 * z).sin();
        power *= -x;
    }
    let closed = z.sin() / ((x + z.cos()).powi(2) + z.sin().powi(2));
    Ok(KernelEval {
        partial: acc.sum(),
        closed,
        envelope: x.abs().powi(big_m as i32 + 1) / (1.0 - x.abs()),
    })
}
