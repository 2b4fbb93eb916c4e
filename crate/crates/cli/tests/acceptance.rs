//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The process fails only on unexpected failures. Criteria listed in
//! `KNOWN_UNATTAINABLE` are still evaluated and printed, together with the
//! reason they cannot pass in double precision or as literally stated.

use std::f64::consts::{PI, SQRT_2};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_ladder::diophantine::{cf_expand, classify_at};
use stable_ladder::kappa::{evaluate, g_any_beta};
use stable_ladder::quadrature::{g_quad, gprime_quad, QuadConfig};
use stable_ladder::series::{
    aux_int0b, aux_intbinfty, g_series, gprime_series, kernel_poisson, kernel_tmp1, kernel_tmp2, kernel_tmp3,
};
use stable_ladder::special::{find_doney_case, g_doney, gprime_half_closed, gprime_rational, RationalAlpha, DONEY_K_MAX};
use stable_ladder::{exit_transform, kappa, kappa_with, KappaQuery, MethodChoice, Quantity, StableParams, Tolerance};

const KNOWN_UNATTAINABLE: [(&str, &str); 2] = [
    (
        "C4-literal",
        "the printed closed form for alpha = 1/2 has wrong signs and a wrong log coefficient; \
         the sums it is derived from give the expression checked in C4",
    ),
    (
        "C5-threshold",
        "the gap to the rational limit decays like 1/j; at j = 40 it is about 0.014, \
         so the 1e-2 threshold first holds near j = 56",
    ),
];

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, title: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome {
        id,
        title,
        pass,
        detail,
    }
}

fn irrationals() -> [f64; 3] {
    [SQRT_2, 3f64.sqrt(), 2.0 - SQRT_2]
}

fn rho_grid(alpha: f64) -> Vec<f64> {
    let lo = (1.0 - 1.0 / alpha).max(0.0);
    let hi = (1.0 / alpha).min(1.0);
    [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|t| lo + t * (hi - lo)).collect()
}

fn beta_grid() -> Vec<f64> {
    (1..=9).map(|i| f64::from(i) / 10.0).collect()
}

fn c1() -> Outcome {
    let tol = Tolerance::with_abs_tol(1e-11);
    let cfg = QuadConfig::with_abs_tol(1e-11);
    let (mut worst, mut count, mut errors) = (f64::NEG_INFINITY, 0, Vec::new());
    for alpha in irrationals() {
        for rho in rho_grid(alpha) {
            let params = StableParams::new(alpha, rho).unwrap();
            for beta in beta_grid() {
                let run = || -> stable_ladder::Result<(f64, f64)> {
                    let class = classify_at(alpha, beta, &tol)?;
                    let s = g_series(&params, beta, &tol, &class)?;
                    let q = g_quad(&params, beta, &cfg)?;
                    let ds = gprime_series(&params, beta, &tol, &class)?;
                    let dq = gprime_quad(&params, beta, &cfg)?;
                    let excess_g = (s.value - q.value).abs() - (1e-8 + s.error_bound() + q.abs_error_bound);
                    let excess_d = (ds.value - dq.value).abs() - (1e-8 + ds.error_bound() + dq.abs_error_bound);
                    Ok((excess_g, excess_d))
                };
                match run() {
                    Ok((eg, ed)) => {
                        worst = worst.max(eg.max(ed));
                        if eg > 0.0 || ed > 0.0 {
                            errors.push(format!("({alpha}, {rho}, {beta})"));
                        }
                    }
                    Err(e) => errors.push(format!("({alpha}, {rho}, {beta}): {e}")),
                }
                count += 1;
            }
        }
    }
    outcome(
        "C1",
        "series vs quadrature on quadratic irrationals, g and g'",
        errors.is_empty(),
        format!("{count} points, worst |delta| - (1e-8 + bounds) = {worst:.2e} (must be <= 0); failures: {errors:?}"),
    )
}

fn c2() -> Outcome {
    let tol = Tolerance::with_abs_tol(1e-12);
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for alpha in [0.6, 0.75, 0.9] {
        let params = StableParams::new(alpha, 1.0 / alpha - 1.0).unwrap();
        let case = match find_doney_case(&params, DONEY_K_MAX) {
            Ok(Some(c)) => c,
            other => {
                errors.push(format!("alpha {alpha}: no unit case ({other:?})"));
                continue;
            }
        };
        for beta in beta_grid() {
            let exact = (-beta).ln_1p() - (-beta.powf(alpha)).ln_1p();
            let values = [
                ("doney", g_doney(&params, beta, case)),
                ("quadrature", evaluate(&params, beta, MethodChoice::Quadrature, &tol, Quantity::G)),
                ("series", evaluate(&params, beta, MethodChoice::Series, &tol, Quantity::G)),
            ];
            for (name, v) in values {
                match v {
                    Ok(r) => {
                        let gap = (r.value - exact).abs();
                        worst = worst.max(gap);
                        if gap > 1e-10 {
                            errors.push(format!("{name} at ({alpha}, {beta}): {gap:.2e}"));
                        }
                    }
                    Err(e) => errors.push(format!("{name} at ({alpha}, {beta}): {e}")),
                }
            }
        }
    }
    outcome(
        "C2",
        "unit Doney case: quadrature, series and closed form",
        errors.is_empty(),
        format!("max gap {worst:.2e} (allowed 1e-10); failures: {errors:?}"),
    )
}

fn c3() -> Outcome {
    let tol = Tolerance::with_abs_tol(1e-12);
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for alpha in [1.25, 1.5, 1.9] {
        let params = StableParams::new(alpha, 1.0 / alpha).unwrap();
        for beta in [0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 2.0, 10.0] {
            for method in [MethodChoice::Auto, MethodChoice::Series, MethodChoice::Quadrature] {
                // the power series has no value at beta = 1, which reflection maps to itself
                if method == MethodChoice::Series && beta == 1.0 {
                    continue;
                }
                match g_any_beta(&params, beta, method, &tol) {
                    Ok(r) => {
                        let gap = (r.value - beta.ln_1p()).abs();
                        worst = worst.max(gap);
                        if gap > 1e-10 {
                            errors.push(format!("{method} ({alpha}, {beta}): {gap:.2e}"));
                        }
                    }
                    Err(e) => errors.push(format!("{method} ({alpha}, {beta}): {e}")),
                }
            }
        }
    }
    outcome(
        "C3",
        "one-sided case equals log(1 + beta)",
        errors.is_empty(),
        format!("max gap {worst:.2e} (allowed 1e-10); failures: {errors:?}"),
    )
}

/// The closed form for `alpha = 1/2` exactly as printed.
fn half_display(rho: f64, beta: f64) -> f64 {
    let num = (1.0 + beta) * (PI * rho / 2.0).cos() / (2.0 * beta.sqrt())
        - rho * (beta + (PI * rho).cos()) / 2.0
        - beta.ln() * (PI * rho).sin() / PI;
    num / (beta * beta + 2.0 * beta * (PI * rho).cos() + 1.0)
}

fn c4(literal: bool) -> Outcome {
    let tol = Tolerance::with_abs_tol(1e-12);
    let half = RationalAlpha::new(1, 2).unwrap();
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for rho in [0.2, 0.5, 0.8] {
        for beta in beta_grid() {
            let closed = if literal {
                Ok(half_display(rho, beta))
            } else {
                gprime_half_closed(rho, beta)
            };
            match (gprime_rational(half, rho, beta, &tol), closed) {
                (Ok(r), Ok(c)) => {
                    let gap = (r.value - c).abs();
                    worst = worst.max(gap);
                    if gap > 1e-9 {
                        errors.push(format!("({rho}, {beta})"));
                    }
                }
                (Err(e), _) | (_, Err(e)) => errors.push(format!("({rho}, {beta}): {e}")),
            }
        }
    }
    let (id, title) = if literal {
        ("C4-literal", "alpha = 1/2: rational formula vs the closed form as printed")
    } else {
        ("C4", "alpha = 1/2: rational formula vs the closed form")
    };
    outcome(
        id,
        title,
        errors.is_empty(),
        format!("max gap {worst:.2e} (allowed 1e-9); {} of 27 points off", errors.len()),
    )
}

fn limit_gap(j: f64, rational: f64, tol: &Tolerance) -> stable_ladder::Result<f64> {
    let alpha = 0.5 + SQRT_2 / j;
    let params = StableParams::new(alpha, 0.5)?;
    let class = classify_at(alpha, 0.4, tol)?;
    let s = gprime_series(&params, 0.4, tol, &class)?;
    Ok((s.value - rational).abs())
}

fn c5() -> Vec<Outcome> {
    let tol = Tolerance::with_abs_tol(1e-12);
    let half = RationalAlpha::new(1, 2).unwrap();
    let gaps = gprime_rational(half, 0.5, 0.4, &tol)
        .and_then(|r| Ok((limit_gap(10.0, r.value, &tol)?, limit_gap(40.0, r.value, &tol)?)));
    match gaps {
        Ok((g10, g40)) => vec![
            outcome(
                "C5",
                "limit alpha_j -> 1/2: error at j = 40 below error at j = 10",
                g40 < g10,
                format!("gap(10) = {g10:.4e}, gap(40) = {g40:.4e}"),
            ),
            outcome(
                "C5-threshold",
                "limit alpha_j -> 1/2: error at j = 40 below 1e-2",
                g40 < 1e-2,
                format!("gap(40) = {g40:.4e}"),
            ),
        ],
        Err(e) => vec![outcome("C5", "limit alpha_j -> 1/2", false, e.to_string())],
    }
}

fn c6() -> Outcome {
    let tol = Tolerance::with_abs_tol(1e-13);
    let checks = [
        aux_int0b(1.0, 0.5, &tol).map(|r| (r.value - (0.5 - 1.5f64.ln())).abs()),
        aux_intbinfty(0.5, 1.0, &tol).map(|r| (r.value - PI / 2.0).abs()),
        aux_intbinfty(1.0, 0.5, &tol).map(|r| (r.value - 3f64.ln()).abs()),
    ];
    let gaps: Vec<String> = checks
        .iter()
        .map(|c| match c {
            Ok(g) => format!("{g:.2e}"),
            Err(e) => e.to_string(),
        })
        .collect();
    let pass = checks.iter().all(|c| matches!(c, Ok(g) if *g <= 1e-10));
    outcome("C6", "auxiliary integrals vs antiderivatives", pass, format!("gaps {gaps:?} (allowed 1e-10)"))
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut notes = Vec::new();
    let mut pass = true;

    let mut worst_finite = 0.0f64;
    for _ in 0..100 {
        let p = rng.gen_range(-1.0..1.0);
        let x = rng.gen_range(-PI..PI);
        let n = rng.gen_range(1..200);
        match kernel_tmp3(p, x, n) {
            Ok(r) => worst_finite = worst_finite.max(r.gap()),
            Err(e) => {
                pass = false;
                notes.push(e.to_string());
            }
        }
    }
    pass &= worst_finite <= 1e-12;
    notes.push(format!("finite identity max gap {worst_finite:.2e}"));

    let mut worst_poisson = 0.0f64;
    for _ in 0..20 {
        let x: f64 = rng.gen_range(-0.9..0.9);
        let z = rng.gen_range(-PI..PI);
        let m = ((1e-13 * (1.0 - x.abs())).ln() / x.abs().ln()).ceil().max(1.0) as usize;
        match kernel_poisson(x, z, m) {
            Ok(r) => {
                pass &= r.envelope < 1e-12;
                worst_poisson = worst_poisson.max(r.gap());
            }
            Err(e) => {
                pass = false;
                notes.push(e.to_string());
            }
        }
    }
    pass &= worst_poisson <= 1e-12;
    notes.push(format!("Poisson kernel max gap {worst_poisson:.2e}"));

    let mut within = 0;
    let mut total = 0;
    for _ in 0..10 {
        let z = rng.gen_range(-3.0..3.0);
        let w = rng.gen_range(0.05..4.0f64);
        if (w - w.round()).abs() < 1e-3 {
            continue;
        }
        for r in [kernel_tmp1(z, w, 100_000), kernel_tmp2(z.clamp(-2.9, 2.9) + 0.013, 100_000)] {
            total += 1;
            match r {
                Ok(r) if r.gap() <= r.envelope => within += 1,
                Ok(_) => pass = false,
                Err(e) => {
                    pass = false;
                    notes.push(e.to_string());
                }
            }
        }
    }
    notes.push(format!("{within} of {total} truncated kernels within envelope at M = 1e5"));
    outcome("C7", "identity kernels", pass, notes.join("; "))
}

fn c8() -> Outcome {
    let tol = Tolerance::with_abs_tol(1e-11);
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for alpha in irrationals() {
        for rho in rho_grid(alpha) {
            let params = StableParams::new(alpha, rho).unwrap();
            for beta in [1.5, 2.0, 5.0] {
                let r = g_any_beta(&params, beta, MethodChoice::Quadrature, &tol).and_then(|big| {
                    let small = g_any_beta(&params, 1.0 / beta, MethodChoice::Series, &tol)?;
                    let resid = (big.value - small.value - alpha * rho * beta.ln()).abs();
                    Ok((resid, 1e-9 + big.abs_error_bound + small.abs_error_bound))
                });
                match r {
                    Ok((resid, allowed)) => {
                        worst = worst.max(resid);
                        if resid > allowed {
                            errors.push(format!("({alpha}, {rho}, {beta})"));
                        }
                    }
                    Err(e) => errors.push(e.to_string()),
                }
            }
        }
    }
    outcome(
        "C8",
        "reflection g(beta) - g(1/beta) = alpha rho log beta",
        errors.is_empty(),
        format!("max residual {worst:.2e} (allowed 1e-9 + bounds); failures: {errors:?}"),
    )
}

fn c9() -> Outcome {
    // distance from m sqrt2 to the nearest integer n, exactly: |2m^2 - n^2| / (m sqrt2 + n)
    let mut worst_ratio = f64::INFINITY;
    for m in 1..=100_000u64 {
        let n = (m as f64 * SQRT_2).round() as u64;
        let num = (2 * m * m).abs_diff(n * n) as f64;
        let dist = num / (m as f64 * SQRT_2 + n as f64);
        let s = (PI * dist).sin();
        worst_ratio = worst_ratio.min(s * 2.0 * m as f64);
    }
    let bound_ok = worst_ratio >= 1.0;

    // convergents of sqrt2 by exact integer recurrence
    let mut exact = vec![(1u64, 1u64)];
    while exact.len() < 20 {
        let (p, q) = *exact.last().unwrap();
        exact.push((p + 2 * q, p + q));
    }
    let cf = cf_expand(SQRT_2, 64);
    let (first_five, agreeing) = match &cf {
        Ok(cf) => (
            cf.convergents.len() >= 5 && cf.convergents[..5] == exact[..5],
            cf.convergents.iter().zip(&exact).take_while(|(a, b)| a == b).count(),
        ),
        Err(_) => (false, 0),
    };
    outcome(
        "C9",
        "small-divisor bound for sqrt2 and its convergents",
        bound_ok && first_five,
        format!(
            "min 2m|sin(m pi sqrt2)| over m <= 1e5 = {worst_ratio:.6}; \
             first five convergents exact: {first_five}; {agreeing} convergents agree with the exact sequence"
        ),
    )
}

fn c10() -> Outcome {
    let tol = Tolerance::with_abs_tol(1e-11);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut notes = Vec::new();
    let (mut zero_ok, mut sym_ok, mut scale_ok) = (true, true, true);
    let mut worst_scale = 0.0f64;
    for _ in 0..40 {
        let alpha: f64 = rng.gen_range(0.1..2.0);
        let t: f64 = rng.gen_range(0.05..0.95);
        let lo = (1.0 - 1.0 / alpha).max(0.0);
        let hi = (1.0f64 / alpha).min(1.0);
        let params = StableParams::new(alpha, lo + t * (hi - lo)).unwrap();
        let gamma = rng.gen_range(0.1..10.0f64);
        let beta = rng.gen_range(0.0..5.0);

        match kappa(&params, KappaQuery::new(gamma, 0.0).unwrap(), &tol) {
            Ok(r) => zero_ok &= r.value == gamma.powf(params.rho()),
            Err(_) => zero_ok = false,
        }

        let (eta, theta) = (rng.gen_range(0.1..5.0), rng.gen_range(0.0..5.0));
        let a = exit_transform(&params, eta, gamma, theta, MethodChoice::Auto, &tol);
        let b = exit_transform(&params, eta, theta, gamma, MethodChoice::Auto, &tol);
        sym_ok &= matches!((a, b), (Ok(a), Ok(b)) if a.value == b.value);

        let scaled = beta * gamma.powf(-1.0 / alpha);
        let lhs = kappa(&params, KappaQuery::new(gamma, beta).unwrap(), &tol);
        let rhs = kappa_with(&params, KappaQuery::new(1.0, scaled).unwrap(), MethodChoice::Quadrature, &tol);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                let r = gamma.powf(params.rho()) * r.value;
                let rel = (l.value - r).abs() / r.max(1.0);
                worst_scale = worst_scale.max(rel);
                scale_ok &= rel <= 1e-8;
            }
            (Err(e), _) | (_, Err(e)) => {
                scale_ok = false;
                notes.push(e.to_string());
            }
        }
    }
    notes.insert(
        0,
        format!("kappa(gamma, 0) exact: {zero_ok}; transform symmetric: {sym_ok}; scaling gap {worst_scale:.2e} (allowed 1e-8)"),
    );
    outcome("C10", "kappa layer identities", zero_ok && sym_ok && scale_ok, notes.join("; "))
}

fn c11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_stable-ladder");
    let run = |args: &[&str]| Command::new(bin).args(args).output();
    let compare = ["compare", "--alpha", "1.4142135623730951", "--rho", "0.5", "--beta", "0.3"];
    let bad = ["eval", "--alpha", "0.5", "--rho", "1.0", "--beta", "0.5"];
    type Codes = (Option<i32>, Option<i32>, Option<i32>, bool);
    let outcome_of = || -> std::io::Result<Codes> {
        let c1 = run(&compare)?;
        let c2 = run(&compare)?;
        let e = run(&bad)?;
        let s = run(&["selftest"])?;
        let t1 = run(&["table", "--alpha", "0.7", "--rho", "0.4", "--from", "0.1", "--to", "3", "--steps", "12", "--format", "csv"])?;
        let t2 = run(&["table", "--alpha", "0.7", "--rho", "0.4", "--from", "0.1", "--to", "3", "--steps", "12", "--format", "csv"])?;
        let identical = c1.stdout == c2.stdout && t1.stdout == t2.stdout && !c1.stdout.is_empty();
        Ok((c1.status.code(), e.status.code(), s.status.code(), identical))
    };
    match outcome_of() {
        Ok((compare_code, eval_code, self_code, identical)) => outcome(
            "C11",
            "command line: compare, invalid eval, selftest, determinism",
            compare_code == Some(0) && eval_code == Some(1) && self_code == Some(0) && identical,
            format!(
                "compare exit {compare_code:?}, eval rho=1 exit {eval_code:?}, selftest exit {self_code:?}, byte-identical {identical}"
            ),
        ),
        Err(e) => outcome("C11", "command line", false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results = vec![c1(), c2(), c3(), c4(false), c4(true)];
    results.extend(c5());
    results.extend([c6(), c7(), c8(), c9(), c10(), c11()]);

    let mut unexpected = 0;
    for r in &results {
        let known = KNOWN_UNATTAINABLE.iter().find(|(id, _)| *id == r.id);
        let tag = match (r.pass, known) {
            (true, _) => "PASS",
            (false, Some(_)) => "FAIL (known)",
            (false, None) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("[{tag}] {:<13} {}: {}", r.id, r.title, r.detail);
    }
    println!();
    for (id, reason) in KNOWN_UNATTAINABLE {
        println!("known unattainable {id}: {reason}");
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!(
        "{passed} of {} criteria passed, {unexpected} unexpected failures, {:.1} s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
