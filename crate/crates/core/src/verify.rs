//! Runnable verification checks. Each check certifies a concrete coefficient
//! region (growing the internal truncation as needed), compares two
//! independently-computed sides exactly, and reports pass/fail with the
//! first differing coefficient. The CLI `verify` command and the acceptance
//! test suite both run these.

use crate::error::{Result, SeriesError};
use crate::forms::{delta, e2, phi_10_1, theta_sq, wp};
use crate::igusa::{chi10, dt_series, IgusaTable};
use crate::qseries::QSeries;
use crate::rational::{rat, rat_int, Rational};
use crate::theory::{
    dt_imprimitive, quot_series, verify_conjecture_a, CurveClassSpec,
};
use crate::trunc::TruncationSpec;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub region: String,
    pub passed: bool,
    pub checked: u64,
    /// first differing coefficient (or the blocking error) when failed
    pub detail: Option<String>,
    pub millis: u128,
}

pub const CHECK_NAMES: &[&str] = &[
    "eta-oracle",
    "weierstrass",
    "kkv",
    "dt1",
    "yau-zaslow",
    "conjecture-a",
    "lift-symmetry",
    "jacobi-index",
    "multicover-primitive",
    "multiplicativity",
];

/// Run one named check (spec-default region) or the whole battery ("all").
pub fn run_suite(name: &str) -> Option<Vec<CheckReport>> {
    if name == "all" {
        return Some(CHECK_NAMES.iter().map(|n| run_check(n).unwrap()).collect());
    }
    run_check(name).map(|r| vec![r])
}

pub fn run_check(name: &str) -> Option<CheckReport> {
    run_check_params(name, None, None, None)
}

/// Run a named check, overriding its default region where bounds are given
/// (q_max, t_max, p_window — each check uses the ones that apply to it).
pub fn run_check_params(
    name: &str,
    q: Option<i64>,
    t: Option<i64>,
    p: Option<i64>,
) -> Option<CheckReport> {
    Some(match name {
        "eta-oracle" => check_eta_oracle(q.unwrap_or(10)),
        "weierstrass" => check_weierstrass(q.unwrap_or(8), p.unwrap_or(8)),
        "kkv" => check_kkv(q.unwrap_or(8), p.unwrap_or(8)),
        "dt1" => check_dt1(q.unwrap_or(6), p.unwrap_or(8)),
        "yau-zaslow" => check_yau_zaslow(q.unwrap_or(6), p.unwrap_or(8)),
        "conjecture-a" => check_conjecture_a(q.unwrap_or(5), t.unwrap_or(4), p.unwrap_or(8)),
        "lift-symmetry" => check_lift_symmetry(q.unwrap_or(6), p.unwrap_or(8)),
        "jacobi-index" => check_jacobi_index(q.unwrap_or(10)),
        "multicover-primitive" => {
            check_multicover_primitive(q.unwrap_or(4), t.unwrap_or(3), p.unwrap_or(5))
        }
        "multiplicativity" => check_multiplicativity(q.unwrap_or(6), p.unwrap_or(6)),
        _ => return None,
    })
}

fn finish(
    name: &str,
    region: String,
    start: Instant,
    outcome: Result<(u64, Option<String>)>,
) -> CheckReport {
    let (passed, checked, detail) = match outcome {
        Ok((checked, None)) => (true, checked, None),
        Ok((checked, diff)) => (false, checked, diff),
        Err(e) => (false, 0, Some(format!("error: {e}"))),
    };
    CheckReport {
        name: name.to_string(),
        region,
        passed,
        checked,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

/// Build a q-level difference series at growing truncation until the
/// comparison box [q_lo, q_max] × [−p_window, p_window] is certified.
fn certified(
    q_max: i64,
    p_window: i64,
    q_margin: i64,
    build: impl Fn(&TruncationSpec) -> Result<QSeries>,
) -> Result<QSeries> {
    let mut extra_p = 2 * (q_max + q_margin) + 4;
    let mut last = None;
    for _ in 0..5 {
        let trunc = TruncationSpec::q_only(q_max + q_margin, p_window + extra_p);
        match build(&trunc) {
            Ok(f) if f.covers(q_max, p_window) => return Ok(f),
            Ok(_) => {
                last = Some(SeriesError::insufficient(
                    "comparison box not certified".to_string(),
                    trunc,
                ));
            }
            Err(e @ SeriesError::InsufficientTruncation { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        extra_p *= 2;
    }
    Err(last.unwrap())
}

/// Assert a certified series vanishes on the box; returns the first nonzero
/// coefficient otherwise.
fn assert_zero_on_box(
    f: &QSeries,
    q_lo: i64,
    q_max: i64,
    p_window: i64,
) -> Result<(u64, Option<String>)> {
    let mut checked = 0;
    for j in q_lo..=q_max {
        for k in -p_window..=p_window {
            let v = f.coeff(j, k)?;
            checked += 1;
            if !v.is_zero() {
                return Ok((checked, Some(format!("q^{j} p^{k}: {v} != 0"))));
            }
        }
    }
    Ok((checked, None))
}

/// Δ coefficients against a term-by-term product oracle written separately
/// from eta_power: each factor (1−qⁿ) is multiplied in literally, 24 times.
pub fn check_eta_oracle(q_max: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut naive = vec![BigInt::zero(); (q_max + 1) as usize];
        naive[0] = BigInt::one();
        for n in 1..=q_max {
            for _ in 0..24 {
                // multiply by (1 - q^n), high to low
                for j in (n..=q_max).rev() {
                    let lower = naive[(j - n) as usize].clone();
                    naive[j as usize] -= lower;
                }
            }
        }
        let d = delta(&TruncationSpec::q_only(q_max, 0));
        let mut checked = 0;
        for j in 1..=q_max {
            let expect = Rational::from_integer(naive[(j - 1) as usize].clone());
            let got = d.coeff(j, 0)?;
            checked += 1;
            if got != expect {
                return Ok((checked, Some(format!("Δ at q^{j}: {got} vs oracle {expect}"))));
            }
        }
        Ok((checked, None))
    })();
    finish("eta-oracle", format!("q <= {q_max}"), start, outcome)
}

/// (p d/dp)² log Θ + ℘ − E₂/12 = 0.
pub fn check_weierstrass(q_max: i64, p_window: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let diff = certified(q_max, p_window, 2, |t| {
            let th = theta_sq(t);
            let ldsq = th.log_derivative_sq(t)?;
            Ok(ldsq.add(&wp(t)?).sub(&e2(t).scale(&rat(1, 12))))
        })?;
        assert_zero_on_box(&diff, 0, q_max, p_window)
    })();
    finish(
        "weierstrass",
        format!("q <= {q_max}, |p| <= {p_window}"),
        start,
        outcome,
    )
}

/// KKV anchor: the q̃⁻¹ slice of −1/χ₁₀ equals −1/(Θ²Δ). First independent
/// pin of the Maass lift.
pub fn check_kkv(q_max: i64, p_window: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let dt0 = dt_series(0, &TruncationSpec::new(q_max, 0, p_window))?;
        let rhs = certified(q_max, p_window, 4, |t| {
            theta_sq(t).mul(&delta(t)).invert(t).map(|s| s.neg())
        })?;
        let diff = dt0.sub(&rhs);
        assert_zero_on_box(&diff, -1, q_max, p_window)
    })();
    finish(
        "kkv",
        format!("q <= {q_max}, |p| <= {p_window}"),
        start,
        outcome,
    )
}

/// DT₁ anchor: the q̃⁰ slice of −1/χ₁₀ equals −24℘/Δ. Second independent
/// pin of the lift.
pub fn check_dt1(q_max: i64, p_window: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let dt1 = dt_series(1, &TruncationSpec::new(q_max, 0, p_window))?;
        let rhs = certified(q_max, p_window, 4, |t| {
            Ok(wp(t)?.mul(&delta(t).invert(t)?).scale(&rat_int(-24)))
        })?;
        let diff = dt1.sub(&rhs);
        assert_zero_on_box(&diff, -1, q_max, p_window)
    })();
    finish(
        "dt1",
        format!("q <= {q_max}, |p| <= {p_window}"),
        start,
        outcome,
    )
}

/// Yau–Zaslow through wall-crossing: DT₁ + 24 Q₁ = −2E₂/Δ; in particular
/// every p-carrying coefficient cancels.
pub fn check_yau_zaslow(q_max: i64, p_window: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let dt1 = dt_series(1, &TruncationSpec::new(q_max, 0, p_window))?;
        let q1 = certified(q_max, p_window, 4, |t| quot_series(1, t))?;
        let rhs = certified(q_max, p_window, 4, |t| {
            Ok(e2(t).mul(&delta(t).invert(t)?).scale(&rat_int(-2)))
        })?;
        let diff = dt1.add(&q1.scale(&rat_int(24))).sub(&rhs);
        assert_zero_on_box(&diff, -1, q_max, p_window)
    })();
    finish(
        "yau-zaslow",
        format!("q <= {q_max}, |p| <= {p_window}"),
        start,
        outcome,
    )
}

/// The resolved Conjecture-A identity over a q̃-box.
pub fn check_conjecture_a(q_max: i64, t_max: i64, p_window: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let report = verify_conjecture_a(&TruncationSpec::new(q_max, t_max, p_window))?;
        if report.passed() {
            Ok((report.checked, None))
        } else {
            let (t, j, k, l, r) = report.diffs[0].clone();
            Ok((
                report.checked,
                Some(format!("q̃^{t} q^{j} p^{k}: lhs {l} vs rhs {r}")),
            ))
        }
    })();
    finish(
        "conjecture-a",
        format!("q̃ <= {t_max}, q <= {q_max}, |p| <= {p_window}"),
        start,
        outcome,
    )
}

/// χ₁₀ coefficient symmetries: a ↔ b exchange, evenness in ℓ, cusp support
/// 4ab ≥ ℓ² for nonzero entries.
pub fn check_lift_symmetry(ab_max: i64, l_max: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let chi = chi10(&TruncationSpec::new(ab_max, ab_max, l_max))?;
        let mut checked = 0;
        for a in 1..=ab_max {
            for b in 1..=ab_max {
                for l in -l_max..=l_max {
                    let c = chi.coeff(b, a, l)?;
                    checked += 1;
                    if c != chi.coeff(a, b, l)? {
                        return Ok((checked, Some(format!("({a},{l},{b}) vs a<->b"))));
                    }
                    if c != chi.coeff(b, a, -l)? {
                        return Ok((checked, Some(format!("({a},{l},{b}) vs -l"))));
                    }
                    if l * l > 4 * a * b && !c.is_zero() {
                        return Ok((checked, Some(format!("({a},{l},{b}) outside cusp support"))));
                    }
                }
            }
        }
        Ok((checked, None))
    })();
    finish(
        "lift-symmetry",
        format!("a,b <= {ab_max}, |l| <= {l_max}"),
        start,
        outcome,
    )
}

/// Jacobi index-1 property of φ₁₀,₁: coefficients depend only on 4a − ℓ².
pub fn check_jacobi_index(a_max: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let phi = phi_10_1(&TruncationSpec::q_only(a_max, 0));
        let mut by_disc: std::collections::HashMap<i64, (Rational, i64, i64)> = Default::default();
        let mut checked = 0;
        for a in 1..=a_max {
            for l in -(a + 1)..=(a + 1) {
                let v = phi.coeff(a, l)?;
                checked += 1;
                let d = 4 * a - l * l;
                match by_disc.get(&d) {
                    Some((seen, a0, l0)) => {
                        if seen != &v {
                            return Ok((
                                checked,
                                Some(format!(
                                    "disc {d}: ({a},{l}) -> {v} but ({a0},{l0}) -> {seen}"
                                )),
                            ));
                        }
                    }
                    None => {
                        by_disc.insert(d, (v, a, l));
                    }
                }
            }
        }
        Ok((checked, None))
    })();
    finish("jacobi-index", format!("a <= {a_max}"), start, outcome)
}

/// Multiple-cover primitive consistency: dt_imprimitive at d = 1 equals the
/// (−1)^{m+1} c(h0−1, n−1, m) relation, read off the dt_series route.
pub fn check_multicover_primitive(h0_max: i64, n_max: i64, m_max: i64) -> CheckReport {
    match IgusaTable::build(&TruncationSpec::new(h0_max - 1, n_max - 1, m_max)) {
        Ok(table) => check_multicover_primitive_with(&table, h0_max, n_max, m_max),
        Err(e) => finish(
            "multicover-primitive",
            format!("h0 <= {h0_max}, n <= {n_max}, |m| <= {m_max}"),
            Instant::now(),
            Err(e),
        ),
    }
}

/// Same check against a caller-provided (e.g. cached) table.
pub fn check_multicover_primitive_with(
    table: &IgusaTable,
    h0_max: i64,
    n_max: i64,
    m_max: i64,
) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut checked = 0;
        for n in 0..=n_max {
            let dt_n = dt_series(n, &TruncationSpec::new(h0_max - 1, n_max - 1, m_max))?;
            for h0 in 0..=h0_max {
                for m in -m_max..=m_max {
                    let spec = CurveClassSpec { d: 1, h0, n, m };
                    let direct = dt_imprimitive(&spec, table)?;
                    // dt_series stores DT·(−1)^m
                    let series = dt_n.coeff(h0 - 1, m)?;
                    let sign = if m.rem_euclid(2) == 0 { rat_int(1) } else { rat_int(-1) };
                    checked += 1;
                    if direct != series * sign {
                        return Ok((
                            checked,
                            Some(format!("(h0={h0}, n={n}, m={m}): {direct} vs series route")),
                        ));
                    }
                }
            }
        }
        Ok((checked, None))
    })();
    finish(
        "multicover-primitive",
        format!("h0 <= {h0_max}, n <= {n_max}, |m| <= {m_max}"),
        start,
        outcome,
    )
}

/// Quot-series multiplicativity: Q₂ · Q₀ = Q₁ · Q₁ coefficientwise.
pub fn check_multiplicativity(q_max: i64, p_window: i64) -> CheckReport {
    let start = Instant::now();
    let outcome = (|| {
        let diff = certified(q_max, p_window, 5, |t| {
            let q0 = quot_series(0, t)?;
            let q1 = quot_series(1, t)?;
            let q2 = quot_series(2, t)?;
            Ok(q2.mul(&q0).sub(&q1.mul(&q1)))
        })?;
        assert_zero_on_box(&diff, -2, q_max, p_window)
    })();
    finish(
        "multiplicativity",
        format!("q <= {q_max}, |p| <= {p_window}"),
        start,
        outcome,
    )
}
