//! Generalized hypergeometric series and guarded ₂F₁ / ₁F₁ evaluators.
//!
//! [`pfq`] sums the defining power series term by term, with each term obtained
//! from the previous one through the Pochhammer ratio
//! `Π(a_l + k) / Π(b_m + k) · z / (k + 1)`. Summation is compensated
//! (Neumaier) and the largest partial sum is tracked, so callers can detect
//! catastrophic cancellation in alternating regimes.
//!
//! [`hyp2f1_safe`] and [`hyp1f1_safe`] apply the linear transformations that
//! keep the series argument in a well-conditioned range before summing.

use serde::Serialize;

use super::gamma::{digamma, gamma, is_nonpositive_integer, rgamma};
use crate::error::{domain, FracLapError, Result};

/// Ratio of the largest partial sum to the final value beyond which a sum is
/// flagged as suffering severe cancellation.
pub const CANCELLATION_RATIO: f64 = 1e8;

const MAX_TERMS: usize = 200_000;

/// Value of a summed series together with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub est_abs_error: f64,
    pub cancellation_flag: bool,
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Sum `pFq(a; b; z)` directly from its power series.
///
/// Summation stops once three consecutive terms fall below `tol · |partial sum|`,
/// or as soon as a term vanishes exactly (terminating series).
pub fn pfq(a: &[f64], b: &[f64], z: f64, tol: f64) -> Result<SeriesResult> {
    if !(tol > 0.0) {
        return domain(format!("pfq tolerance must be positive, got {tol}"));
    }
    if let Some(&bad) = b.iter().find(|&&bm| is_nonpositive_integer(bm)) {
        return domain(format!("pfq lower parameter {bad} is a nonpositive integer"));
    }
    if !z.is_finite() || a.iter().chain(b).any(|p| !p.is_finite()) {
        return domain("pfq arguments must be finite");
    }
    let terminating = a.iter().any(|&al| is_nonpositive_integer(al));
    if z != 0.0 && !terminating {
        if a.len() > b.len() + 1 {
            return domain(format!(
                "{}F{} series diverges for z != 0",
                a.len(),
                b.len()
            ));
        }
        if a.len() == b.len() + 1 && z.abs() >= 1.0 {
            return domain(format!(
                "{}F{} series requires |z| < 1, got {z}",
                a.len(),
                b.len()
            ));
        }
    }

    let mut acc = Compensated::default();
    let mut term = 1.0f64;
    acc.add(term);
    let mut abs_sum = 1.0f64;
    let mut max_partial = 1.0f64;
    let mut small_run = 0usize;
    let mut k = 0usize;

    while z != 0.0 {
        let kf = k as f64;
        let mut ratio = z / (kf + 1.0);
        for &al in a {
            ratio *= al + kf;
        }
        for &bm in b {
            ratio /= bm + kf;
        }
        term *= ratio;
        k += 1;
        if term == 0.0 {
            break;
        }
        if !term.is_finite() {
            return Err(FracLapError::SeriesDivergence {
                terms: k,
                context: format!("pfq term overflow at z = {z}"),
            });
        }
        acc.add(term);
        abs_sum += term.abs();
        let partial = acc.value();
        max_partial = max_partial.max(partial.abs());
        if term.abs() < tol * partial.abs() {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        if k >= MAX_TERMS {
            return Err(FracLapError::SeriesDivergence {
                terms: k,
                context: format!("pfq(a = {a:?}, b = {b:?}, z = {z})"),
            });
        }
    }

    let value = acc.value();
    let est_abs_error = 2.0 * f64::EPSILON * abs_sum.max(max_partial) + if k > 0 { term.abs() } else { 0.0 };
    Ok(SeriesResult {
        value,
        terms_used: k + 1,
        est_abs_error,
        cancellation_flag: max_partial > CANCELLATION_RATIO * value.abs(),
    })
}

fn series_value(a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    Ok(pfq(a, b, z, 1e-17)?.value)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real `z < 1`.
///
/// * `z ∈ [-1, 0)` and `z < -1`: Pfaff transformation to `z/(z-1) ∈ (0, 1)`.
/// * `z ∈ [0, 1/2]`: direct series.
/// * `z ∈ (1/2, 1)`: connection formula in `1 - z`, including the
///   logarithmic case where `c - a - b` is an integer.
pub fn hyp2f1_safe(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return domain(format!("hyp2f1: c = {c} is a nonpositive integer"));
    }
    if !(z < 1.0) {
        return domain(format!("hyp2f1: z = {z} must be < 1"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        // terminating polynomial
        return series_value(&[a, b], &[c], z);
    }
    if z < 0.0 {
        // Pfaff: ₂F₁(a,b;c;z) = (1-z)^{-a} ₂F₁(a, c-b; c; z/(z-1))
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * hyp2f1_unit(a, c - b, c, w)?);
    }
    hyp2f1_unit(a, b, c, z)
}

/// ₂F₁ for `0 <= z < 1`.
fn hyp2f1_unit(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) || z <= 0.5 {
        return series_value(&[a, b], &[c], z);
    }
    let s = c - a - b;
    let m = s.round();
    if (s - m).abs() < 1e-12 {
        if m >= 0.0 {
            return hyp2f1_log_case(a, b, c, m as usize, z);
        }
        // Euler: ₂F₁(a,b;c;z) = (1-z)^{c-a-b} ₂F₁(c-a, c-b; c; z), new excess is -s > 0
        let scale = (1.0 - z).powf(s);
        return Ok(scale * hyp2f1_unit(c - a, c - b, c, z)?);
    }
    let w = 1.0 - z;
    let gc = gamma(c)?;
    let first = gc * gamma(s)? * rgamma(c - a) * rgamma(c - b);
    let second = gc * gamma(-s)? * rgamma(a) * rgamma(b);
    let mut value = 0.0;
    if first != 0.0 {
        value += first * series_value(&[a, b], &[1.0 - s], w)?;
    }
    if second != 0.0 {
        value += second * w.powf(s) * series_value(&[c - a, c - b], &[s + 1.0], w)?;
    }
    Ok(value)
}

/// ₂F₁(a, b; c; z) with `c = a + b + m` for integer `m >= 0`, `1/2 < z < 1`, and neither
/// `a` nor `b` a nonpositive integer.
fn hyp2f1_log_case(a: f64, b: f64, c: f64, m: usize, z: f64) -> Result<f64> {
    let w = 1.0 - z;
    let mf = m as f64;
    let gc = gamma(c)?;

    let mut finite = 0.0;
    if m > 0 {
        let pref = gamma(mf)? * gc * rgamma(a + mf) * rgamma(b + mf);
        let mut term = 1.0;
        let mut acc = Compensated::default();
        for n in 0..m {
            acc.add(term);
            if n + 1 < m {
                let nf = n as f64;
                term *= (a + nf) * (b + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * w;
            }
        }
        finite = pref * acc.value();
    }

    let pref = gc * rgamma(a) * rgamma(b);
    if pref == 0.0 {
        return Ok(finite);
    }
    let ln_w = w.ln();
    let mut psi_1 = digamma(1.0)?;
    let mut psi_m1 = digamma(mf + 1.0)?;
    let mut psi_a = digamma(a + mf)?;
    let mut psi_b = digamma(b + mf)?;
    // (a+m)_n (b+m)_n / (n! (n+m)!) w^n, starting from 1/m!
    let mut coef = 1.0 / gamma(mf + 1.0)?;
    let mut acc = Compensated::default();
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let term = coef * (ln_w - psi_1 - psi_m1 + psi_a + psi_b);
        acc.add(term);
        if term.abs() < 1e-17 * acc.value().abs() {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        coef *= (a + mf + nf) * (b + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0)) * w;
        psi_1 += 1.0 / (nf + 1.0);
        psi_m1 += 1.0 / (nf + mf + 1.0);
        psi_a += 1.0 / (a + mf + nf);
        psi_b += 1.0 / (b + mf + nf);
        if coef == 0.0 {
            break;
        }
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    // (z - 1)^m = (-1)^m w^m
    Ok(finite - sign * w.powi(m as i32) * pref * acc.value())
}

/// Confluent hypergeometric function ₁F₁(a; b; z).
///
/// Negative arguments go through Kummer's transformation
/// `₁F₁(a; b; z) = e^z ₁F₁(b - a; b; -z)` so the summed series has no
/// alternating cancellation.
pub fn hyp1f1_safe(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return domain(format!("hyp1f1: b = {b} is a nonpositive integer"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        return Ok(z.exp() * series_value(&[b - a], &[b], -z)?);
    }
    series_value(&[a], &[b], z)
}

/// `∫₀^r ρ^λ J_ν(ρ) dρ` through its closed ₁F₂ form. Accurate only while the
/// series does not cancel, i.e. for moderate `r`.
pub fn bessel_moment_series(lambda: f64, nu: f64, r: f64) -> Result<SeriesResult> {
    let p = lambda + nu + 1.0;
    if !(p > 0.0) {
        return domain(format!("bessel moment needs λ + ν > -1, got {}", p - 1.0));
    }
    if r == 0.0 {
        return Ok(SeriesResult {
            value: 0.0,
            terms_used: 1,
            est_abs_error: 0.0,
            cancellation_flag: false,
        });
    }
    let series = pfq(&[0.5 * p], &[nu + 1.0, 0.5 * p + 1.0], -0.25 * r * r, 1e-17)?;
    let scale = r.powf(p) * rgamma(nu + 1.0) / (2f64.powf(nu) * p);
    Ok(SeriesResult {
        value: scale * series.value,
        terms_used: series.terms_used,
        est_abs_error: scale.abs() * series.est_abs_error,
        cancellation_flag: series.cancellation_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn unit_at_zero() {
        let r = pfq(&[0.3, 2.0], &[1.5], 0.0, 1e-15).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.terms_used, 1);
        assert!(!r.cancellation_flag);
    }

    #[test]
    fn log_identity() {
        let r = pfq(&[1.0, 1.0], &[2.0], 0.5, 1e-15).unwrap();
        assert!(rel(r.value, 2.0 * 2f64.ln()) < 1e-14);
        let v = hyp2f1_safe(1.0, 1.0, 2.0, 0.9).unwrap();
        assert!(rel(v, -(0.1f64).ln() / 0.9) < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(pfq(&[1.0, 1.0, 1.0], &[1.0], 0.1, 1e-15).is_err());
        assert!(pfq(&[1.0, 1.0], &[2.0], 1.0, 1e-15).is_err());
        assert!(pfq(&[1.0], &[-2.0], 0.1, 1e-15).is_err());
        assert!(pfq(&[1.0], &[2.0], 0.1, 0.0).is_err());
        assert!(hyp2f1_safe(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(hyp1f1_safe(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn terminating_series_stop_early() {
        // ₂F₁(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (0.7, 1.3, 0.4);
        let exact = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        let r = pfq(&[-2.0, b], &[c], z, 1e-16).unwrap();
        assert!(rel(r.value, exact) < 1e-15);
        assert!(r.terms_used <= 4);
    }

    #[test]
    fn cancellation_is_flagged() {
        // ₁F₁(1; 1; -40) = e^-40 summed directly is hopeless
        let r = pfq(&[1.0], &[1.0], -40.0, 1e-16).unwrap();
        assert!(r.cancellation_flag);
        let r = pfq(&[1.0], &[1.0], -2.0, 1e-16).unwrap();
        assert!(!r.cancellation_flag);
    }

    #[test]
    fn kummer_exponential() {
        for &z in &[-30.0, -5.0, 0.5, 12.0] {
            assert!(rel(hyp1f1_safe(1.0, 1.0, z).unwrap(), f64::exp(z)) < 1e-13);
        }
    }

    #[test]
    fn connection_formula_matches_closed_forms() {
        // ₂F₁(1/2, 1; 3/2; z) = atanh(√z)/√z (c - a - b = 0, log case)
        for &z in &[0.6, 0.9, 0.999] {
            let sz = f64::sqrt(z);
            let exact = sz.atanh() / sz;
            assert!(rel(hyp2f1_safe(0.5, 1.0, 1.5, z).unwrap(), exact) < 1e-13, "z={z}");
        }
        // ₂F₁(a, b; b; z) = (1 - z)^-a (c - a - b = -a, generic)
        for &z in &[0.7f64, 0.95] {
            let exact = (1.0 - z).powf(-0.3);
            assert!(rel(hyp2f1_safe(0.3, 1.7, 1.7, z).unwrap(), exact) < 1e-13);
        }
        // ₂F₁(1, 1; 2; z) = -ln(1-z)/z (c - a - b = 0)
        for &z in &[0.6f64, 0.99, -3.0, -40.0] {
            let exact = -(1.0 - z).ln() / z;
            assert!(rel(hyp2f1_safe(1.0, 1.0, 2.0, z).unwrap(), exact) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn moment_series_small_radius() {
        // ∫₀^r ρ^{1/2} J_{-1/2}(ρ) dρ = √(2/π) sin r
        for &r in &[0.3, 1.0, 2.5] {
            let m = bessel_moment_series(0.5, -0.5, r).unwrap();
            assert!(rel(m.value, (2.0 / PI).sqrt() * f64::sin(r)) < 1e-14);
        }
    }
}
