//! Gamma, reciprocal Gamma and digamma.
//!
//! `gamma` uses the g = 7, n = 9 Lanczos approximation (relative error around
//! 1e-15 on the positive axis) and the reflection formula below 1/2.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `true` when `x` is 0, -1, -2, ...
pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// sin(πx) with exact argument reduction, so integer `x` gives exactly zero.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == 1.5 {
        return -1.0;
    }
    (PI * r).sin()
}

fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Lanczos evaluation for `x >= 0.5`.
fn gamma_positive(x: f64) -> f64 {
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so that t^(z+1/2) does not overflow before e^-t is applied
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * series
}

/// The Gamma function. Poles at nonpositive integers are reported as domain errors.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return domain("gamma of NaN");
    }
    if is_nonpositive_integer(x) {
        return domain(format!("gamma has a pole at {x}"));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * gamma_positive(1.0 - x)))
    } else if let Some(f) = factorial_of(x) {
        Ok(f)
    } else {
        Ok(gamma_positive(x))
    }
}

/// Direct products at integers and half-integers: Γ(n) = (n-1)! and
/// Γ(n + 1/2) = √π · (1/2)(3/2)···(n - 1/2).
fn factorial_of(x: f64) -> Option<f64> {
    if !(0.5..=171.0).contains(&x) {
        return None;
    }
    if x == x.round() {
        Some((1..x as u32).fold(1.0, |acc, k| acc * k as f64))
    } else if (x - 0.5) == (x - 0.5).round() {
        Some((0..(x - 0.5) as u32).fold(PI.sqrt(), |acc, k| acc * (k as f64 + 0.5)))
    } else {
        None
    }
}

/// 1/Γ(x), which is entire: zero at the nonpositive integers.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        sin_pi(x) * gamma_positive(1.0 - x) / PI
    } else if x > 171.7 {
        0.0
    } else if let Some(f) = factorial_of(x) {
        1.0 / f
    } else {
        1.0 / gamma_positive(x)
    }
}

/// The digamma function ψ(x) = Γ'(x)/Γ(x).
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return domain(format!("digamma has a pole at {x}"));
    }
    if x < 0.0 {
        // ψ(x) = ψ(1 - x) - π cot(πx)
        let cot = cos_pi(x) / sin_pi(x);
        return Ok(digamma(1.0 - x)? - PI * cot);
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 15.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    // asymptotic Bernoulli tail: B_2k / (2k y^2k)
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0))))));
    Ok(shift + y.ln() - 0.5 / y - tail)
}

/// Rising factorial (a)_n.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}
