//! Bessel functions of the orders needed for d ≤ 3 and their power moments.
//!
//! Orders ±1/2 are elementary. J0 and J1 use the power series up to x = 8,
//! Miller's backward recurrence on (8, 25] and the Hankel asymptotic expansion
//! beyond, which keeps the absolute error near machine precision everywhere.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use super::gamma::rgamma;
use super::hypergeom::{bessel_moment_series, Compensated};
use super::quadrature::{integrate_phased, integrate_power_weight, GaussRule};
use crate::error::{domain, Result};

/// Largest `r` for which [`bessel_moment`] trusts the hypergeometric series.
pub const R_SERIES: f64 = 12.0;

const SERIES_MAX_X: f64 = 8.0;
const MILLER_MAX_X: f64 = 25.0;
const PANEL_ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    MinusHalf,
    Zero,
    Half,
    One,
}

fn order(nu: f64) -> Result<Order> {
    match nu {
        x if x == -0.5 => Ok(Order::MinusHalf),
        x if x == 0.0 => Ok(Order::Zero),
        x if x == 0.5 => Ok(Order::Half),
        x if x == 1.0 => Ok(Order::One),
        _ => domain(format!("Bessel order {nu} is not supported (use -1/2, 0, 1/2 or 1)")),
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("Bessel argument must be finite and nonnegative, got {x}"));
    }
    Ok(())
}

/// J_ν(x) for ν ∈ {-1/2, 0, 1/2, 1} and x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    let ord = order(nu)?;
    check_arg(x)?;
    Ok(match ord {
        Order::MinusHalf => {
            if x == 0.0 {
                f64::INFINITY
            } else {
                (2.0 / (PI * x)).sqrt() * x.cos()
            }
        }
        Order::Half => {
            if x == 0.0 {
                0.0
            } else {
                (2.0 / (PI * x)).sqrt() * x.sin()
            }
        }
        Order::Zero => j_integer(0, x),
        Order::One => j_integer(1, x),
    })
}

/// J_ν(x) / x^ν, the entire part of the Bessel function. Finite at x = 0.
pub fn bessel_j_over_pow(nu: f64, x: f64) -> Result<f64> {
    let ord = order(nu)?;
    check_arg(x)?;
    let c = (2.0 / PI).sqrt();
    Ok(match ord {
        Order::MinusHalf => c * x.cos(),
        Order::Half => {
            if x < 1e-4 {
                c * (1.0 - x * x / 6.0)
            } else {
                c * x.sin() / x
            }
        }
        Order::Zero => j_integer(0, x),
        Order::One => {
            if x <= SERIES_MAX_X {
                series_over_pow(1.0, x)
            } else {
                j_integer(1, x) / x
            }
        }
    })
}

/// J_ν(t) where the caller also supplies `t = kπ + s` exactly; large arguments
/// take their trigonometric factors from `s`.
pub fn bessel_j_phased(nu: f64, t: f64, k: i64, s: f64) -> Result<f64> {
    let ord = order(nu)?;
    check_arg(t)?;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let (sin_t, cos_t) = (sign * s.sin(), sign * s.cos());
    Ok(match ord {
        Order::MinusHalf if t > 0.0 => (2.0 / (PI * t)).sqrt() * cos_t,
        Order::Half if t > 0.0 => (2.0 / (PI * t)).sqrt() * sin_t,
        Order::MinusHalf | Order::Half => bessel_j(nu, t)?,
        Order::Zero if t > MILLER_MAX_X => hankel_with(0, t, sin_t, cos_t),
        Order::One if t > MILLER_MAX_X => hankel_with(1, t, sin_t, cos_t),
        Order::Zero => j_integer(0, t),
        Order::One => j_integer(1, t),
    })
}

fn j_integer(n: u32, x: f64) -> f64 {
    if x <= SERIES_MAX_X {
        series_over_pow(n as f64, x) * x.powi(n as i32)
    } else if x <= MILLER_MAX_X {
        miller(n, x)
    } else {
        hankel(n, x)
    }
}

/// Σ (-1)^k (x/2)^{2k} / (2^ν k! Γ(k+ν+1)), i.e. J_ν(x)/x^ν.
fn series_over_pow(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = rgamma(nu + 1.0) / 2f64.powf(nu);
    let mut acc = Compensated::default();
    acc.add(term);
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        acc.add(term);
        if term.abs() < 1e-18 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

/// Backward recurrence normalised by J0 + 2 Σ J_2k = 1.
fn miller(n: u32, x: f64) -> f64 {
    let mut start = (1.5 * x) as usize + 30;
    start += start % 2;
    let mut jp1 = 0.0f64;
    let mut j = 1e-300f64;
    let mut norm = 0.0f64;
    let mut want = [0.0f64; 2];
    for k in (1..=start).rev() {
        // j holds J_k (unnormalised); produce J_{k-1}
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        let idx = k - 1;
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j;
        }
        if idx < 2 {
            want[idx] = j;
        }
        if j.abs() > 1e250 {
            jp1 *= 1e-250;
            j *= 1e-250;
            norm *= 1e-250;
            want[0] *= 1e-250;
            want[1] *= 1e-250;
        }
    }
    norm += want[0];
    want[n as usize] / norm
}

fn hankel(n: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    hankel_with(n, x, s, c)
}

/// Hankel expansion J_n(x) = √(2/πx) (P cos χ − Q sin χ), χ = x − (n/2 + 1/4)π,
/// given sin x and cos x.
fn hankel_with(n: u32, x: f64, s: f64, c: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0f64;
    let inv8x = 1.0 / (8.0 * x);
    let mut last = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) * inv8x / k as f64;
        }
        if a.abs() > last || a == 0.0 {
            break;
        }
        last = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let (cos_chi, sin_chi) = if n == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

pub(crate) fn legendre20() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::legendre(PANEL_ORDER))
}

/// `∫₀^r ρ^λ J_ν(ρ) dρ`.
///
/// Up to [`R_SERIES`] the closed ₁F₂ form is summed; beyond it the integral is
/// accumulated panel by panel.
pub fn bessel_moment(lambda: f64, nu: f64, r: f64) -> Result<f64> {
    if r <= R_SERIES {
        order(nu)?;
        check_arg(r)?;
        return Ok(bessel_moment_series(lambda, nu, r)?.value);
    }
    bessel_moment_panels(lambda, nu, r)
}

/// Quadrature route for `∫₀^r ρ^λ J_ν(ρ) dρ`, valid for every `r`.
///
/// The first panel `[0, min(r, π)]` absorbs the endpoint behaviour
/// `ρ^{λ+ν}` into a Gauss–Jacobi weight; the remaining panels have width π
/// (the asymptotic spacing of Bessel zeros) and use 20-point Gauss–Legendre.
pub fn bessel_moment_panels(lambda: f64, nu: f64, r: f64) -> Result<f64> {
    order(nu)?;
    check_arg(r)?;
    let beta = lambda + nu;
    if !(beta > -1.0) {
        return domain(format!("bessel moment needs λ + ν > -1, got {beta}"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let first = r.min(PI);
    let jac = GaussRule::jacobi(PANEL_ORDER, 0.0, beta)?;
    let mut acc = Compensated::default();
    acc.add(integrate_power_weight(&jac, beta, first, |t| {
        bessel_j_over_pow(nu, t).expect("order validated")
    }));
    let gl = legendre20();
    let mut k = 1.0;
    while k * PI < r {
        let lo = k * PI;
        let hi = ((k + 1.0) * PI).min(r);
        acc.add(integrate_phased(gl, lo, hi, |t, k, s| {
            t.powf(lambda) * bessel_j_phased(nu, t, k, s).expect("order validated")
        }));
        k += 1.0;
    }
    Ok(acc.value())
}
