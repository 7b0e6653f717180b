//! Reference values computed by routes that share no code with the library:
//! fixed-point big-integer series, tanh-sinh quadrature, closed-form Fourier
//! transforms and direct weighted sums on very fine grids.

use std::f64::consts::PI;

mod common;

use common::{big_pfq, big_series, BigFixed};

use fraclap::bench::{exact_ex1, exact_ex2};
use fraclap::specfun::{bessel_j, gamma, hyp1f1_safe, hyp2f1_safe, pfq};
use fraclap::weights::build_table;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn big_fixed_sanity() {
    // Σ 1/k! = e
    let e = big_series(|_| 1, |k| k + 1);
    assert!(rel(e, std::f64::consts::E) < 1e-15);
    assert_eq!(BigFixed::from_int(-3).div_int(2).to_f64(), -1.5);
    assert_eq!(BigFixed::from_f64(0.3).mul_f64(-2.5).to_f64(), -0.75);
    assert_eq!(BigFixed::from_f64(1.5).div_f64(0.375).to_f64(), 4.0);
    // ₂F₁(1, 1; 2; 1/2) = 2 ln 2
    assert!(rel(big_pfq(&[1.0, 1.0], &[2.0], 0.5), 2.0 * std::f64::consts::LN_2) < 1e-15);
}

#[test]
fn pfq_matches_extended_precision() {
    // ₁F₂(3/4; 5/4, 1/2; -25): ratio (k + 3/4) z / ((k + 5/4)(k + 1/2)(k + 1))
    let want = big_series(|k| (4 * k + 3) * 2 * -25, |k| (4 * k + 5) * (2 * k + 1) * (k + 1));
    let got = pfq(&[0.75], &[1.25, 0.5], -25.0, 1e-15).unwrap();
    assert!(rel(got.value, want) < 1e-12, "{} vs {want}", got.value);
    assert!(got.terms_used >= 1);
}

#[test]
fn hyp1f1_matches_extended_precision() {
    // summed directly in the alternating form, no Kummer transform
    let want = big_series(|k| (2 * k + 3) * -36, |k| 2 * (k + 1) * (k + 1));
    let got = hyp1f1_safe(1.5, 1.0, -36.0).unwrap();
    assert!(rel(got, want) < 1e-11, "{got} vs {want}");
}

#[test]
fn bessel_j0_matches_extended_precision() {
    // J0(5) = Σ (-25/4)^k / (k!)²
    let want = big_series(|_| -25, |k| 4 * (k + 1) * (k + 1));
    assert!((want - (-0.177596771314338)).abs() < 1e-14);
    assert!((bessel_j(0.0, 5.0).unwrap() - want).abs() < 1e-14);
}

#[test]
fn gamma_half_integer_product() {
    let prod: f64 = (0..7).map(|k| 0.5 + k as f64).product();
    let want = prod * PI.sqrt();
    assert!(rel(gamma(7.5).unwrap(), want) < 1e-14);
}

/// Tanh-sinh quadrature on (0, 1); robust to integrable endpoint
/// singularities. `f` receives both `t` and `1 - t`, the latter computed
/// without cancellation.
fn tanh_sinh(f: impl Fn(f64, f64) -> f64) -> f64 {
    let step = 1.0 / 64.0;
    let mut sum = 0.0;
    for k in -400i64..=400 {
        let t = k as f64 * step;
        let u = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        let e = (-2.0 * u.abs()).exp();
        let small = e / (1.0 + e);
        let (x, one_minus) = if u >= 0.0 { (1.0 - small, small) } else { (small, 1.0 - small) };
        if small == 0.0 {
            continue;
        }
        sum += 0.5 * w * f(x, one_minus);
    }
    sum * step
}

#[test]
fn tanh_sinh_sanity() {
    let v = tanh_sinh(|t, r| t.powf(-0.25) * r.powf(-0.25));
    // B(3/4, 3/4) = Γ(3/4)² / Γ(3/2)
    let g34 = 1.225_416_702_465_177_6_f64;
    let want = g34 * g34 / (PI.sqrt() / 2.0);
    assert!(rel(v, want) < 1e-9, "{v} vs {want}");
}

#[test]
fn hyp2f1_matches_euler_integral() {
    // F(a, b; c; z) = Γ(c)/(Γ(b)Γ(c-b)) ∫₀¹ t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt needs c > b > 0.
    // The target has c = 1/2 < b, so it is reached through the contiguous
    // relation in c from the integrals at c = 3/2 and c = 5/2.
    let (a, b, z) = (7.25, 0.75, -1.0);
    let g34 = 1.225_416_702_465_177_6_f64; // Γ(3/4)
    let euler = |c: f64, gc: f64, gcb: f64| {
        let i = tanh_sinh(|t, r| t.powf(b - 1.0) * r.powf(c - b - 1.0) * (1.0 - z * t).powf(-a));
        gc / (g34 * gcb) * i
    };
    let sp = PI.sqrt();
    let f15 = euler(1.5, sp / 2.0, g34);
    let f25 = euler(2.5, 0.75 * sp, 0.75 * g34);
    let c = 1.5;
    let f05 = -(c * (c - 1.0 - (2.0 * c - a - b - 1.0) * z) * f15 + (c - a) * (c - b) * z * f25)
        / (c * (c - 1.0) * (z - 1.0));
    let got = hyp2f1_safe(0.75, 7.25, 0.5, -1.0).unwrap();
    assert!(rel(got, f05) < 1e-9, "{got} vs {f05}");
}

/// Fourier transform of (1 + x²)^{-7}: π/46080 e^{-ξ} Σ_k (6+k)!/(k!(6-k)!) ξ^{6-k} 2^{-k}.
fn ft_ex1(xi: f64) -> f64 {
    let fact = |n: u64| (1..=n).product::<u64>() as f64;
    let s: f64 = (0..=6u64)
        .map(|k| fact(6 + k) / (fact(k) * fact(6 - k)) * xi.powi(6 - k as i32) / 2f64.powi(k as i32))
        .sum();
    PI / 46080.0 * (-xi).exp() * s
}

#[test]
fn ex1_matches_fourier_quadrature() {
    let mass = ft_ex1(0.0);
    // ∫ (1 + x²)^{-7} dx = √π Γ(13/2)/Γ(7)
    let want_mass = PI.sqrt() * (0..6).map(|k| 0.5 + k as f64).product::<f64>() * PI.sqrt() / 720.0;
    assert!(rel(mass, want_mass) < 1e-14);

    // (1/π) ∫₀^∞ ξ^α û(ξ) cos(ξx) dξ, with ξ = s² to remove the √ξ endpoint
    let (alpha, x) = (0.5, 0.5);
    let rule = fraclap::specfun::GaussRule::legendre(40);
    let mut total = 0.0;
    for p in 0..80 {
        let (lo, hi) = (p as f64 * 0.1, (p + 1) as f64 * 0.1);
        total += rule.integrate(lo, hi, |s| {
            let xi = s * s;
            2.0 * s * xi.powf(alpha) * ft_ex1(xi) * (xi * x).cos()
        });
    }
    let want = total / PI;
    let got = exact_ex1(alpha, x).unwrap();
    assert!(rel(got, want) < 1e-10, "{got} vs {want}");
}

#[test]
fn ex2_matches_fine_grid_sum() {
    // (-Δ)^{1/2} of (1 - x²)_+^4 at x = 0.25 by the weighted sum at h = 1/1024
    let h = 1.0 / 1024.0;
    let n = 2047usize;
    let table = build_table(1.0, h, 1, &[n]).unwrap();
    let k = 1024 + 255; // x_k = -1 + (k + 1) h = 0.25
    let xk = -1.0 + (k as f64 + 1.0) * h;
    assert!((xk - 0.25).abs() < 1e-15);
    let v: f64 = (0..n)
        .map(|j| {
            let xj = -1.0 + (j as f64 + 1.0) * h;
            let l = (k as i64 - j as i64).unsigned_abs();
            table.at(l * l) * (1.0 - xj * xj).powi(4)
        })
        .sum();
    let want = exact_ex2(1.0, 4.0, 1.0, 0.25).unwrap();
    assert!((v - want).abs() < 1e-6, "{v} vs {want}");
}
