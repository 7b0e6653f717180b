//! Weights ω^(d)_{α,h} of the discrete fractional Laplacian.
//!
//! With n = |k - j| in index units and R = n ζ_d π, the weight is
//!
//! ```text
//! ω(n) = P_d h^{-α} ₁F₂((α+d)/2; (α+d+2)/2, d/2; -R²/4)
//!      = (2π)^{-d/2} h^{-α} n^{-(α+d)} ∫₀^R θ^{α+d/2} J_{d/2-1}(θ) dθ     (n ≥ 1)
//! ```
//!
//! where P_d = 2^{1-d} ζ_d^{α+d} π^{α+d/2} / ((α+d) Γ(d/2)). The series form is
//! exact but cancels badly for large R, so single weights fall back to
//! quadrature and whole tables are built by a cumulative sweep of the integral.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, FracLapError, Result};
use crate::io::write_atomic;
use crate::specfun::bessel::{bessel_j_phased, bessel_moment_panels, legendre20};
use crate::specfun::gamma::gamma;
use crate::specfun::hypergeom::{pfq, Compensated};
use crate::specfun::quadrature::{integrate_phased, integrate_power_weight, GaussRule};

/// Above this value of n ζ_d π the ₁F₂ series is never attempted.
pub const Z_SWITCH: f64 = 60.0;

/// The series result is accepted only if its estimated error is below this
/// fraction of its value.
const SERIES_REL_BUDGET: f64 = 1e-13;

/// Radii up to this value are evaluated lag by lag inside [`build_table`];
/// the cumulative sweep only takes over beyond it.
const TABLE_DIRECT_RADIUS: f64 = 40.0;

/// Consecutive radii handled by one sequential sweep in [`build_table`].
const SWEEP_CHUNK: usize = 4096;

/// ζ_d = (2/√π) Γ(d/2 + 1)^{1/d}: the radius (in units of π/h) of the ball with
/// the same volume as the frequency box [-π/h, π/h]^d.
pub fn zeta(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    if d == 1 {
        return 1.0;
    }
    let g = gamma(0.5 * d as f64 + 1.0).expect("Γ is finite at positive arguments");
    2.0 / PI.sqrt() * g.powf(1.0 / d as f64)
}

fn check_args(alpha: f64, h: f64, d: usize) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return domain(format!("alpha must be finite and >= 0, got {alpha}"));
    }
    if !(h > 0.0) || !h.is_finite() {
        return domain(format!("h must be finite and > 0, got {h}"));
    }
    if !(1..=3).contains(&d) {
        return domain(format!("dimension {d} is not supported (1, 2 or 3)"));
    }
    Ok(())
}

/// P_d: the weight at lag zero for h = 1.
fn prefactor(alpha: f64, d: usize) -> f64 {
    let df = d as f64;
    let z = zeta(d);
    2f64.powf(1.0 - df) * z.powf(alpha + df) * PI.powf(alpha + 0.5 * df)
        / ((alpha + df) * gamma(0.5 * df).expect("Γ(d/2) is finite"))
}

/// Weights that are known exactly: α = 0, lag zero, and integer α in 1D.
fn exact_unit_weight(alpha: f64, d: usize, sq_lag: u64) -> Option<f64> {
    if alpha == 0.0 {
        return Some(if sq_lag == 0 { 1.0 } else { 0.0 });
    }
    if sq_lag == 0 {
        return Some(prefactor(alpha, d));
    }
    let n = (sq_lag as f64).sqrt().round() as u64;
    if d == 1 && (alpha == 1.0 || alpha == 2.0) && n * n == sq_lag {
        let even = n % 2 == 0;
        let n2 = sq_lag as f64;
        return Some(if alpha == 1.0 {
            if even {
                0.0
            } else {
                -2.0 / (PI * n2)
            }
        } else if even {
            2.0 / n2
        } else {
            -2.0 / n2
        });
    }
    None
}

/// The raw series evaluation at h = 1 with its bookkeeping.
fn series_unit_weight(alpha: f64, d: usize, sq_lag: u64) -> Result<(f64, bool, f64)> {
    let df = d as f64;
    let r = (sq_lag as f64).sqrt() * zeta(d) * PI;
    let a = 0.5 * (alpha + df);
    let s = pfq(&[a], &[a + 1.0, 0.5 * df], -0.25 * r * r, 1e-17)?;
    let p = prefactor(alpha, d);
    Ok((p * s.value, s.cancellation_flag, p * s.est_abs_error))
}

/// ω^(d)_{α,h}(√sq_lag).
///
/// Exact forms are used where they exist. Otherwise the ₁F₂ series is tried
/// when n ζ_d π ≤ [`Z_SWITCH`]; a raised cancellation flag or an error estimate
/// above 1e-13 relative sends the evaluation to [`weight_oracle`].
pub fn weight(alpha: f64, h: f64, d: usize, sq_lag: u64) -> Result<f64> {
    check_args(alpha, h, d)?;
    let scale = h.powf(-alpha);
    if let Some(w) = exact_unit_weight(alpha, d, sq_lag) {
        return Ok(scale * w);
    }
    let r = (sq_lag as f64).sqrt() * zeta(d) * PI;
    if r <= Z_SWITCH {
        let (value, flag, err) = series_unit_weight(alpha, d, sq_lag)?;
        if !flag && err <= SERIES_REL_BUDGET * value.abs() {
            return Ok(scale * value);
        }
        log::debug!("series rejected for alpha={alpha} d={d} sq_lag={sq_lag} (flag={flag}, err={err:.2e})");
    }
    weight_oracle(alpha, h, d, sq_lag)
}

/// Independent quadrature evaluation of the weight.
///
/// For d = 1 the defining cosine integral `∫₀^{nπ} θ^α cos θ dθ` is summed over
/// half-period panels; for d ≥ 2 the ball integral is reduced to a Bessel
/// moment evaluated by quadrature. Lag zero uses the monomial integral.
pub fn weight_oracle(alpha: f64, h: f64, d: usize, sq_lag: u64) -> Result<f64> {
    check_args(alpha, h, d)?;
    if alpha == 0.0 {
        return Ok(if sq_lag == 0 { 1.0 } else { 0.0 });
    }
    let df = d as f64;
    let z = zeta(d);
    if sq_lag == 0 {
        // h^d/(2π)^d · |S^{d-1}| · ∫₀^{ζπ/h} ρ^{α+d-1} dρ
        let sphere = 2.0 * PI.powf(0.5 * df) / gamma(0.5 * df)?;
        let radial = (z * PI / h).powf(alpha + df) / (alpha + df);
        return Ok(h.powf(df) / (2.0 * PI).powf(df) * sphere * radial);
    }
    let n = (sq_lag as f64).sqrt();
    if d == 1 {
        let integral = cosine_moment(alpha, n * PI)?;
        return Ok(h / PI * integral / (n * h).powf(alpha + 1.0));
    }
    let moment = bessel_moment_panels(alpha + 0.5 * df, 0.5 * df - 1.0, n * z * PI)?;
    Ok((2.0 * PI).powf(0.5 * df) / (2.0 * PI / h).powf(df) * moment / (n * h).powf(alpha + df))
}

/// `∫₀^r θ^α cos θ dθ`: Gauss–Jacobi on the first half-period, 20-point
/// Gauss–Legendre on the following ones.
fn cosine_moment(alpha: f64, r: f64) -> Result<f64> {
    let first = r.min(PI);
    let jac = GaussRule::jacobi(20, 0.0, alpha)?;
    let mut acc = Compensated::default();
    acc.add(integrate_power_weight(&jac, alpha, first, f64::cos));
    let gl = legendre20();
    let mut k = 1.0;
    loop {
        let lo = k * PI;
        if lo >= r {
            break;
        }
        let hi = ((k + 1.0) * PI).min(r);
        acc.add(integrate_phased(gl, lo, hi, |t, k, s| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            t.powf(alpha) * sign * s.cos()
        }));
        k += 1.0;
    }
    Ok(acc.value())
}

/// Deduplicated weights for every squared lag a grid can realise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    pub alpha: f64,
    pub dim: usize,
    pub h: f64,
    pub max_sq_lag: u64,
    /// Realisable squared lags, increasing.
    lags: Vec<u64>,
    values: Vec<f64>,
}

impl WeightTable {
    /// ω at a squared lag, or `None` if that lag is not in the table.
    pub fn get(&self, sq_lag: u64) -> Option<f64> {
        self.lags.binary_search(&sq_lag).ok().map(|i| self.values[i])
    }

    /// ω at a squared lag that is known to be present.
    ///
    /// # Panics
    /// If the lag is not realisable on the grid the table was built for.
    pub fn at(&self, sq_lag: u64) -> f64 {
        self.get(sq_lag)
            .unwrap_or_else(|| panic!("squared lag {sq_lag} is not in the weight table"))
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    /// `(sq_lag, ω)` pairs in increasing lag order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.lags.iter().copied().zip(self.values.iter().copied())
    }

    /// Same weights at a different spacing, via ω_h = h^{-α} ω_1.
    pub fn rescaled(&self, h: f64) -> WeightTable {
        let f = (self.h / h).powf(self.alpha);
        WeightTable {
            h,
            values: self.values.iter().map(|v| v * f).collect(),
            ..self.clone()
        }
    }
}

/// Distinct values of `Σ l_i²` over `0 ≤ l_i ≤ N_i - 1`, increasing.
fn realizable_lags(extents: &[usize]) -> Vec<u64> {
    let mut partial = vec![0u64];
    for &n in extents {
        let mut next = Vec::with_capacity(partial.len() * n);
        for &p in &partial {
            for l in 0..n as u64 {
                next.push(p + l * l);
            }
        }
        next.sort_unstable();
        next.dedup();
        partial = next;
    }
    partial
}

/// Weights at h = 1 for the given squared lags (sorted, distinct, nonzero).
fn unit_weights_swept(alpha: f64, d: usize, lags: &[u64]) -> Result<Vec<f64>> {
    let df = d as f64;
    let lambda = alpha + 0.5 * df;
    let nu = 0.5 * df - 1.0;
    let z = zeta(d);
    let norm = (2.0 * PI).powf(-0.5 * df);
    let chunks: Vec<&[u64]> = lags.chunks(SWEEP_CHUNK).collect();
    let results: Result<Vec<Vec<f64>>> = chunks
        .par_iter()
        .map(|chunk| {
            let mut out = Vec::with_capacity(chunk.len());
            let mut anchor: Option<(f64, Compensated)> = None;
            let rules = [GaussRule::legendre(4), GaussRule::legendre(6), GaussRule::legendre(12)];
            let integrand =
                |t: f64, k: i64, s: f64| t.powf(lambda) * bessel_j_phased(nu, t, k, s).expect("supported order");
            for &m in chunk.iter() {
                let n = (m as f64).sqrt();
                let r = n * z * PI;
                if r <= TABLE_DIRECT_RADIUS {
                    out.push(weight(alpha, 1.0, d, m)?);
                    continue;
                }
                let f = if let Some((last, acc)) = anchor.as_mut() {
                    let width = r - *last;
                    let pieces = if width <= 0.5 { 1 } else { (width / (0.5 * PI)).ceil() as usize };
                    let rule = if width <= 0.1 {
                        &rules[0]
                    } else if width <= 0.5 {
                        &rules[1]
                    } else {
                        &rules[2]
                    };
                    let step = width / pieces as f64;
                    for p in 0..pieces {
                        let lo = *last + p as f64 * step;
                        let hi = if p + 1 == pieces { r } else { lo + step };
                        acc.add(integrate_phased(rule, lo, hi, integrand));
                    }
                    *last = r;
                    acc.value()
                } else {
                    // anchor on the scalar path, which is accurate to a few ulps
                    let mut acc = Compensated::default();
                    acc.add(weight(alpha, 1.0, d, m)? * n.powf(alpha + df) / norm);
                    anchor = Some((r, acc));
                    acc.value()
                };
                out.push(norm * f / n.powf(alpha + df));
            }
            Ok(out)
        })
        .collect();
    Ok(results?.into_iter().flatten().collect())
}

/// Table of ω^(d)_{α,h} at every squared lag realisable on a grid with the
/// given per-axis point counts.
pub fn build_table(alpha: f64, h: f64, d: usize, extents: &[usize]) -> Result<WeightTable> {
    build_table_cached(alpha, h, d, extents, None)
}

/// [`build_table`] backed by an on-disk cache of unit-spacing weights.
pub fn build_table_cached(
    alpha: f64,
    h: f64,
    d: usize,
    extents: &[usize],
    cache_dir: Option<&Path>,
) -> Result<WeightTable> {
    check_args(alpha, h, d)?;
    if extents.len() != d {
        return domain(format!("{} extents given for dimension {d}", extents.len()));
    }
    if extents.iter().any(|&n| n == 0) {
        return domain("every extent must be at least 1");
    }
    let lags = realizable_lags(extents);
    let mut unit = vec![f64::NAN; lags.len()];

    let cache_file = cache_dir.map(|dir| cache_path(dir, alpha, d));
    let mut cached = BTreeMap::new();
    if let Some(path) = cache_file.as_deref().filter(|p| p.exists()) {
        cached = read_cache_csv(path)?
            .into_iter()
            .filter(|e| e.alpha == alpha && e.d == d)
            .map(|e| (e.sq_lag, e.omega_at_h1))
            .collect();
    }

    let mut todo = Vec::new();
    for (i, &m) in lags.iter().enumerate() {
        if let Some(w) = exact_unit_weight(alpha, d, m) {
            unit[i] = w;
        } else if let Some(&w) = cached.get(&m) {
            unit[i] = w;
        } else {
            todo.push(i);
        }
    }
    if !todo.is_empty() {
        let todo_lags: Vec<u64> = todo.iter().map(|&i| lags[i]).collect();
        let swept = unit_weights_swept(alpha, d, &todo_lags)?;
        for (&i, w) in todo.iter().zip(swept) {
            if !w.is_finite() {
                return Err(FracLapError::NonFinite { point: vec![lags[i] as f64], value: w });
            }
            unit[i] = w;
            cached.insert(lags[i], w);
        }
        if let Some(path) = &cache_file {
            let entries: Vec<CacheEntry> = cached
                .iter()
                .map(|(&sq_lag, &omega_at_h1)| CacheEntry { alpha, d, sq_lag, omega_at_h1 })
                .collect();
            write_cache_csv(path, &entries)?;
        }
    }

    let scale = h.powf(-alpha);
    Ok(WeightTable {
        alpha,
        dim: d,
        h,
        max_sq_lag: *lags.last().expect("lag zero is always present"),
        lags,
        values: unit.into_iter().map(|w| w * scale).collect(),
    })
}

/// One row of the weight cache.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheEntry {
    pub alpha: f64,
    pub d: usize,
    pub sq_lag: u64,
    pub omega_at_h1: f64,
}

const CACHE_HEADER: &str = "alpha,d,sq_lag,omega_at_h1";

fn cache_path(dir: &Path, alpha: f64, d: usize) -> PathBuf {
    // the bit pattern keeps distinct alphas in distinct files
    dir.join(format!("weights_d{d}_alpha{:016x}.csv", alpha.to_bits()))
}

/// Write cache rows (17 significant digits) atomically.
pub fn write_cache_csv(path: &Path, entries: &[CacheEntry]) -> Result<()> {
    let mut text = String::with_capacity(32 * (entries.len() + 1));
    text.push_str(CACHE_HEADER);
    text.push('\n');
    for e in entries {
        text.push_str(&format!("{:.16e},{},{},{:.16e}\n", e.alpha, e.d, e.sq_lag, e.omega_at_h1));
    }
    write_atomic(path, text.as_bytes())
}

/// Parse a weight-cache CSV.
pub fn read_cache_csv(path: &Path) -> Result<Vec<CacheEntry>> {
    let text = fs::read_to_string(path)?;
    let err = |line: usize, msg: &str| FracLapError::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CACHE_HEADER => {}
        _ => return Err(err(1, "missing header alpha,d,sq_lag,omega_at_h1")),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(err(i + 1, "expected 4 fields"));
        }
        out.push(CacheEntry {
            alpha: f[0].parse().map_err(|_| err(i + 1, "bad alpha"))?,
            d: f[1].parse().map_err(|_| err(i + 1, "bad d"))?,
            sq_lag: f[2].parse().map_err(|_| err(i + 1, "bad sq_lag"))?,
            omega_at_h1: f[3].parse().map_err(|_| err(i + 1, "bad omega"))?,
        });
    }
    Ok(out)
}
