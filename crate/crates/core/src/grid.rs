//! Uniform grids, grid functions, discrete norms and the semi-discrete
//! Fourier transform.
//!
//! Data are stored in row-major order: the last axis varies fastest. Every
//! module relies on this when it maps a flat index to a lag vector.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FracLapError, Result};
use crate::io::write_atomic;

/// Geometry of a uniform grid: spacing, per-axis point counts and the
/// coordinate of index zero on each axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub h: f64,
    pub extents: Vec<usize>,
    pub origin: Vec<f64>,
}

impl GridSpec {
    pub fn new(h: f64, extents: Vec<usize>, origin: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(FracLapError::Domain(format!("grid spacing must be positive, got {h}")));
        }
        if extents.is_empty() || extents.len() != origin.len() {
            return Err(FracLapError::Domain(format!(
                "extents ({}) and origin ({}) must be nonempty and of equal length",
                extents.len(),
                origin.len()
            )));
        }
        if extents.iter().any(|&n| n == 0) {
            return Err(FracLapError::Domain("every extent must be at least 1".into()));
        }
        Ok(Self { h, extents, origin })
    }

    /// Interior lattice points `lo + j h`, `j = 1, ..., (hi - lo)/h - 1`, of the
    /// open box `∏ (lo_i, hi_i)`. Each side length must be a multiple of `h`.
    pub fn interior(lo: &[f64], hi: &[f64], h: f64) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(FracLapError::Domain("box bounds differ in dimension".into()));
        }
        let mut extents = Vec::with_capacity(lo.len());
        for (&a, &b) in lo.iter().zip(hi) {
            let cells = (b - a) / h;
            let n = cells.round();
            if !(b > a) || (cells - n).abs() > 1e-9 * n.max(1.0) || n < 2.0 {
                return Err(FracLapError::Domain(format!(
                    "side ({a}, {b}) is not a multiple of h = {h} with at least one interior point"
                )));
            }
            extents.push(n as usize - 1);
        }
        Self::new(h, extents, lo.iter().map(|&a| a + h).collect())
    }

    /// All points of the lattice `h Z^d` that lie in the closed box `∏ [lo_i, hi_i]`.
    pub fn covering(lo: &[f64], hi: &[f64], h: f64) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(FracLapError::Domain("box bounds differ in dimension".into()));
        }
        let mut extents = Vec::new();
        let mut origin = Vec::new();
        for (&a, &b) in lo.iter().zip(hi) {
            let first = (a / h - 1e-9).ceil() as i64;
            let last = (b / h + 1e-9).floor() as i64;
            if last < first {
                return Err(FracLapError::Domain(format!("box [{a}, {b}] holds no lattice point")));
            }
            extents.push((last - first + 1) as usize);
            origin.push(first as f64 * h);
        }
        Self::new(h, extents, origin)
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    /// Total number of points, ∏ N_i.
    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of index `i` on `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.h
    }

    /// Multi-index of a flat (row-major) index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.extents[axis];
            flat /= self.extents[axis];
        }
        idx
    }

    /// Coordinates of a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.coord(axis, i))
            .collect()
    }

    /// Same geometry up to rounding of the origin.
    pub fn compatible(&self, other: &GridSpec) -> bool {
        self.extents == other.extents
            && (self.h - other.h).abs() <= 1e-14 * self.h
            && self
                .origin
                .iter()
                .zip(&other.origin)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    }

    fn ensure_compatible(&self, other: &GridSpec) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(FracLapError::SpecMismatch(format!(
                "grid h={} extents={:?} origin={:?} vs h={} extents={:?} origin={:?}",
                self.h, self.extents, self.origin, other.h, other.extents, other.origin
            )))
        }
    }
}

/// Real values on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub data: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.len();
        Self { spec, data: vec![0.0; n] }
    }

    pub fn from_vec(spec: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(FracLapError::SpecMismatch(format!(
                "{} values for a grid of {} points",
                data.len(),
                spec.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(FracLapError::NonFinite { point: spec.point(i), value: data[i] });
        }
        Ok(Self { spec, data })
    }

    /// The grid function that is 1 at the given multi-index and 0 elsewhere.
    pub fn delta(spec: GridSpec, at: &[usize]) -> Self {
        let mut u = Self::zeros(spec);
        let flat = at
            .iter()
            .zip(&u.spec.extents)
            .fold(0, |acc, (&i, &n)| {
                assert!(i < n, "delta index out of range");
                acc * n + i
            });
        u.data[flat] = 1.0;
        u
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.spec.h
    }

    /// `u - v` on a shared grid.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.spec.ensure_compatible(&other.spec)?;
        Ok(GridFunction {
            spec: self.spec.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn cell(&self) -> f64 {
        self.spec.h.powi(self.spec.dim() as i32)
    }

    /// Discrete l² norm restricted to points satisfying `keep`.
    pub fn norm_l2_where(&self, keep: impl Fn(&[f64]) -> bool) -> f64 {
        let s: f64 = (0..self.len())
            .filter(|&i| keep(&self.spec.point(i)))
            .map(|i| self.data[i] * self.data[i])
            .sum();
        (self.cell() * s).sqrt()
    }

    /// Discrete l∞ norm restricted to points satisfying `keep`.
    pub fn norm_linf_where(&self, keep: impl Fn(&[f64]) -> bool) -> f64 {
        (0..self.len())
            .filter(|&i| keep(&self.spec.point(i)))
            .fold(0.0, |m, i| m.max(self.data[i].abs()))
    }
}

/// `u_j = f(x_j)` at every grid point.
pub fn sample<F>(f: F, spec: &GridSpec) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let data: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|i| f(&spec.point(i)))
        .collect();
    GridFunction::from_vec(spec.clone(), data)
}

/// Like [`sample`] for fallible fields.
pub fn try_sample<F>(f: F, spec: &GridSpec) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let data: Result<Vec<f64>> = (0..spec.len())
        .into_par_iter()
        .map(|i| f(&spec.point(i)))
        .collect();
    GridFunction::from_vec(spec.clone(), data?)
}

/// max_j |u_j|.
pub fn norm_linf(u: &GridFunction) -> f64 {
    u.data.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// (h^d Σ |u_j|²)^{1/2}.
pub fn norm_l2(u: &GridFunction) -> f64 {
    (u.cell() * u.data.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// ⟨u, v⟩ = h^d Σ u_j v_j. Grid functions are real, so no conjugation is needed.
pub fn inner(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    u.spec.ensure_compatible(&v.spec)?;
    Ok(u.cell() * u.data.iter().zip(&v.data).map(|(a, b)| a * b).sum::<f64>())
}

/// ǔ(ξ) = h^d Σ_j u_j e^{-i ξ·x_j} over the stored points.
pub fn semi_discrete_ft(u: &GridFunction, xi: &[f64]) -> Result<Complex64> {
    let spec = &u.spec;
    if xi.len() != spec.dim() {
        return Err(FracLapError::Domain(format!(
            "frequency has {} components for a {}-dimensional grid",
            xi.len(),
            spec.dim()
        )));
    }
    let bound = PI / spec.h * (1.0 + 1e-12);
    if let Some(x) = xi.iter().find(|x| x.abs() > bound) {
        return Err(FracLapError::Domain(format!(
            "frequency component {x} lies outside [-π/h, π/h] with h = {}",
            spec.h
        )));
    }
    // the exponential factorises over axes
    let factors: Vec<Vec<Complex64>> = (0..spec.dim())
        .map(|axis| {
            (0..spec.extents[axis])
                .map(|i| Complex64::from_polar(1.0, -xi[axis] * spec.coord(axis, i)))
                .collect()
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (flat, &v) in u.data.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let idx = spec.unravel(flat);
        let phase = idx
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |p, (axis, &i)| p * factors[axis][i]);
        acc += v * phase;
    }
    Ok(acc * u.cell())
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".spec.json");
    PathBuf::from(s)
}

/// Write `u` as CSV (`i0,...,x0,...,value`) plus a JSON sidecar
/// `<path>.spec.json` holding the [`GridSpec`].
pub fn write_csv(u: &GridFunction, path: &Path) -> Result<()> {
    let d = u.spec.dim();
    let mut text = String::new();
    let header: Vec<String> = (0..d)
        .map(|a| format!("i{a}"))
        .chain((0..d).map(|a| format!("x{a}")))
        .chain(std::iter::once("value".to_string()))
        .collect();
    text.push_str(&header.join(","));
    text.push('\n');
    for (flat, v) in u.data.iter().enumerate() {
        let idx = u.spec.unravel(flat);
        for i in &idx {
            write!(text, "{i},").unwrap();
        }
        for (axis, &i) in idx.iter().enumerate() {
            write!(text, "{:.16e},", u.spec.coord(axis, i)).unwrap();
        }
        writeln!(text, "{v:.16e}").unwrap();
    }
    write_atomic(path, text.as_bytes())?;
    write_atomic(&sidecar_path(path), serde_json::to_string_pretty(&u.spec)?.as_bytes())
}

/// Read a grid function written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<GridFunction> {
    let spec: GridSpec = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    let spec = GridSpec::new(spec.h, spec.extents, spec.origin)?;
    let text = fs::read_to_string(path)?;
    let err = |line: usize, message: String| FracLapError::Parse { path: path.to_path_buf(), message: format!("line {line}: {message}") };
    let d = spec.dim();
    let mut data = vec![f64::NAN; spec.len()];
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 * d + 1 {
            return Err(err(n + 1, format!("expected {} fields", 2 * d + 1)));
        }
        let mut flat = 0usize;
        for axis in 0..d {
            let i: usize = fields[axis].trim().parse().map_err(|_| err(n + 1, "bad index".into()))?;
            if i >= spec.extents[axis] {
                return Err(err(n + 1, format!("index {i} out of range on axis {axis}")));
            }
            flat = flat * spec.extents[axis] + i;
        }
        data[flat] = fields[2 * d].trim().parse().map_err(|_| err(n + 1, "bad value".into()))?;
    }
    if data.iter().any(|v| v.is_nan()) {
        return Err(err(0, "some grid points have no value".into()));
    }
    GridFunction::from_vec(spec, data)
}
