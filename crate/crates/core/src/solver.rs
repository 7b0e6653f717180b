//! Fractional elliptic problems on a box:
//!
//! ```text
//! Σ_i c_i (-Δ)^{α_i/2} u + μ u = f   in Ω,      u = g   on Ω^c
//! ```
//!
//! discretised on the interior lattice points of Ω. Exterior data enter the
//! right-hand side only; the operator itself is the principal (restricted)
//! block of the Toeplitz matrix, applied through one circulant whose spectrum
//! is `Σ c_i S_i + μ`.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{FracLapError, Result};
use crate::grid::{try_sample, GridFunction, GridSpec};
use crate::operator::{build_operator_with, dense_matrix, CirculantEmbedding, FracLapOperator, RustFftProvider};

/// A scalar field on R^d.
pub type Field = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// One `c (-Δ)^{α/2}` term of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorTerm {
    pub coefficient: f64,
    pub alpha: f64,
}

/// Exterior data g on `Ω^c`, used inside the box `|x|∞ ≤ extent`.
#[derive(Clone)]
pub struct Exterior {
    pub field: Field,
    /// Half-width L of the truncation box.
    pub extent: f64,
    /// Exterior points with `|g| · (largest off-diagonal weight) < tau_ext` are dropped.
    pub tau_ext: f64,
}

impl std::fmt::Debug for Exterior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Exterior")
            .field("extent", &self.extent)
            .field("tau_ext", &self.tau_ext)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct EllipticProblem {
    pub terms: Vec<OperatorTerm>,
    /// μ, the coefficient of the `+u` term.
    pub reaction: f64,
    /// Interior points of the box Ω.
    pub domain: GridSpec,
    pub rhs: Field,
    /// `None` means u = 0 outside Ω.
    pub exterior: Option<Exterior>,
}

impl std::fmt::Debug for EllipticProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EllipticProblem")
            .field("terms", &self.terms)
            .field("reaction", &self.reaction)
            .field("domain", &self.domain)
            .field("exterior", &self.exterior)
            .finish_non_exhaustive()
    }
}

impl EllipticProblem {
    /// `(-Δ)^{α/2} u = f` with u = 0 outside Ω.
    pub fn poisson(alpha: f64, domain: GridSpec, rhs: Field) -> Self {
        Self {
            terms: vec![OperatorTerm { coefficient: 1.0, alpha }],
            reaction: 0.0,
            domain,
            rhs,
            exterior: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(FracLapError::Config("a problem needs at least one operator term".into()));
        }
        for t in &self.terms {
            if !(t.alpha > 0.0 && t.alpha <= 2.0) {
                return Err(FracLapError::Config(format!("alpha = {} is outside (0, 2]", t.alpha)));
            }
            if !(t.coefficient >= 0.0) || !t.coefficient.is_finite() {
                return Err(FracLapError::Config(format!("coefficient {} must be >= 0", t.coefficient)));
            }
        }
        if !(self.reaction >= 0.0) || !self.reaction.is_finite() {
            return Err(FracLapError::Config(format!("reaction {} must be >= 0", self.reaction)));
        }
        if self.terms.iter().map(|t| t.coefficient).sum::<f64>() <= 0.0 && self.reaction <= 0.0 {
            return Err(FracLapError::Config("operator is identically zero".into()));
        }
        if let Some(ext) = &self.exterior {
            let reach = self.box_bounds().iter().fold(0.0f64, |m, &(lo, hi)| m.max(lo.abs()).max(hi.abs()));
            if !(ext.extent >= reach) {
                return Err(FracLapError::Config(format!(
                    "exterior extent {} does not contain the domain (needs >= {reach})",
                    ext.extent
                )));
            }
            if !(ext.tau_ext >= 0.0) {
                return Err(FracLapError::Config("tau_ext must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// `(lo, hi)` of Ω per axis: one spacing beyond the outermost interior points.
    pub fn box_bounds(&self) -> Vec<(f64, f64)> {
        let s = &self.domain;
        (0..s.dim())
            .map(|a| (s.origin[a] - s.h, s.coord(a, s.extents[a] - 1) + s.h))
            .collect()
    }
}

/// Effective exterior truncation, recorded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    #[serde(rename = "L")]
    pub extent: f64,
    pub tau_ext: f64,
    /// Exterior points that contributed to the lift.
    pub points_used: usize,
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: GridFunction,
    pub iterations: usize,
    pub relative_residual: f64,
    pub matvec_count: usize,
    pub wall_time: Duration,
    pub converged: bool,
    pub tol: f64,
    pub residual_history: Vec<f64>,
    pub terms: Vec<OperatorTerm>,
    pub reaction: f64,
    pub truncation: Option<Truncation>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    alphas: Vec<f64>,
    coefficients: Vec<f64>,
    reaction: f64,
    h: f64,
    extents: &'a [usize],
    tol: f64,
    converged: bool,
    iterations: usize,
    relative_residual: f64,
    matvec_count: usize,
    truncation: Option<Truncation>,
    residual_history: &'a [f64],
    timing: Timing,
}

#[derive(Serialize)]
struct Timing {
    wall_time_ms: f64,
}

impl SolveReport {
    /// JSON form of the report. The solution itself is written separately.
    pub fn to_json(&self) -> Result<String> {
        let j = ReportJson {
            alphas: self.terms.iter().map(|t| t.alpha).collect(),
            coefficients: self.terms.iter().map(|t| t.coefficient).collect(),
            reaction: self.reaction,
            h: self.solution.spec.h,
            extents: &self.solution.spec.extents,
            tol: self.tol,
            converged: self.converged,
            iterations: self.iterations,
            relative_residual: self.relative_residual,
            matvec_count: self.matvec_count,
            truncation: self.truncation,
            residual_history: &self.residual_history,
            timing: Timing { wall_time_ms: self.wall_time.as_secs_f64() * 1e3 },
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }
}

/// Knobs for [`solve_with`].
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

pub const DEFAULT_TOL: f64 = 1e-12;

/// 10 √N, raised to 10 n^{α/2} (n the longest axis) because the condition
/// number grows like n^α, and never below 200.
pub fn default_max_iter(p: &EllipticProblem) -> usize {
    let n = p.domain.len() as f64;
    let longest = p.domain.extents.iter().copied().max().unwrap_or(1) as f64;
    let alpha = p.terms.iter().filter(|t| t.coefficient > 0.0).map(|t| t.alpha).fold(0.0, f64::max);
    let it = 10.0 * n.sqrt().max(longest.powf(alpha / 2.0));
    (it.ceil() as usize).max(200)
}

/// The assembled discrete operator `Σ c_i A_i + μ I` on the interior grid.
#[derive(Debug, Clone)]
pub struct EllipticSystem {
    pub spec: GridSpec,
    pub operators: Vec<(f64, FracLapOperator)>,
    pub reaction: f64,
    pub circ: CirculantEmbedding,
    /// Σ c_i ω_i(0) + μ, the (constant) diagonal.
    pub diagonal: f64,
}

impl EllipticSystem {
    pub fn new(p: &EllipticProblem, cache_dir: Option<&Path>) -> Result<Self> {
        p.validate()?;
        let provider = Arc::new(RustFftProvider::new());
        let operators = p
            .terms
            .iter()
            .map(|t| Ok((t.coefficient, build_operator_with(t.alpha, &p.domain, cache_dir, provider.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        let parts: Vec<(f64, &CirculantEmbedding)> = operators.iter().map(|(c, op)| (*c, &op.circ)).collect();
        let circ = CirculantEmbedding::combine(&parts, p.reaction)?;
        let diagonal = operators.iter().map(|(c, op)| c * op.diagonal()).sum::<f64>() + p.reaction;
        Ok(Self { spec: p.domain.clone(), operators, reaction: p.reaction, circ, diagonal })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.circ.apply(x)
    }

    /// Dense `Σ c_i A_i + μ I`.
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        let n = self.spec.len();
        if n > 4096 {
            return Err(FracLapError::TooLarge(format!("dense assembly of {n} unknowns (limit 4096)")));
        }
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (c, op) in &self.operators {
            let m = dense_matrix(op);
            for k in 0..n {
                for j in 0..n {
                    a[(k, j)] += c * m[k * n + j];
                }
            }
        }
        for k in 0..n {
            a[(k, k)] += self.reaction;
        }
        Ok(a)
    }
}

/// The grid of lattice points in `[-L, L]^d` aligned with the domain grid,
/// and the offset of the domain inside it.
fn exterior_grid(domain: &GridSpec, extent: f64) -> Result<(GridSpec, Vec<usize>)> {
    let h = domain.h;
    let mut extents = Vec::new();
    let mut origin = Vec::new();
    let mut offset = Vec::new();
    for a in 0..domain.dim() {
        let lo = domain.origin[a];
        let hi = domain.coord(a, domain.extents[a] - 1);
        let below = ((lo + extent) / h + 1e-9).floor().max(0.0) as usize;
        let above = ((extent - hi) / h + 1e-9).floor().max(0.0) as usize;
        extents.push(domain.extents[a] + below + above);
        origin.push(lo - below as f64 * h);
        offset.push(below);
    }
    Ok((GridSpec::new(h, extents, origin)?, offset))
}

/// `b_k = f(x_k) - Σ_i c_i Σ_{j ∉ Ω, |x_j|∞ ≤ L} ω_{α_i}(|k - j|) g(x_j)`.
pub fn assemble_rhs(p: &EllipticProblem) -> Result<GridFunction> {
    Ok(assemble_rhs_with(p, None)?.0)
}

fn assemble_rhs_with(p: &EllipticProblem, cache_dir: Option<&Path>) -> Result<(GridFunction, Option<Truncation>)> {
    p.validate()?;
    let rhs = p.rhs.clone();
    let mut b = try_sample(
        |x| {
            let v = rhs(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FracLapError::NonFinite { point: x.to_vec(), value: v })
            }
        },
        &p.domain,
    )?;
    let Some(ext) = &p.exterior else {
        return Ok((b, None));
    };
    let (grid, offset) = exterior_grid(&p.domain, ext.extent)?;
    let provider = Arc::new(RustFftProvider::new());
    let ops = p
        .terms
        .iter()
        .map(|t| Ok((t.coefficient, build_operator_with(t.alpha, &grid, cache_dir, provider.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    // largest off-diagonal weight magnitude of the combined operator
    let bound: f64 = ops
        .iter()
        .map(|(c, op)| c * op.table.iter().skip(1).fold(0.0f64, |m, (_, w)| m.max(w.abs())))
        .sum();
    let inside = |idx: &[usize]| idx.iter().zip(&offset).zip(&p.domain.extents).all(|((&i, &o), &n)| i >= o && i < o + n);
    let g = ext.field.clone();
    let mut used = 0usize;
    let mut data = vec![0.0; grid.len()];
    for (flat, v) in data.iter_mut().enumerate() {
        let idx = grid.unravel(flat);
        if inside(&idx) {
            continue;
        }
        let x = grid.point(flat);
        let gv = g(&x);
        if !gv.is_finite() {
            return Err(FracLapError::NonFinite { point: x, value: gv });
        }
        if gv.abs() * bound >= ext.tau_ext && gv != 0.0 {
            *v = gv;
            used += 1;
        }
    }
    if used > 0 {
        let parts: Vec<(f64, &CirculantEmbedding)> = ops.iter().map(|(c, op)| (*c, &op.circ)).collect();
        let lift = CirculantEmbedding::combine(&parts, 0.0)?.apply(&data);
        for (k, bk) in b.data.iter_mut().enumerate() {
            let idx = p.domain.unravel(k);
            let flat = idx
                .iter()
                .zip(&offset)
                .zip(&grid.extents)
                .fold(0, |acc, ((&i, &o), &n)| acc * n + i + o);
            *bk -= lift[flat];
        }
    }
    Ok((b, Some(Truncation { extent: ext.extent, tau_ext: ext.tau_ext, points_used: used })))
}

/// Preconditioned conjugate gradients on `system`, starting from zero.
///
/// The preconditioner is the Jacobi one. The diagonal of a Toeplitz system
/// is constant, so it only rescales the iteration.
pub fn pcg(system: &EllipticSystem, b: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, CgStats) {
    let n = b.len();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    let mut stats = CgStats::default();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        stats.converged = true;
        return (x, stats);
    }
    let inv_diag = 1.0 / system.diagonal;
    let mut r = b.to_vec();
    let mut restarts = 0;
    loop {
        let mut z: Vec<f64> = r.iter().map(|v| v * inv_diag).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        loop {
            let rel = dot(&r, &r).sqrt() / bnorm;
            stats.history.push(rel);
            if rel <= tol || stats.iterations >= max_iter {
                break;
            }
            let ap = system.apply(&p);
            stats.matvecs += 1;
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                log::warn!("CG breakdown: pᵀAp = {pap:e}");
                break;
            }
            let step = rz / pap;
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag;
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
            stats.iterations += 1;
        }
        // confirm with the true residual; restart from it if the recursion drifted
        let ax = system.apply(&x);
        stats.matvecs += 1;
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
        stats.relative_residual = dot(&r, &r).sqrt() / bnorm;
        stats.converged = stats.relative_residual <= tol;
        if stats.converged || stats.iterations >= max_iter || restarts >= 3 {
            return (x, stats);
        }
        restarts += 1;
    }
}

#[derive(Debug, Clone, Default)]
pub struct CgStats {
    pub iterations: usize,
    pub matvecs: usize,
    pub relative_residual: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// Solve and always return a report; check `converged` for the outcome.
pub fn solve_with(p: &EllipticProblem, opts: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let tol = opts.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0) {
        return Err(FracLapError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let cache = opts.cache_dir.as_deref();
    let system = EllipticSystem::new(p, cache)?;
    let (b, truncation) = assemble_rhs_with(p, cache)?;
    let max_iter = opts.max_iter.unwrap_or_else(|| default_max_iter(p));
    let (x, stats) = pcg(&system, &b.data, tol, max_iter);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(FracLapError::NonFinite { point: vec![], value: f64::NAN });
    }
    Ok(SolveReport {
        solution: GridFunction { spec: p.domain.clone(), data: x },
        iterations: stats.iterations,
        relative_residual: stats.relative_residual,
        matvec_count: stats.matvecs,
        wall_time: start.elapsed(),
        converged: stats.converged,
        tol,
        residual_history: stats.history,
        terms: p.terms.clone(),
        reaction: p.reaction,
        truncation,
    })
}

/// Conjugate-gradient solve; non-convergence is an error carrying the report.
pub fn solve(p: &EllipticProblem, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let report = solve_with(p, &SolveOptions { tol: Some(tol), max_iter: Some(max_iter), cache_dir: None })?;
    if report.converged {
        Ok(report)
    } else {
        Err(FracLapError::NotConverged { report: Box::new(report) })
    }
}

/// Direct solve by Cholesky factorisation of the dense matrix (N ≤ 4096).
pub fn solve_dense(p: &EllipticProblem) -> Result<GridFunction> {
    let system = EllipticSystem::new(p, None)?;
    let a = system.dense()?;
    let b = assemble_rhs(p)?;
    let chol = a
        .cholesky()
        .ok_or_else(|| FracLapError::Factorization("matrix is not positive definite".into()))?;
    let x = chol.solve(&DVector::from_vec(b.data));
    Ok(GridFunction { spec: p.domain.clone(), data: x.as_slice().to_vec() })
}
