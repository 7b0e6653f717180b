//! The discrete fractional Laplacian as a multilevel Toeplitz operator.
//!
//! The matrix `A_{kj} = ω(|k - j|²)` on the stored grid is embedded into a
//! multilevel circulant of per-axis size `M_i ≥ 2 N_i - 1`, whose eigenvalues
//! are the DFT of the first column. A matvec is then pad → FFT → multiply →
//! inverse FFT → crop. Lines of the padded array that are known to be zero are
//! never transformed, and on the way back only lines that feed the cropped
//! output are.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
pub use rustfft::num_complex::Complex64;
use realfft::RealFftPlanner;
use rustfft::{Fft, FftPlanner};

use crate::error::{FracLapError, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::specfun::hypergeom::Compensated;
use crate::weights::{build_table_cached, WeightTable};

/// One-dimensional DFTs applied to buffers holding consecutive lines of equal
/// length. Lengths are products of primes ≤ 7.
///
/// Only the complex transforms are required; the real-input variants default
/// to them. Implementations must be callable from several threads at once.
pub trait DftProvider: Send + Sync + std::fmt::Debug {
    /// Unnormalised forward transform `X_k = Σ x_j e^{-2πijk/n}` of every line.
    fn forward(&self, lines: &mut [Complex64], len: usize);
    /// Inverse transform including the 1/n factor, so it undoes [`forward`](Self::forward).
    fn inverse(&self, lines: &mut [Complex64], len: usize);

    /// Forward transform of real lines of length `len`, keeping the
    /// `len/2 + 1` nonredundant outputs per line. `input` may be clobbered.
    fn forward_real(&self, input: &mut [f64], output: &mut [Complex64], len: usize) {
        let half = len / 2 + 1;
        for (src, dst) in input.chunks(len).zip(output.chunks_mut(half)) {
            let mut line: Vec<Complex64> = src.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            self.forward(&mut line, len);
            dst.copy_from_slice(&line[..half]);
        }
    }

    /// Inverse of [`forward_real`](Self::forward_real), normalised. The
    /// imaginary parts that must vanish for a real result are ignored.
    fn inverse_real(&self, input: &mut [Complex64], output: &mut [f64], len: usize) {
        let half = len / 2 + 1;
        for (src, dst) in input.chunks(half).zip(output.chunks_mut(len)) {
            let mut line = vec![Complex64::new(0.0, 0.0); len];
            line[..half].copy_from_slice(src);
            for k in half..len {
                line[k] = src[len - k].conj();
            }
            self.inverse(&mut line, len);
            for (o, z) in dst.iter_mut().zip(&line) {
                *o = z.re;
            }
        }
    }
}

/// [`DftProvider`] backed by `rustfft`, with the real-input transforms from
/// `realfft`. Plans are cached per length.
pub struct RustFftProvider {
    planner: Mutex<FftPlanner<f64>>,
    real_planner: Mutex<RealFftPlanner<f64>>,
    plans: Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>,
}

impl std::fmt::Debug for RustFftProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("RustFftProvider")
    }
}

impl Default for RustFftProvider {
    fn default() -> Self {
        Self {
            planner: Mutex::new(FftPlanner::new()),
            real_planner: Mutex::new(RealFftPlanner::new()),
            plans: Mutex::new(HashMap::new()),
        }
    }
}

impl RustFftProvider {
    pub fn new() -> Self {
        Self::default()
    }

    fn plan(&self, len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
        let mut plans = self.plans.lock().expect("fft plan cache poisoned");
        plans
            .entry((len, inverse))
            .or_insert_with(|| {
                let mut planner = self.planner.lock().expect("fft planner poisoned");
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    }
}

impl DftProvider for RustFftProvider {
    fn forward(&self, lines: &mut [Complex64], len: usize) {
        self.plan(len, false).process(lines);
    }

    fn inverse(&self, lines: &mut [Complex64], len: usize) {
        self.plan(len, true).process(lines);
        let s = 1.0 / len as f64;
        for v in lines.iter_mut() {
            *v *= s;
        }
    }

    fn forward_real(&self, input: &mut [f64], output: &mut [Complex64], len: usize) {
        let r2c = self.real_planner.lock().expect("fft planner poisoned").plan_fft_forward(len);
        let mut scratch = r2c.make_scratch_vec();
        for (src, dst) in input.chunks_mut(len).zip(output.chunks_mut(len / 2 + 1)) {
            r2c.process_with_scratch(src, dst, &mut scratch).expect("buffer sizes match the plan");
        }
    }

    fn inverse_real(&self, input: &mut [Complex64], output: &mut [f64], len: usize) {
        let c2r = self.real_planner.lock().expect("fft planner poisoned").plan_fft_inverse(len);
        let mut scratch = c2r.make_scratch_vec();
        let half = len / 2 + 1;
        let s = 1.0 / len as f64;
        for (src, dst) in input.chunks_mut(half).zip(output.chunks_mut(len)) {
            src[0].im = 0.0;
            if len % 2 == 0 {
                src[half - 1].im = 0.0;
            }
            c2r.process_with_scratch(src, dst, &mut scratch).expect("buffer sizes match the plan");
            for v in dst.iter_mut() {
                *v *= s;
            }
        }
    }
}

fn default_provider() -> Arc<dyn DftProvider> {
    static SHARED: std::sync::OnceLock<Arc<RustFftProvider>> = std::sync::OnceLock::new();
    SHARED.get_or_init(|| Arc::new(RustFftProvider::new())).clone()
}

/// Smallest integer ≥ `n` whose prime factors are all ≤ 7.
pub fn next_7_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// A real-symmetric multilevel Toeplitz matrix applied through its circulant
/// embedding. Shared by single operators and their linear combinations.
///
/// The last axis is transformed real-to-complex, so spectra and work arrays
/// have shape `(M_0, ..., M_{d-2}, M_{d-1}/2 + 1)`.
#[derive(Debug, Clone)]
pub struct CirculantEmbedding {
    pub extents: Vec<usize>,
    pub embed_extents: Vec<usize>,
    /// Eigenvalues of the embedding circulant on the half-spectrum grid.
    pub spectrum: Arc<Vec<f64>>,
    /// Largest imaginary part seen in the planning transform relative to the
    /// largest real part. Zeroed from `spectrum`.
    pub imag_residue: f64,
    provider: Arc<dyn DftProvider>,
}

impl CirculantEmbedding {
    /// Embed the Toeplitz matrix whose entry at lag vector `l` is `entry(Σ l_i²)`.
    pub fn new(extents: &[usize], provider: Arc<dyn DftProvider>, entry: impl Fn(u64) -> f64 + Sync) -> Self {
        let embed: Vec<usize> = extents.iter().map(|&n| next_7_smooth(2 * n - 1)).collect();
        let total: usize = embed.iter().product();
        let d = embed.len();
        let mut gen = vec![0.0f64; total];
        gen.par_iter_mut().enumerate().for_each(|(flat, g)| {
            let mut rem = flat;
            let mut sq = 0u64;
            for axis in (0..d).rev() {
                let m = embed[axis];
                let i = rem % m;
                rem /= m;
                let n = extents[axis];
                let lag = if i < n {
                    i
                } else if i > m - n {
                    m - i
                } else {
                    return;
                };
                sq += (lag * lag) as u64;
            }
            *g = entry(sq);
        });
        let mut e = CirculantEmbedding {
            extents: extents.to_vec(),
            embed_extents: embed.clone(),
            spectrum: Arc::new(Vec::new()),
            imag_residue: 0.0,
            provider,
        };
        let full = e.forward(&mut gen, &embed[..d - 1]);
        let max_re = full.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
        let max_im = full.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        e.imag_residue = if max_re > 0.0 { max_im / max_re } else { max_im };
        e.spectrum = Arc::new(full.into_iter().map(|z| z.re).collect());
        e
    }

    /// Same embedding with spectrum `Σ c_i S_i + shift`.
    pub fn combine(parts: &[(f64, &CirculantEmbedding)], shift: f64) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| FracLapError::Config("at least one operator term is required".into()))?
            .1;
        if parts.iter().any(|(_, e)| e.embed_extents != first.embed_extents || e.extents != first.extents) {
            return Err(FracLapError::SpecMismatch("operator terms live on different grids".into()));
        }
        let mut spectrum = vec![shift; first.spectrum.len()];
        for (c, e) in parts {
            for (s, v) in spectrum.iter_mut().zip(e.spectrum.iter()) {
                *s += c * v;
            }
        }
        Ok(CirculantEmbedding {
            spectrum: Arc::new(spectrum),
            imag_residue: parts.iter().fold(0.0f64, |m, (_, e)| m.max(e.imag_residue)),
            ..first.clone()
        })
    }

    /// Shape of the half-spectrum arrays.
    fn half_shape(&self) -> Vec<usize> {
        let mut s = self.embed_extents.clone();
        let last = s.len() - 1;
        s[last] = s[last] / 2 + 1;
        s
    }

    /// Indices of rows (all axes but the last) whose outer indices lie inside `active`.
    fn active_rows(&self, active: &[usize]) -> Vec<bool> {
        let m = &self.embed_extents;
        let d = m.len();
        let rows: usize = m[..d - 1].iter().product();
        (0..rows)
            .map(|mut r| {
                for axis in (0..d - 1).rev() {
                    if r % m[axis] >= active[axis] {
                        return false;
                    }
                    r /= m[axis];
                }
                true
            })
            .collect()
    }

    /// Real array of the embedding shape → half spectrum. Rows outside
    /// `active` (outer axes) must be zero and are skipped.
    fn forward(&self, real: &mut [f64], active: &[usize]) -> Vec<Complex64> {
        let m = &self.embed_extents;
        let d = m.len();
        let len = m[d - 1];
        let shape = self.half_shape();
        let half = shape[d - 1];
        let mut out = vec![Complex64::new(0.0, 0.0); real.len() / len * half];
        let rows = self.active_rows(active);
        let work: Vec<(&mut [f64], &mut [Complex64])> = real
            .chunks_mut(len)
            .zip(out.chunks_mut(half))
            .zip(&rows)
            .filter_map(|(pair, &keep)| keep.then_some(pair))
            .collect();
        work.into_par_iter().for_each(|(src, dst)| self.provider.forward_real(src, dst, len));
        let mut act = active.to_vec();
        act.push(half);
        let axes: Vec<usize> = (0..d - 1).rev().collect();
        self.transform(&mut out, &shape, &act, &axes, false);
        out
    }

    /// Half spectrum → real array, computing only rows inside `active`.
    fn inverse(&self, spec: &mut [Complex64], active: &[usize]) -> Vec<f64> {
        let m = &self.embed_extents;
        let d = m.len();
        let len = m[d - 1];
        let shape = self.half_shape();
        let half = shape[d - 1];
        let mut act = active.to_vec();
        act.push(half);
        let axes: Vec<usize> = (0..d - 1).collect();
        self.transform(spec, &shape, &act, &axes, true);
        let mut out = vec![0.0f64; spec.len() / half * len];
        let rows = self.active_rows(active);
        let work: Vec<(&mut [Complex64], &mut [f64])> = spec
            .chunks_mut(half)
            .zip(out.chunks_mut(len))
            .zip(&rows)
            .filter_map(|(pair, &keep)| keep.then_some(pair))
            .collect();
        work.into_par_iter().for_each(|(src, dst)| self.provider.inverse_real(src, dst, len));
        out
    }

    /// Complex DFTs along `axes` (in that order) of an array of `shape`.
    ///
    /// Along axis `a`, only lines whose indices on axes `< a` lie inside
    /// `active` are processed. Taking axes last to first on the way forward
    /// skips lines that are still identically zero; first to last on the way
    /// back skips lines that the final crop discards.
    fn transform(&self, buf: &mut [Complex64], shape: &[usize], active: &[usize], axes: &[usize], inverse: bool) {
        for &a in axes {
            let len = shape[a];
            let stride: usize = shape[a + 1..].iter().product();
            let outer_strides: Vec<usize> = (0..a).map(|i| shape[i + 1..].iter().product()).collect();
            let outer_count: usize = active[..a].iter().product();
            let mut starts = Vec::with_capacity(outer_count * stride);
            for o in 0..outer_count {
                let mut rem = o;
                let mut base = 0;
                for i in (0..a).rev() {
                    base += (rem % active[i]) * outer_strides[i];
                    rem /= active[i];
                }
                starts.extend((0..stride).map(|r| base + r));
            }
            if stride == 1 {
                // contiguous lines: transform in place
                let mut wanted = vec![false; buf.len() / len];
                for &st in &starts {
                    wanted[st / len] = true;
                }
                let picked: Vec<&mut [Complex64]> = buf
                    .chunks_mut(len)
                    .zip(&wanted)
                    .filter_map(|(c, &w)| w.then_some(c))
                    .collect();
                picked.into_par_iter().for_each(|line| self.run(line, len, inverse));
                continue;
            }
            // Strided lines come in runs of consecutive starts, so a batch of
            // neighbouring columns is gathered row by row.
            let batch = (1 << 16) / len;
            let batch = batch.clamp(1, stride);
            let src: &[Complex64] = buf;
            let done: Vec<Vec<Complex64>> = starts
                .par_chunks(batch)
                .map(|chunk| {
                    let b = chunk.len();
                    let mut lines = vec![Complex64::new(0.0, 0.0); b * len];
                    for k in 0..len {
                        for (j, &st) in chunk.iter().enumerate() {
                            lines[j * len + k] = src[st + k * stride];
                        }
                    }
                    self.run(&mut lines, len, inverse);
                    lines
                })
                .collect();
            for (chunk, lines) in starts.chunks(batch).zip(done) {
                for k in 0..len {
                    for (j, &st) in chunk.iter().enumerate() {
                        buf[st + k * stride] = lines[j * len + k];
                    }
                }
            }
        }
    }

    fn run(&self, lines: &mut [Complex64], len: usize, inverse: bool) {
        if inverse {
            self.provider.inverse(lines, len);
        } else {
            self.provider.forward(lines, len);
        }
    }

    /// `y = T x` for the Toeplitz matrix `T` on the grid extents.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = &self.extents;
        let m = &self.embed_extents;
        let d = n.len();
        assert_eq!(x.len(), n.iter().product::<usize>(), "input length does not match the grid");
        let mut real = vec![0.0f64; m.iter().product()];
        let last = n[d - 1];
        for (row, chunk) in x.chunks(last).enumerate() {
            let off = embed_offset(row, n, m);
            real[off..off + last].copy_from_slice(chunk);
        }
        let mut z = self.forward(&mut real, &n[..d - 1]);
        z.par_iter_mut().zip(self.spectrum.par_iter()).for_each(|(v, s)| *v *= s);
        let full = self.inverse(&mut z, &n[..d - 1]);
        let mut y = vec![0.0; x.len()];
        for (row, chunk) in y.chunks_mut(last).enumerate() {
            let off = embed_offset(row, n, m);
            chunk.copy_from_slice(&full[off..off + last]);
        }
        y
    }
}

/// Offset in the embedding of the first element of row `row` (all axes but
/// the last) of the grid.
fn embed_offset(mut row: usize, n: &[usize], m: &[usize]) -> usize {
    let d = n.len();
    let mut off = 0;
    let mut stride = m[d - 1];
    for axis in (0..d - 1).rev() {
        off += (row % n[axis]) * stride;
        row /= n[axis];
        stride *= m[axis];
    }
    off
}

/// (-Δ)^{α/2}_h on a box grid with zero extension outside the stored points.
#[derive(Debug, Clone)]
pub struct FracLapOperator {
    pub alpha: f64,
    pub spec: GridSpec,
    pub table: Arc<WeightTable>,
    pub circ: CirculantEmbedding,
}

impl FracLapOperator {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn embed_extents(&self) -> &[usize] {
        &self.circ.embed_extents
    }

    /// ω(0), the diagonal of the matrix.
    pub fn diagonal(&self) -> f64 {
        self.table.at(0)
    }

    fn check(&self, u: &GridFunction) -> Result<()> {
        if self.spec.compatible(&u.spec) {
            Ok(())
        } else {
            Err(FracLapError::SpecMismatch(format!(
                "operator grid {:?} does not match input grid {:?}",
                self.spec, u.spec
            )))
        }
    }
}

/// Build the operator: weight table for the grid's lag set and the cached
/// spectrum of its circulant embedding.
pub fn build_operator(alpha: f64, spec: &GridSpec) -> Result<FracLapOperator> {
    build_operator_with(alpha, spec, None, default_provider())
}

/// [`build_operator`] with an optional weight cache directory and a chosen
/// DFT backend.
pub fn build_operator_with(
    alpha: f64,
    spec: &GridSpec,
    cache_dir: Option<&std::path::Path>,
    provider: Arc<dyn DftProvider>,
) -> Result<FracLapOperator> {
    let table = build_table_cached(alpha, spec.h, spec.dim(), &spec.extents, cache_dir)?;
    let circ = CirculantEmbedding::new(&spec.extents, provider, |m| table.at(m));
    log::debug!(
        "operator alpha={alpha} extents={:?} embedding={:?} imag residue {:.1e}",
        spec.extents,
        circ.embed_extents,
        circ.imag_residue
    );
    Ok(FracLapOperator { alpha, spec: spec.clone(), table: Arc::new(table), circ })
}

/// `v_k = Σ_j ω(|k - j|²) u_j` by direct summation, O(N²).
pub fn apply_dense(op: &FracLapOperator, u: &GridFunction) -> Result<GridFunction> {
    op.check(u)?;
    let spec = &op.spec;
    let idx: Vec<Vec<usize>> = (0..spec.len()).map(|i| spec.unravel(i)).collect();
    let data = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            for (j, &uj) in u.data.iter().enumerate() {
                if uj == 0.0 {
                    continue;
                }
                acc += op.table.at(sq_dist(&idx[k], &idx[j])) * uj;
            }
            acc
        })
        .collect();
    Ok(GridFunction { spec: spec.clone(), data })
}

fn sq_dist(a: &[usize], b: &[usize]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let l = x.abs_diff(y) as u64;
            l * l
        })
        .sum()
}

/// The same product through the circulant embedding, O(N log N).
/// For α = 0 the operator is the identity and the input is returned as is.
pub fn apply_fft(op: &FracLapOperator, u: &GridFunction) -> Result<GridFunction> {
    op.check(u)?;
    if op.alpha == 0.0 {
        return Ok(GridFunction { spec: op.spec.clone(), data: u.data.clone() });
    }
    Ok(GridFunction { spec: op.spec.clone(), data: op.circ.apply(&u.data) })
}

/// The dense restricted matrix `A_{kj} = ω(|k - j|²)`, row-major.
pub fn dense_matrix(op: &FracLapOperator) -> Vec<f64> {
    let spec = &op.spec;
    let n = spec.len();
    let idx: Vec<Vec<usize>> = (0..n).map(|i| spec.unravel(i)).collect();
    let mut a = vec![0.0; n * n];
    a.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = op.table.at(sq_dist(&idx[k], &idx[j]));
        }
    });
    a
}

/// Discrete symbol estimate `Σ_{|k|∞ ≤ K} ω(k) e^{-i ξ·k h}`.
///
/// The operator (same α and h) is applied to a delta at the centre of a grid
/// of `2K + 1` points per axis, and the semi-discrete transform of the result
/// is divided by `h^d`. The weights are even, so the sum is real.
pub fn symbol_probe(op: &FracLapOperator, xi: &[f64], halfwidth: usize) -> Result<f64> {
    let d = op.dim();
    if xi.len() != d {
        return Err(FracLapError::Domain(format!("ξ has {} components, grid has {d}", xi.len())));
    }
    let h = op.spec.h;
    if xi.iter().any(|x| x.abs() > std::f64::consts::PI / h * (1.0 + 1e-12)) {
        return Err(FracLapError::Domain("ξ lies outside [-π/h, π/h]^d".into()));
    }
    let w = 2 * halfwidth + 1;
    let aux = GridSpec::new(h, vec![w; d], vec![-(halfwidth as f64) * h; d])?;
    let aux_op = build_operator(op.alpha, &aux)?;
    let delta = GridFunction::delta(aux.clone(), &vec![halfwidth; d]);
    let v = apply_fft(&aux_op, &delta)?;
    let mut acc = Compensated::default();
    for (flat, &value) in v.data.iter().enumerate() {
        let idx = aux.unravel(flat);
        let phase: f64 = idx
            .iter()
            .zip(xi)
            .map(|(&i, &x)| x * (i as f64 - halfwidth as f64) * h)
            .sum();
        acc.add(value * phase.cos());
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample;
    use std::f64::consts::PI;

    fn grid1(n: usize, h: f64) -> GridSpec {
        GridSpec::new(h, vec![n], vec![0.0]).unwrap()
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(next_7_smooth(7), 7);
        assert_eq!(next_7_smooth(11), 12);
        assert_eq!(next_7_smooth(127), 128);
        assert_eq!(next_7_smooth(1023), 1024);
        assert_eq!(next_7_smooth(2045), 2048);
        let op = build_operator(1.0, &grid1(4, 1.0)).unwrap();
        assert_eq!(op.embed_extents(), &[7]);
    }

    #[test]
    fn provider_round_trip() {
        let p = RustFftProvider::new();
        let orig: Vec<Complex64> = (0..2 * 30).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let mut v = orig.clone();
        p.forward(&mut v, 30);
        p.inverse(&mut v, 30);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() <= 1e-13 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn identity_for_alpha_zero() {
        let spec = GridSpec::new(0.125, vec![5, 7], vec![0.0, 0.0]).unwrap();
        let u = sample(|x| (3.0 * x[0]).sin() + x[1], &spec).unwrap();
        let op = build_operator(0.0, &spec).unwrap();
        assert_eq!(apply_dense(&op, &u).unwrap(), u);
        let v = apply_fft(&op, &u).unwrap();
        for (a, b) in v.data.iter().zip(&u.data) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn real_spectrum() {
        let op = build_operator(2.0, &grid1(50, 1.0)).unwrap();
        assert!(op.circ.imag_residue < 1e-10);
    }

    #[test]
    fn delta_gives_weight_row() {
        let spec = grid1(9, 1.0);
        let op = build_operator(2.0, &spec).unwrap();
        let v = apply_dense(&op, &GridFunction::delta(spec, &[4])).unwrap();
        for (k, &x) in v.data.iter().enumerate() {
            let n = (k as i64 - 4).unsigned_abs();
            let expected = if n == 0 {
                PI * PI / 3.0
            } else {
                2.0 * if n % 2 == 0 { 1.0 } else { -1.0 } / (n * n) as f64
            };
            assert!((x - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn fft_matches_dense() {
        for (spec, alpha) in [
            (grid1(64, 0.1), 1.7),
            (GridSpec::new(0.2, vec![16, 16], vec![0.0, 0.0]).unwrap(), 0.5),
            (GridSpec::new(0.2, vec![5, 7, 6], vec![0.0, 0.0, 0.0]).unwrap(), 1.2),
        ] {
            let op = build_operator(alpha, &spec).unwrap();
            let u = sample(|x| x.iter().map(|t| (7.3 * t).sin()).sum::<f64>() + 0.3, &spec).unwrap();
            let a = apply_dense(&op, &u).unwrap();
            let b = apply_fft(&op, &u).unwrap();
            let num: f64 = a.data.iter().zip(&b.data).map(|(x, y)| (x - y).powi(2)).sum();
            let den: f64 = a.data.iter().map(|x| x * x).sum();
            assert!((num / den).sqrt() < 1e-12, "alpha {alpha}, extents {:?}", spec.extents);
        }
    }

    #[test]
    fn symbol_at_origin_vanishes() {
        let op = build_operator(1.0, &grid1(3, 1.0)).unwrap();
        let s = symbol_probe(&op, &[0.0], 1000).unwrap();
        assert!(s.abs() < 1e-2);
    }
}
