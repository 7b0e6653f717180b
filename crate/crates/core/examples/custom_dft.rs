//! Plug a different DFT backend into the operator. This one is a naive
//! O(n²) transform, which is enough to check the embedding logic.
//!
//! `cargo run --release --example custom_dft`

use std::f64::consts::PI;
use std::sync::Arc;

use fraclap::grid::{sample, GridSpec};
use fraclap::operator::{apply_dense, apply_fft, build_operator_with, Complex64, DftProvider};

#[derive(Debug)]
struct NaiveDft;

fn naive(lines: &mut [Complex64], len: usize, sign: f64) {
    for line in lines.chunks_mut(len) {
        let src = line.to_vec();
        for (k, out) in line.iter_mut().enumerate() {
            *out = src
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, sign * 2.0 * PI * ((j * k) % len) as f64 / len as f64))
                .sum();
        }
    }
}

impl DftProvider for NaiveDft {
    fn forward(&self, lines: &mut [Complex64], len: usize) {
        naive(lines, len, -1.0);
    }

    fn inverse(&self, lines: &mut [Complex64], len: usize) {
        naive(lines, len, 1.0);
        for v in lines.iter_mut() {
            *v /= len as f64;
        }
    }
}

fn main() -> fraclap::Result<()> {
    let spec = GridSpec::interior(&[-1.0, -1.0], &[1.0, 1.0], 0.125)?;
    let u = sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), &spec)?;
    let op = build_operator_with(1.3, &spec, None, Arc::new(NaiveDft))?;
    let fast = apply_fft(&op, &u)?;
    let dense = apply_dense(&op, &u)?;
    let gap = fast.data.iter().zip(&dense.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("embedding {:?}, max |naive-dft - dense| = {gap:.2e}", op.embed_extents());
    Ok(())
}
