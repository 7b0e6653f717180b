//! Apply the operator to (1 + x²)^{-7} and compare with the exact fractional
//! Laplacian, by direct summation and through the FFT.
//!
//! `cargo run --release --example apply_operator`

use fraclap::bench::exact_ex1;
use fraclap::grid::{sample, GridSpec};
use fraclap::operator::{apply_dense, apply_fft, build_operator};

fn main() -> fraclap::Result<()> {
    let alpha = 0.5;
    for k in 1..=4 {
        let h = 2f64.powi(-k);
        // the function decays like x^{-14}; [-12, 12] leaves a negligible tail
        let spec = GridSpec::covering(&[-12.0], &[12.0], h)?;
        let u = sample(|x| (1.0 + x[0] * x[0]).powi(-7), &spec)?;
        let op = build_operator(alpha, &spec)?;
        let dense = apply_dense(&op, &u)?;
        let fast = apply_fft(&op, &u)?;

        let mut err = 0.0f64;
        let mut gap = 0.0f64;
        for i in 0..spec.len() {
            let x = spec.point(i)[0];
            gap = gap.max((dense.data[i] - fast.data[i]).abs());
            if x.abs() < 1.0 {
                err = err.max((exact_ex1(alpha, x)? - dense.data[i]).abs());
            }
        }
        println!("h=1/{:<3} N={:<4} max error on (-1,1) {err:.4e}   |dense - fft| {gap:.1e}", 1 << k, spec.len());
    }
    Ok(())
}
