//! The truncated discrete symbol Σ_{|k|≤K} ω(k) e^{-iξk} approaches |ξ|^α.
//!
//! `cargo run --release --example symbol`

use std::f64::consts::PI;

use fraclap::grid::GridSpec;
use fraclap::operator::{build_operator, symbol_probe};

fn main() -> fraclap::Result<()> {
    let spec = GridSpec::new(1.0, vec![3], vec![-1.0])?;
    for alpha in [0.5, 1.0, 1.7, 2.0] {
        let op = build_operator(alpha, &spec)?;
        for xi in [0.3 * PI, 0.7 * PI] {
            print!("alpha={alpha} xi={:.2}pi:", xi / PI);
            for k in [10, 100, 1000, 10000] {
                let s = symbol_probe(&op, &[xi], k)?;
                print!("  K={k}: {:.2e}", (s - xi.powf(alpha)).abs());
            }
            println!();
        }
    }
    Ok(())
}
