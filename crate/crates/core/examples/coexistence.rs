//! Mixture operator λ₁(-Δ)^{α₁/2} + (1 - λ₁)(-Δ)^{α₂/2} in 2D.
//!
//! Without a reaction term the 2D ball scheme is close to singular at fine
//! h, so CG may stop above tolerance; the rows say whether it converged.
//!
//! `cargo run --release --example coexistence`

use fraclap::bench::{coexistence_to_csv, run_coexistence};
use fraclap::solver::SolveOptions;

fn main() -> fraclap::Result<()> {
    let rows = run_coexistence(&[0.0, 0.5, 1.0], 0.5, 2.0, 1.0 / 16.0, &SolveOptions::default())?;
    print!("{}", coexistence_to_csv(&rows));
    Ok(())
}
