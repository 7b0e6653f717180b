//! Weights of the discrete operator in 1, 2 and 3 dimensions.
//!
//! `cargo run --release --example weights`

use fraclap::weights::{build_table, weight, weight_oracle, zeta};

fn main() -> fraclap::Result<()> {
    // α = 2 in 1D is the spectral second difference 2(-1)^n / n²
    for n in 0u64..5 {
        println!("alpha=2 d=1 n={n}: {:+.6}", weight(2.0, 1.0, 1, n * n)?);
    }

    for d in 1..=3 {
        println!("zeta_{d} = {:.15}", zeta(d));
    }

    // series/quadrature dispatch against the independent quadrature path
    for &(alpha, d, m) in &[(0.5, 1, 9u64), (0.5, 2, 2), (1.7, 3, 50), (1.3, 2, 400)] {
        let w = weight(alpha, 1.0, d, m)?;
        let o = weight_oracle(alpha, 1.0, d, m)?;
        println!("alpha={alpha} d={d} |k|^2={m}: {w:+.15e} (oracle rel diff {:.1e})", ((w - o) / o).abs());
    }

    // a table keyed on squared lag, for a 3x3 grid
    let t = build_table(0.5, 0.25, 2, &[3, 3])?;
    for (m, w) in t.iter() {
        println!("table |k|^2={m}: {w:+.10}");
    }
    Ok(())
}
