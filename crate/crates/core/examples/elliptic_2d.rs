//! (-Δ)^{α/2} u + u = f on (-1.5, 1.5)² with Gaussian exterior data. The
//! exterior enters the right-hand side through a truncated lift.
//!
//! `cargo run --release --example elliptic_2d`

use fraclap::bench::{exact_ex522_pair, solver_problem, SolverExample};
use fraclap::grid::{norm_l2, try_sample};
use fraclap::solver::{solve_with, SolveOptions};

fn main() -> fraclap::Result<()> {
    let a = 6.0;
    for alpha in [0.5, 1.7] {
        for k in 3..=5 {
            let h = 2f64.powi(-k);
            let p = solver_problem(&SolverExample::Gaussian2d { a }, alpha, h)?;
            let report = solve_with(&p, &SolveOptions::default())?;
            let exact = try_sample(|x| Ok(exact_ex522_pair(alpha, a, x)?.0), &p.domain)?;
            let t = report.truncation.as_ref().expect("exterior data present");
            println!(
                "alpha={alpha} h=1/{:<3} l2 error {:.4e}  cg its {:>3}  exterior points {} (L = {:.3})",
                1 << k,
                norm_l2(&exact.sub(&report.solution)?),
                report.iterations,
                t.points_used,
                t.extent
            );
        }
    }
    Ok(())
}
