//! Fractional Poisson problem on (-1, 1) with zero exterior data, solved by
//! CG and checked against the exact solution C x (1 - x²)^s.
//!
//! `cargo run --release --example poisson_1d`

use fraclap::bench::{exact_poisson_pair, solver_problem, SolverExample};
use fraclap::grid::{norm_l2, norm_linf, try_sample};
use fraclap::solver::{solve, solve_dense};

fn main() -> fraclap::Result<()> {
    let (alpha, s) = (1.0, 4.0);
    let mut prev: Option<f64> = None;
    for k in 3..=7 {
        let h = 2f64.powi(-k);
        let p = solver_problem(&SolverExample::Poisson { s: Some(s) }, alpha, h)?;
        let report = solve(&p, 1e-12, 2000)?;
        let exact = try_sample(|x| Ok(exact_poisson_pair(alpha, s, x[0])?.0), &p.domain)?;
        let e = exact.sub(&report.solution)?;
        let l2 = norm_l2(&e);
        let rate = prev.map(|p| format!("{:.2}", (p / l2).log2())).unwrap_or_default();
        println!(
            "h=1/{:<4} cg its {:>3}  linf {:.3e}  l2 {:.3e}  rate {rate}",
            1 << k,
            report.iterations,
            norm_linf(&e),
            l2
        );
        prev = Some(l2);
    }

    // the direct factorization gives the same discrete solution
    let p = solver_problem(&SolverExample::Poisson { s: Some(s) }, 1.7, 1.0 / 64.0)?;
    let it = solve(&p, 1e-12, 2000)?.solution;
    let direct = solve_dense(&p)?;
    println!("cg vs cholesky, alpha=1.7: {:.1e}", norm_linf(&it.sub(&direct)?));
    Ok(())
}
