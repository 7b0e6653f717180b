//! Run a named benchmark suite and print its CSV report.
//!
//! `cargo run --release --example convergence_suite -- table3`

use fraclap::bench::{run_suite, SuiteParams, SUITES};

fn main() -> fraclap::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "table1".into());
    if !SUITES.contains(&name.as_str()) {
        eprintln!("unknown suite {name}; pick one of {SUITES:?}");
        std::process::exit(2);
    }
    let out = run_suite(&name, &SuiteParams::default())?;
    print!("{}", out.to_csv());
    Ok(())
}
