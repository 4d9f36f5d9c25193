// Runs the full invariant suite at a reduced sample count and prints one
// line per check.

use bell_entanglement::{run_invariant_suite, OracleConfig, Result};

fn run_example() -> Result<()> {
    let config = OracleConfig {
        sample_count: 100,
        grid_step: 0.05,
        ..OracleConfig::default()
    };
    let report = run_invariant_suite(&config)?;
    for (name, r) in &report.checks {
        let verdict = if r.pass { "ok  " } else { "FAIL" };
        println!(
            "{verdict} {name:45} n={:<5} max dev {:.3e} (tol {:.0e})",
            r.samples, r.max_deviation, r.tolerance
        );
    }
    assert!(report.all_pass());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
