// Werner states t = (-x, -x, -x) from the maximally mixed state to the singlet.

use bell_entanglement::cli::{geometry_csv, geometry_rows, GeometryMode};
use bell_entanglement::{measure, BDState, EntropyUnit, Result};

fn run_example() -> Result<()> {
    print!("{}", geometry_csv(&geometry_rows(7, GeometryMode::Werner)?));
    for x in [0.2, 1.0 / 3.0, 0.5, 0.9] {
        let r = measure(&BDState::werner(x)?, EntropyUnit::Bits)?;
        let expected = ((3.0 * x - 1.0) / 2.0).max(0.0);
        println!(
            "x = {x:.4}: C = {:.6} (expected {expected:.6}), EoF = {:.6} bits",
            r.concurrence, r.eof
        );
        assert!((r.concurrence - expected).abs() < 1e-12);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
