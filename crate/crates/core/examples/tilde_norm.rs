// The spin-flip weighted distance agrees with Hilbert-Schmidt on BD pairs
// and can fail to be a distance off the BD family.

use bell_entanglement::bd::bell_projector;
use bell_entanglement::linalg::{c, DensityMatrix};
use bell_entanglement::{hs_distance, tilde_distance, tilde_entanglement_bd, BDState, Result};

fn run_example() -> Result<()> {
    let singlet = bell_projector(4)?;
    let mixed = DensityMatrix::maximally_mixed();
    println!(
        "singlet vs I/4: tilde {:.12}, HS {:.12}",
        tilde_distance(&singlet, &mixed)?,
        hs_distance(singlet.matrix(), mixed.matrix())?
    );

    let s = BDState::from_probs([0.05, 0.15, 0.2, 0.6])?;
    println!(
        "tilde entanglement of p = {:?}: {:.12}",
        s.p(),
        tilde_entanglement_bd(&s)?
    );

    let zero = c(0.0, 0.0);
    let up = DensityMatrix::pure(&[c(1.0, 0.0), zero, zero, zero])?;
    let down = DensityMatrix::pure(&[zero, zero, zero, c(1.0, 0.0)])?;
    match tilde_distance(&up, &down) {
        Ok(d) => println!("|00> vs |11>: {d}"),
        Err(e) => println!("|00> vs |11>: {e}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
