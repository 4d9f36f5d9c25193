// Concurrence and entanglement of formation, by the closed form and by the
// spin-flip spectrum of a general two-qubit matrix.

use bell_entanglement::linalg::{c, DensityMatrix};
use bell_entanglement::measures::{concurrence_spectrum, entanglement_of_formation_in};
use bell_entanglement::oracle::concurrence_alt_route;
use bell_entanglement::{
    concurrence, concurrence_bd, entanglement_of_formation, BDState, EntropyUnit, Result,
};

fn run_example() -> Result<()> {
    let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7])?;
    let rho = s.to_density_matrix();
    println!("closed form      C = {:.12}", concurrence_bd(&s));
    println!("spin-flip route  C = {:.12}", concurrence(&rho)?);
    println!("R spectrum         = {:?}", concurrence_spectrum(&rho)?);
    println!(
        "EoF = {:.12} nats = {:.12} bits",
        entanglement_of_formation(0.4)?,
        entanglement_of_formation_in(0.4, EntropyUnit::Bits)?
    );

    // A partially entangled pure state cos θ |00⟩ + sin θ |11⟩ has C = sin 2θ.
    let theta: f64 = 0.3;
    let psi = [
        c(theta.cos(), 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(theta.sin(), 0.0),
    ];
    let pure = DensityMatrix::pure(&psi)?;
    let expected = (2.0 * theta).sin();
    let got = concurrence(&pure)?;
    let alt = concurrence_alt_route(&pure)?;
    println!("pure state: C = {got:.12}, rho·rho~ route {alt:.12}, sin 2θ = {expected:.12}");
    assert!((got - expected).abs() < 1e-9 && (alt - expected).abs() < 1e-8);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
