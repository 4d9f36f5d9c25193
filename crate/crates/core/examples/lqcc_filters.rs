// Local filters on each qubit and the laws they obey.

use bell_entanglement::lqcc::{
    normalization_factor, predict_concurrence_transform, restricted_entanglement_transform,
    restriction_met,
};
use bell_entanglement::{
    apply_lqcc, concurrence, concurrence_bd, BDState, Filter, LqccParams, Result, Unitary2,
};

fn run_example() -> Result<()> {
    let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7])?;
    let z = [0.0, 0.0, 1.0];
    let x = [1.0, 0.0, 0.0];

    let params = LqccParams::filters(Filter::new(1.0, 0.5, z)?, Filter::new(1.0, 0.5, x)?);
    let out = apply_lqcc(&s.to_density_matrix(), &params)?;
    let predicted = predict_concurrence_transform(concurrence_bd(&s), s.t(), &params)?;
    println!(
        "z/x filters: t = {:.6} (closed form {:.6})",
        out.norm,
        normalization_factor(s.t(), &params)?
    );
    println!(
        "  C' measured {:.12}, predicted {predicted:.12}",
        concurrence(&out.state)?
    );
    println!(
        "  restricted condition met: {}",
        restriction_met(&s, &params)
    );
    let r = restricted_entanglement_transform(&s, &params)?;
    println!(
        "  E' measured {:.12}, predicted {:.12}",
        r.measured, r.predicted
    );

    // Parallel axes change the normalizations of ρ and ρ_s differently.
    let parallel = LqccParams::filters(Filter::new(1.0, 0.5, z)?, Filter::new(1.0, 0.5, z)?);
    println!(
        "z/z filters: restricted condition met: {}",
        restriction_met(&s, &parallel)
    );

    let rotated = params.with_unitaries(
        Unitary2::from_axis_angle([0.0, 1.0, 0.0], 0.7)?,
        Unitary2::from_axis_angle([1.0, 1.0, 0.0], 1.9)?,
    );
    let out = apply_lqcc(&s.to_density_matrix(), &rotated)?;
    println!(
        "with local rotations: C' = {:.12}",
        concurrence(&out.state)?
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
