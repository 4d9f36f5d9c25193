// Closest separable state in Hilbert-Schmidt distance, compared with an
// exhaustive lattice search.

use bell_entanglement::measures::hs_distance_bd;
use bell_entanglement::oracle::brute_force_nearest_separable;
use bell_entanglement::{
    canonicalize_to_singlet, hs_entanglement, nearest_separable_bd, BDState, Result,
};

fn run_example() -> Result<()> {
    for p in [
        [0.1, 0.1, 0.1, 0.7],
        [0.05, 0.8, 0.1, 0.05],
        [0.6, 0.3, 0.1, 0.0],
    ] {
        let s = BDState::from_probs(p)?;
        let (_, swap) = canonicalize_to_singlet(&s);
        let nearest = nearest_separable_bd(&s);
        let d = hs_distance_bd(s.t(), nearest.t());
        let grid = brute_force_nearest_separable(s.t(), 0.02)?;
        println!("p = {p:?} (swap {:?})", swap.index);
        println!("  nearest t = {:?}", nearest.t());
        println!(
            "  D = {d:.6}, grid D = {:.6}, E = {:.6}",
            grid.distance,
            hs_entanglement(&s)
        );
        assert!(grid.distance >= d - 1e-12 && grid.distance - d <= 0.02);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
