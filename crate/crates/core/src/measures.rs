//! Entanglement measures.
//!
//! General two-qubit states get the Wootters concurrence through the
//! Hermitian chain `R = √(√ρ ρ̃ √ρ)`. Bell-diagonal states additionally get
//! closed forms: concurrence `max{0, 2p₄ − 1}`, the Hilbert-Schmidt nearest
//! separable state (orthogonal projection onto the cell's octahedron face),
//! and the distance-based entanglements `√3·D`, which coincide with the
//! concurrence. Every BD formula is stated for the singlet cell and reached
//! from the other cells through [`canonicalize_to_singlet`].

use crate::bd::{canonicalize_to_singlet, classify_region, BDState, RegionLabel, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, psd_sqrt, sigma_y, tensor_product, ComplexMatrix, DensityMatrix,
    NEGATIVE_EIGEN_LIMIT,
};

/// `(σ_y⊗σ_y) M* (σ_y⊗σ_y)` for any 4×4 operator.
pub fn spin_flip_matrix(m: &ComplexMatrix) -> ComplexMatrix {
    let yy = tensor_product(&sigma_y(), &sigma_y()).expect("2x2 factors");
    &(&yy * &m.conj()) * &yy
}

/// Spin flip of a state; the result is again a density matrix.
pub fn spin_flip(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_valid(spin_flip_matrix(rho.matrix()).hermitian_part())
}

/// Descending eigenvalues of `R = √(√ρ ρ̃ √ρ)`.
pub fn concurrence_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let sqrt_rho = psd_sqrt(rho.matrix())?;
    let flipped = spin_flip_matrix(rho.matrix());
    let inner = (&(&sqrt_rho * &flipped) * &sqrt_rho).hermitian_part();
    let r = psd_sqrt(&inner)?;
    Ok(hermitian_eigen(&r)?
        .values
        .into_iter()
        .map(|l| l.max(0.0))
        .collect())
}

/// `max{0, λ₁ − λ₂ − λ₃ − λ₄}` from a descending spectrum, clamped to `[0, 1]`.
pub fn concurrence_from_spectrum(lambdas: &[f64]) -> f64 {
    let (first, rest) = lambdas.split_first().expect("non-empty spectrum");
    (first - rest.iter().sum::<f64>()).clamp(0.0, 1.0)
}

/// Wootters concurrence of an arbitrary two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence_from_spectrum(&concurrence_spectrum(rho)?))
}

/// Closed-form concurrence `max{0, 2p₄ − 1}` on the canonical cell.
///
/// States classified separable (within the membership slack) return exactly 0.
pub fn concurrence_bd(s: &BDState) -> f64 {
    let (canon, _) = canonicalize_to_singlet(s);
    let p4 = canon.p()[3];
    if p4 <= 0.5 + MEMBERSHIP_TOL {
        0.0
    } else {
        (2.0 * p4 - 1.0).min(1.0)
    }
}

/// Unit for the binary entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

/// `H(x) = −x ln x − (1−x) ln(1−x)` with `0 ln 0 = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.ln() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation `H(½ + ½√(1 − C²))`, in nats.
pub fn entanglement_of_formation(c: f64) -> Result<f64> {
    entanglement_of_formation_in(c, EntropyUnit::Nats)
}

pub fn entanglement_of_formation_in(c: f64, unit: EntropyUnit) -> Result<f64> {
    if !(-MEMBERSHIP_TOL..=1.0 + MEMBERSHIP_TOL).contains(&c) || c.is_nan() {
        return Err(Error::input(format!("concurrence {c} outside [0, 1]")));
    }
    let c = c.clamp(0.0, 1.0);
    let x = 0.5 + 0.5 * (1.0 - c * c).sqrt();
    let nats = binary_entropy(x);
    Ok(match unit {
        EntropyUnit::Nats => nats,
        EntropyUnit::Bits => nats / std::f64::consts::LN_2,
    })
}

/// Hilbert-Schmidt distance between BD states, `½ √Σ(tᵢ − tᵢ′)²`.
pub fn hs_distance_bd(t: [f64; 3], t_other: [f64; 3]) -> f64 {
    0.5 * t
        .iter()
        .zip(t_other)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Closed-form nearest separable BD state in Hilbert-Schmidt distance.
///
/// In the singlet cell the target sits on the face `p₄′ = ½` with the excess
/// weight spread evenly, `pᵢ′ = pᵢ + (p₄ − ½)/3`. Separable input is returned
/// unchanged.
pub fn nearest_separable_bd(s: &BDState) -> BDState {
    if classify_region(s).is_separable() {
        return *s;
    }
    let (canon, swap) = canonicalize_to_singlet(s);
    let p = canon.p();
    let shift = (p[3] - 0.5) / 3.0;
    let projected = BDState::from_probs([p[0] + shift, p[1] + shift, p[2] + shift, 0.5])
        .expect("projection stays on the simplex");
    swap.apply(&projected)
}

/// The same projection written in t-space for the singlet cell:
/// `tᵢ′ = tᵢ − (1 + t₁ + t₂ + t₃)/3`.
pub fn singlet_face_projection(t: [f64; 3]) -> [f64; 3] {
    let excess = (1.0 + t[0] + t[1] + t[2]) / 3.0;
    t.map(|ti| ti - excess)
}

/// `√3 · D(ρ ‖ ρ_s)` with the Hilbert-Schmidt distance `D`.
pub fn hs_entanglement(s: &BDState) -> f64 {
    let nearest = nearest_separable_bd(s);
    3f64.sqrt() * hs_distance_bd(s.t(), nearest.t())
}

/// `√tr((ρ₁ − ρ₂)(ρ̃₁ − ρ̃₂))`.
///
/// The trace is not sign-definite off the BD manifold: small negative values
/// are clamped to zero, larger ones are refused.
pub fn tilde_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    tilde_distance_matrices(rho1.matrix(), rho2.matrix())
}

pub(crate) fn tilde_distance_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a - b;
    let flipped = spin_flip_matrix(&diff);
    tilde_trace_to_distance((&diff * &flipped).trace().re)
}

pub(crate) fn tilde_trace_to_distance(tr: f64) -> Result<f64> {
    if tr < -NEGATIVE_EIGEN_LIMIT {
        return Err(Error::domain(format!(
            "tilde distance undefined for this pair (tr = {tr:.3e} < 0)"
        )));
    }
    // Anything between -NEGATIVE_EIGEN_LIMIT and 0 is rounding noise.
    Ok(tr.max(0.0).sqrt())
}

/// `√3 · d̃(ρ, ρ_s)` with the closed-form nearest separable state.
pub fn tilde_entanglement_bd(s: &BDState) -> Result<f64> {
    let nearest = nearest_separable_bd(s);
    Ok(3f64.sqrt() * tilde_distance(&s.to_density_matrix(), &nearest.to_density_matrix())?)
}

/// Every quantity computed for a single BD state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub p: [f64; 4],
    pub t: [f64; 3],
    pub region: RegionLabel,
    pub concurrence: f64,
    /// In the unit requested from [`measure`]; nats unless asked otherwise.
    pub eof: f64,
    pub eof_unit: EntropyUnit,
    pub nearest_separable: BDState,
    pub hs_distance_to_nearest: f64,
    pub hs_entanglement: f64,
    pub tilde_entanglement: f64,
}

pub fn measure(s: &BDState, unit: EntropyUnit) -> Result<MeasureReport> {
    let concurrence = concurrence_bd(s);
    let nearest = nearest_separable_bd(s);
    let hs_distance_to_nearest = hs_distance_bd(s.t(), nearest.t());
    Ok(MeasureReport {
        p: s.p(),
        t: s.t(),
        region: classify_region(s),
        concurrence,
        eof: entanglement_of_formation_in(concurrence, unit)?,
        eof_unit: unit,
        nearest_separable: nearest,
        hs_distance_to_nearest,
        hs_entanglement: 3f64.sqrt() * hs_distance_to_nearest,
        tilde_entanglement: tilde_entanglement_bd(s)?,
    })
}
