//! Local filtering operations.
//!
//! A transformation is `A⊗B = U_A f^{μ,a,m} ⊗ U_B f^{ν,b,n}` with filters
//! `f^{μ,a,m} = μ(I + a m·σ)`, applied as `ρ′ = (A⊗B)ρ(A⊗B)† / t`. The
//! normalization `t` is the success weight of the filter.

use crate::bd::{classify_region, BDState, RegionLabel, BELL_VERTICES};
use crate::error::{Error, Result};
use crate::linalg::{
    hs_distance, identity2, pauli_dot, tensor_product, ComplexMatrix, DensityMatrix,
};
use crate::measures::{hs_entanglement, nearest_separable_bd, spin_flip_matrix, tilde_distance};

/// Slack on `‖m‖ = 1`, `U†U = I` and the restricted-LQCC conditions.
pub const PARAM_TOL: f64 = 1e-12;
/// Normalizations at or below this mean the filter annihilates the state.
pub const MIN_NORMALIZATION: f64 = 1e-12;

/// Local filter `μ(I + a m·σ)`; invertible because `|a| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Filter {
    mu: f64,
    a: f64,
    m: [f64; 3],
}

impl Filter {
    pub fn new(mu: f64, a: f64, m: [f64; 3]) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::input(format!(
                "filter scale must be positive, got {mu}"
            )));
        }
        if !(a.abs() < 1.0) {
            return Err(Error::input(format!(
                "filter strength must satisfy |a| < 1, got {a} (non-invertible filter)"
            )));
        }
        let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > PARAM_TOL {
            return Err(Error::input(format!(
                "filter axis must be a unit vector, |m| = {norm}"
            )));
        }
        Ok(Self { mu, a, m })
    }

    /// Like [`Filter::new`] but rescales a non-zero axis to unit length.
    pub fn with_axis(mu: f64, a: f64, axis: [f64; 3]) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::input("filter axis must be non-zero"));
        }
        Self::new(mu, a, axis.map(|x| x / norm))
    }

    pub fn identity() -> Self {
        Self {
            mu: 1.0,
            a: 0.0,
            m: [0.0, 0.0, 1.0],
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn m(&self) -> [f64; 3] {
        self.m
    }

    /// Same filter with the axis reversed.
    pub fn flipped(&self) -> Self {
        Self {
            m: self.m.map(|x| -x),
            ..*self
        }
    }

    /// `μ²(1 − a²)`, the determinant of the filter.
    pub fn determinant(&self) -> f64 {
        self.mu * self.mu * (1.0 - self.a * self.a)
    }
}

pub fn filter_matrix(f: &Filter) -> ComplexMatrix {
    (&identity2() + &pauli_dot(f.m).scale(f.a)).scale(f.mu)
}

/// `‖f^{μ,a,m} f^{μ,a,−m} − μ²(1−a²) I‖_HS`.
pub fn filter_flip_identity_check(f: &Filter) -> f64 {
    let product = &filter_matrix(f) * &filter_matrix(&f.flipped());
    (&product - &identity2().scale(f.determinant())).hs_norm()
}

/// 2×2 unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary2(ComplexMatrix);

impl Unitary2 {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::input("a local unitary is 2x2"));
        }
        let dev = (&(&m.adjoint() * &m) - &identity2()).hs_norm();
        if dev > PARAM_TOL {
            return Err(Error::input(format!(
                "matrix is not unitary (‖U†U − I‖ = {dev:.3e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(identity2())
    }

    /// `exp(−i θ/2 n·σ) = cos(θ/2) I − i sin(θ/2) n·σ` for a unit axis `n`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::input("rotation axis must be non-zero"));
        }
        let n = axis.map(|x| x / norm);
        let half = 0.5 * angle;
        let rot = &identity2().scale(half.cos())
            - &pauli_dot(n).scale_complex(num_complex::Complex64::new(0.0, half.sin()));
        Self::new(rot)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        hs_distance(&self.0, &identity2()).expect("2x2") <= PARAM_TOL
    }
}

/// Filters and local unitaries for both parties.
#[derive(Debug, Clone, PartialEq)]
pub struct LqccParams {
    pub filter_a: Filter,
    pub filter_b: Filter,
    pub unitary_a: Unitary2,
    pub unitary_b: Unitary2,
}

impl LqccParams {
    pub fn identity() -> Self {
        Self::filters(Filter::identity(), Filter::identity())
    }

    /// Pure filtering, no local unitaries.
    pub fn filters(filter_a: Filter, filter_b: Filter) -> Self {
        Self {
            filter_a,
            filter_b,
            unitary_a: Unitary2::identity(),
            unitary_b: Unitary2::identity(),
        }
    }

    pub fn with_unitaries(mut self, unitary_a: Unitary2, unitary_b: Unitary2) -> Self {
        self.unitary_a = unitary_a;
        self.unitary_b = unitary_b;
        self
    }

    pub fn has_identity_unitaries(&self) -> bool {
        self.unitary_a.is_identity() && self.unitary_b.is_identity()
    }

    /// `μ²ν²(1−a²)(1−b²)`.
    pub fn determinant_factor(&self) -> f64 {
        self.filter_a.determinant() * self.filter_b.determinant()
    }

    /// Same parameters with both filter axes reversed.
    pub fn flipped(&self) -> Self {
        Self {
            filter_a: self.filter_a.flipped(),
            filter_b: self.filter_b.flipped(),
            ..self.clone()
        }
    }

    /// `U_A f^{μ,a,m} ⊗ U_B f^{ν,b,n}`.
    pub fn local_operator(&self) -> ComplexMatrix {
        let a = self.unitary_a.matrix() * &filter_matrix(&self.filter_a);
        let b = self.unitary_b.matrix() * &filter_matrix(&self.filter_b);
        tensor_product(&a, &b).expect("2x2 factors")
    }
}

/// `(A⊗B) M (A⊗B)†`.
fn conjugate(op: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    &(op * m) * &op.adjoint()
}

/// Result of one filtering step: the normalized state together with the
/// unnormalized operator and its trace, so later ratios share a single
/// normalization.
#[derive(Debug, Clone)]
pub struct LqccOutcome {
    pub state: DensityMatrix,
    pub unnormalized: ComplexMatrix,
    /// `t(ρ; μ, a, m, ν, b, n) = tr((A⊗B)ρ(A⊗B)†)`.
    pub norm: f64,
}

pub fn apply_lqcc(rho: &DensityMatrix, params: &LqccParams) -> Result<LqccOutcome> {
    let unnormalized = conjugate(&params.local_operator(), rho.matrix()).hermitian_part();
    let norm = unnormalized.trace().re;
    if !(norm > MIN_NORMALIZATION) {
        return Err(Error::domain(format!(
            "filter annihilates state (normalization {norm:.3e})"
        )));
    }
    let state = DensityMatrix::new(unnormalized.scale(1.0 / norm).hermitian_part())?;
    Ok(LqccOutcome {
        state,
        unnormalized,
        norm,
    })
}

/// Transformed spin flip `ρ̃′`, built from `ρ̃` with the axis-reversed filters
/// and divided by the forward normalization `t(ρ; …)`.
pub fn apply_lqcc_tilde(rho: &DensityMatrix, params: &LqccParams) -> Result<ComplexMatrix> {
    let forward = apply_lqcc(rho, params)?;
    let flipped_op = params.flipped().local_operator();
    let tilde = conjugate(&flipped_op, &spin_flip_matrix(rho.matrix()));
    Ok(tilde.scale(1.0 / forward.norm).hermitian_part())
}

/// `(1+a²)(1+b²) + 4ab Σ mᵢ tᵢ nᵢ`, times `μ²ν²`. Unitaries do not enter.
fn filter_normalization(t: [f64; 3], fa: &Filter, fb: &Filter) -> f64 {
    let cross: f64 = (0..3).map(|i| fa.m[i] * t[i] * fb.m[i]).sum();
    let scale = fa.mu * fa.mu * fb.mu * fb.mu;
    scale * ((1.0 + fa.a * fa.a) * (1.0 + fb.a * fb.a) + 4.0 * fa.a * fb.a * cross)
}

/// Closed-form normalization of a BD state with correlation vector `t`.
pub fn normalization_factor(t: [f64; 3], params: &LqccParams) -> Result<f64> {
    if !params.has_identity_unitaries() {
        return Err(Error::input(
            "closed-form normalization is stated for pure filtering; use apply_lqcc's trace",
        ));
    }
    Ok(filter_normalization(t, &params.filter_a, &params.filter_b))
}

/// `C(ρ′) = μ²ν²(1−a²)(1−b²) / t(ρ; …) · C(ρ)`.
pub fn predict_concurrence_transform(c_in: f64, t: [f64; 3], params: &LqccParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&c_in) {
        return Err(Error::input(format!("concurrence {c_in} outside [0, 1]")));
    }
    let norm = filter_normalization(t, &params.filter_a, &params.filter_b);
    if !(norm > MIN_NORMALIZATION) {
        return Err(Error::domain(format!(
            "filter annihilates state (normalization {norm:.3e})"
        )));
    }
    Ok(params.determinant_factor() / norm * c_in)
}

/// `Σ vᵢ mᵢ nᵢ` with `v` the Bell vertex of the state's entangled cell.
///
/// The nearest separable state differs from ρ along `v`, so this weighted
/// product is what must vanish for `t(ρ) = t(ρ_s)`. For the singlet cell
/// `v = (−1, −1, −1)` and it reduces to `−m·n`. Returns `None` for separable
/// states, where `ρ_s = ρ`.
pub fn cell_weighted_axis_product(s: &BDState, params: &LqccParams) -> Option<f64> {
    match classify_region(s) {
        RegionLabel::Separable => None,
        RegionLabel::EntangledCell(cell) => {
            let v = BELL_VERTICES[cell as usize - 1];
            let (m, n) = (params.filter_a.m, params.filter_b.m);
            Some((0..3).map(|i| v[i] * m[i] * n[i]).sum())
        }
    }
}

/// Whether the filters leave the normalization of ρ and ρ_s equal: `ab = 0`,
/// or the cell-weighted axis product vanishes (`m·n = 0` in the singlet cell).
pub fn restriction_met(s: &BDState, params: &LqccParams) -> bool {
    if (params.filter_a.a * params.filter_b.a).abs() <= PARAM_TOL {
        return true;
    }
    cell_weighted_axis_product(s, params).is_none_or(|w| w.abs() <= PARAM_TOL)
}

/// Measured and predicted entanglement after a restricted filtering step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedOutcome {
    /// `√3 · d̃(ρ′, ρ_s′)` with `ρ_s′` the transported nearest separable state.
    pub measured: f64,
    /// `μ²ν²(1−a²)(1−b²) / t(ρ) · E(ρ)`.
    pub predicted: f64,
    pub norm_state: f64,
    pub norm_separable: f64,
}

pub fn restricted_entanglement_transform(
    s: &BDState,
    params: &LqccParams,
) -> Result<RestrictedOutcome> {
    if !restriction_met(s, params) {
        return Err(Error::input(
            "restricted LQCC condition not met (need m·n = 0 in the state's cell, or ab = 0)",
        ));
    }
    let nearest = nearest_separable_bd(s);
    let out = apply_lqcc(&s.to_density_matrix(), params)?;
    let out_sep = apply_lqcc(&nearest.to_density_matrix(), params)?;
    let measured = 3f64.sqrt() * tilde_distance(&out.state, &out_sep.state)?;
    let predicted = params.determinant_factor() / out.norm * hs_entanglement(s);
    Ok(RestrictedOutcome {
        measured,
        predicted,
        norm_state: out.norm,
        norm_separable: out_sep.norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bd::bell_projector;
    use crate::linalg::{hermitian_eigen, sigma_x};
    use crate::measures::{concurrence, concurrence_bd, spin_flip_matrix};
    use approx::assert_abs_diff_eq;

    const Z: [f64; 3] = [0.0, 0.0, 1.0];
    const X: [f64; 3] = [1.0, 0.0, 0.0];

    fn filt(mu: f64, a: f64, m: [f64; 3]) -> Filter {
        Filter::new(mu, a, m).unwrap()
    }

    #[test]
    fn filter_matrix_examples() {
        assert_eq!(filter_matrix(&filt(1.0, 0.0, X)), identity2());

        let f = filter_matrix(&filt(1.0, 0.5, Z));
        let expected = ComplexMatrix::from_real_diagonal(&[1.5, 0.5]).unwrap();
        assert!(hs_distance(&f, &expected).unwrap() < 1e-15);

        let f = filter_matrix(&filt(2.0, 0.5, X));
        let expected = (&identity2() + &sigma_x().scale(0.5)).scale(2.0);
        assert!(hs_distance(&f, &expected).unwrap() < 1e-15);
        let eig = hermitian_eigen(&f).unwrap();
        assert_abs_diff_eq!(eig.values[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn filter_validation() {
        assert!(Filter::new(1.0, 1.0, Z).is_err());
        assert!(Filter::new(1.0, -1.0, Z).is_err());
        assert!(Filter::new(0.0, 0.5, Z).is_err());
        assert!(Filter::new(1.0, 0.5, [1.0, 1.0, 0.0]).is_err());
        let f = Filter::with_axis(1.0, 0.5, [1.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(f.m()[0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn flip_identity_examples() {
        assert_eq!(filter_flip_identity_check(&filt(1.0, 0.0, Z)), 0.0);
        let f = filt(1.0, 0.5, Z);
        assert!(filter_flip_identity_check(&f) <= 1e-12);
        let prod = &filter_matrix(&f) * &filter_matrix(&f.flipped());
        assert!(hs_distance(&prod, &identity2().scale(0.75)).unwrap() < 1e-15);
        let f = Filter::with_axis(2.0, 0.3, [0.2, -0.7, 0.4]).unwrap();
        assert!(filter_flip_identity_check(&f) <= 1e-12);
    }

    #[test]
    fn identity_params_leave_state_alone() {
        let rho = BDState::from_probs([0.1, 0.2, 0.3, 0.4])
            .unwrap()
            .to_density_matrix();
        let out = apply_lqcc(&rho, &LqccParams::identity()).unwrap();
        assert_abs_diff_eq!(out.norm, 1.0, epsilon = 1e-15);
        assert!(hs_distance(out.state.matrix(), rho.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn z_filters_fix_the_singlet() {
        let singlet = bell_projector(4).unwrap();
        let params = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, Z));
        let out = apply_lqcc(&singlet, &params).unwrap();
        assert_abs_diff_eq!(out.norm, 0.5625, epsilon = 1e-15);
        assert!(hs_distance(out.state.matrix(), singlet.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn sigma_x_on_a_maps_singlet_to_phi_minus() {
        let singlet = bell_projector(4).unwrap();
        let params = LqccParams::identity()
            .with_unitaries(Unitary2::new(sigma_x()).unwrap(), Unitary2::identity());
        let out = apply_lqcc(&singlet, &params).unwrap();
        let s = BDState::from_density_matrix(&out.state, 1e-12).expect("still Bell-diagonal");
        for (x, e) in s.t().iter().zip([-1.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(*x, e, epsilon = 1e-15);
        }
        assert_eq!(classify_region(&s), RegionLabel::EntangledCell(2));
        assert_abs_diff_eq!(concurrence(&out.state).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn annihilating_filter_is_domain_error() {
        // Projector-like filters on |↑↑⟩ leave almost nothing when aimed at |↓↓⟩.
        let up_up = DensityMatrix::pure(&[
            crate::linalg::c(1.0, 0.0),
            crate::linalg::c(0.0, 0.0),
            crate::linalg::c(0.0, 0.0),
            crate::linalg::c(0.0, 0.0),
        ])
        .unwrap();
        let a = 1.0 - 1e-13;
        let params = LqccParams::filters(filt(1.0, -a, Z), filt(1.0, -a, Z));
        assert!(matches!(apply_lqcc(&up_up, &params), Err(Error::Domain(_))));
    }

    #[test]
    fn tilde_transform_identity_and_consistency() {
        let rho = BDState::from_probs([0.1, 0.2, 0.3, 0.4])
            .unwrap()
            .to_density_matrix();
        let tilde = apply_lqcc_tilde(&rho, &LqccParams::identity()).unwrap();
        assert!(hs_distance(&tilde, rho.matrix()).unwrap() < 1e-15);

        let singlet = bell_projector(4).unwrap();
        let params = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, Z));
        let out = apply_lqcc(&singlet, &params).unwrap();
        let direct = spin_flip_matrix(&out.unnormalized).scale(1.0 / out.norm);
        let routed = apply_lqcc_tilde(&singlet, &params).unwrap();
        assert!(hs_distance(&direct, &routed).unwrap() <= 1e-10);
    }

    #[test]
    fn normalization_examples() {
        let t = BDState::bell(4).unwrap().t();
        let plain = LqccParams::filters(filt(1.5, 0.0, Z), filt(2.0, 0.0, X));
        assert_abs_diff_eq!(
            normalization_factor(t, &plain).unwrap(),
            9.0,
            epsilon = 1e-14
        );

        let zz = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, Z));
        assert_abs_diff_eq!(
            normalization_factor(t, &zz).unwrap(),
            0.5625,
            epsilon = 1e-15
        );

        let zx = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, X));
        assert_abs_diff_eq!(
            normalization_factor(t, &zx).unwrap(),
            1.5625,
            epsilon = 1e-15
        );

        let rotated = zx
            .clone()
            .with_unitaries(Unitary2::new(sigma_x()).unwrap(), Unitary2::identity());
        assert!(matches!(
            normalization_factor(t, &rotated),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn concurrence_law_examples() {
        let singlet_t = BDState::bell(4).unwrap().t();
        assert_eq!(
            predict_concurrence_transform(0.7, [0.1, 0.2, -0.3], &LqccParams::identity()).unwrap(),
            0.7
        );

        let zz = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, Z));
        assert_abs_diff_eq!(
            predict_concurrence_transform(1.0, singlet_t, &zz).unwrap(),
            1.0,
            epsilon = 1e-15
        );

        let zx = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, X));
        let predicted = predict_concurrence_transform(1.0, singlet_t, &zx).unwrap();
        assert_abs_diff_eq!(predicted, 0.36, epsilon = 1e-15);
        let out = apply_lqcc(&bell_projector(4).unwrap(), &zx).unwrap();
        assert_abs_diff_eq!(concurrence(&out.state).unwrap(), 0.36, epsilon = 1e-9);
    }

    #[test]
    fn restricted_law_examples() {
        let singlet = BDState::bell(4).unwrap();
        let r = restricted_entanglement_transform(&singlet, &LqccParams::identity()).unwrap();
        assert_abs_diff_eq!(r.measured, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.predicted, 1.0, epsilon = 1e-12);

        let zx = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, X));
        let r = restricted_entanglement_transform(&singlet, &zx).unwrap();
        assert_abs_diff_eq!(r.measured, 0.36, epsilon = 1e-8);
        assert_abs_diff_eq!(r.predicted, 0.36, epsilon = 1e-12);

        // ab = 0 branch: t(ρ) = (1 + 0.25)(1 + 0) = 1.25, E′ = 0.75 / 1.25 · 0.4.
        let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7]).unwrap();
        let params = LqccParams::filters(filt(1.0, 0.5, X), filt(1.0, 0.0, Z));
        let r = restricted_entanglement_transform(&s, &params).unwrap();
        assert_abs_diff_eq!(r.predicted, 0.24, epsilon = 1e-12);
        assert!((r.measured - r.predicted).abs() <= 1e-8);
        assert_abs_diff_eq!(r.norm_state, 1.25, epsilon = 1e-14);
    }

    #[test]
    fn restriction_violation_is_input_error() {
        let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7]).unwrap();
        let zz = LqccParams::filters(filt(1.0, 0.5, Z), filt(1.0, 0.5, Z));
        assert!(!restriction_met(&s, &zz));
        assert!(matches!(
            restricted_entanglement_transform(&s, &zz),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn unrestricted_normalizations_differ_as_expected() {
        // t(ρ) − t(ρ_s) = −(8/3) μ²ν² ab m·n C in the singlet cell.
        let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7]).unwrap();
        let params = LqccParams::filters(filt(1.2, 0.5, Z), filt(0.8, 0.3, Z));
        let t_rho = normalization_factor(s.t(), &params).unwrap();
        let t_sep = normalization_factor(nearest_separable_bd(&s).t(), &params).unwrap();
        let expected = -8.0 / 3.0 * (1.2f64 * 0.8).powi(2) * 0.5 * 0.3 * concurrence_bd(&s);
        assert_abs_diff_eq!(t_rho - t_sep, expected, epsilon = 1e-14);
    }

    #[test]
    fn other_cells_use_their_own_restriction() {
        // Cell 1 sits at vertex (1, −1, 1), so the condition is m₁n₁ − m₂n₂ + m₃n₃ = 0.
        let s = BDState::from_probs([0.7, 0.1, 0.1, 0.1]).unwrap();
        let diag = [1.0, 1.0, 0.0];
        let params = LqccParams::filters(
            Filter::with_axis(1.0, 0.4, diag).unwrap(),
            Filter::with_axis(1.0, 0.6, diag).unwrap(),
        );
        assert!(restriction_met(&s, &params));
        let r = restricted_entanglement_transform(&s, &params).unwrap();
        assert_abs_diff_eq!(r.norm_state, r.norm_separable, epsilon = 1e-12);
        assert!((r.measured - r.predicted).abs() <= 1e-8);

        // Orthogonal axes are not enough outside the singlet cell.
        let params = LqccParams::filters(
            Filter::with_axis(1.0, 0.4, [1.0, 1.0, 0.0]).unwrap(),
            Filter::with_axis(1.0, 0.6, [1.0, -1.0, 0.0]).unwrap(),
        );
        assert!(!restriction_met(&s, &params));
    }
}
