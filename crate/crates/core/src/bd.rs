//! Bell-diagonal (BD) two-qubit states.
//!
//! A BD state is a mixture `ρ = Σ pᵢ |ψᵢ⟩⟨ψᵢ|` of the four Bell states
//!
//! | i | state | t-space vertex |
//! |---|-------|----------------|
//! | 1 | `φ⁺ = (|↑↑⟩ + |↓↓⟩)/√2` | `( 1, −1,  1)` |
//! | 2 | `φ⁻ = (|↑↑⟩ − |↓↓⟩)/√2` | `(−1,  1,  1)` |
//! | 3 | `ψ⁺ = (|↑↓⟩ + |↓↑⟩)/√2` | `( 1,  1, −1)` |
//! | 4 | `ψ⁻ = (|↑↓⟩ − |↓↑⟩)/√2` | `(−1, −1, −1)` |
//!
//! and equivalently `ρ = ¼(I⊗I + Σ tᵢ σᵢ⊗σᵢ)`. Physical states fill the
//! tetrahedron spanned by the four vertices; the separable ones fill the
//! inscribed octahedron `|t₁| + |t₂| + |t₃| ≤ 1`. The four corner
//! tetrahedra left over are the entangled cells, one per Bell vertex.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, pauli, tensor_product, ComplexMatrix, DensityMatrix};

/// Slack for probability and polytope membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// t-space coordinates of the Bell vertices `P₁..P₄`.
pub const BELL_VERTICES: [[f64; 3]; 4] = [
    [1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0],
    [-1.0, -1.0, -1.0],
];

/// One linear inequality `c₀ + c·t ≥ 0` bounding a BD polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inequality {
    pub label: &'static str,
    pub constant: f64,
    pub coeffs: [f64; 3],
}

impl Inequality {
    pub fn margin(&self, t: [f64; 3]) -> f64 {
        self.constant + self.coeffs[0] * t[0] + self.coeffs[1] * t[1] + self.coeffs[2] * t[2]
    }
}

/// Positivity of ρ; the i-th inequality is `4pᵢ ≥ 0`.
pub const POSITIVITY: [Inequality; 4] = [
    Inequality {
        label: "1+t1-t2+t3 >= 0",
        constant: 1.0,
        coeffs: [1.0, -1.0, 1.0],
    },
    Inequality {
        label: "1-t1+t2+t3 >= 0",
        constant: 1.0,
        coeffs: [-1.0, 1.0, 1.0],
    },
    Inequality {
        label: "1+t1+t2-t3 >= 0",
        constant: 1.0,
        coeffs: [1.0, 1.0, -1.0],
    },
    Inequality {
        label: "1-t1-t2-t3 >= 0",
        constant: 1.0,
        coeffs: [-1.0, -1.0, -1.0],
    },
];

/// Positivity of the partial transpose; these read `2 − 4p₄`, `2 − 4p₃`,
/// `2 − 4p₂`, `2 − 4p₁` in that order.
pub const PPT: [Inequality; 4] = [
    Inequality {
        label: "1+t1+t2+t3 >= 0",
        constant: 1.0,
        coeffs: [1.0, 1.0, 1.0],
    },
    Inequality {
        label: "1-t1-t2+t3 >= 0",
        constant: 1.0,
        coeffs: [-1.0, -1.0, 1.0],
    },
    Inequality {
        label: "1+t1-t2-t3 >= 0",
        constant: 1.0,
        coeffs: [1.0, -1.0, -1.0],
    },
    Inequality {
        label: "1-t1+t2-t3 >= 0",
        constant: 1.0,
        coeffs: [-1.0, 1.0, -1.0],
    },
];

/// The PPT inequality whose saturation bounds entangled cell `i` (1-based).
pub fn cell_face(cell: usize) -> &'static Inequality {
    &PPT[4 - cell]
}

/// All eight inequalities, positivity first.
pub fn octahedron_inequalities() -> impl Iterator<Item = &'static Inequality> {
    POSITIVITY.iter().chain(PPT.iter())
}

/// Smallest margin over all eight inequalities; `≥ 0` means separable.
pub fn octahedron_margin(t: [f64; 3]) -> f64 {
    octahedron_inequalities()
        .map(|q| q.margin(t))
        .fold(f64::INFINITY, f64::min)
}

pub fn probs_to_t(p: [f64; 4]) -> Result<[f64; 3]> {
    validate_probs(p)?;
    Ok(t_of(p))
}

pub(crate) fn t_of(p: [f64; 4]) -> [f64; 3] {
    [
        p[0] - p[1] + p[2] - p[3],
        -p[0] + p[1] + p[2] - p[3],
        p[0] + p[1] - p[2] - p[3],
    ]
}

/// Inverts the t–p map. Fails unless `t` lies in the positivity tetrahedron.
pub fn t_to_probs(t: [f64; 3]) -> Result<[f64; 4]> {
    if let Some(bad) = POSITIVITY.iter().find(|q| q.margin(t) < -MEMBERSHIP_TOL) {
        return Err(Error::domain(format!(
            "not a physical BD state: t = ({}, {}, {}) violates positivity inequality {}",
            t[0], t[1], t[2], bad.label
        )));
    }
    Ok(POSITIVITY.map(|q| q.margin(t) / 4.0))
}

fn validate_probs(p: [f64; 4]) -> Result<()> {
    for (i, &pi) in p.iter().enumerate() {
        if !pi.is_finite() {
            return Err(Error::input(format!("p{} is not a finite number", i + 1)));
        }
        if pi < -MEMBERSHIP_TOL {
            return Err(Error::input(format!(
                "p{} = {pi} violates p{} >= 0",
                i + 1,
                i + 1
            )));
        }
        if pi > 1.0 + MEMBERSHIP_TOL {
            return Err(Error::input(format!(
                "p{} = {pi} violates p{} <= 1",
                i + 1,
                i + 1
            )));
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > MEMBERSHIP_TOL {
        return Err(Error::input(format!(
            "probabilities sum to {sum}, violating sum p = 1"
        )));
    }
    Ok(())
}

/// Amplitudes of Bell state `|ψᵢ⟩` for `i ∈ 1..=4`.
pub fn bell_vector(i: usize) -> Result<[Complex64; 4]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    match i {
        1 => Ok([c(s, 0.0), z, z, c(s, 0.0)]),
        2 => Ok([c(s, 0.0), z, z, c(-s, 0.0)]),
        3 => Ok([z, c(s, 0.0), c(s, 0.0), z]),
        4 => Ok([z, c(s, 0.0), c(-s, 0.0), z]),
        _ => Err(Error::input(format!("Bell index must be 1..=4, got {i}"))),
    }
}

pub fn bell_projector(i: usize) -> Result<DensityMatrix> {
    let v = bell_vector(i)?;
    Ok(DensityMatrix::from_valid(ComplexMatrix::outer(&v, &v)?))
}

/// ¼(I⊗I + Σ tᵢ σᵢ⊗σᵢ), computed directly from the Pauli expansion.
pub fn pauli_expansion(t: [f64; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4);
    for (axis, ti) in (1..=3).zip(t) {
        let ss = tensor_product(&pauli(axis), &pauli(axis)).expect("2x2 factors");
        m = &m + &ss.scale(ti);
    }
    m.scale(0.25)
}

/// Which piece of the tetrahedron a BD state lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Separable,
    /// Corner cell at Bell vertex `Pᵢ`, `i ∈ 1..=4`.
    EntangledCell(u8),
}

impl RegionLabel {
    pub fn is_separable(self) -> bool {
        matches!(self, RegionLabel::Separable)
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionLabel::Separable => f.write_str("separable"),
            RegionLabel::EntangledCell(i) => write!(f, "cell_{i}"),
        }
    }
}

/// Relabeling that moves the dominant Bell weight into slot 4.
///
/// Swapping two Bell weights is a local unitary, so every entanglement
/// measure is unchanged; the swap is its own inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSwap {
    /// 1-based index exchanged with index 4; `4` means identity.
    pub index: u8,
}

impl CellSwap {
    pub const IDENTITY: CellSwap = CellSwap { index: 4 };

    pub fn is_identity(self) -> bool {
        self.index == 4
    }

    pub fn apply(self, s: &BDState) -> BDState {
        let mut p = s.p;
        p.swap(self.index as usize - 1, 3);
        BDState { p }
    }
}

/// A BD state, stored as its Bell-basis probability vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BDState {
    p: [f64; 4],
}

impl BDState {
    pub fn from_probs(p: [f64; 4]) -> Result<Self> {
        validate_probs(p)?;
        Ok(Self { p })
    }

    /// Validated through [`t_to_probs`]; out-of-tetrahedron input is a domain error.
    pub fn from_t(t: [f64; 3]) -> Result<Self> {
        Self::from_probs(t_to_probs(t)?)
    }

    pub fn maximally_mixed() -> Self {
        Self { p: [0.25; 4] }
    }

    pub fn bell(i: usize) -> Result<Self> {
        bell_vector(i)?;
        let mut p = [0.0; 4];
        p[i - 1] = 1.0;
        Ok(Self { p })
    }

    /// Werner state on the segment from the singlet (`x = 1`) to `I/4` (`x = 0`).
    pub fn werner(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::input(format!("Werner parameter {x} outside [0, 1]")));
        }
        Self::from_t([-x, -x, -x])
    }

    /// Reads a density matrix as a BD state if it is Bell-diagonal to within `tol`
    /// in Hilbert-Schmidt norm.
    pub fn from_density_matrix(rho: &DensityMatrix, tol: f64) -> Option<Self> {
        let mut p = [0.0; 4];
        for (i, pi) in p.iter_mut().enumerate() {
            let v = bell_vector(i + 1).expect("valid index");
            *pi = rho.matrix().expectation(&v).re.clamp(0.0, 1.0);
        }
        let norm: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= norm);
        let s = Self::from_probs(p).ok()?;
        let back = s.to_density_matrix();
        (crate::linalg::hs_distance(back.matrix(), rho.matrix()).ok()? <= tol).then_some(s)
    }

    pub fn p(&self) -> [f64; 4] {
        self.p
    }

    pub fn t(&self) -> [f64; 3] {
        t_of(self.p)
    }

    /// `Σ pᵢ |ψᵢ⟩⟨ψᵢ|`; agrees with [`pauli_expansion`] of `self.t()`.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for (i, &pi) in self.p.iter().enumerate() {
            let proj = bell_projector(i + 1).expect("valid index");
            m = &m + &proj.matrix().scale(pi);
        }
        DensityMatrix::from_valid(m)
    }

    pub fn max_prob(&self) -> (usize, f64) {
        let mut best = 0;
        for i in 1..4 {
            if self.p[i] > self.p[best] {
                best = i;
            }
        }
        (best + 1, self.p[best])
    }

    pub fn region(&self) -> RegionLabel {
        classify_region(self)
    }
}

/// Separable iff every `pᵢ ≤ ½` (within [`MEMBERSHIP_TOL`]); otherwise the
/// cell of the dominant Bell weight.
pub fn classify_region(s: &BDState) -> RegionLabel {
    let (i, pmax) = s.max_prob();
    if pmax <= 0.5 + MEMBERSHIP_TOL {
        RegionLabel::Separable
    } else {
        RegionLabel::EntangledCell(i as u8)
    }
}

/// Moves the largest weight into slot 4. Identity when `p₄` is already a
/// maximum; otherwise the lowest index attaining the maximum is swapped in.
pub fn canonicalize_to_singlet(s: &BDState) -> (BDState, CellSwap) {
    let (i, pmax) = s.max_prob();
    let swap = if s.p[3] >= pmax {
        CellSwap::IDENTITY
    } else {
        CellSwap { index: i as u8 }
    };
    (swap.apply(s), swap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigen, hs_distance, partial_transpose_b};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_vec_eq<const N: usize>(a: [f64; N], b: [f64; N], eps: f64) {
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(*x, y, epsilon = eps);
        }
    }

    #[test]
    fn t_map_examples() {
        assert_vec_eq(probs_to_t([0.25; 4]).unwrap(), [0.0; 3], 0.0);
        assert_vec_eq(probs_to_t([0.0, 0.0, 0.0, 1.0]).unwrap(), [-1.0; 3], 0.0);
        assert_vec_eq(probs_to_t([0.1, 0.1, 0.1, 0.7]).unwrap(), [-0.6; 3], 1e-15);

        assert_vec_eq(t_to_probs([0.0; 3]).unwrap(), [0.25; 4], 0.0);
        assert_vec_eq(t_to_probs([-1.0; 3]).unwrap(), [0.0, 0.0, 0.0, 1.0], 0.0);
        assert_vec_eq(t_to_probs([-0.6; 3]).unwrap(), [0.1, 0.1, 0.1, 0.7], 1e-15);
    }

    #[test]
    fn vertices_are_bell_states() {
        for (i, v) in BELL_VERTICES.iter().enumerate() {
            let s = BDState::bell(i + 1).unwrap();
            assert_eq!(s.t(), *v);
        }
    }

    #[test]
    fn invalid_probabilities_name_the_violation() {
        let err = probs_to_t([0.5, 0.5, 0.5, 0.5]).unwrap_err();
        assert!(err.to_string().contains("sum p = 1"), "{err}");
        let err = BDState::from_probs([1.2, -0.2, 0.0, 0.0]).unwrap_err();
        assert!(err.to_string().contains("p1 <= 1"), "{err}");
    }

    #[test]
    fn outside_tetrahedron_is_domain_error() {
        let err = t_to_probs([1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(err.to_string().contains("1-t1-t2-t3 >= 0"), "{err}");
    }

    #[test]
    fn bell_projectors() {
        let singlet = bell_projector(4).unwrap();
        let m = singlet.matrix();
        assert_abs_diff_eq!(m[(1, 1)].re, 0.5);
        assert_abs_diff_eq!(m[(1, 2)].re, -0.5);
        assert_abs_diff_eq!(m[(2, 1)].re, -0.5);
        assert_abs_diff_eq!(m[(2, 2)].re, 0.5);
        assert_eq!(m[(0, 0)].re, 0.0);

        let phi_plus = bell_projector(1).unwrap();
        let m = phi_plus.matrix();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(m[(i, j)].re, 0.5, epsilon = 1e-15);
        }
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert_eq!(m[(i, j)], c(0.0, 0.0));
        }

        for i in 1..=4 {
            let p = bell_projector(i).unwrap();
            let sq = p.matrix() * p.matrix();
            assert!(hs_distance(&sq, p.matrix()).unwrap() < 1e-15);
            assert_abs_diff_eq!(p.matrix().trace().re, 1.0, epsilon = 1e-15);
        }
        assert!(bell_projector(0).is_err());
        assert!(bell_projector(5).is_err());
    }

    #[test]
    fn density_matrix_examples() {
        let mixed = BDState::maximally_mixed().to_density_matrix();
        assert!(
            hs_distance(mixed.matrix(), DensityMatrix::maximally_mixed().matrix()).unwrap() < 1e-15
        );

        let singlet = BDState::bell(4).unwrap().to_density_matrix();
        assert!(
            hs_distance(singlet.matrix(), bell_projector(4).unwrap().matrix()).unwrap() < 1e-15
        );

        let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7]).unwrap();
        let rho = s.to_density_matrix();
        let eig = hermitian_eigen(rho.matrix()).unwrap();
        assert_vec_eq(
            [eig.values[0], eig.values[1], eig.values[2], eig.values[3]],
            [0.7, 0.1, 0.1, 0.1],
            1e-12,
        );
        assert!(hs_distance(rho.matrix(), &pauli_expansion(s.t())).unwrap() < 1e-12);
        for i in 1..=4 {
            let v = bell_vector(i).unwrap();
            assert_abs_diff_eq!(
                rho.matrix().expectation(&v).re,
                s.p()[i - 1],
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn region_examples() {
        assert_eq!(
            classify_region(&BDState::maximally_mixed()),
            RegionLabel::Separable
        );
        let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7]).unwrap();
        assert_eq!(classify_region(&s), RegionLabel::EntangledCell(4));
        assert_abs_diff_eq!(PPT[0].margin(s.t()), -0.8, epsilon = 1e-15);

        let boundary = BDState::from_t([-1.0 / 3.0; 3]).unwrap();
        assert_eq!(classify_region(&boundary), RegionLabel::Separable);
        assert_abs_diff_eq!(PPT[0].margin(boundary.t()), 0.0, epsilon = 1e-15);

        for i in 1..=4 {
            let s = BDState::bell(i).unwrap();
            assert_eq!(classify_region(&s), RegionLabel::EntangledCell(i as u8));
        }
    }

    #[test]
    fn ppt_inequalities_match_probabilities() {
        let s = BDState::from_probs([0.05, 0.2, 0.3, 0.45]).unwrap();
        let t = s.t();
        for (k, q) in PPT.iter().enumerate() {
            assert_abs_diff_eq!(q.margin(t), 2.0 - 4.0 * s.p()[3 - k], epsilon = 1e-15);
        }
        for (k, q) in POSITIVITY.iter().enumerate() {
            assert_abs_diff_eq!(q.margin(t), 4.0 * s.p()[k], epsilon = 1e-15);
        }
        for cell in 1..=4 {
            let v = BELL_VERTICES[cell - 1];
            assert!(cell_face(cell).margin(v) < 0.0);
        }
    }

    #[test]
    fn canonicalization_examples() {
        let s = BDState::from_probs([0.7, 0.1, 0.1, 0.1]).unwrap();
        let (canon, swap) = canonicalize_to_singlet(&s);
        assert_eq!(canon.p(), [0.1, 0.1, 0.1, 0.7]);
        assert_eq!(swap, CellSwap { index: 1 });
        assert_eq!(swap.apply(&canon), s);

        let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7]).unwrap();
        assert_eq!(canonicalize_to_singlet(&s), (s, CellSwap::IDENTITY));

        let s = BDState::maximally_mixed();
        assert_eq!(canonicalize_to_singlet(&s), (s, CellSwap::IDENTITY));

        let tie = BDState::from_probs([0.4, 0.4, 0.1, 0.1]).unwrap();
        assert_eq!(canonicalize_to_singlet(&tie).1, CellSwap { index: 1 });
    }

    #[test]
    fn density_matrix_roundtrip_and_non_bd_rejection() {
        let s = BDState::from_probs([0.2, 0.3, 0.4, 0.1]).unwrap();
        let back = BDState::from_density_matrix(&s.to_density_matrix(), 1e-12).unwrap();
        assert_vec_eq(back.p(), s.p(), 1e-15);

        let up_up =
            DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(BDState::from_density_matrix(&up_up, 1e-10).is_none());
    }

    fn simplex() -> impl Strategy<Value = [f64; 4]> {
        prop::array::uniform4(0.0f64..1.0).prop_filter_map("non-degenerate", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| w.map(|x| x / s))
        })
    }

    proptest! {
        #[test]
        fn p_t_p_roundtrip(p in simplex()) {
            let t = probs_to_t(p).unwrap();
            let back = t_to_probs(t).unwrap();
            for (a, b) in p.iter().zip(back) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn both_constructions_agree(p in simplex()) {
            let s = BDState::from_probs(p).unwrap();
            let d = hs_distance(s.to_density_matrix().matrix(), &pauli_expansion(s.t())).unwrap();
            prop_assert!(d <= 1e-12);
        }

        #[test]
        fn ppt_test_matches_region(p in simplex()) {
            let s = BDState::from_probs(p).unwrap();
            let pt = partial_transpose_b(&s.to_density_matrix());
            let min = hermitian_eigen(&pt).unwrap().min_value();
            prop_assert_eq!(min >= -1e-10, classify_region(&s).is_separable());
        }

        #[test]
        fn canonicalization_preserves_multiset(p in simplex()) {
            let s = BDState::from_probs(p).unwrap();
            let (canon, swap) = canonicalize_to_singlet(&s);
            prop_assert_eq!(canon.max_prob().1, canon.p()[3]);
            let mut a = s.p();
            let mut b = canon.p();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(a, b);
            prop_assert_eq!(swap.apply(&canon), s);
        }
    }
}
