//! Entanglement of two-qubit Bell-diagonal states.
//!
//! A Bell-diagonal state is a mixture `Σ pᵢ |ψᵢ⟩⟨ψᵢ|` of the four Bell states
//! `φ⁺, φ⁻, ψ⁺, ψ⁻`, or equivalently a point `t` of the tetrahedron spanned by
//! `(1,−1,1), (−1,1,1), (1,1,−1), (−1,−1,−1)`. The separable states form the
//! inscribed octahedron. This crate computes concurrence, entanglement of
//! formation and the distance-based measures with their closed-form nearest
//! separable states, applies local filters, and checks every closed form
//! against independent numerical routes in [`oracle`].
//!
//! ```
//! use bell_entanglement::{measure, BDState, EntropyUnit};
//!
//! let s = BDState::from_probs([0.1, 0.1, 0.1, 0.7])?;
//! let report = measure(&s, EntropyUnit::Nats)?;
//! assert!((report.concurrence - 0.4).abs() < 1e-12);
//! assert!((report.hs_entanglement - 0.4).abs() < 1e-12);
//! # Ok::<(), bell_entanglement::Error>(())
//! ```

pub mod bd;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod lqcc;
pub mod measures;
pub mod oracle;

pub use bd::{
    canonicalize_to_singlet, classify_region, probs_to_t, t_to_probs, BDState, CellSwap,
    RegionLabel,
};
pub use error::{Error, Result};
pub use linalg::{hermitian_eigen, hs_distance, psd_sqrt, ComplexMatrix, DensityMatrix};
pub use lqcc::{apply_lqcc, Filter, LqccParams, Unitary2};
pub use measures::{
    concurrence, concurrence_bd, entanglement_of_formation, hs_entanglement, measure,
    nearest_separable_bd, tilde_distance, tilde_entanglement_bd, EntropyUnit, MeasureReport,
};
pub use oracle::{run_invariant_suite, OracleConfig, SuiteReport};
