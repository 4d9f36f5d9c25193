//! Independent checks for the closed forms.
//!
//! The grid search and the alternate concurrence route share no code path
//! with the formulas they check: the grid scans every lattice point of
//! `[−1, 1]³` that passes the eight separability inequalities, and the
//! alternate route takes eigenvalues of the non-Hermitian product `ρ ρ̃`
//! through a general Schur decomposition instead of the Jacobi chain.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bd::{
    canonicalize_to_singlet, cell_face, classify_region, octahedron_margin, probs_to_t, t_to_probs,
    BDState, RegionLabel, BELL_VERTICES, MEMBERSHIP_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigen, hs_distance, partial_transpose_b, psd_sqrt, ComplexMatrix, DensityMatrix,
};
use crate::lqcc::{
    apply_lqcc, apply_lqcc_tilde, filter_flip_identity_check, normalization_factor,
    predict_concurrence_transform, restricted_entanglement_transform, Filter, LqccParams, Unitary2,
};
use crate::measures::{
    concurrence, concurrence_bd, entanglement_of_formation, hs_distance_bd, hs_entanglement,
    nearest_separable_bd, spin_flip, spin_flip_matrix, tilde_distance, tilde_entanglement_bd,
};

pub type OracleRng = ChaCha8Rng;

/// Imaginary parts of `ρρ̃` eigenvalues above this are reported as failures.
pub const ALT_ROUTE_IMAG_LIMIT: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

pub fn rng_from_seed(seed: u64) -> OracleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the probability simplex via sorted-uniform spacings.
pub fn sample_simplex<const N: usize>(rng: &mut impl Rng) -> [f64; N] {
    let mut cuts: Vec<f64> = (0..N - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut out = [0.0; N];
    let mut prev = 0.0;
    for (slot, &cut) in out.iter_mut().zip(cuts.iter()) {
        *slot = cut - prev;
        prev = cut;
    }
    out[N - 1] = 1.0 - prev;
    out
}

/// Uniformly distributed BD state.
pub fn sample_bd(rng: &mut impl Rng) -> BDState {
    BDState::from_probs(sample_simplex::<4>(rng)).expect("spacings form a probability vector")
}

/// Uniform point of entangled cell `cell` (1..=4), whose vertices are the
/// Bell state and the three midpoints `p_cell = p_j = ½`.
pub fn sample_entangled_bd(rng: &mut impl Rng, cell: usize) -> Result<BDState> {
    if !(1..=4).contains(&cell) {
        return Err(Error::input(format!(
            "cell index must be 1..=4, got {cell}"
        )));
    }
    loop {
        let w = sample_simplex::<4>(rng);
        let mut p = [0.0; 4];
        let mut other = 1;
        for (k, slot) in p.iter_mut().enumerate() {
            if k + 1 == cell {
                *slot = w[0] + 0.5 * (1.0 - w[0]);
            } else {
                *slot = 0.5 * w[other];
                other += 1;
            }
        }
        let s = BDState::from_probs(p)?;
        if classify_region(&s) == RegionLabel::EntangledCell(cell as u8) {
            return Ok(s);
        }
    }
}

/// Uniform BD states for even `i`, entangled states cycling through the
/// four cells for odd `i`.
pub fn sample_mixed_bd(rng: &mut impl Rng, i: usize) -> BDState {
    if i.is_multiple_of(2) {
        sample_bd(rng)
    } else {
        sample_entangled_bd(rng, (i / 2) % 4 + 1).expect("valid cell")
    }
}

/// BD state at t-space distance `distance` from a random point of a cell
/// face, on the entangled side when `inside_cell` is set.
pub fn sample_near_face(rng: &mut impl Rng, distance: f64, inside_cell: bool) -> BDState {
    loop {
        let cell = rng.random_range(1..=4);
        let w = sample_simplex::<3>(rng);
        let mut p = [0.0; 4];
        let mut other = 0;
        for (k, slot) in p.iter_mut().enumerate() {
            if k + 1 == cell {
                *slot = 0.5;
            } else {
                *slot = 0.5 * w[other];
                other += 1;
            }
        }
        let t_face = probs_to_t(p).expect("face point is physical");
        let v = BELL_VERTICES[cell - 1];
        let step = if inside_cell { distance } else { -distance } / 3f64.sqrt();
        let t = [0, 1, 2].map(|k| t_face[k] + step * v[k]);
        if let Ok(s) = BDState::from_t(t) {
            return s;
        }
    }
}

pub fn sample_unit_vector(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [0; 3].map(|_| rng.sample(StandardNormal));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.map(|x| x / norm);
        }
    }
}

/// Filter with `μ ∈ [0.5, 2]`, `|a| < 0.9` and a uniform axis.
pub fn sample_filter(rng: &mut impl Rng) -> Filter {
    let mu = rng.random_range(0.5..=2.0);
    let a = rng.random_range(-0.9..0.9);
    Filter::new(mu, a, sample_unit_vector(rng)).expect("sampled filter is valid")
}

/// Axis-angle local unitary.
pub fn sample_unitary(rng: &mut impl Rng) -> Unitary2 {
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    Unitary2::from_axis_angle(sample_unit_vector(rng), angle).expect("unit axis")
}

/// Filter pair meeting the restricted condition for `s`: either one filter
/// strength is zero, or `n` is orthogonal to `v∘m` for the cell vertex `v`.
pub fn sample_restricted_params(rng: &mut impl Rng, s: &BDState) -> LqccParams {
    let mut fa = sample_filter(rng);
    let mut fb = sample_filter(rng);
    let weights = match classify_region(s) {
        RegionLabel::EntangledCell(cell) => BELL_VERTICES[cell as usize - 1],
        RegionLabel::Separable => [-1.0; 3],
    };
    if rng.random_bool(0.3) {
        if rng.random_bool(0.5) {
            fa = Filter::new(fa.mu(), 0.0, fa.m()).expect("valid");
        } else {
            fb = Filter::new(fb.mu(), 0.0, fb.m()).expect("valid");
        }
    } else {
        let u = [0, 1, 2].map(|k| weights[k] * fa.m()[k]);
        let unorm2: f64 = u.iter().map(|x| x * x).sum();
        loop {
            let r = sample_unit_vector(rng);
            let dot: f64 = (0..3).map(|k| r[k] * u[k]).sum();
            let n = [0, 1, 2].map(|k| r[k] - dot / unorm2 * u[k]);
            if let Ok(f) = Filter::with_axis(fb.mu(), fb.a(), n) {
                if n.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
                    fb = f;
                    break;
                }
            }
        }
    }
    LqccParams::filters(fa, fb)
}

fn complex_gaussian_matrix(rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// General two-qubit state `G G† / tr(G G†)` with Gaussian `G`.
pub fn sample_density_matrix(rng: &mut impl Rng) -> DensityMatrix {
    let g = complex_gaussian_matrix(rng);
    DensityMatrix::from_unnormalized(&(&g * &g.adjoint())).expect("Wishart matrices are PSD")
}

/// Random Hermitian 4×4 matrix `(G + G†)/2`.
pub fn sample_hermitian(rng: &mut impl Rng) -> ComplexMatrix {
    complex_gaussian_matrix(rng).hermitian_part()
}

// ---------------------------------------------------------------------------
// Grid search over the separable octahedron
// ---------------------------------------------------------------------------

/// Lattice points of `[−1, 1]³` at spacing `step` that satisfy all eight
/// separability inequalities.
#[derive(Debug, Clone)]
pub struct SeparableGrid {
    step: f64,
    points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMinimum {
    pub t: [f64; 3],
    /// Hilbert-Schmidt distance, `½ ×` Euclidean.
    pub distance: f64,
}

impl SeparableGrid {
    pub fn new(step: f64) -> Result<Self> {
        let cells = validate_grid_step(step)?;
        let coord = |k: usize| -1.0 + k as f64 * step;
        let points = (0..=cells)
            .into_par_iter()
            .flat_map_iter(|i| {
                (0..=cells).flat_map(move |j| {
                    (0..=cells).filter_map(move |k| {
                        let t = [coord(i), coord(j), coord(k)];
                        (octahedron_margin(t) >= -MEMBERSHIP_TOL).then_some(t)
                    })
                })
            })
            .collect();
        Ok(Self { step, points })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exhaustive minimum; ties go to the lowest lattice index, so the result
    /// does not depend on how the scan is split across threads.
    pub fn nearest(&self, t: [f64; 3]) -> GridMinimum {
        let (sq, idx) = self
            .points
            .par_iter()
            .enumerate()
            .map(|(i, q)| {
                let d: f64 = (0..3).map(|k| (q[k] - t[k]) * (q[k] - t[k])).sum();
                (d, i)
            })
            .reduce(
                || (f64::INFINITY, usize::MAX),
                |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
            );
        GridMinimum {
            t: self.points[idx],
            distance: 0.5 * sq.sqrt(),
        }
    }
}

fn validate_grid_step(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::input(format!(
            "grid step must lie in (0, 0.1], got {step}"
        )));
    }
    let cells = 2.0 / step;
    let rounded = cells.round();
    if (cells - rounded).abs() > 1e-9 * rounded {
        return Err(Error::input(format!(
            "grid step {step} does not divide 2 into an integer number of cells"
        )));
    }
    Ok(rounded as usize)
}

/// Grid minimum of the Hilbert-Schmidt distance from `t` to the separable set.
pub fn brute_force_nearest_separable(t: [f64; 3], grid_step: f64) -> Result<GridMinimum> {
    t_to_probs(t)?;
    Ok(SeparableGrid::new(grid_step)?.nearest(t))
}

// ---------------------------------------------------------------------------
// Alternate concurrence route
// ---------------------------------------------------------------------------

fn to_nalgebra(m: &ComplexMatrix) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| m[(i, j)])
}

/// Concurrence from the square roots of the eigenvalues of `ρ ρ̃`.
pub fn concurrence_alt_route(rho: &DensityMatrix) -> Result<f64> {
    let product = rho.matrix() * &spin_flip_matrix(rho.matrix());
    let eigenvalues = Schur::new(to_nalgebra(&product))
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur decomposition of ρρ̃ did not converge".into()))?;
    let mut roots = Vec::with_capacity(4);
    for z in eigenvalues.iter() {
        if z.im.abs() > ALT_ROUTE_IMAG_LIMIT {
            return Err(Error::Numerical(format!(
                "eigenvalue of ρρ̃ has imaginary part {:.3e}",
                z.im
            )));
        }
        roots.push(z.re.max(0.0).sqrt());
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    pub grid_step: f64,
    /// Scales every check; at 1000 each check runs its reference sample count.
    pub sample_count: usize,
    /// Replaces every per-check tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            grid_step: 0.01,
            sample_count: 1000,
            tolerance: None,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        validate_grid_step(self.grid_step)?;
        if self.sample_count == 0 {
            return Err(Error::input("sample count must be at least 1"));
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) {
                return Err(Error::input(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }

    fn scaled(&self, reference: usize) -> usize {
        (reference * self.sample_count).div_ceil(1000).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub samples: usize,
    /// `null` in JSON when a sample errored.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One record per invariant, keyed by check name.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SuiteReport {
    pub checks: BTreeMap<String, CheckRecord>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &CheckRecord)> {
        self.checks
            .iter()
            .filter(|(_, r)| !r.pass)
            .map(|(k, r)| (k.as_str(), r))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Running maximum of per-sample deviations.
#[derive(Debug, Default)]
struct Tally {
    samples: usize,
    max_dev: f64,
}

impl Tally {
    fn observe(&mut self, dev: f64) {
        self.samples += 1;
        if dev.is_nan() {
            self.max_dev = f64::INFINITY;
        } else {
            self.max_dev = self.max_dev.max(dev);
        }
    }

    fn count(&mut self, ok: bool) {
        self.observe(if ok { 0.0 } else { 1.0 });
    }
}

struct Ctx<'a> {
    config: &'a OracleConfig,
}

type CheckFn = fn(&mut OracleRng, usize, &Ctx) -> Result<Tally>;

enum Tolerance {
    Fixed(f64),
    GridStep,
}

struct CheckDef {
    name: &'static str,
    reference_samples: usize,
    /// Fixed-grid checks ignore `sample_count`.
    scales: bool,
    tolerance: Tolerance,
    run: CheckFn,
}

const CHECKS: &[CheckDef] = &[
    CheckDef {
        name: "linalg.eigen_reconstruction",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-9),
        run: check_eigen_reconstruction,
    },
    CheckDef {
        name: "linalg.psd_sqrt_squares_back",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-9),
        run: check_psd_sqrt,
    },
    CheckDef {
        name: "linalg.partial_transpose_involution",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(0.0),
        run: check_pt_involution,
    },
    CheckDef {
        name: "linalg.hs_triangle_inequality",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_triangle,
    },
    CheckDef {
        name: "linalg.hs_euclidean_reduction",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_euclidean_reduction,
    },
    CheckDef {
        name: "bd.p_t_roundtrip",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_roundtrip,
    },
    CheckDef {
        name: "bd.ppt_matches_octahedron",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(0.0),
        run: check_ppt_agreement,
    },
    CheckDef {
        name: "bd.region_matches_concurrence",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(0.0),
        run: check_region_concurrence,
    },
    CheckDef {
        name: "bd.canonicalization_preserves_spectrum",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(0.0),
        run: check_canonical_spectrum,
    },
    CheckDef {
        name: "measures.concurrence_closed_form",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-9),
        run: check_concurrence_closed_form,
    },
    CheckDef {
        name: "measures.spin_flip_fixed_point",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_spin_flip_fixed_point,
    },
    CheckDef {
        name: "measures.hs_tilde_concurrence_chain",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_entanglement_chain,
    },
    CheckDef {
        name: "measures.tilde_reduces_to_hs",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_tilde_reduction,
    },
    CheckDef {
        name: "measures.nearest_inside_octahedron",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_nearest_inside,
    },
    CheckDef {
        name: "measures.nearest_saturates_cell_face",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_nearest_on_face,
    },
    CheckDef {
        name: "measures.nearest_in_face_triangle",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_face_triangle,
    },
    CheckDef {
        name: "measures.eof_monotone",
        reference_samples: 101,
        scales: false,
        tolerance: Tolerance::Fixed(0.0),
        run: check_eof_monotone,
    },
    CheckDef {
        name: "measures.concurrence_permutation_invariant",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(0.0),
        run: check_permutation_invariance,
    },
    CheckDef {
        name: "lqcc.concurrence_law",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-9),
        run: check_concurrence_law,
    },
    CheckDef {
        name: "lqcc.normalization_closed_form",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_normalization,
    },
    CheckDef {
        name: "lqcc.restricted_normalizations_equal",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_restricted_normalization,
    },
    CheckDef {
        name: "lqcc.restricted_entanglement_law",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-8),
        run: check_restricted_law,
    },
    CheckDef {
        name: "lqcc.local_unitary_invariance",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_local_unitaries,
    },
    CheckDef {
        name: "lqcc.output_is_density_matrix",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_output_valid,
    },
    CheckDef {
        name: "lqcc.filter_flip_identity",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_filter_identity,
    },
    CheckDef {
        name: "lqcc.tilde_transform_consistency",
        reference_samples: 500,
        scales: true,
        tolerance: Tolerance::Fixed(1e-10),
        run: check_tilde_transform,
    },
    CheckDef {
        name: "oracle.grid_matches_closed_form",
        reference_samples: 100,
        scales: true,
        tolerance: Tolerance::GridStep,
        run: check_grid_matches,
    },
    CheckDef {
        name: "oracle.closed_form_not_beaten_by_grid",
        reference_samples: 100,
        scales: true,
        tolerance: Tolerance::Fixed(1e-12),
        run: check_grid_minimality,
    },
    CheckDef {
        name: "oracle.alt_concurrence_bd",
        reference_samples: 1000,
        scales: true,
        tolerance: Tolerance::Fixed(1e-8),
        run: check_alt_route_bd,
    },
    CheckDef {
        name: "oracle.alt_concurrence_general",
        reference_samples: 200,
        scales: true,
        tolerance: Tolerance::Fixed(1e-8),
        run: check_alt_route_general,
    },
];

/// Names of every check the suite runs.
pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.name)
}

/// 64-bit FNV-1a, used to give each check its own random stream.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn run_invariant_suite(config: &OracleConfig) -> Result<SuiteReport> {
    config.validate()?;
    let ctx = Ctx { config };
    let checks = CHECKS
        .par_iter()
        .map(|def| (def.name.to_string(), run_check(def, &ctx)))
        .collect();
    Ok(SuiteReport { checks })
}

fn run_check(def: &CheckDef, ctx: &Ctx) -> CheckRecord {
    let config = ctx.config;
    let tolerance = config.tolerance.unwrap_or(match def.tolerance {
        Tolerance::Fixed(t) => t,
        Tolerance::GridStep => config.grid_step,
    });
    let samples = if def.scales {
        config.scaled(def.reference_samples)
    } else {
        def.reference_samples
    };
    let mut rng = rng_from_seed(config.seed);
    rng.set_stream(stream_id(def.name));

    let outcome = catch_unwind(AssertUnwindSafe(|| (def.run)(&mut rng, samples, ctx)));
    let (samples_run, max_deviation, error) = match outcome {
        Ok(Ok(t)) => (t.samples, t.max_dev, None),
        Ok(Err(e)) => (samples, f64::INFINITY, Some(e.to_string())),
        Err(_) => (samples, f64::INFINITY, Some("check panicked".to_string())),
    };
    CheckRecord {
        samples: samples_run,
        max_deviation,
        tolerance,
        pass: error.is_none() && max_deviation <= tolerance,
        error,
    }
}

fn check_eigen_reconstruction(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        let h = sample_hermitian(rng);
        let eig = hermitian_eigen(&h)?;
        let v = &eig.vectors;
        let unitarity = (&(&v.adjoint() * v) - &ComplexMatrix::identity(4)).hs_norm();
        tally.observe(hs_distance(&eig.reconstruct(), &h)?.max(unitarity));
    }
    Ok(tally)
}

fn check_psd_sqrt(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        let m = sample_density_matrix(rng).into_matrix();
        let s = psd_sqrt(&m)?;
        tally.observe(hs_distance(&(&s * &s), &m)?);
    }
    Ok(tally)
}

fn check_pt_involution(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        let rho = sample_density_matrix(rng);
        let twice = partial_transpose_b(&rho).partial_transpose_b()?;
        tally.observe(if twice == *rho.matrix() {
            0.0
        } else {
            hs_distance(&twice, rho.matrix())?.max(f64::MIN_POSITIVE)
        });
    }
    Ok(tally)
}

fn check_triangle(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        let [a, b, c] = [0; 3].map(|_| sample_density_matrix(rng).into_matrix());
        let slack = hs_distance(&a, &c)? - hs_distance(&a, &b)? - hs_distance(&b, &c)?;
        tally.observe(slack.max(0.0));
    }
    Ok(tally)
}

fn check_euclidean_reduction(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        let (s1, s2) = (sample_bd(rng), sample_bd(rng));
        let direct = hs_distance(
            s1.to_density_matrix().matrix(),
            s2.to_density_matrix().matrix(),
        )?;
        tally.observe((direct - hs_distance_bd(s1.t(), s2.t())).abs());
    }
    Ok(tally)
}

fn check_roundtrip(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        let s = sample_bd(rng);
        let back = t_to_probs(probs_to_t(s.p())?)?;
        let dev = (0..4)
            .map(|k| (back[k] - s.p()[k]).abs())
            .fold(0.0, f64::max);
        tally.observe(dev);
    }
    Ok(tally)
}

/// Matrix-level Peres test on the partial transpose.
pub fn ppt_separable(rho: &DensityMatrix) -> Result<bool> {
    Ok(hermitian_eigen(&partial_transpose_b(rho))?.min_value() >= -1e-10)
}

/// Verdict of the eight linear inequalities.
pub fn inequalities_separable(s: &BDState) -> bool {
    octahedron_margin(s.t()) >= -MEMBERSHIP_TOL
}

fn check_ppt_agreement(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let boundary = (n * 50).div_ceil(1000);
    let mut tally = Tally::default();
    for i in 0..n {
        let s = if i < boundary {
            sample_near_face(rng, 1e-9, i % 2 == 0)
        } else {
            sample_mixed_bd(rng, i)
        };
        let matrix_verdict = ppt_separable(&s.to_density_matrix())?;
        let agree = matrix_verdict == inequalities_separable(&s)
            && matrix_verdict == classify_region(&s).is_separable();
        tally.count(agree);
    }
    Ok(tally)
}

fn check_region_concurrence(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_mixed_bd(rng, i);
        let c = concurrence_bd(&s);
        let ok = match classify_region(&s) {
            RegionLabel::Separable => c <= 1e-10,
            RegionLabel::EntangledCell(_) => c > 0.0,
        };
        tally.count(ok);
    }
    Ok(tally)
}

fn check_canonical_spectrum(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_mixed_bd(rng, i);
        let (canon, swap) = canonicalize_to_singlet(&s);
        let mut a = s.p();
        let mut b = canon.p();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let ok = a == b && swap.apply(&canon) == s && canon.p()[3] == canon.max_prob().1;
        tally.count(ok);
    }
    Ok(tally)
}

fn check_concurrence_closed_form(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_mixed_bd(rng, i);
        tally.observe((concurrence(&s.to_density_matrix())? - concurrence_bd(&s)).abs());
    }
    Ok(tally)
}

fn check_spin_flip_fixed_point(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let rho = sample_mixed_bd(rng, i).to_density_matrix();
        tally.observe((spin_flip(&rho).matrix() - rho.matrix()).max_abs());
    }
    Ok(tally)
}

fn check_entanglement_chain(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_entangled_bd(rng, i % 4 + 1)?;
        let c = concurrence_bd(&s);
        let hs = hs_entanglement(&s);
        let tilde = tilde_entanglement_bd(&s)?;
        tally.observe((hs - c).abs().max((tilde - c).abs()));
    }
    Ok(tally)
}

fn check_tilde_reduction(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let (a, b) = (sample_mixed_bd(rng, i), sample_bd(rng));
        let (ra, rb) = (a.to_density_matrix(), b.to_density_matrix());
        tally.observe((tilde_distance(&ra, &rb)? - hs_distance(ra.matrix(), rb.matrix())?).abs());
    }
    Ok(tally)
}

fn check_nearest_inside(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_mixed_bd(rng, i);
        tally.observe((-octahedron_margin(nearest_separable_bd(&s).t())).max(0.0));
    }
    Ok(tally)
}

fn check_nearest_on_face(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let cell = i % 4 + 1;
        let s = sample_entangled_bd(rng, cell)?;
        tally.observe(cell_face(cell).margin(nearest_separable_bd(&s).t()).abs());
    }
    Ok(tally)
}

fn check_face_triangle(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_entangled_bd(rng, i % 4 + 1)?;
        let (canon, _) = canonicalize_to_singlet(&s);
        let t = nearest_separable_bd(&canon).t();
        let outside = t
            .iter()
            .map(|&x| (x - 0.0).max(-1.0 - x).max(0.0))
            .fold(0.0, f64::max);
        tally.observe(outside.max((t.iter().sum::<f64>() + 1.0).abs()));
    }
    Ok(tally)
}

fn check_eof_monotone(_: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    let grid: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let values = grid
        .iter()
        .map(|&c| entanglement_of_formation(c))
        .collect::<Result<Vec<_>>>()?;
    tally.observe(0.0);
    for w in values.windows(2) {
        tally.observe((w[0] - w[1]).max(0.0));
    }
    Ok(tally)
}

fn check_permutation_invariance(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_mixed_bd(rng, i);
        let (canon, _) = canonicalize_to_singlet(&s);
        tally.observe((concurrence_bd(&s) - concurrence_bd(&canon)).abs());
    }
    Ok(tally)
}

struct LqccCase {
    state: BDState,
    params: LqccParams,
}

fn sample_lqcc_case(rng: &mut OracleRng, i: usize) -> LqccCase {
    LqccCase {
        state: sample_mixed_bd(rng, i),
        params: LqccParams::filters(sample_filter(rng), sample_filter(rng)),
    }
}

fn check_concurrence_law(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let case = sample_lqcc_case(rng, i);
        let out = apply_lqcc(&case.state.to_density_matrix(), &case.params)?;
        let predicted = predict_concurrence_transform(
            concurrence_bd(&case.state),
            case.state.t(),
            &case.params,
        )?;
        tally.observe((concurrence(&out.state)? - predicted).abs());
    }
    Ok(tally)
}

fn check_normalization(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let case = sample_lqcc_case(rng, i);
        let out = apply_lqcc(&case.state.to_density_matrix(), &case.params)?;
        tally.observe((normalization_factor(case.state.t(), &case.params)? - out.norm).abs());
    }
    Ok(tally)
}

fn check_restricted_normalization(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_mixed_bd(rng, i);
        let params = sample_restricted_params(rng, &s);
        let t_rho = normalization_factor(s.t(), &params)?;
        let t_sep = normalization_factor(nearest_separable_bd(&s).t(), &params)?;
        tally.observe((t_rho - t_sep).abs());
    }
    Ok(tally)
}

fn check_restricted_law(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let s = sample_mixed_bd(rng, i);
        let params = sample_restricted_params(rng, &s);
        let r = restricted_entanglement_transform(&s, &params)?;
        tally.observe((r.measured - r.predicted).abs());
    }
    Ok(tally)
}

fn check_local_unitaries(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let rho = sample_mixed_bd(rng, i).to_density_matrix();
        let fa = Filter::new(rng.random_range(0.5..=2.0), 0.0, sample_unit_vector(rng))?;
        let fb = Filter::new(rng.random_range(0.5..=2.0), 0.0, sample_unit_vector(rng))?;
        let params =
            LqccParams::filters(fa, fb).with_unitaries(sample_unitary(rng), sample_unitary(rng));
        let out = apply_lqcc(&rho, &params)?;
        tally.observe((concurrence(&out.state)? - concurrence(&rho)?).abs());
    }
    Ok(tally)
}

fn check_output_valid(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let case = sample_lqcc_case(rng, i);
        let params = case
            .params
            .with_unitaries(sample_unitary(rng), sample_unitary(rng));
        let out = apply_lqcc(&case.state.to_density_matrix(), &params)?;
        let m = out.state.matrix();
        let trace_dev = (m.trace() - c(1.0, 0.0)).norm();
        let negativity = (-hermitian_eigen(m)?.min_value()).max(0.0);
        tally.observe(trace_dev.max(negativity).max(m.hermitian_deviation()));
    }
    Ok(tally)
}

fn check_filter_identity(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        tally.observe(filter_flip_identity_check(&sample_filter(rng)));
    }
    Ok(tally)
}

fn check_tilde_transform(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let case = sample_lqcc_case(rng, i);
        let params = case
            .params
            .with_unitaries(sample_unitary(rng), sample_unitary(rng));
        let rho = case.state.to_density_matrix();
        let out = apply_lqcc(&rho, &params)?;
        let direct = spin_flip_matrix(&out.unnormalized).scale(1.0 / out.norm);
        tally.observe(hs_distance(&apply_lqcc_tilde(&rho, &params)?, &direct)?);
    }
    Ok(tally)
}

fn grid_cases(rng: &mut OracleRng, n: usize, ctx: &Ctx) -> Result<Vec<(f64, GridMinimum)>> {
    let grid = SeparableGrid::new(ctx.config.grid_step)?;
    (0..n)
        .map(|i| {
            let s = sample_entangled_bd(rng, i % 4 + 1)?;
            let closed = hs_distance_bd(s.t(), nearest_separable_bd(&s).t());
            Ok((closed, grid.nearest(s.t())))
        })
        .collect()
}

fn check_grid_matches(rng: &mut OracleRng, n: usize, ctx: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for (closed, found) in grid_cases(rng, n, ctx)? {
        tally.observe((found.distance - closed).abs());
    }
    Ok(tally)
}

fn check_grid_minimality(rng: &mut OracleRng, n: usize, ctx: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for (closed, found) in grid_cases(rng, n, ctx)? {
        tally.observe((closed - found.distance).max(0.0));
    }
    Ok(tally)
}

fn check_alt_route_bd(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for i in 0..n {
        let rho = sample_mixed_bd(rng, i).to_density_matrix();
        tally.observe((concurrence_alt_route(&rho)? - concurrence(&rho)?).abs());
    }
    Ok(tally)
}

fn check_alt_route_general(rng: &mut OracleRng, n: usize, _: &Ctx) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..n {
        let rho = sample_density_matrix(rng);
        tally.observe((concurrence_alt_route(&rho)? - concurrence(&rho)?).abs());
    }
    Ok(tally)
}
