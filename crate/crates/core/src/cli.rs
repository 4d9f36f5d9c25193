//! Rendering and argument parsing behind the `bdent` binary.
//!
//! Every command returns its full standard output as a `String` so the same
//! code drives the binary, the examples and the tests.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bd::{classify_region, t_to_probs, BDState, RegionLabel, POSITIVITY};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::lqcc::{
    apply_lqcc, normalization_factor, predict_concurrence_transform,
    restricted_entanglement_transform, restriction_met, Filter, LqccParams, Unitary2,
};
use crate::measures::{concurrence, concurrence_bd, measure, EntropyUnit, MeasureReport};
use crate::oracle::{run_invariant_suite, OracleConfig, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

pub const JSON_DIGITS: usize = 12;
pub const CSV_DIGITS: usize = 6;

/// Round to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("formatted float parses");
    rounded + 0.0
}

fn sig_vec(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| round_sig(x, JSON_DIGITS)).collect()
}

pub fn parse_reals(text: &str, expected: usize, flag: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Error::input(format!("{flag}: cannot parse {:?} as a number", s.trim()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(Error::input(format!(
            "{flag} expects {expected} comma-separated numbers, got {}",
            values.len()
        )));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::input(format!("{flag}: non-finite value {bad}")));
    }
    Ok(values)
}

/// State from exactly one of `--p` and `--t`.
pub fn parse_state(p: Option<&str>, t: Option<&str>) -> Result<BDState> {
    match (p, t) {
        (Some(_), Some(_)) => Err(Error::input("give either --p or --t, not both")),
        (None, None) => Err(Error::input(
            "a state is required: --p a,b,c,d or --t x,y,z",
        )),
        (Some(p), None) => {
            let v = parse_reals(p, 4, "--p")?;
            BDState::from_probs([v[0], v[1], v[2], v[3]])
        }
        (None, Some(t)) => {
            let v = parse_reals(t, 3, "--t")?;
            let p = t_to_probs([v[0], v[1], v[2]]).map_err(|e| match e {
                Error::Domain(msg) => Error::Input(msg),
                other => other,
            })?;
            BDState::from_probs(p)
        }
    }
}

/// `x`, `y`, `z` or an explicit `ux,uy,uz` (normalized by the filter).
pub fn parse_axis(text: &str) -> Result<[f64; 3]> {
    match text.trim() {
        "x" | "X" => Ok([1.0, 0.0, 0.0]),
        "y" | "Y" => Ok([0.0, 1.0, 0.0]),
        "z" | "Z" => Ok([0.0, 0.0, 1.0]),
        other => {
            let v = parse_reals(other, 3, "axis")?;
            Ok([v[0], v[1], v[2]])
        }
    }
}

/// `AXIS:ANGLE`, for example `z:1.5708` or `1,1,0:0.3`.
pub fn parse_unitary(text: &str) -> Result<Unitary2> {
    let (axis, angle) = text
        .rsplit_once(':')
        .ok_or_else(|| Error::input(format!("unitary {text:?} must look like AXIS:ANGLE")))?;
    let angle: f64 = angle
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("cannot parse rotation angle {angle:?}")))?;
    Unitary2::from_axis_angle(parse_axis(axis)?, angle)
}

// ---------------------------------------------------------------------------
// measure / nearest
// ---------------------------------------------------------------------------

fn bd_json(s: &BDState) -> (Vec<f64>, Vec<f64>) {
    let p = sig_vec(&s.p());
    // t is re-derived from the rounded p so that the pair stays consistent.
    let t = sig_vec(&crate::bd::t_of([p[0], p[1], p[2], p[3]]));
    (p, t)
}

pub fn measure_json(report: &MeasureReport) -> Value {
    let input = BDState::from_probs(report.p).expect("report holds a valid state");
    let (p, t) = bd_json(&input);
    let (np, nt) = bd_json(&report.nearest_separable);
    let eof_key = match report.eof_unit {
        EntropyUnit::Nats => "eof_nats",
        EntropyUnit::Bits => "eof_bits",
    };
    let mut out = json!({
        "input": {"p": p, "t": t},
        "region": report.region.to_string(),
        "concurrence": round_sig(report.concurrence, JSON_DIGITS),
        "nearest_separable": {"t": nt, "p": np},
        "hs_distance": round_sig(report.hs_distance_to_nearest, JSON_DIGITS),
        "hs_entanglement": round_sig(report.hs_entanglement, JSON_DIGITS),
        "tilde_entanglement": round_sig(report.tilde_entanglement, JSON_DIGITS),
    });
    out[eof_key] = json!(round_sig(report.eof, JSON_DIGITS));
    out
}

fn fmt_vec(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{:.12}", x + 0.0))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn measure_text(report: &MeasureReport) -> String {
    let unit = match report.eof_unit {
        EntropyUnit::Nats => "nats",
        EntropyUnit::Bits => "bits",
    };
    let mut out = String::new();
    let _ = writeln!(out, "p                   ({})", fmt_vec(&report.p));
    let _ = writeln!(out, "t                   ({})", fmt_vec(&report.t));
    let _ = writeln!(out, "region              {}", report.region);
    let _ = writeln!(out, "concurrence         {:.12}", report.concurrence);
    let _ = writeln!(out, "eof ({unit})         {:.12}", report.eof);
    let _ = writeln!(
        out,
        "nearest separable t ({})",
        fmt_vec(&report.nearest_separable.t())
    );
    let _ = writeln!(
        out,
        "nearest separable p ({})",
        fmt_vec(&report.nearest_separable.p())
    );
    let _ = writeln!(
        out,
        "hs distance         {:.12}",
        report.hs_distance_to_nearest
    );
    let _ = writeln!(out, "hs entanglement     {:.12}", report.hs_entanglement);
    let _ = writeln!(out, "tilde entanglement  {:.12}", report.tilde_entanglement);
    out
}

fn unit_for(log2: bool) -> EntropyUnit {
    if log2 {
        EntropyUnit::Bits
    } else {
        EntropyUnit::Nats
    }
}

pub fn cmd_measure(s: &BDState, json: bool, log2: bool) -> Result<String> {
    let report = measure(s, unit_for(log2))?;
    Ok(if json {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&measure_json(&report)).expect("json")
        )
    } else {
        measure_text(&report)
    })
}

/// The nearest-separable part of the measure report.
pub fn cmd_nearest(s: &BDState, json: bool) -> Result<String> {
    let report = measure(s, EntropyUnit::Nats)?;
    let full = measure_json(&report);
    if json {
        let out = json!({
            "input": full["input"],
            "region": full["region"],
            "nearest_separable": full["nearest_separable"],
            "hs_distance": full["hs_distance"],
        });
        return Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&out).expect("json")
        ));
    }
    let mut out = String::new();
    let _ = writeln!(out, "region              {}", report.region);
    let _ = writeln!(
        out,
        "nearest separable t ({})",
        fmt_vec(&report.nearest_separable.t())
    );
    let _ = writeln!(
        out,
        "nearest separable p ({})",
        fmt_vec(&report.nearest_separable.p())
    );
    let _ = writeln!(
        out,
        "hs distance         {:.12}",
        report.hs_distance_to_nearest
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// lqcc
// ---------------------------------------------------------------------------

/// Raw filter and unitary flags.
#[derive(Debug, Clone, PartialEq)]
pub struct LqccArgs {
    pub mu: f64,
    pub a: f64,
    pub m: [f64; 3],
    pub nu: f64,
    pub b: f64,
    pub n: [f64; 3],
    pub unitary_a: Option<Unitary2>,
    pub unitary_b: Option<Unitary2>,
}

impl Default for LqccArgs {
    fn default() -> Self {
        Self {
            mu: 1.0,
            a: 0.0,
            m: [0.0, 0.0, 1.0],
            nu: 1.0,
            b: 0.0,
            n: [0.0, 0.0, 1.0],
            unitary_a: None,
            unitary_b: None,
        }
    }
}

impl LqccArgs {
    pub fn params(&self) -> Result<LqccParams> {
        let fa = Filter::with_axis(self.mu, self.a, self.m)?;
        let fb = Filter::with_axis(self.nu, self.b, self.n)?;
        let params = LqccParams::filters(fa, fb);
        Ok(match (&self.unitary_a, &self.unitary_b) {
            (None, None) => params,
            (ua, ub) => params.with_unitaries(
                ua.clone().unwrap_or_else(Unitary2::identity),
                ub.clone().unwrap_or_else(Unitary2::identity),
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TransformedState {
    /// Correlation vector of a BD output.
    Bd { t: Vec<f64>, p: Vec<f64> },
    /// Row-major `[re, im]` pairs otherwise.
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedReport {
    pub measured_entanglement: f64,
    pub predicted_entanglement: f64,
    pub normalization_separable: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LqccReport {
    pub input_t: Vec<f64>,
    pub transformed: TransformedState,
    pub normalization: f64,
    /// Closed form; absent when local unitaries are applied.
    pub normalization_closed_form: Option<f64>,
    pub concurrence_in: f64,
    pub concurrence_measured: f64,
    pub concurrence_predicted: f64,
    pub concurrence_ratio: f64,
    pub restricted_condition_met: bool,
    pub restricted: Option<RestrictedReport>,
}

/// Output matrices closer than this to BD form are reported by their t-vector.
pub const BD_DETECTION_TOL: f64 = 1e-10;

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    [
                        round_sig(m[(i, j)].re, JSON_DIGITS),
                        round_sig(m[(i, j)].im, JSON_DIGITS),
                    ]
                })
                .collect()
        })
        .collect()
}

pub fn lqcc_report(s: &BDState, params: &LqccParams) -> Result<LqccReport> {
    let rho = s.to_density_matrix();
    let out = apply_lqcc(&rho, params)?;
    let transformed = match BDState::from_density_matrix(&out.state, BD_DETECTION_TOL) {
        Some(bd) => {
            let (p, t) = bd_json(&bd);
            TransformedState::Bd { t, p }
        }
        None => TransformedState::Matrix {
            matrix: matrix_rows(out.state.matrix()),
        },
    };
    let c_in = concurrence_bd(s);
    let measured = concurrence(&out.state)?;
    let predicted = predict_concurrence_transform(c_in, s.t(), params)?;
    let met = restriction_met(s, params);
    let restricted = if met {
        let r = restricted_entanglement_transform(s, params)?;
        Some(RestrictedReport {
            measured_entanglement: round_sig(r.measured, JSON_DIGITS),
            predicted_entanglement: round_sig(r.predicted, JSON_DIGITS),
            normalization_separable: round_sig(r.norm_separable, JSON_DIGITS),
        })
    } else {
        None
    };
    let closed = if params.has_identity_unitaries() {
        Some(round_sig(normalization_factor(s.t(), params)?, JSON_DIGITS))
    } else {
        None
    };
    let ratio = if c_in > 0.0 {
        predicted / c_in
    } else {
        params.determinant_factor() / out.norm
    };
    Ok(LqccReport {
        input_t: sig_vec(&s.t()),
        transformed,
        normalization: round_sig(out.norm, JSON_DIGITS),
        normalization_closed_form: closed,
        concurrence_in: round_sig(c_in, JSON_DIGITS),
        concurrence_measured: round_sig(measured, JSON_DIGITS),
        concurrence_predicted: round_sig(predicted, JSON_DIGITS),
        concurrence_ratio: round_sig(ratio, JSON_DIGITS),
        restricted_condition_met: met,
        restricted,
    })
}

pub fn lqcc_text(r: &LqccReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input t                 ({})", fmt_vec(&r.input_t));
    match &r.transformed {
        TransformedState::Bd { t, .. } => {
            let _ = writeln!(out, "transformed t           ({})", fmt_vec(t));
        }
        TransformedState::Matrix { matrix } => {
            let _ = writeln!(out, "transformed state (not Bell-diagonal):");
            for row in matrix {
                let cells: Vec<String> = row
                    .iter()
                    .map(|[re, im]| format!("{re:+.6}{im:+.6}i"))
                    .collect();
                let _ = writeln!(out, "  {}", cells.join("  "));
            }
        }
    }
    let _ = writeln!(out, "normalization           {:.12}", r.normalization);
    if let Some(closed) = r.normalization_closed_form {
        let _ = writeln!(out, "normalization (closed)  {closed:.12}");
    }
    let _ = writeln!(out, "concurrence in          {:.12}", r.concurrence_in);
    let _ = writeln!(
        out,
        "concurrence measured    {:.12}",
        r.concurrence_measured
    );
    let _ = writeln!(
        out,
        "concurrence predicted   {:.12}",
        r.concurrence_predicted
    );
    let _ = writeln!(out, "ratio                   {:.12}", r.concurrence_ratio);
    let verdict = if r.restricted_condition_met {
        "met"
    } else {
        "not met"
    };
    let _ = writeln!(out, "restricted condition    {verdict}");
    if let Some(e) = &r.restricted {
        let _ = writeln!(
            out,
            "entanglement measured   {:.12}",
            e.measured_entanglement
        );
        let _ = writeln!(
            out,
            "entanglement predicted  {:.12}",
            e.predicted_entanglement
        );
    }
    out
}

pub fn cmd_lqcc(s: &BDState, args: &LqccArgs, json: bool) -> Result<String> {
    let report = lqcc_report(s, &args.params()?)?;
    Ok(if json {
        format!("{}\n", serde_json::to_string_pretty(&report).expect("json"))
    } else {
        lqcc_text(&report)
    })
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    /// 0, 1 or 2.
    pub axis: usize,
    pub value: f64,
}

/// `t3=0`, `3=0` or `z=0`.
pub fn parse_plane(text: &str) -> Result<Plane> {
    let (axis, value) = text
        .split_once('=')
        .ok_or_else(|| Error::input(format!("plane {text:?} must look like AXIS=VALUE")))?;
    let axis = match axis.trim() {
        "t1" | "1" | "x" => 0,
        "t2" | "2" | "y" => 1,
        "t3" | "3" | "z" => 2,
        other => return Err(Error::input(format!("unknown plane axis {other:?}"))),
    };
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("cannot parse plane offset {value:?}")))?;
    if !value.is_finite() {
        return Err(Error::input("plane offset must be finite"));
    }
    Ok(Plane { axis, value })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryRow {
    pub t: [f64; 3],
    pub region: RegionLabel,
    pub concurrence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryMode {
    /// `grid³` lattice over `[−1, 1]³`, or `grid²` on a plane.
    Grid { plane: Option<Plane> },
    /// `t = (−x, −x, −x)` for `x` on `grid` evenly spaced points of `[0, 1]`.
    Werner,
}

fn row(t: [f64; 3]) -> Option<GeometryRow> {
    let p = t_to_probs(t).ok()?;
    let s = BDState::from_probs(p).ok()?;
    Some(GeometryRow {
        t,
        region: classify_region(&s),
        concurrence: concurrence_bd(&s),
    })
}

pub fn geometry_rows(grid: usize, mode: GeometryMode) -> Result<Vec<GeometryRow>> {
    if grid < 2 {
        return Err(Error::input(format!(
            "--grid must be at least 2, got {grid}"
        )));
    }
    let step = |k: usize, lo: f64, hi: f64| lo + (hi - lo) * k as f64 / (grid - 1) as f64;
    let mut rows = Vec::new();
    match mode {
        GeometryMode::Werner => {
            for k in 0..grid {
                let x = step(k, 0.0, 1.0);
                rows.extend(row([-x, -x, -x]));
            }
        }
        GeometryMode::Grid { plane: None } => {
            for i in 0..grid {
                for j in 0..grid {
                    for k in 0..grid {
                        rows.extend(row([
                            step(i, -1.0, 1.0),
                            step(j, -1.0, 1.0),
                            step(k, -1.0, 1.0),
                        ]));
                    }
                }
            }
        }
        GeometryMode::Grid { plane: Some(plane) } => {
            for i in 0..grid {
                for j in 0..grid {
                    let mut free = [step(i, -1.0, 1.0), step(j, -1.0, 1.0)].into_iter();
                    let t = [0, 1, 2].map(|k| {
                        if k == plane.axis {
                            plane.value
                        } else {
                            free.next().unwrap()
                        }
                    });
                    rows.extend(row(t));
                }
            }
        }
    }
    Ok(rows)
}

fn csv_num(x: f64) -> String {
    format!("{}", round_sig(x, CSV_DIGITS))
}

pub fn geometry_csv(rows: &[GeometryRow]) -> String {
    let mut out = String::from("t1,t2,t3,region,concurrence\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            csv_num(r.t[0]),
            csv_num(r.t[1]),
            csv_num(r.t[2]),
            r.region,
            csv_num(r.concurrence)
        );
    }
    out
}

/// Rows of the positivity tetrahedron, checked against its four faces.
pub fn tetrahedron_margin(t: [f64; 3]) -> f64 {
    POSITIVITY
        .iter()
        .map(|q| q.margin(t))
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Suite JSON and the exit status it implies.
pub fn cmd_verify(config: &OracleConfig) -> Result<(String, i32)> {
    let report: SuiteReport = run_invariant_suite(config)?;
    let code = if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    };
    Ok((format!("{}\n", report.to_json()), code))
}
