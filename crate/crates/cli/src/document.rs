//! Machine-readable report documents.
//!
//! Every document carries a versioned `schema` tag (validated against the
//! JSON Schemas shipped under `schemas/`) and restates the area convention
//! so downstream consumers cannot mistake `2A` for `A`.

use planar_arm::cyclic::SolverOptions;
use planar_arm::geometry::ArmLengths;
use planar_arm::morse::{AnalysisOptions, MorseReport};
use planar_arm::oracle::{GridSpec, MatchReport, OracleCriticalPoint};
use planar_arm::qc::{QcAnalysis, SpecialKind, SpecialPoint};
use serde::Serialize;

pub const AREA_CONVENTION: &str =
    "doubled oriented area 2A of the chain closed by the connecting side";

fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

fn angle_unit(degrees: bool) -> &'static str {
    if degrees {
        "degrees"
    } else {
        "radians"
    }
}

fn convert(angle: f64, degrees: bool) -> f64 {
    if degrees {
        angle.to_degrees()
    } else {
        angle
    }
}

#[derive(Serialize)]
pub struct Tolerances {
    pub solver_grid: usize,
    pub bisect_rel_tol: f64,
    pub dedup_tol: f64,
    pub grad_tol: f64,
    pub eig_rel_tol: f64,
    pub diameter_tol: f64,
}

impl Tolerances {
    pub fn from_options(opts: &AnalysisOptions) -> Self {
        Self {
            solver_grid: opts.solver.grid,
            bisect_rel_tol: opts.solver.bisect_rel_tol,
            dedup_tol: opts.solver.dedup_tol,
            grad_tol: opts.solver.grad_tol,
            eig_rel_tol: opts.eig_rel_tol,
            diameter_tol: opts.diameter_tol,
        }
    }
}

#[derive(Serialize)]
pub struct CriticalPointRecord {
    pub angles: Vec<f64>,
    pub doubled_area: f64,
    /// Orientation signs as a string, e.g. "++-+".
    pub signs: String,
    pub e: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub omega: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_formula: Option<i64>,
    pub index_numeric: usize,
    pub degenerate: bool,
}

#[derive(Serialize)]
pub struct AnalysisDocument {
    pub schema: String,
    pub tool_version: String,
    pub area_convention: String,
    pub angle_unit: String,
    pub lengths: Vec<f64>,
    pub tolerances: Tolerances,
    pub critical_points: Vec<CriticalPointRecord>,
    pub histogram: Vec<usize>,
    pub betti: Vec<usize>,
    pub perfect: bool,
    pub euler_check: i64,
    pub warnings: Vec<String>,
}

impl AnalysisDocument {
    pub fn new(report: &MorseReport, opts: &AnalysisOptions, degrees: bool) -> Self {
        Self {
            schema: "planar-arm/analysis/v1".into(),
            tool_version: tool_version(),
            area_convention: AREA_CONVENTION.into(),
            angle_unit: angle_unit(degrees).into(),
            lengths: report.arm.lengths().to_vec(),
            tolerances: Tolerances::from_options(opts),
            critical_points: report
                .points
                .iter()
                .map(|p| CriticalPointRecord {
                    angles: p
                        .config
                        .thetas()
                        .iter()
                        .map(|&t| convert(t, degrees))
                        .collect(),
                    doubled_area: p.doubled_area,
                    signs: p.cyclic.signs.to_string(),
                    e: p.e_count,
                    delta: p.delta,
                    omega: p.omega,
                    index_formula: p.index_formula,
                    index_numeric: p.index_numeric,
                    degenerate: p.degenerate,
                })
                .collect(),
            histogram: report.counts_by_index.clone(),
            betti: report.betti.clone(),
            perfect: report.perfect,
            euler_check: report.euler_check,
            warnings: report.warnings.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct SpecialPointRecord {
    pub kind: String,
    pub arc: usize,
    /// Inverse-diameter parameter `t = 1/(2 rho)`; zero for aligned points.
    pub t: f64,
    pub angles: Vec<f64>,
    pub branch: i64,
}

#[derive(Serialize)]
pub struct ComponentRecord {
    /// Signs of the third and later edges (descending-length order) on
    /// the first arc.
    pub pattern: String,
    /// Special configurations in loop order around the circle.
    pub special_points: Vec<SpecialPointRecord>,
    pub diacyclic_count: usize,
    pub aligned_count: usize,
}

#[derive(Serialize)]
pub struct QcDocument {
    pub schema: String,
    pub tool_version: String,
    pub area_convention: String,
    pub angle_unit: String,
    pub lengths: Vec<f64>,
    /// `permutation[s]` is the original index of the `s`-th edge after the
    /// internal descending-length reordering.
    pub permutation: Vec<usize>,
    pub components: Vec<ComponentRecord>,
}

fn kind_name(kind: SpecialKind) -> &'static str {
    match kind {
        SpecialKind::Diacyclic => "diacyclic",
        SpecialKind::Closed => "closed",
        SpecialKind::Aligned => "aligned",
    }
}

impl QcDocument {
    pub fn new(
        qc: &QcAnalysis,
        specials: &[Vec<SpecialPoint>],
        degrees: bool,
    ) -> Self {
        let components = qc
            .components
            .iter()
            .zip(specials)
            .map(|(comp, pts)| ComponentRecord {
                pattern: comp
                    .pattern
                    .iter()
                    .map(|&p| if p > 0 { '+' } else { '-' })
                    .collect(),
                special_points: pts
                    .iter()
                    .map(|p| SpecialPointRecord {
                        kind: kind_name(p.kind).into(),
                        arc: p.arc,
                        t: p.t,
                        angles: p
                            .config
                            .thetas()
                            .iter()
                            .map(|&t| convert(t, degrees))
                            .collect(),
                        branch: p.branch,
                    })
                    .collect(),
                diacyclic_count: pts
                    .iter()
                    .filter(|p| p.kind == SpecialKind::Diacyclic)
                    .count(),
                aligned_count: pts
                    .iter()
                    .filter(|p| p.kind == SpecialKind::Aligned)
                    .count(),
            })
            .collect();
        Self {
            schema: "planar-arm/qc/v1".into(),
            tool_version: tool_version(),
            area_convention: AREA_CONVENTION.into(),
            angle_unit: angle_unit(degrees).into(),
            lengths: qc.arm().lengths().to_vec(),
            permutation: qc.permutation().to_vec(),
            components,
        }
    }
}

#[derive(Serialize)]
pub struct OraclePointRecord {
    pub angles: Vec<f64>,
    pub doubled_area: f64,
    pub gradient_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

#[derive(Serialize)]
pub struct OracleDocument {
    pub schema: String,
    pub tool_version: String,
    pub area_convention: String,
    pub angle_unit: String,
    pub lengths: Vec<f64>,
    pub resolution: usize,
    pub solver_options_grid: usize,
    pub oracle_points: Vec<OraclePointRecord>,
    pub solver_points: Vec<Vec<f64>>,
    /// `(oracle index, solver index, torus distance)` per matched pair.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_oracle: Vec<usize>,
    pub unmatched_solver: Vec<usize>,
    pub max_distance: f64,
    pub bijective: bool,
}

impl OracleDocument {
    pub fn new(
        arm: &ArmLengths,
        spec: &GridSpec,
        solver_opts: &SolverOptions,
        oracle_points: &[OracleCriticalPoint],
        solver_points: &[Vec<f64>],
        report: &MatchReport,
        degrees: bool,
    ) -> Self {
        Self {
            schema: "planar-arm/oracle/v1".into(),
            tool_version: tool_version(),
            area_convention: AREA_CONVENTION.into(),
            angle_unit: angle_unit(degrees).into(),
            lengths: arm.lengths().to_vec(),
            resolution: spec.resolution,
            solver_options_grid: solver_opts.grid,
            oracle_points: oracle_points
                .iter()
                .map(|p| OraclePointRecord {
                    angles: p
                        .config
                        .thetas()
                        .iter()
                        .map(|&t| convert(t, degrees))
                        .collect(),
                    doubled_area: p.doubled_area,
                    gradient_norm: p.gradient_norm,
                    index: p.index,
                })
                .collect(),
            solver_points: solver_points
                .iter()
                .map(|ts| ts.iter().map(|&t| convert(t, degrees)).collect())
                .collect(),
            pairs: report.pairs.clone(),
            unmatched_oracle: report.unmatched_left.clone(),
            unmatched_solver: report.unmatched_right.clone(),
            max_distance: report.max_distance,
            bijective: report.is_bijective(),
        }
    }
}

pub fn to_json_string<T: Serialize>(doc: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}
