//! Morse indices of critical configurations: the closed index formula in
//! terms of `(e, omega, delta)`, the numeric Hessian signature, and the
//! assembled per-arm report.

use nalgebra::DMatrix;

use crate::cyclic::{
    duplicate, solve_diacyclic, winding_number, CyclicConfig, CyclicRoot, SolverOptions,
    FRAC_PI_2,
};
use crate::error::{ArmError, Result};
use crate::geometry::{
    area_gradient, area_hessian, gradient_norm, oriented_area, AngleConfig, ArmLengths,
    ClosedPolygon, Vec2,
};

/// A critical point of the doubled area, fully annotated.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub config: AngleConfig,
    pub cyclic: CyclicConfig,
    pub doubled_area: f64,
    /// Number of positive entries of the sign string, `e(R)`.
    pub e_count: usize,
    /// `sum eps_i tan alpha_i`; `None` when a chord is a diameter.
    pub delta: Option<f64>,
    /// Winding number of the closure.
    pub omega: i64,
    /// Index from the closed formula; `None` when indeterminate
    /// (diameter chord, `delta = 0`, or a degenerate Hessian).
    pub index_formula: Option<i64>,
    /// Number of negative Hessian eigenvalues.
    pub index_numeric: usize,
    pub degenerate: bool,
    pub min_abs_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct MorseReport {
    pub arm: ArmLengths,
    pub points: Vec<CriticalPoint>,
    /// Histogram of numeric indices, length `n` (indices `0..=n-1`).
    pub counts_by_index: Vec<usize>,
    /// Betti numbers of the `(n-1)`-torus: the binomial row `C(n-1, k)`.
    pub betti: Vec<usize>,
    pub perfect: bool,
    /// `sum (-1)^index`; zero for a Morse function on the torus.
    pub euler_check: i64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub solver: SolverOptions,
    /// Relative eigenvalue tolerance for degeneracy detection.
    pub eig_rel_tol: f64,
    /// A half-angle within this of `pi/2` counts as a diameter chord.
    pub diameter_tol: f64,
    /// Gradient-norm tolerance for `morse_index_numeric`.
    pub grad_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            eig_rel_tol: 1e-7,
            diameter_tol: 1e-7,
            grad_tol: 1e-6,
        }
    }
}

/// `delta(R) = sum eps_i tan alpha_i`, or `None` when some chord is a
/// diameter (the tangent blows up).
pub fn delta(cyclic: &CyclicConfig, diameter_tol: f64) -> Option<f64> {
    if cyclic.has_diameter_chord(diameter_tol) {
        return None;
    }
    Some(
        cyclic
            .signs
            .signs()
            .iter()
            .zip(&cyclic.half_angles)
            .map(|(&e, &a)| e as f64 * a.tan())
            .sum(),
    )
}

/// Index formula for an open arm: `e - 2 omega + 1` when `delta > 0`,
/// `e - 2 omega` otherwise.
pub fn morse_index_open(e_count: usize, omega: i64, delta: f64) -> i64 {
    e_count as i64 - 2 * omega + if delta > 0.0 { 1 } else { 0 }
}

/// Index formula for a closed linkage: `e - 1 - 2 omega` when
/// `delta > 0`, `e - 2 - 2 omega` otherwise.
pub fn morse_index_closed(e_count: usize, omega: i64, delta: f64) -> i64 {
    e_count as i64 - 2 * omega - if delta > 0.0 { 1 } else { 2 }
}

/// Geometric data of a closed cyclic polygon needed by the index formula.
#[derive(Clone, Debug)]
pub struct ClosedCyclicData {
    pub e_count: usize,
    pub delta: f64,
    pub omega: i64,
    pub index: i64,
}

/// Read `e`, `delta`, `omega` (numeric winding) off a closed cyclic
/// polygon and apply the closed-linkage index formula.
pub fn closed_cyclic_data(
    polygon: &ClosedPolygon,
    center: &Vec2,
    radius: f64,
    diameter_tol: f64,
) -> Result<ClosedCyclicData> {
    let verts = polygon.vertices();
    let n = polygon.n_edges();
    let mut e_count = 0;
    let mut d = 0.0;
    for i in 0..n {
        let edge = polygon.edge(i);
        let to_center = center - verts[i];
        let c = edge.x * to_center.y - edge.y * to_center.x;
        if c.abs() <= 1e-12 * edge.norm() * to_center.norm().max(1e-300) {
            return Err(ArmError::DegenerateOrientation { index: i });
        }
        let eps = if c > 0.0 { 1.0 } else { -1.0 };
        if eps > 0.0 {
            e_count += 1;
        }
        let alpha = (edge.norm() / (2.0 * radius)).min(1.0).asin();
        if FRAC_PI_2 - alpha < diameter_tol {
            return Err(ArmError::NotDiacyclic("diameter chord in closed polygon".into()));
        }
        d += eps * alpha.tan();
    }
    let w = winding_number(verts, center);
    if (w - w.round()).abs() > 1e-6 {
        return Err(ArmError::Solver(format!("non-integral winding {w}")));
    }
    let omega = w.round() as i64;
    Ok(ClosedCyclicData {
        e_count,
        delta: d,
        omega,
        index: morse_index_closed(e_count, omega, d),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct NumericIndex {
    pub index: usize,
    pub degenerate: bool,
    pub min_abs_eigenvalue: f64,
    pub max_abs_eigenvalue: f64,
}

/// Signature of the analytic Hessian at a critical point. Fails when the
/// gradient norm exceeds the tolerance.
pub fn morse_index_numeric(
    arm: &ArmLengths,
    config: &AngleConfig,
    opts: &AnalysisOptions,
) -> Result<NumericIndex> {
    let grad = area_gradient(arm, config)?;
    let norm = gradient_norm(&grad);
    if norm > opts.grad_tol {
        return Err(ArmError::NotCritical { norm, tol: opts.grad_tol });
    }
    let h = area_hessian(arm, config)?;
    Ok(hessian_signature(&h, arm.scale(), opts.eig_rel_tol))
}

/// Eigenvalue signature of a symmetric matrix with a relative degeneracy
/// threshold; `scale` anchors the threshold when the matrix is near zero.
pub fn hessian_signature(h: &DMatrix<f64>, scale: f64, eig_rel_tol: f64) -> NumericIndex {
    let eigen = h.clone().symmetric_eigen();
    let evs: Vec<f64> = eigen.eigenvalues.iter().cloned().collect();
    let max_abs = evs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min_abs = evs.iter().map(|v| v.abs()).fold(f64::MAX, f64::min);
    if max_abs <= 1e-12 * scale {
        // The whole Hessian vanishes (e.g. a monkey saddle).
        return NumericIndex {
            index: 0,
            degenerate: true,
            min_abs_eigenvalue: min_abs,
            max_abs_eigenvalue: max_abs,
        };
    }
    let tol = eig_rel_tol * max_abs;
    NumericIndex {
        index: evs.iter().filter(|&&v| v < -tol).count(),
        degenerate: min_abs < tol,
        min_abs_eigenvalue: min_abs,
        max_abs_eigenvalue: max_abs,
    }
}

fn binomial_row(n: usize) -> Vec<usize> {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![1];
        for w in row.windows(2) {
            next.push(w[0] + w[1]);
        }
        next.push(1);
        row = next;
    }
    row
}

/// Annotate one solver root.
pub fn annotate(arm: &ArmLengths, root: &CyclicRoot, opts: &AnalysisOptions) -> Result<CriticalPoint> {
    let numeric = morse_index_numeric(arm, &root.config, opts)?;
    let d = delta(&root.cyclic, opts.diameter_tol);
    let e_count = root.cyclic.signs.positive_count();
    let omega = root.cyclic.omega();
    let index_formula = match d {
        Some(dv) if dv != 0.0 && !numeric.degenerate => {
            Some(morse_index_open(e_count, omega, dv))
        }
        _ => None,
    };
    Ok(CriticalPoint {
        config: root.config.clone(),
        cyclic: root.cyclic.clone(),
        doubled_area: oriented_area(&root.path),
        e_count,
        delta: d,
        omega,
        index_formula,
        index_numeric: numeric.index,
        degenerate: numeric.degenerate,
        min_abs_eigenvalue: numeric.min_abs_eigenvalue,
    })
}

/// Full critical-point report for an arm: every diacyclic configuration
/// with both index computations, the index histogram, and the perfectness
/// verdict against the Betti row of the torus.
pub fn analyze(arm: &ArmLengths, opts: &AnalysisOptions) -> Result<MorseReport> {
    let outcome = solve_diacyclic(arm, &opts.solver)?;
    let mut warnings = outcome.warnings.clone();
    let mut points = Vec::with_capacity(outcome.roots.len());
    for root in &outcome.roots {
        let p = annotate(arm, root, opts)?;
        if p.degenerate {
            warnings.push(format!(
                "degenerate critical point at {:?} (min |eigenvalue| {:.3e})",
                p.config.thetas(),
                p.min_abs_eigenvalue
            ));
        } else if let Some(f) = p.index_formula {
            if f != p.index_numeric as i64 {
                warnings.push(format!(
                    "index mismatch at {:?}: formula {} vs numeric {}",
                    p.config.thetas(),
                    f,
                    p.index_numeric
                ));
            }
        }
        points.push(p);
    }
    points.sort_by(|a, b| {
        b.doubled_area
            .partial_cmp(&a.doubled_area)
            .unwrap()
            .then_with(|| {
                a.config
                    .thetas()
                    .partial_cmp(b.config.thetas())
                    .unwrap()
            })
    });
    let dim = arm.n() - 1;
    let mut counts = vec![0usize; dim + 1];
    for p in &points {
        counts[p.index_numeric.min(dim)] += 1;
    }
    let betti = binomial_row(dim);
    let perfect = counts == betti;
    let euler_check = points
        .iter()
        .map(|p| if p.index_numeric % 2 == 0 { 1i64 } else { -1 })
        .sum();
    Ok(MorseReport {
        arm: arm.clone(),
        points,
        counts_by_index: counts,
        betti,
        perfect,
        euler_check,
        warnings,
    })
}

/// Consistency data for the duplication of a diacyclic configuration.
#[derive(Clone, Debug)]
pub struct DuplicationCheck {
    pub open: ClosedCyclicData,
    pub closed: ClosedCyclicData,
}

/// Compute `(e, delta, omega)` for a critical point and its duplication;
/// callers assert `e` and `delta` double and `omega` maps to `2w - 1`.
pub fn duplication_check(root: &CyclicRoot, diameter_tol: f64) -> Result<DuplicationCheck> {
    let d = delta(&root.cyclic, diameter_tol)
        .ok_or_else(|| ArmError::NotDiacyclic("diameter chord".into()))?;
    let open = ClosedCyclicData {
        e_count: root.cyclic.signs.positive_count(),
        delta: d,
        omega: root.cyclic.omega(),
        index: morse_index_open(root.cyclic.signs.positive_count(), root.cyclic.omega(), d),
    };
    let dup = duplicate(root)?;
    let closed = closed_cyclic_data(&dup.polygon, &dup.center, dup.radius, diameter_tol)?;
    Ok(DuplicationCheck { open, closed })
}

/// Real roots of the depressed cubic `x^3 + p x + q = 0`.
pub fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let newton = |mut x: f64| {
        for _ in 0..3 {
            let f = x * x * x + p * x + q;
            let df = 3.0 * x * x + p;
            if df.abs() > 1e-300 {
                let trial = x - f / df;
                let tf = trial * trial * trial + p * trial + q;
                // Double roots make Newton erratic; only keep improvements.
                if tf.abs() < f.abs() {
                    x = trial;
                }
            }
        }
        x
    };
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let mut roots = if disc >= 0.0 && p < 0.0 {
        // Three real roots, counted with multiplicity at disc = 0.
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - TAU_THIRD * k as f64).cos())
            .collect::<Vec<_>>()
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        vec![u + v]
    };
    for r in &mut roots {
        *r = newton(*r);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + a.abs()));
    roots
}

const TAU_THIRD: f64 = std::f64::consts::TAU / 3.0;

/// One feasible root of a 3-arm connecting-length cubic together with the
/// configurations realizing it.
#[derive(Clone, Debug)]
pub struct CubicRoot {
    /// Sign of the constant term: the `+` or `-` equation
    /// `d^3 = (l1^2+l2^2+l3^2) d +- 2 l1 l2 l3`.
    pub sign: i8,
    /// Connecting length `d = |r_0 r_3|`.
    pub d: f64,
    pub configs: Vec<AngleConfig>,
}

/// Closed-form critical points of a 3-arm: solve both connecting-length
/// cubics, keep feasible roots (`d >= l1`, `d >= l3`), and reconstruct the
/// configurations on the circle with diameter `d`.
pub fn cubic_3arm(l1: f64, l2: f64, l3: f64) -> Vec<CubicRoot> {
    let p = -(l1 * l1 + l2 * l2 + l3 * l3);
    let mut out = Vec::new();
    for sign in [1i8, -1] {
        let q = -(sign as f64) * 2.0 * l1 * l2 * l3;
        for d in depressed_cubic_roots(p, q) {
            if d < l1 - 1e-9 || d < l3 - 1e-9 || d <= 0.0 || d > l1 + l2 + l3 + 1e-9 {
                continue;
            }
            let d = d.max(l1.max(l3));
            let configs = reconstruct_3arm(l1, l2, l3, d);
            out.push(CubicRoot { sign, d, configs });
        }
    }
    out
}

/// Vertices `r_1`, `r_2` lie on the circle with diameter `r_0 r_3`; the
/// four sign choices for their ordinates are filtered by `|r_1 r_2| = l_2`.
fn reconstruct_3arm(l1: f64, l2: f64, l3: f64, d: f64) -> Vec<AngleConfig> {
    let x1 = l1 * l1 / d;
    let y1 = l1 * (d * d - l1 * l1).max(0.0).sqrt() / d;
    let x2 = d - l3 * l3 / d;
    let y2 = l3 * (d * d - l3 * l3).max(0.0).sqrt() / d;
    let mut configs: Vec<AngleConfig> = Vec::new();
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            let r1 = Vec2::new(x1, sa * y1);
            let r2 = Vec2::new(x2, sb * y2);
            if ((r1 - r2).norm() - l2).abs() > 1e-7 * d.max(1.0) {
                continue;
            }
            let r3 = Vec2::new(d, 0.0);
            let e1 = r1;
            let e2 = r2 - r1;
            let e3 = r3 - r2;
            let base = e1.y.atan2(e1.x);
            let config = AngleConfig::new(vec![
                e2.y.atan2(e2.x) - base,
                e3.y.atan2(e3.x) - base,
            ]);
            if configs
                .iter()
                .all(|c| c.torus_distance(&config) > 1e-9)
            {
                configs.push(config);
            }
        }
    }
    configs
}

/// Perfectness-preserving invariance data: the multisets of critical
/// values and numeric indices, sorted for comparison.
pub fn critical_value_multiset(report: &MorseReport) -> (Vec<f64>, Vec<usize>) {
    let mut values: Vec<f64> = report.points.iter().map(|p| p.doubled_area).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut indices: Vec<usize> = report.points.iter().map(|p| p.index_numeric).collect();
    indices.sort_unstable();
    (values, indices)
}

/// Helper for mirror tests: find the report point closest to `config`.
pub fn find_point<'a>(report: &'a MorseReport, config: &AngleConfig, tol: f64) -> Option<&'a CriticalPoint> {
    report
        .points
        .iter()
        .find(|p| p.config.torus_distance(config) < tol)
}

/// Check that the gradient vanishes at a configuration (used by callers
/// that accept external candidate points).
pub fn assert_critical(arm: &ArmLengths, config: &AngleConfig, tol: f64) -> Result<()> {
    let g = area_gradient(arm, config)?;
    let norm = gradient_norm(&g);
    if norm > tol {
        return Err(ArmError::NotCritical { norm, tol });
    }
    Ok(())
}

/// Orientation signs of a realized path against an explicit center,
/// re-exported here for report assembly convenience.
pub use crate::cyclic::orientation_signs as path_orientation_signs;
