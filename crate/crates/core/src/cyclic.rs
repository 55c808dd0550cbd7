//! Enumeration of cyclic configurations by sign-vector / winding-branch
//! root-finding on the circumradius.
//!
//! A configuration inscribed in a circle of radius `rho` is described by a
//! sign string `E` (which side of each directed edge the center lies on)
//! and the half-angles `alpha_i = arcsin(l_i / (2 rho))`. The signed
//! half-angles sum to `pi/2 + k pi` exactly for the configurations whose
//! connecting side is a diameter (the critical points of the area), and to
//! `k pi` for closed chains. Roots are isolated by a uniform scan in
//! `t = 1/(2 rho)` followed by bisection; the residual is not globally
//! monotone for mixed signs, so the scan density is configurable.

use nalgebra::{DVector, Rotation2};
use rayon::prelude::*;

use crate::error::{ArmError, Result};
use crate::geometry::{
    area_gradient, area_hessian, cross, gradient_norm, realize, wrap_angle, AngleConfig,
    ArmLengths, ClosedPolygon, Vec2, VertexPath, TAU,
};

pub const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
pub const PI: f64 = std::f64::consts::PI;

/// Per-edge orientation signs with respect to the circumcircle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignString {
    eps: Vec<i8>,
}

impl SignString {
    pub fn new(eps: Vec<i8>) -> Self {
        assert!(eps.iter().all(|&e| e == 1 || e == -1));
        Self { eps }
    }

    /// Decode a bitmask; bit `i` set means `eps_i = -1`.
    pub fn from_mask(mask: usize, n: usize) -> Self {
        Self {
            eps: (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.eps
    }

    pub fn get(&self, i: usize) -> i8 {
        self.eps[i]
    }

    /// Count of positive entries, `e(R)`.
    pub fn positive_count(&self) -> usize {
        self.eps.iter().filter(|&&e| e > 0).count()
    }

    pub fn negated(&self) -> Self {
        Self {
            eps: self.eps.iter().map(|e| -e).collect(),
        }
    }

    pub fn with_flipped(&self, index: usize) -> Self {
        let mut eps = self.eps.clone();
        eps[index] = -eps[index];
        Self { eps }
    }
}

impl std::fmt::Display for SignString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &e in &self.eps {
            write!(f, "{}", if e > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CyclicKind {
    /// Connecting side is a diameter: a critical point of the area.
    Diacyclic,
    /// First and last vertex coincide.
    Closed,
    /// Inscribed with no further constraint.
    Plain,
}

/// A configuration inscribed in a circle, in the moduli frame
/// (first vertex at the origin, first edge along +x).
#[derive(Clone, Debug)]
pub struct CyclicConfig {
    pub radius: f64,
    pub center: Vec2,
    pub signs: SignString,
    pub half_angles: Vec<f64>,
    /// Branch integer `k`: the signed half-angles sum to `pi/2 + k pi`
    /// (diacyclic) or `k pi` (closed).
    pub branch: i64,
    pub kind: CyclicKind,
}

impl CyclicConfig {
    /// Winding number of the closure for a diacyclic configuration.
    pub fn omega(&self) -> i64 {
        debug_assert_eq!(self.kind, CyclicKind::Diacyclic);
        self.branch + 1
    }

    /// True when some chord is a diameter within `tol` (its half-angle
    /// reaches `pi/2`); `tan alpha` blows up there and the index formula
    /// does not apply.
    pub fn has_diameter_chord(&self, tol: f64) -> bool {
        self.half_angles.iter().any(|&a| FRAC_PI_2 - a < tol)
    }
}

/// A solved cyclic configuration together with its moduli coordinates and
/// realized vertex path.
#[derive(Clone, Debug)]
pub struct CyclicRoot {
    pub config: AngleConfig,
    pub cyclic: CyclicConfig,
    pub path: VertexPath,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Scan points for the sign-change grid in `t = 1/(2 rho)`.
    pub grid: usize,
    /// Relative bisection tolerance on `t`.
    pub bisect_rel_tol: f64,
    /// Residual tolerance for accepting a root exactly at the endpoint
    /// where the longest edge is a diameter.
    pub endpoint_tol: f64,
    /// Absolute gradient-norm tolerance every returned diacyclic
    /// configuration must satisfy.
    pub grad_tol: f64,
    /// Torus max-norm distance below which two roots are the same point.
    pub dedup_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid: 4096,
            bisect_rel_tol: 1e-13,
            endpoint_tol: 1e-9,
            grad_tol: 1e-8,
            dedup_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOutcome {
    pub roots: Vec<CyclicRoot>,
    /// Per-branch diagnostics; never silently dropped.
    pub warnings: Vec<String>,
}

/// Half of the central angle subtended by a chord of length `l` on a
/// circle of radius `rho`: `alpha = arcsin(l / (2 rho))`, in `(0, pi/2]`.
pub fn half_angle(l: f64, rho: f64) -> Result<f64> {
    if l > 2.0 * rho {
        return Err(ArmError::InfeasibleChord { chord: l, radius: rho });
    }
    Ok((l / (2.0 * rho)).min(1.0).asin())
}

/// Residual `F(rho) = sum eps_i arcsin(l_i/(2 rho)) - (pi/2 + k pi)`;
/// its zeros are the diacyclic configurations on branch `(E, k)`.
pub fn diacyclic_residual(arm: &ArmLengths, signs: &SignString, k: i64, rho: f64) -> Result<f64> {
    let min_rho = arm.max_length() / 2.0;
    if rho < min_rho {
        return Err(ArmError::InfeasibleRadius { radius: rho, min: min_rho });
    }
    let mut sum = 0.0;
    for (i, &l) in arm.lengths().iter().enumerate() {
        sum += signs.get(i) as f64 * half_angle(l, rho)?;
    }
    Ok(sum - (FRAC_PI_2 + k as f64 * PI))
}

/// Signed half-angle sum as a function of `t = 1/(2 rho)`.
pub(crate) fn angle_sum(lengths: &[f64], signs: &SignString, t: f64) -> f64 {
    lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| signs.get(i) as f64 * (l * t).min(1.0).asin())
        .sum()
}

/// Find all `t` in `(0, t_max]` with `angle_sum(t) = target` by grid scan
/// plus bisection. `sums` holds the angle sum at `j * t_max / grid` for
/// `j = 0..=grid` (index 0 is the exact limit 0 at infinite radius).
pub(crate) fn scan_roots(
    lengths: &[f64],
    signs: &SignString,
    target: f64,
    t_max: f64,
    sums: &[f64],
    opts: &SolverOptions,
) -> Vec<f64> {
    let grid = sums.len() - 1;
    let mut roots = Vec::new();
    for j in 0..grid {
        let ga = sums[j] - target;
        let gb = sums[j + 1] - target;
        if ga == 0.0 {
            if j > 0 {
                roots.push(j as f64 / grid as f64 * t_max);
            }
            continue;
        }
        if ga * gb < 0.0 {
            let mut a = j as f64 / grid as f64 * t_max;
            let mut b = (j + 1) as f64 / grid as f64 * t_max;
            let mut fa = ga;
            while b - a > opts.bisect_rel_tol * t_max {
                let m = 0.5 * (a + b);
                let fm = angle_sum(lengths, signs, m) - target;
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    let g_end = sums[grid] - target;
    if g_end.abs() < opts.endpoint_tol
        && roots.last().map_or(true, |&r| t_max - r > 2.0 * t_max / grid as f64)
    {
        roots.push(t_max);
    }
    roots
}

/// Inscribe a chain in a circle of radius `1/(2t)` by turning through the
/// signed central angles `2 eps_i alpha_i`, then rigidly move it to the
/// moduli frame. Returns the root data (kind/branch set by the caller).
pub(crate) fn realize_inscribed(
    arm: &ArmLengths,
    signs: &SignString,
    t: f64,
) -> (AngleConfig, VertexPath, Vec2, Vec<f64>) {
    let rho = 1.0 / (2.0 * t);
    let lengths = arm.lengths();
    let alphas: Vec<f64> = lengths.iter().map(|&l| (l * t).min(1.0).asin()).collect();
    let mut phis = Vec::with_capacity(lengths.len() + 1);
    let mut phi = 0.0;
    phis.push(phi);
    for (i, &a) in alphas.iter().enumerate() {
        phi += 2.0 * signs.get(i) as f64 * a;
        phis.push(phi);
    }
    let raw: Vec<Vec2> = phis
        .iter()
        .map(|&p| Vec2::new(rho * p.cos(), rho * p.sin()))
        .collect();
    // Rotate the first edge onto +x and translate the first vertex to 0.
    let e1 = raw[1] - raw[0];
    let rot = Rotation2::new(-e1.y.atan2(e1.x));
    let vertices: Vec<Vec2> = raw.iter().map(|&v| rot * (v - raw[0])).collect();
    let center = rot * (-raw[0]);
    let mut thetas = Vec::with_capacity(lengths.len() - 1);
    for i in 1..lengths.len() {
        let e = vertices[i + 1] - vertices[i];
        thetas.push(wrap_angle(e.y.atan2(e.x)));
    }
    (
        AngleConfig::new(thetas),
        VertexPath::from_vertices(vertices),
        center,
        alphas,
    )
}

/// Newton-polish a near-critical configuration on the torus. Bisection in
/// `t` cannot resolve roots where the longest edge approaches a diameter
/// (the parameterization has a square-root singularity there), so the
/// final digits come from the area gradient itself. Steps are only
/// accepted while they reduce the gradient norm, which leaves genuinely
/// degenerate points (vanishing Hessian) untouched.
fn polish_critical(arm: &ArmLengths, config: &AngleConfig) -> AngleConfig {
    let mut current = config.clone();
    for _ in 0..30 {
        let grad = match area_gradient(arm, &current) {
            Ok(g) => g,
            Err(_) => return current,
        };
        let norm = gradient_norm(&grad);
        if norm < 1e-14 * arm.scale() {
            break;
        }
        let h = match area_hessian(arm, &current) {
            Ok(h) => h,
            Err(_) => return current,
        };
        let step = match h.lu().solve(&DVector::from_vec(grad)) {
            Some(s) => s,
            None => break,
        };
        let mut accepted = false;
        let mut lambda = 1.0;
        for _ in 0..8 {
            let trial = AngleConfig::new(
                current
                    .thetas()
                    .iter()
                    .zip(step.iter())
                    .map(|(x, s)| x - lambda * s)
                    .collect(),
            );
            let ok = area_gradient(arm, &trial)
                .map(|g| gradient_norm(&g) < norm)
                .unwrap_or(false);
            if ok {
                current = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    current
}

/// Rebuild the inscribed data of a diacyclic configuration from its
/// moduli coordinates: the connecting side is a diameter, so the
/// circumcircle is determined by the endpoints alone.
fn rebuild_diacyclic(
    arm: &ArmLengths,
    config: AngleConfig,
) -> Result<(AngleConfig, VertexPath, Vec2, Vec<f64>)> {
    let path = realize(arm, &config)?;
    let center = 0.5 * (path.first() + path.last());
    let radius = 0.5 * (path.last() - path.first()).norm();
    let half_angles = arm
        .lengths()
        .iter()
        .map(|&l| (l / (2.0 * radius)).min(1.0).asin())
        .collect();
    Ok((config, path, center, half_angles))
}

fn branch_limit(n: usize) -> i64 {
    (n as i64 + 1) / 2 + 1
}

fn dedup_push(roots: &mut Vec<CyclicRoot>, candidate: CyclicRoot, tol: f64) {
    if roots
        .iter()
        .all(|r| r.config.torus_distance(&candidate.config) > tol)
    {
        roots.push(candidate);
    }
}

fn solve_with_target(
    arm: &ArmLengths,
    opts: &SolverOptions,
    kind: CyclicKind,
) -> Result<SolveOutcome> {
    let n = arm.n();
    let lengths = arm.lengths().to_vec();
    let t_max = 1.0 / arm.max_length();
    let k_max = branch_limit(n);
    let grid = opts.grid.max(16);

    let per_mask: Vec<(usize, Vec<(i64, f64)>, Vec<String>)> = (0..1usize << n)
        .into_par_iter()
        .map(|mask| {
            let signs = SignString::from_mask(mask, n);
            let mut sums = Vec::with_capacity(grid + 1);
            for j in 0..=grid {
                sums.push(angle_sum(&lengths, &signs, j as f64 / grid as f64 * t_max));
            }
            let lo = sums.iter().cloned().fold(f64::MAX, f64::min) - 1e-9;
            let hi = sums.iter().cloned().fold(f64::MIN, f64::max) + 1e-9;
            let mut found = Vec::new();
            let warnings = Vec::new();
            for k in -k_max..=k_max {
                let target = match kind {
                    CyclicKind::Diacyclic => FRAC_PI_2 + k as f64 * PI,
                    CyclicKind::Closed => k as f64 * PI,
                    CyclicKind::Plain => continue,
                };
                if target < lo || target > hi {
                    continue;
                }
                for t in scan_roots(&lengths, &signs, target, t_max, &sums, opts) {
                    found.push((k, t));
                }
            }
            (mask, found, warnings)
        })
        .collect();

    let mut outcome = SolveOutcome::default();
    for (mask, found, warnings) in per_mask {
        outcome.warnings.extend(warnings);
        let signs = SignString::from_mask(mask, n);
        for (k, t) in found {
            let (mut config, mut path, mut center, mut half_angles) =
                realize_inscribed(arm, &signs, t);
            if kind == CyclicKind::Diacyclic {
                let polished = polish_critical(arm, &config);
                (config, path, center, half_angles) = rebuild_diacyclic(arm, polished)?;
                let grad = area_gradient(arm, &config)?;
                let norm = gradient_norm(&grad);
                if norm > opts.grad_tol {
                    outcome.warnings.push(format!(
                        "branch (E={signs}, k={k}): root at t={t:.6e} rejected, \
                         gradient norm {norm:.3e} exceeds {:.1e}",
                        opts.grad_tol
                    ));
                    continue;
                }
            }
            let radius = if kind == CyclicKind::Diacyclic {
                0.5 * (path.last() - path.first()).norm()
            } else {
                1.0 / (2.0 * t)
            };
            let cyclic = CyclicConfig {
                radius,
                center,
                signs: signs.clone(),
                half_angles,
                branch: k,
                kind,
            };
            dedup_push(
                &mut outcome.roots,
                CyclicRoot { config, cyclic, path },
                opts.dedup_tol,
            );
        }
    }
    Ok(outcome)
}

/// Enumerate all diacyclic configurations (the critical points of the
/// doubled area) over every sign string and branch integer.
pub fn solve_diacyclic(arm: &ArmLengths, opts: &SolverOptions) -> Result<SolveOutcome> {
    solve_with_target(arm, opts, CyclicKind::Diacyclic)
}

/// Enumerate closed cyclic configurations (`r_0 = r_n`).
pub fn solve_closed_cyclic(arm: &ArmLengths, opts: &SolverOptions) -> Result<SolveOutcome> {
    solve_with_target(arm, opts, CyclicKind::Closed)
}

/// Closed cyclic roots restricted to one `(E, k)` branch.
pub fn closed_cyclic_roots(
    arm: &ArmLengths,
    signs: &SignString,
    k: i64,
    opts: &SolverOptions,
) -> Result<Vec<CyclicRoot>> {
    let n = arm.n();
    if signs.len() != n {
        return Err(ArmError::DimensionMismatch { expected: n, got: signs.len() });
    }
    let lengths = arm.lengths().to_vec();
    let t_max = 1.0 / arm.max_length();
    let grid = opts.grid.max(16);
    let sums: Vec<f64> = (0..=grid)
        .map(|j| angle_sum(&lengths, signs, j as f64 / grid as f64 * t_max))
        .collect();
    let target = k as f64 * PI;
    let mut roots = Vec::new();
    for t in scan_roots(&lengths, signs, target, t_max, &sums, opts) {
        let (config, path, center, half_angles) = realize_inscribed(arm, signs, t);
        let cyclic = CyclicConfig {
            radius: 1.0 / (2.0 * t),
            center,
            signs: signs.clone(),
            half_angles,
            branch: k,
            kind: CyclicKind::Closed,
        };
        dedup_push(&mut roots, CyclicRoot { config, cyclic, path }, opts.dedup_tol);
    }
    Ok(roots)
}

/// Orientation sign of every edge: `+1` when the center lies to the left
/// of the directed edge.
pub fn orientation_signs(path: &VertexPath, center: &Vec2, tol: f64) -> Result<SignString> {
    let mut eps = Vec::with_capacity(path.n_edges());
    for i in 0..path.n_edges() {
        let e = path.edge(i);
        let to_center = center - path.vertices()[i];
        let c = cross(&e, &to_center);
        if c.abs() <= tol * e.norm() * to_center.norm().max(1e-300) {
            return Err(ArmError::DegenerateOrientation { index: i });
        }
        eps.push(if c > 0.0 { 1 } else { -1 });
    }
    Ok(SignString::new(eps))
}

/// Point reflection of a configuration through the circumcenter. The
/// image starts at the antipode of the first vertex.
pub fn symmetric_image(path: &VertexPath, center: &Vec2) -> VertexPath {
    VertexPath::from_vertices(
        path.vertices()
            .iter()
            .map(|&v| 2.0 * center - v)
            .collect(),
    )
}

/// Winding number of a closed polygon around a point, as a real number;
/// integral up to numerical error for polygons avoiding the point.
pub fn winding_number(vertices: &[Vec2], point: &Vec2) -> f64 {
    let m = vertices.len();
    let mut total = 0.0;
    for i in 0..m {
        let a = vertices[i] - point;
        let b = vertices[(i + 1) % m] - point;
        total += cross(&a, &b).atan2(a.dot(&b));
    }
    total / TAU
}

/// The duplication of a diacyclic configuration: the closed `2n`-gon made
/// of the chain and its point reflection through the circumcenter.
#[derive(Clone, Debug)]
pub struct Duplication {
    pub polygon: ClosedPolygon,
    pub center: Vec2,
    pub radius: f64,
}

pub fn duplicate(root: &CyclicRoot) -> Result<Duplication> {
    if root.cyclic.kind != CyclicKind::Diacyclic {
        return Err(ArmError::NotDiacyclic(format!(
            "kind is {:?}",
            root.cyclic.kind
        )));
    }
    let center = root.cyclic.center;
    let verts = root.path.vertices();
    let n = root.path.n_edges();
    let mut vertices = Vec::with_capacity(2 * n);
    vertices.extend_from_slice(&verts[..n]);
    for v in &verts[..n] {
        vertices.push(2.0 * center - v);
    }
    Ok(Duplication {
        polygon: ClosedPolygon::from_vertices(vertices),
        center,
        radius: root.cyclic.radius,
    })
}

/// The closure of a diacyclic configuration: the chain plus two positively
/// oriented edges through the midpoint of the return arc.
pub fn closure(root: &CyclicRoot) -> Result<ClosedPolygon> {
    if root.cyclic.kind != CyclicKind::Diacyclic {
        return Err(ArmError::NotDiacyclic(format!(
            "kind is {:?}",
            root.cyclic.kind
        )));
    }
    let center = root.cyclic.center;
    let last = root.path.last();
    let radial = last - center;
    let mid = center + Vec2::new(-radial.y, radial.x);
    let mut vertices = root.path.vertices().to_vec();
    vertices.push(mid);
    Ok(ClosedPolygon::from_vertices(vertices))
}
