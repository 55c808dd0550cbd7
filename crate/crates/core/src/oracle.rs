//! Independent numerical cross-checks.
//!
//! Everything here deliberately avoids the analytic machinery of the rest
//! of the crate: derivatives come from finite differences of the area
//! alone, and critical points come from a dense grid search over the torus
//! followed by Newton refinement. Agreement between the two pipelines is
//! what the integration suite certifies.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{ArmError, Result};
use crate::geometry::{oriented_area, realize, AngleConfig, ArmLengths, TAU};

pub const FD_GRADIENT_STEP: f64 = 1e-5;
pub const FD_HESSIAN_STEP: f64 = 1e-4;

fn area_at(arm: &ArmLengths, thetas: &[f64]) -> Result<f64> {
    Ok(oriented_area(&realize(arm, &AngleConfig::new(thetas.to_vec()))?))
}

/// Central-difference gradient of the doubled area.
pub fn fd_gradient(arm: &ArmLengths, config: &AngleConfig, step: f64) -> Result<Vec<f64>> {
    let base = config.thetas().to_vec();
    let mut grad = Vec::with_capacity(base.len());
    for k in 0..base.len() {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[k] += step;
        minus[k] -= step;
        grad.push((area_at(arm, &plus)? - area_at(arm, &minus)?) / (2.0 * step));
    }
    Ok(grad)
}

/// Central-difference Hessian of the doubled area, symmetrized.
pub fn fd_hessian(arm: &ArmLengths, config: &AngleConfig, step: f64) -> Result<DMatrix<f64>> {
    let base = config.thetas().to_vec();
    let d = base.len();
    let f0 = area_at(arm, &base)?;
    let mut h = DMatrix::zeros(d, d);
    for k in 0..d {
        let mut p = base.clone();
        let mut m = base.clone();
        p[k] += step;
        m[k] -= step;
        h[(k, k)] = (area_at(arm, &p)? - 2.0 * f0 + area_at(arm, &m)?) / (step * step);
    }
    for k in 0..d {
        for j in k + 1..d {
            let mut pp = base.clone();
            let mut pm = base.clone();
            let mut mp = base.clone();
            let mut mm = base.clone();
            pp[k] += step;
            pp[j] += step;
            pm[k] += step;
            pm[j] -= step;
            mp[k] -= step;
            mp[j] += step;
            mm[k] -= step;
            mm[j] -= step;
            let v = (area_at(arm, &pp)? - area_at(arm, &pm)? - area_at(arm, &mp)?
                + area_at(arm, &mm)?)
                / (4.0 * step * step);
            h[(k, j)] = v;
            h[(j, k)] = v;
        }
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    /// Grid points per torus coordinate.
    pub resolution: usize,
    /// Newton iterations per candidate.
    pub newton_iters: usize,
    /// Convergence threshold on the finite-difference gradient norm,
    /// relative to the squared length scale of the arm.
    pub converge_rel: f64,
    /// Torus max-norm distance below which two converged points merge.
    pub dedup_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            resolution: 96,
            newton_iters: 50,
            converge_rel: 1e-10,
            dedup_tol: 1e-5,
        }
    }
}

/// A critical point found by grid search plus Newton refinement.
#[derive(Clone, Debug)]
pub struct OracleCriticalPoint {
    pub config: AngleConfig,
    pub doubled_area: f64,
    pub gradient_norm: f64,
    /// Index counted from the eigenvalues of the finite-difference
    /// Hessian; `None` when an eigenvalue is too close to zero to call.
    pub index: Option<usize>,
}

fn fd_grad_norm2(arm: &ArmLengths, thetas: &[f64]) -> f64 {
    fd_gradient(arm, &AngleConfig::new(thetas.to_vec()), FD_GRADIENT_STEP)
        .map(|g| g.iter().map(|x| x * x).sum())
        .unwrap_or(f64::MAX)
}

fn newton_refine(arm: &ArmLengths, start: &[f64], spec: &GridSpec) -> Option<(Vec<f64>, f64)> {
    let scale = arm.scale();
    let tol = spec.converge_rel * scale;
    let mut x = start.to_vec();
    for _ in 0..spec.newton_iters {
        let cfg = AngleConfig::new(x.clone());
        let g = fd_gradient(arm, &cfg, FD_GRADIENT_STEP).ok()?;
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < tol {
            return Some((cfg.thetas().to_vec(), norm));
        }
        let h = fd_hessian(arm, &cfg, FD_HESSIAN_STEP).ok()?;
        let gv = DVector::from_vec(g);
        let lu = h.lu();
        let step = lu.solve(&gv)?;
        // Damp until the gradient norm actually decreases.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| xi - lambda * si)
                .collect();
            if fd_grad_norm2(arm, &trial) < norm * norm {
                x = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    let cfg = AngleConfig::new(x.clone());
    let g = fd_gradient(arm, &cfg, FD_GRADIENT_STEP).ok()?;
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    (norm < tol).then(|| (cfg.thetas().to_vec(), norm))
}

/// Exhaustive critical-point search: local minima of the squared gradient
/// norm on a uniform torus grid, refined by damped Newton iteration on the
/// finite-difference gradient.
pub fn grid_critical_search(arm: &ArmLengths, spec: &GridSpec) -> Result<Vec<OracleCriticalPoint>> {
    let d = arm.n() - 1;
    let res = spec.resolution;
    if res < 8 {
        return Err(ArmError::ResolutionTooCoarse(res, 8));
    }
    let total = res.pow(d as u32);

    let decode = |mut idx: usize| -> Vec<usize> {
        let mut coords = vec![0usize; d];
        for c in coords.iter_mut() {
            *c = idx % res;
            idx /= res;
        }
        coords
    };
    let encode = |coords: &[usize]| -> usize {
        coords.iter().rev().fold(0usize, |acc, &c| acc * res + c)
    };

    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let thetas: Vec<f64> = decode(idx)
                .iter()
                .map(|&c| c as f64 / res as f64 * TAU)
                .collect();
            fd_grad_norm2(arm, &thetas)
        })
        .collect();

    // All 3^d - 1 neighbor offsets in {-1, 0, 1}^d.
    let neighbor_offsets: Vec<Vec<isize>> = (0..3usize.pow(d as u32))
        .filter_map(|mut code| {
            let mut off = Vec::with_capacity(d);
            for _ in 0..d {
                off.push(code as isize % 3 - 1);
                code /= 3;
            }
            off.iter().any(|&o| o != 0).then_some(off)
        })
        .collect();

    let candidates: Vec<usize> = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let coords = decode(idx);
            neighbor_offsets.iter().all(|off| {
                let ncoords: Vec<usize> = coords
                    .iter()
                    .zip(off)
                    .map(|(&c, &o)| (c as isize + o).rem_euclid(res as isize) as usize)
                    .collect();
                values[idx] <= values[encode(&ncoords)]
            })
        })
        .collect();

    let refined: Vec<(Vec<f64>, f64)> = candidates
        .into_par_iter()
        .filter_map(|idx| {
            let thetas: Vec<f64> = decode(idx)
                .iter()
                .map(|&c| c as f64 / res as f64 * TAU)
                .collect();
            newton_refine(arm, &thetas, spec)
        })
        .collect();

    let mut points: Vec<OracleCriticalPoint> = Vec::new();
    for (thetas, norm) in refined {
        let config = AngleConfig::new(thetas);
        if points
            .iter()
            .any(|p| p.config.torus_distance(&config) < spec.dedup_tol)
        {
            continue;
        }
        let area = area_at(arm, config.thetas())?;
        let h = fd_hessian(arm, &config, FD_HESSIAN_STEP)?;
        let eigs = h.symmetric_eigenvalues();
        let max_abs = eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
        let tol = 1e-4 * max_abs.max(1e-9 * arm.scale());
        let index = if eigs.iter().any(|&e| e.abs() < tol) {
            None
        } else {
            Some(eigs.iter().filter(|&&e| e < 0.0).count())
        };
        points.push(OracleCriticalPoint {
            config,
            doubled_area: area,
            gradient_norm: norm,
            index,
        });
    }
    points.sort_by(|a, b| {
        b.doubled_area
            .partial_cmp(&a.doubled_area)
            .unwrap()
            .then_with(|| {
                a.config
                    .thetas()
                    .partial_cmp(b.config.thetas())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    Ok(points)
}

/// Pairing between two critical-point lists under the torus max-metric.
#[derive(Clone, Debug)]
pub struct MatchReport {
    /// `(left index, right index, distance)` for each matched pair.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_left: Vec<usize>,
    pub unmatched_right: Vec<usize>,
    pub max_distance: f64,
}

impl MatchReport {
    pub fn is_bijective(&self) -> bool {
        self.unmatched_left.is_empty() && self.unmatched_right.is_empty()
    }
}

/// Greedy nearest-pair matching: repeatedly pair the closest remaining
/// configurations while their distance is below `tol`.
pub fn match_points(left: &[AngleConfig], right: &[AngleConfig], tol: f64) -> MatchReport {
    let mut dists: Vec<(f64, usize, usize)> = Vec::with_capacity(left.len() * right.len());
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            dists.push((a.torus_distance(b), i, j));
        }
    }
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut used_l = vec![false; left.len()];
    let mut used_r = vec![false; right.len()];
    let mut pairs = Vec::new();
    let mut max_distance: f64 = 0.0;
    for (d, i, j) in dists {
        if d > tol {
            break;
        }
        if used_l[i] || used_r[j] {
            continue;
        }
        used_l[i] = true;
        used_r[j] = true;
        max_distance = max_distance.max(d);
        pairs.push((i, j, d));
    }
    MatchReport {
        pairs,
        unmatched_left: (0..left.len()).filter(|&i| !used_l[i]).collect(),
        unmatched_right: (0..right.len()).filter(|&j| !used_r[j]).collect(),
        max_distance,
    }
}
