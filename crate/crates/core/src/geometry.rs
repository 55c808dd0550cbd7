//! Core geometry of an open planar chain: configurations, the doubled
//! oriented area and its analytic derivatives on the moduli torus.
//!
//! Convention used throughout the crate: areas are the DOUBLED oriented
//! area `2A` (the raw shoelace sum of the chain closed up with the
//! connecting side from the last vertex back to the first). Gradients and
//! Hessians are derivatives of that doubled value with respect to the
//! `n-1` angle coordinates.

use nalgebra::{DMatrix, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ArmError, Result};

pub type Vec2 = Vector2<f64>;

pub const TAU: f64 = std::f64::consts::TAU;

/// Reduce an angle to the canonical interval `[0, 2pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Circular distance between two angles.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Edge lengths of an open chain. All positive, at least two.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmLengths {
    lengths: Vec<f64>,
}

impl ArmLengths {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() < 2 {
            return Err(ArmError::TooFewEdges(lengths.len()));
        }
        for (index, &value) in lengths.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ArmError::NonPositiveLength { index, value });
            }
        }
        Ok(Self { lengths })
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().cloned().fold(f64::MIN, f64::max)
    }

    /// Characteristic squared scale, used for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.lengths.iter().map(|l| l * l).sum()
    }

    /// Multiply every length by `1 + u_i` with `u_i` uniform in
    /// `[-magnitude, magnitude]`, drawn from a seeded generator.
    pub fn perturbed(&self, magnitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lengths = self
            .lengths
            .iter()
            .map(|l| l * (1.0 + rng.gen_range(-magnitude..=magnitude)))
            .collect();
        Self { lengths }
    }

    /// Reorder the edges: entry `i` of the result is `lengths[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        assert_eq!(perm.len(), self.n());
        Self::new(perm.iter().map(|&i| self.lengths[i]).collect())
    }
}

/// A point of the moduli torus: `n-1` relative edge angles in `[0, 2pi)`.
///
/// `thetas[k]` is the direction of edge `k+2` measured from edge 1
/// (edge 1 is pinned along the positive x-axis).
#[derive(Clone, Debug, PartialEq)]
pub struct AngleConfig {
    thetas: Vec<f64>,
}

impl AngleConfig {
    pub fn new(thetas: Vec<f64>) -> Self {
        Self {
            thetas: thetas.into_iter().map(wrap_angle).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Reflection across the x-axis. Fixes exactly the aligned
    /// configurations (all angles in {0, pi}) and negates the area.
    pub fn mirror(&self) -> Self {
        Self::new(self.thetas.iter().map(|&t| -t).collect())
    }

    /// Max-norm distance on the torus.
    pub fn torus_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.thetas
            .iter()
            .zip(&other.thetas)
            .map(|(&a, &b)| circular_distance(a, b))
            .fold(0.0, f64::max)
    }
}

/// Vertices of a realized open-chain configuration, `r_0 = (0,0)`,
/// `r_1 = (l_1, 0)`.
#[derive(Clone, Debug)]
pub struct VertexPath {
    vertices: Vec<Vec2>,
}

impl VertexPath {
    pub fn from_vertices(vertices: Vec<Vec2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn first(&self) -> Vec2 {
        self.vertices[0]
    }

    pub fn last(&self) -> Vec2 {
        *self.vertices.last().unwrap()
    }

    pub fn edge(&self, i: usize) -> Vec2 {
        self.vertices[i + 1] - self.vertices[i]
    }

    pub fn n_edges(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// A closed polygon (cyclic adjacency, last vertex connects to the first).
#[derive(Clone, Debug)]
pub struct ClosedPolygon {
    vertices: Vec<Vec2>,
}

impl ClosedPolygon {
    pub fn from_vertices(vertices: Vec<Vec2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn edge(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        self.vertices[(i + 1) % n] - self.vertices[i]
    }

    pub fn n_edges(&self) -> usize {
        self.vertices.len()
    }
}

fn check_dims(arm: &ArmLengths, config: &AngleConfig) -> Result<()> {
    if config.dim() != arm.n() - 1 {
        return Err(ArmError::DimensionMismatch {
            expected: arm.n() - 1,
            got: config.dim(),
        });
    }
    Ok(())
}

/// Edge vectors of a configuration; edge 1 is `(l_1, 0)`.
pub fn edge_vectors(arm: &ArmLengths, config: &AngleConfig) -> Result<Vec<Vec2>> {
    check_dims(arm, config)?;
    let l = arm.lengths();
    let mut edges = Vec::with_capacity(arm.n());
    edges.push(Vec2::new(l[0], 0.0));
    for (k, &theta) in config.thetas().iter().enumerate() {
        edges.push(Vec2::new(l[k + 1] * theta.cos(), l[k + 1] * theta.sin()));
    }
    Ok(edges)
}

/// Place the vertices: `r_0 = (0,0)`, `r_k` the running sum of edges.
pub fn realize(arm: &ArmLengths, config: &AngleConfig) -> Result<VertexPath> {
    let edges = edge_vectors(arm, config)?;
    let mut vertices = Vec::with_capacity(arm.n() + 1);
    let mut p = Vec2::zeros();
    vertices.push(p);
    for e in &edges {
        p += e;
        vertices.push(p);
    }
    Ok(VertexPath::from_vertices(vertices))
}

/// Doubled oriented area `2A` of the chain closed up with the connecting
/// side from the last vertex back to the first (shoelace sum).
pub fn oriented_area(path: &VertexPath) -> f64 {
    shoelace(path.vertices())
}

/// Doubled oriented area of a closed polygon.
pub fn oriented_area_closed(poly: &ClosedPolygon) -> f64 {
    shoelace(poly.vertices())
}

fn shoelace(vertices: &[Vec2]) -> f64 {
    let m = vertices.len();
    let mut sum = 0.0;
    for i in 0..m {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % m];
        sum += a.x * b.y - b.x * a.y;
    }
    sum
}

/// Analytic gradient of the doubled area with respect to the angle
/// coordinates: component `k` is `(sum_{i<k} e_i - sum_{i>k} e_i) . e_k`
/// for edges `k = 2..=n`.
pub fn area_gradient(arm: &ArmLengths, config: &AngleConfig) -> Result<Vec<f64>> {
    let edges = edge_vectors(arm, config)?;
    let n = edges.len();
    let total: Vec2 = edges.iter().sum();
    let mut grad = Vec::with_capacity(n - 1);
    let mut prefix = edges[0];
    for k in 1..n {
        // prefix = sum_{i<k} e_i, suffix = total - prefix - e_k
        let suffix = total - prefix - edges[k];
        grad.push((prefix - suffix).dot(&edges[k]));
        prefix += edges[k];
    }
    Ok(grad)
}

pub fn gradient_norm(grad: &[f64]) -> f64 {
    grad.iter().map(|g| g * g).sum::<f64>().sqrt()
}

/// Analytic Hessian of the doubled area. Entries are cross products of
/// edge vectors; symmetric `(n-1) x (n-1)`.
pub fn area_hessian(arm: &ArmLengths, config: &AngleConfig) -> Result<DMatrix<f64>> {
    let edges = edge_vectors(arm, config)?;
    let n = edges.len();
    let dim = n - 1;
    let mut h = DMatrix::zeros(dim, dim);
    for k in 1..n {
        let mut signed_sum = Vec2::zeros();
        for (i, e) in edges.iter().enumerate() {
            if i == k {
                continue;
            }
            signed_sum += if i < k { *e } else { -*e };
        }
        h[(k - 1, k - 1)] = cross(&edges[k], &signed_sum);
        for m in 1..n {
            if m == k {
                continue;
            }
            let s = if m < k { 1.0 } else { -1.0 };
            h[(k - 1, m - 1)] = s * cross(&edges[m], &edges[k]);
        }
    }
    Ok(h)
}
