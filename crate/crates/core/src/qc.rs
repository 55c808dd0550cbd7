//! The circles of quasicyclic configurations.
//!
//! When one edge is strictly longest, the quasicyclic configurations form
//! `2^(n-2)` disjoint topological circles, one per choice of signs for the
//! third and later edges (in length-sorted order). Each circle consists of
//! four arcs parameterized by `t = 1/(2 rho)` in `[0, 1/l_max]`: the arcs
//! join where the longest edge is a diameter (`t = 1/l_max`, its sign
//! flips) and at infinite radius (`t = 0`, the aligned configurations, all
//! signs flip).
//!
//! Edges are sorted internally so the strictly longest one comes first;
//! every returned configuration is expressed in the caller's original edge
//! order (permuting edges along the circle moves neither the radius nor
//! the signed half-angle sum, so the mapped configuration is inscribed in
//! the same circle).

use crate::cyclic::{
    angle_sum, realize_inscribed, scan_roots, SignString, SolverOptions, FRAC_PI_2, PI,
};
use crate::error::{ArmError, Result};
use crate::geometry::{AngleConfig, ArmLengths};

#[derive(Clone, Debug)]
pub struct ArcDescriptor {
    /// Sign string in sorted edge order.
    pub signs: SignString,
    /// Whether the loop traverses this arc with `t` increasing.
    pub ascending: bool,
}

/// One circle of quasicyclic configurations.
#[derive(Clone, Debug)]
pub struct QcComponent {
    /// Signs of the third and later edges (sorted order) on the first arc.
    pub pattern: Vec<i8>,
    /// The four arcs in cyclic order:
    /// `(+,+,p) -> (-,+,p) -> (+,-,-p) -> (-,-,-p)`.
    pub arcs: [ArcDescriptor; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialKind {
    Diacyclic,
    Closed,
    Aligned,
}

/// A special configuration located on a component, in loop order.
#[derive(Clone, Debug)]
pub struct SpecialPoint {
    pub kind: SpecialKind,
    /// Arc index `0..4` (aligned points sit at arc joins; they carry the
    /// index of the arc that follows them).
    pub arc: usize,
    /// Parameter `t = 1/(2 rho)`; zero for aligned points.
    pub t: f64,
    /// Branch integer of the angle-sum target (diacyclic / closed roots).
    pub branch: i64,
    pub config: AngleConfig,
}

/// The component decomposition of an arm's quasicyclic set.
#[derive(Clone, Debug)]
pub struct QcAnalysis {
    arm: ArmLengths,
    sorted: ArmLengths,
    /// `perm[s]` is the original index of the `s`-th sorted edge.
    perm: Vec<usize>,
    pub components: Vec<QcComponent>,
}

/// Enumerate the `2^(n-2)` components. Fails when there is no strictly
/// largest edge (the components then intersect and the decomposition
/// does not apply).
pub fn enumerate_components(arm: &ArmLengths) -> Result<QcAnalysis> {
    let n = arm.n();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| arm.lengths()[b].partial_cmp(&arm.lengths()[a]).unwrap());
    let sorted = arm.permuted(&perm)?;
    if !(sorted.lengths()[0] > sorted.lengths()[1]) {
        return Err(ArmError::AmbiguousLargestEdge(
            sorted.lengths()[0],
            sorted.lengths()[1],
        ));
    }
    let mut components = Vec::with_capacity(1 << (n - 2));
    for mask in 0..1usize << (n - 2) {
        let pattern: Vec<i8> = (0..n - 2)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        let with_heads = |h1: i8, h2: i8, flip: bool| -> SignString {
            let mut eps = vec![h1, h2];
            eps.extend(pattern.iter().map(|&p| if flip { -p } else { p }));
            SignString::new(eps)
        };
        let arcs = [
            ArcDescriptor { signs: with_heads(1, 1, false), ascending: true },
            ArcDescriptor { signs: with_heads(-1, 1, false), ascending: false },
            ArcDescriptor { signs: with_heads(1, -1, true), ascending: true },
            ArcDescriptor { signs: with_heads(-1, -1, true), ascending: false },
        ];
        components.push(QcComponent { pattern, arcs });
    }
    Ok(QcAnalysis {
        arm: arm.clone(),
        sorted,
        perm,
        components,
    })
}

impl QcAnalysis {
    pub fn arm(&self) -> &ArmLengths {
        &self.arm
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn t_max(&self) -> f64 {
        1.0 / self.sorted.lengths()[0]
    }

    /// Signs mapped back to the caller's edge order.
    fn original_signs(&self, sorted_signs: &SignString) -> SignString {
        let mut eps = vec![0i8; self.arm.n()];
        for (s, &orig) in self.perm.iter().enumerate() {
            eps[orig] = sorted_signs.get(s);
        }
        SignString::new(eps)
    }

    /// The configuration of the original arm inscribed with the given
    /// (sorted-order) signs at parameter `t`; `t = 0` yields the aligned
    /// limit.
    pub fn config_at(&self, sorted_signs: &SignString, t: f64) -> AngleConfig {
        let orig = self.original_signs(sorted_signs);
        if t <= 0.0 {
            let lead = orig.get(0);
            return AngleConfig::new(
                (1..self.arm.n())
                    .map(|i| if orig.get(i) == lead { 0.0 } else { PI })
                    .collect(),
            );
        }
        let (config, _, _, _) = realize_inscribed(&self.arm, &orig, t);
        config
    }

    /// The two aligned configurations of a component: the `t = 0` joins of
    /// its arc pairs. They differ by flipping the relative direction of
    /// every edge after the first.
    pub fn aligned_configs(&self, component: &QcComponent) -> [AngleConfig; 2] {
        [
            self.config_at(&component.arcs[0].signs, 0.0),
            self.config_at(&component.arcs[2].signs, 0.0),
        ]
    }

    /// Sample the component as a closed polyline of configurations in
    /// loop order, densifying until consecutive samples are within
    /// `max_gap` on the torus (up to a refinement cap).
    pub fn trace_component(
        &self,
        component: &QcComponent,
        samples_per_arc: usize,
        max_gap: f64,
    ) -> Vec<AngleConfig> {
        let m = samples_per_arc.max(2);
        let t_max = self.t_max();
        let mut loop_configs = Vec::new();
        for arc in &component.arcs {
            let mut ts: Vec<f64> = (0..m).map(|i| t_max * i as f64 / (m - 1) as f64).collect();
            if !arc.ascending {
                ts.reverse();
            }
            let mut configs: Vec<(f64, AngleConfig)> = ts
                .into_iter()
                .map(|t| (t, self.config_at(&arc.signs, t)))
                .collect();
            for _ in 0..4 {
                let mut refined = Vec::with_capacity(configs.len());
                let mut changed = false;
                for w in 0..configs.len() {
                    if w > 0 {
                        let (tp, cp) = &configs[w - 1];
                        let (tc, cc) = &configs[w];
                        if cp.torus_distance(cc) > max_gap {
                            let tm = 0.5 * (tp + tc);
                            refined.push((tm, self.config_at(&arc.signs, tm)));
                            changed = true;
                        }
                    }
                    refined.push(configs[w].clone());
                }
                configs = refined;
                if !changed {
                    break;
                }
            }
            loop_configs.extend(configs.into_iter().map(|(_, c)| c));
        }
        loop_configs
    }

    /// Locate the diacyclic and closed cyclic roots on every arc plus the
    /// two aligned joins, returned in loop order.
    pub fn special_points(
        &self,
        component: &QcComponent,
        opts: &SolverOptions,
    ) -> Result<Vec<SpecialPoint>> {
        let t_max = self.t_max();
        let grid = opts.grid.max(16);
        let k_max = (self.arm.n() as i64 + 1) / 2 + 1;
        let mut out: Vec<SpecialPoint> = Vec::new();
        let push = |points: &mut Vec<SpecialPoint>, p: SpecialPoint| {
            if points
                .iter()
                .all(|q| q.config.torus_distance(&p.config) > opts.dedup_tol)
            {
                points.push(p);
            }
        };
        for (arc_idx, arc) in component.arcs.iter().enumerate() {
            if arc_idx == 0 {
                push(
                    &mut out,
                    SpecialPoint {
                        kind: SpecialKind::Aligned,
                        arc: 0,
                        t: 0.0,
                        branch: 0,
                        config: self.config_at(&arc.signs, 0.0),
                    },
                );
            }
            if arc_idx == 2 {
                push(
                    &mut out,
                    SpecialPoint {
                        kind: SpecialKind::Aligned,
                        arc: 2,
                        t: 0.0,
                        branch: 0,
                        config: self.config_at(&arc.signs, 0.0),
                    },
                );
            }
            let orig = self.original_signs(&arc.signs);
            let sums: Vec<f64> = (0..=grid)
                .map(|j| angle_sum(self.arm.lengths(), &orig, j as f64 / grid as f64 * t_max))
                .collect();
            let mut arc_points: Vec<SpecialPoint> = Vec::new();
            for k in -k_max..=k_max {
                for (kind, target) in [
                    (SpecialKind::Diacyclic, FRAC_PI_2 + k as f64 * PI),
                    (SpecialKind::Closed, k as f64 * PI),
                ] {
                    for t in scan_roots(self.arm.lengths(), &orig, target, t_max, &sums, opts) {
                        arc_points.push(SpecialPoint {
                            kind,
                            arc: arc_idx,
                            t,
                            branch: k,
                            config: self.config_at(&arc.signs, t),
                        });
                    }
                }
            }
            arc_points.sort_by(|a, b| {
                if arc.ascending {
                    a.t.partial_cmp(&b.t).unwrap()
                } else {
                    b.t.partial_cmp(&a.t).unwrap()
                }
            });
            for p in arc_points {
                push(&mut out, p);
            }
        }
        Ok(out)
    }

    /// Diacyclic-point count of each component, in pattern order.
    pub fn diacyclic_counts(&self, opts: &SolverOptions) -> Result<Vec<usize>> {
        self.components
            .iter()
            .map(|c| {
                Ok(self
                    .special_points(c, opts)?
                    .iter()
                    .filter(|p| p.kind == SpecialKind::Diacyclic)
                    .count())
            })
            .collect()
    }

    /// Diacyclic counts per half component (the two arc pairs meeting
    /// where the longest edge is a diameter). Mirror images land in the
    /// opposite half, so these counts may be odd even though full
    /// components always carry an even number of diacyclic points.
    pub fn half_component_diacyclic_counts(&self, opts: &SolverOptions) -> Result<Vec<usize>> {
        let mut counts = Vec::with_capacity(self.components.len() * 2);
        for c in &self.components {
            let pts = self.special_points(c, opts)?;
            let first: usize = pts
                .iter()
                .filter(|p| p.kind == SpecialKind::Diacyclic && p.arc < 2)
                .count();
            let second: usize = pts
                .iter()
                .filter(|p| p.kind == SpecialKind::Diacyclic && p.arc >= 2)
                .count();
            counts.push(first);
            counts.push(second);
        }
        Ok(counts)
    }
}
