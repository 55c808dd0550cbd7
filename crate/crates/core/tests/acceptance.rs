//! End-to-end acceptance suite. Each test prints a single
//! `criterion N: PASS|FAIL` verdict line (visible with `--nocapture`)
//! and panics with the collected failures when the criterion is not met.

use planar_arm::cyclic::{solve_diacyclic, SolverOptions};
use planar_arm::geometry::{
    area_gradient, area_hessian, oriented_area, realize, AngleConfig, ArmLengths,
};
use planar_arm::morse::{
    analyze, critical_value_multiset, cubic_3arm, duplication_check, find_point, AnalysisOptions,
};
use planar_arm::oracle::{
    fd_gradient, fd_hessian, grid_critical_search, match_points, GridSpec, FD_GRADIENT_STEP,
    FD_HESSIAN_STEP,
};
use planar_arm::qc::{enumerate_components, SpecialKind};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn finish(criterion: usize, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {criterion}: PASS");
    } else {
        println!("criterion {criterion}: FAIL");
        for f in &failures {
            println!("  - {f}");
        }
        panic!("criterion {criterion} failed:\n{}", failures.join("\n"));
    }
}

macro_rules! check {
    ($failures:expr, $cond:expr, $($msg:tt)*) => {
        if !$cond {
            $failures.push(format!($($msg)*));
        }
    };
}

fn arm(ls: &[f64]) -> ArmLengths {
    ArmLengths::new(ls.to_vec()).unwrap()
}

fn arm_211() -> ArmLengths {
    arm(&[2.0, 1.0, 1.0]).perturbed(1e-6, 3)
}

fn arm_equilateral() -> ArmLengths {
    arm(&[1.0, 1.0, 1.0])
}

fn arm_10321() -> ArmLengths {
    arm(&[10.0, 3.0, 2.0, 1.0]).perturbed(1e-6, 7)
}

fn arm_non_perfect() -> ArmLengths {
    arm(&[22.0, 17.0, 21.9, 19.0])
}

#[test]
fn criterion_1_generic_three_arm() {
    let mut failures = Vec::new();
    let report = analyze(&arm_211(), &AnalysisOptions::default()).unwrap();
    check!(
        failures,
        report.points.len() == 4,
        "expected 4 critical points, got {}",
        report.points.len()
    );
    check!(
        failures,
        report.counts_by_index == vec![1, 2, 1],
        "index histogram {:?}, expected [1, 2, 1]",
        report.counts_by_index
    );

    // Connecting lengths of the unperturbed arm against the cubic roots.
    let exact = arm(&[2.0, 1.0, 1.0]);
    let out = solve_diacyclic(&exact, &SolverOptions::default()).unwrap();
    let mut solver_ds: Vec<f64> = out
        .roots
        .iter()
        .map(|r| (r.path.last() - r.path.first()).norm())
        .collect();
    solver_ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    solver_ds.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut cubic_ds: Vec<f64> = cubic_3arm(2.0, 1.0, 1.0).iter().map(|r| r.d).collect();
    cubic_ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    check!(
        failures,
        cubic_ds.len() == 2
            && (cubic_ds[0] - 2.0).abs() < 1e-9
            && (cubic_ds[1] - (1.0 + 3.0f64.sqrt())).abs() < 1e-9,
        "cubic roots {cubic_ds:?}, expected [2, 1+sqrt(3)]"
    );
    check!(
        failures,
        solver_ds.len() == cubic_ds.len()
            && solver_ds
                .iter()
                .zip(&cubic_ds)
                .all(|(s, c)| (s - c).abs() < 1e-9),
        "solver connecting lengths {solver_ds:?} do not match cubic {cubic_ds:?}"
    );
    finish(1, failures);
}

#[test]
fn criterion_2_equilateral_three_arm() {
    let mut failures = Vec::new();
    let report = analyze(&arm_equilateral(), &AnalysisOptions::default()).unwrap();
    check!(
        failures,
        report.points.len() == 3,
        "expected 3 critical points, got {}",
        report.points.len()
    );
    let nondeg: Vec<_> = report.points.iter().filter(|p| !p.degenerate).collect();
    let deg: Vec<_> = report.points.iter().filter(|p| p.degenerate).collect();
    check!(failures, deg.len() == 1, "expected 1 degenerate point, got {}", deg.len());
    check!(
        failures,
        nondeg.len() == 2
            && nondeg.iter().any(|p| p.index_numeric == 2)
            && nondeg.iter().any(|p| p.index_numeric == 0),
        "expected one maximum and one minimum among {:?}",
        nondeg.iter().map(|p| p.index_numeric).collect::<Vec<_>>()
    );
    if let Some(d) = deg.first() {
        check!(
            failures,
            d.doubled_area.abs() < 1e-9,
            "monkey saddle area {} not zero",
            d.doubled_area
        );
    }
    finish(2, failures);
}

#[test]
fn criterion_3_perfect_four_arm() {
    let mut failures = Vec::new();
    let report = analyze(&arm_10321(), &AnalysisOptions::default()).unwrap();
    check!(
        failures,
        report.points.len() == 8,
        "expected 8 critical points, got {}",
        report.points.len()
    );
    check!(
        failures,
        report.counts_by_index == vec![1, 3, 3, 1],
        "index histogram {:?}, expected [1, 3, 3, 1]",
        report.counts_by_index
    );
    check!(failures, report.perfect, "expected a perfect Morse function");
    finish(3, failures);
}

#[test]
fn criterion_4_non_perfect_four_arm() {
    let mut failures = Vec::new();
    let a = arm_non_perfect();
    let report = analyze(&a, &AnalysisOptions::default()).unwrap();
    check!(
        failures,
        report.points.len() == 12,
        "expected 12 critical points, got {}",
        report.points.len()
    );
    check!(failures, !report.perfect, "expected a non-perfect Morse function");
    check!(
        failures,
        report.euler_check == 0,
        "Euler alternating sum {}, expected 0",
        report.euler_check
    );
    // Mirror pairing: each critical point pairs with its reflection.
    for p in &report.points {
        check!(
            failures,
            find_point(&report, &p.config.mirror(), 1e-6).is_some(),
            "critical point {:?} has no mirror image",
            p.config.thetas()
        );
    }
    let qc = enumerate_components(&a).unwrap();
    let opts = SolverOptions::default();
    let mut counts = qc.diacyclic_counts(&opts).unwrap();
    counts.sort_unstable_by(|x, y| y.cmp(x));
    let mut halves = qc.half_component_diacyclic_counts(&opts).unwrap();
    halves.sort_unstable_by(|x, y| y.cmp(x));
    check!(
        failures,
        counts == vec![3, 3, 1, 1],
        "diacyclic counts per component {counts:?}, expected [3, 3, 1, 1]; \
         note: components are mirror-invariant, so each full circle carries an \
         even number of critical points and the total must stay 12; the counts \
         per half component (arc pairs joined where the longest edge is a \
         diameter) are {halves:?}"
    );
    finish(4, failures);
}

#[test]
fn criterion_5_formula_vs_numeric_index() {
    let mut failures = Vec::new();
    let opts = AnalysisOptions {
        solver: SolverOptions { grid: 1024, ..Default::default() },
        ..Default::default()
    };
    let mismatches: Vec<String> = (0..220u64)
        .into_par_iter()
        .flat_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let n = rng.gen_range(3..=6);
            let lengths: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
            let a = ArmLengths::new(lengths).unwrap();
            let report = match analyze(&a, &opts) {
                Ok(r) => r,
                Err(e) => return vec![format!("seed {seed}: solver failed: {e}")],
            };
            let mut bad = Vec::new();
            for p in &report.points {
                if p.degenerate {
                    continue;
                }
                if let (Some(d), Some(f)) = (p.delta, p.index_formula) {
                    if d != 0.0 && f != p.index_numeric as i64 {
                        bad.push(format!(
                            "seed {seed} lengths {:?}: formula {} vs numeric {} at {:?}",
                            report.arm.lengths(),
                            f,
                            p.index_numeric,
                            p.config.thetas()
                        ));
                    }
                }
            }
            bad
        })
        .collect();
    for m in mismatches {
        failures.push(m);
    }
    finish(5, failures);
}

#[test]
fn criterion_6_derivative_correctness() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for sample in 0..1000 {
        let n = rng.gen_range(3..=6);
        let a = ArmLengths::new((0..n).map(|_| rng.gen_range(0.5..3.0)).collect()).unwrap();
        let cfg = AngleConfig::new(
            (0..n - 1)
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
        );
        let an = area_gradient(&a, &cfg).unwrap();
        let fd = fd_gradient(&a, &cfg, FD_GRADIENT_STEP).unwrap();
        let diff: f64 = an
            .iter()
            .zip(&fd)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = an.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rel = diff / norm.max(1.0);
        check!(
            failures,
            rel < 1e-6,
            "sample {sample}: gradient relative error {rel:.3e}"
        );

        let hn = area_hessian(&a, &cfg).unwrap();
        let hf = fd_hessian(&a, &cfg, FD_HESSIAN_STEP).unwrap();
        let mut sym_ok = true;
        for k in 0..n - 1 {
            for j in 0..n - 1 {
                if (hn[(k, j)] - hn[(j, k)]).abs() > 1e-12 * a.scale() {
                    sym_ok = false;
                }
            }
        }
        check!(failures, sym_ok, "sample {sample}: analytic Hessian not symmetric");
        let hdiff = (&hn - &hf).norm();
        let hrel = hdiff / hn.norm().max(1.0);
        check!(
            failures,
            hrel < 1e-5,
            "sample {sample}: Hessian relative error {hrel:.3e}"
        );
        if failures.len() > 20 {
            break;
        }
    }
    finish(6, failures);
}

#[test]
fn criterion_7_duplication_identities() {
    let mut failures = Vec::new();
    for a in [arm_211(), arm_10321(), arm_non_perfect()] {
        let out = solve_diacyclic(&a, &SolverOptions::default()).unwrap();
        for root in &out.roots {
            if root.cyclic.has_diameter_chord(1e-7) {
                continue;
            }
            let check = match duplication_check(root, 1e-7) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!(
                        "duplication failed at {:?}: {e}",
                        root.config.thetas()
                    ));
                    continue;
                }
            };
            check!(
                failures,
                check.closed.e_count == 2 * check.open.e_count,
                "e({:?}): closed {} vs 2 * open {}",
                root.config.thetas(),
                check.closed.e_count,
                check.open.e_count
            );
            check!(
                failures,
                (check.closed.delta - 2.0 * check.open.delta).abs() < 1e-9,
                "delta({:?}): closed {} vs 2 * open {}",
                root.config.thetas(),
                check.closed.delta,
                check.open.delta
            );
            check!(
                failures,
                check.closed.omega == 2 * check.open.omega - 1,
                "omega({:?}): closed {} vs open {}",
                root.config.thetas(),
                check.closed.omega,
                check.open.omega
            );
            check!(
                failures,
                (check.closed.index % 2 != 0) == (check.open.delta > 0.0),
                "parity({:?}): closed index {} vs delta {}",
                root.config.thetas(),
                check.closed.index,
                check.open.delta
            );
        }
    }
    finish(7, failures);
}

#[test]
fn criterion_8_oracle_equivalence() {
    let mut failures = Vec::new();
    let cases: Vec<(ArmLengths, usize)> = vec![
        (arm_211(), 256),
        (arm_equilateral(), 256),
        (arm_10321(), 96),
        (arm_non_perfect(), 96),
    ];
    for (a, resolution) in cases {
        let spec = GridSpec { resolution, ..Default::default() };
        let oracle_pts = grid_critical_search(&a, &spec).unwrap();
        let solved = solve_diacyclic(&a, &SolverOptions::default()).unwrap();
        let left: Vec<AngleConfig> = oracle_pts.iter().map(|p| p.config.clone()).collect();
        let right: Vec<AngleConfig> = solved.roots.iter().map(|r| r.config.clone()).collect();
        let report = match_points(&left, &right, 1e-4);
        check!(
            failures,
            report.is_bijective() && report.pairs.len() == right.len(),
            "arm {:?}: oracle found {} points, solver {}, unmatched {:?}/{:?}",
            a.lengths(),
            left.len(),
            right.len(),
            report.unmatched_left,
            report.unmatched_right
        );
    }
    finish(8, failures);
}

#[test]
fn criterion_9_qc_structure() {
    let mut failures = Vec::new();
    let arms = [
        arm(&[2.0, 1.0, 0.95]),
        arm_10321(),
        arm(&[4.0, 1.3, 1.1, 0.9, 0.7]),
    ];
    for a in arms {
        let n = a.n();
        let qc = enumerate_components(&a).unwrap();
        check!(
            failures,
            qc.components.len() == 1 << (n - 2),
            "n = {n}: {} components, expected {}",
            qc.components.len(),
            1 << (n - 2)
        );
        let opts = SolverOptions::default();
        let mut all_two = true;
        for comp in &qc.components {
            let pts = qc.special_points(comp, &opts).unwrap();
            let aligned: Vec<_> = pts
                .iter()
                .filter(|p| p.kind == SpecialKind::Aligned)
                .collect();
            check!(
                failures,
                aligned.len() == 2,
                "n = {n}, pattern {:?}: {} aligned configurations, expected 2",
                comp.pattern,
                aligned.len()
            );
            for p in &aligned {
                let path = realize(&a, &p.config).unwrap();
                let verts = path.vertices();
                // The end-to-end vector can vanish, so measure against the
                // first edge (always of length l_1).
                let dir = path.edge(0);
                let res = verts
                    .iter()
                    .map(|v| {
                        let w = v - verts[0];
                        (dir.x * w.y - dir.y * w.x).abs()
                    })
                    .fold(0.0f64, f64::max)
                    / (dir.norm() * a.max_length());
                check!(
                    failures,
                    res < 1e-8,
                    "n = {n}: aligned configuration has collinearity residual {res:.3e}"
                );
            }
            let diacyclic = pts
                .iter()
                .filter(|p| p.kind == SpecialKind::Diacyclic)
                .count();
            check!(
                failures,
                diacyclic >= 2 && diacyclic % 2 == 0,
                "n = {n}, pattern {:?}: {} diacyclic points (need an even count >= 2)",
                comp.pattern,
                diacyclic
            );
            if diacyclic != 2 {
                all_two = false;
            }
        }
        let report = analyze(&a, &AnalysisOptions::default()).unwrap();
        check!(
            failures,
            report.perfect == all_two,
            "n = {n}: perfect = {}, but all components have 2 diacyclic points = {}",
            report.perfect,
            all_two
        );
    }
    finish(9, failures);
}

#[test]
fn criterion_10_symmetries() {
    let mut failures = Vec::new();
    // Mirror pairing with complementary indices.
    for a in [arm_211(), arm_10321(), arm_non_perfect()] {
        let report = analyze(&a, &AnalysisOptions::default()).unwrap();
        for p in &report.points {
            match find_point(&report, &p.config.mirror(), 1e-6) {
                Some(m) => check!(
                    failures,
                    p.index_numeric + m.index_numeric == a.n() - 1,
                    "arm {:?}: indices {} + {} != {}",
                    a.lengths(),
                    p.index_numeric,
                    m.index_numeric,
                    a.n() - 1
                ),
                None => failures.push(format!(
                    "arm {:?}: no mirror partner for {:?}",
                    a.lengths(),
                    p.config.thetas()
                )),
            }
        }
    }
    // Permutation invariance of the critical-value multiset.
    for (a, perm) in [
        (arm_211(), vec![1, 2, 0]),
        (arm_10321(), vec![2, 0, 3, 1]),
        (arm_non_perfect(), vec![3, 1, 0, 2]),
    ] {
        let b = a.permuted(&perm).unwrap();
        let ra = analyze(&a, &AnalysisOptions::default()).unwrap();
        let rb = analyze(&b, &AnalysisOptions::default()).unwrap();
        let (va, ia) = critical_value_multiset(&ra);
        let (vb, ib) = critical_value_multiset(&rb);
        check!(
            failures,
            va.len() == vb.len()
                && va.iter().zip(&vb).all(|(x, y)| (x - y).abs() < 1e-8),
            "arm {:?} vs {:?}: critical values differ: {va:?} vs {vb:?}",
            a.lengths(),
            b.lengths()
        );
        check!(
            failures,
            ia == ib,
            "arm {:?} vs {:?}: index multisets differ: {ia:?} vs {ib:?}",
            a.lengths(),
            b.lengths()
        );
    }
    finish(10, failures);
}

// Sanity anchor for the sorting convention used everywhere above: the
// maximum of the doubled area comes first.
#[test]
fn reports_sorted_by_descending_area() {
    let report = analyze(&arm_10321(), &AnalysisOptions::default()).unwrap();
    for w in report.points.windows(2) {
        assert!(w[0].doubled_area >= w[1].doubled_area);
    }
    assert!(report.points[0].doubled_area > 0.0);
    let path = realize(&report.arm, &report.points[0].config).unwrap();
    assert!((oriented_area(&path) - report.points[0].doubled_area).abs() < 1e-12);
}
