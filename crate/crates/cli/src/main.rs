//! Command line front end: analysis reports, quasicyclic component
//! listings, level-set grids and SVG drawings.
//!
//! Exit codes: 0 success, 1 solver or input-data failure, 2 success with
//! degenerate critical points flagged, 64 usage error.

mod document;
mod svg;

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use planar_arm::cyclic::{solve_diacyclic, SolverOptions};
use planar_arm::geometry::{oriented_area, realize, AngleConfig, ArmLengths, TAU};
use planar_arm::morse::{analyze, AnalysisOptions};
use planar_arm::oracle::{grid_critical_search, match_points, GridSpec};
use planar_arm::qc::enumerate_components;

use document::{to_json_string, AnalysisDocument, OracleDocument, QcDocument};

const EXIT_SOLVER: i32 = 1;
const EXIT_DEGENERATE: i32 = 2;
const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(name = "planar-arm", version, about = "Critical points of the oriented area of planar arms", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Comma-separated edge lengths, e.g. 10,3,2,1.
    #[arg(long)]
    lengths: String,
    /// Multiply each length by (1 + u), u uniform in [-perturb, perturb].
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    /// Seed for the perturbation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gradient-norm tolerance for accepting critical points.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Scan-grid density for the circumradius root search.
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    /// Report angles in degrees instead of radians.
    #[arg(long, default_value_t = false)]
    degrees: bool,
    /// Also write the JSON document to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write an SVG drawing to this path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Find and classify all critical points of the doubled area.
    Analyze(CommonArgs),
    /// Decompose the quasicyclic set into circles and list their special
    /// configurations in loop order.
    Qc(CommonArgs),
    /// Sample the doubled area of a 3-arm on a torus grid (CSV).
    Levelset {
        #[command(flatten)]
        common: CommonArgs,
        /// Samples per torus coordinate.
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Write the CSV grid to this path instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cross-check the solver against a grid + Newton search.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid points per torus coordinate (default 256 for 3-arms,
        /// 96 otherwise).
        #[arg(long)]
        resolution: Option<usize>,
    },
}

fn parse_arm(common: &CommonArgs) -> Result<ArmLengths> {
    let lengths: Vec<f64> = common
        .lengths
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid length {s:?}"))
        })
        .collect::<Result<_>>()?;
    let arm = ArmLengths::new(lengths)?;
    Ok(if common.perturb != 0.0 {
        arm.perturbed(common.perturb, common.seed)
    } else {
        arm
    })
}

fn analysis_options(common: &CommonArgs) -> AnalysisOptions {
    AnalysisOptions {
        solver: SolverOptions {
            grid: common.grid,
            grad_tol: common.tol,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn emit(common: &CommonArgs, json: &str) -> Result<()> {
    print!("{json}");
    if let Some(path) = &common.json {
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_analyze(common: &CommonArgs) -> Result<i32> {
    let arm = parse_arm(common)?;
    let opts = analysis_options(common);
    let report = analyze(&arm, &opts)?;
    let doc = AnalysisDocument::new(&report, &opts, common.degrees);
    emit(common, &to_json_string(&doc)?)?;
    if let Some(path) = &common.svg {
        let out = solve_diacyclic(&arm, &opts.solver)?;
        let mut roots = out.roots;
        roots.sort_by(|a, b| {
            oriented_area(&b.path)
                .partial_cmp(&oriented_area(&a.path))
                .unwrap()
        });
        fs::write(path, svg::render_critical_points(&arm, &roots))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if report.points.iter().any(|p| p.degenerate) {
        EXIT_DEGENERATE
    } else {
        0
    })
}

fn cmd_qc(common: &CommonArgs) -> Result<i32> {
    let arm = parse_arm(common)?;
    let opts = analysis_options(common);
    let qc = enumerate_components(&arm)?;
    let specials = qc
        .components
        .iter()
        .map(|c| qc.special_points(c, &opts.solver))
        .collect::<planar_arm::Result<Vec<_>>>()?;
    let doc = QcDocument::new(&qc, &specials, common.degrees);
    emit(common, &to_json_string(&doc)?)?;
    if let Some(path) = &common.svg {
        let mut configs = Vec::new();
        for (comp, pts) in qc.components.iter().zip(&specials) {
            let pattern: String = comp
                .pattern
                .iter()
                .map(|&p| if p > 0 { '+' } else { '-' })
                .collect();
            for p in pts {
                configs.push((
                    p.config.clone(),
                    format!("{pattern}: {:?} at t = {:.4}", p.kind, p.t),
                ));
            }
        }
        fs::write(path, svg::render_configurations(&arm, &configs))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn cmd_levelset(
    common: &CommonArgs,
    resolution: usize,
    csv_path: Option<&PathBuf>,
) -> Result<i32> {
    let arm = parse_arm(common)?;
    if arm.n() != 3 {
        bail!("levelset requires exactly 3 lengths, got {}", arm.n());
    }
    if resolution < 2 {
        bail!("resolution must be at least 2");
    }
    let mut values = vec![vec![0.0f64; resolution]; resolution];
    let mut csv = String::from("theta1,theta2,doubled_area\n");
    for i in 0..resolution {
        let t1 = i as f64 / resolution as f64 * TAU;
        for j in 0..resolution {
            let t2 = j as f64 / resolution as f64 * TAU;
            let v = oriented_area(&realize(&arm, &AngleConfig::new(vec![t1, t2]))?);
            values[i][j] = v;
            csv.push_str(&format!("{t1},{t2},{v}\n"));
        }
    }
    match csv_path {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &common.svg {
        let opts = analysis_options(common);
        let report = analyze(&arm, &opts)?;
        let critical: Vec<(f64, f64)> = report
            .points
            .iter()
            .map(|p| (p.config.thetas()[0], p.config.thetas()[1]))
            .collect();
        // Rows indexed by theta2 for drawing.
        let mut rows = vec![vec![0.0f64; resolution]; resolution];
        for i in 0..resolution {
            for j in 0..resolution {
                rows[j][i] = values[i][j];
            }
        }
        fs::write(path, svg::render_levelset(&rows, &critical))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn cmd_oracle(common: &CommonArgs, resolution: Option<usize>) -> Result<i32> {
    let arm = parse_arm(common)?;
    let resolution = resolution.unwrap_or(if arm.n() == 3 { 256 } else { 96 });
    let spec = GridSpec { resolution, ..Default::default() };
    let solver_opts = SolverOptions {
        grid: common.grid,
        grad_tol: common.tol,
        ..Default::default()
    };
    let oracle_pts = grid_critical_search(&arm, &spec)?;
    let solved = solve_diacyclic(&arm, &solver_opts)?;
    let left: Vec<AngleConfig> = oracle_pts.iter().map(|p| p.config.clone()).collect();
    let right: Vec<AngleConfig> = solved.roots.iter().map(|r| r.config.clone()).collect();
    let report = match_points(&left, &right, 1e-4);
    let solver_points: Vec<Vec<f64>> = right.iter().map(|c| c.thetas().to_vec()).collect();
    let doc = OracleDocument::new(
        &arm,
        &spec,
        &solver_opts,
        &oracle_pts,
        &solver_points,
        &report,
        common.degrees,
    );
    emit(common, &to_json_string(&doc)?)?;
    Ok(if report.is_bijective() { 0 } else { EXIT_SOLVER })
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Analyze(common) => cmd_analyze(common),
        Command::Qc(common) => cmd_qc(common),
        Command::Levelset { common, resolution, csv } => {
            cmd_levelset(common, *resolution, csv.as_ref())
        }
        Command::Oracle { common, resolution } => cmd_oracle(common, *resolution),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            // Malformed numeric input is a usage problem; everything else
            // is a solver/data failure.
            let msg = format!("{e:#}");
            eprintln!("error: {msg}");
            let code = if msg.contains("invalid length") {
                EXIT_USAGE
            } else {
                EXIT_SOLVER
            };
            std::process::exit(code);
        }
    }
}
