//! Critical-point analysis of the oriented area on the moduli space of
//! planar arms.
//!
//! An arm is an open chain of rigid edges with prescribed lengths, pinned
//! so that the first vertex sits at the origin and the first edge points
//! along the positive `x` axis. Its moduli space is the torus of the
//! remaining edge directions. The central function is the doubled
//! oriented area `2A` of the chain closed by the segment from the last
//! vertex back to the first; every area reported by this crate is that
//! doubled value.
//!
//! Modules:
//! - [`geometry`]: arms, configurations, realization, analytic gradient
//!   and Hessian of the doubled area;
//! - [`cyclic`]: enumeration of the inscribed configurations whose
//!   connecting side is a diameter, which are exactly the critical points;
//! - [`morse`]: indices via the sign count / winding number formula and
//!   via Hessian eigenvalues, perfectness of the induced Morse function;
//! - [`qc`]: the decomposition of the quasicyclic set into circles;
//! - [`oracle`]: finite-difference and grid-search cross-checks that share
//!   no code with the analytic pipeline.

pub mod cyclic;
pub mod error;
pub mod geometry;
pub mod morse;
pub mod oracle;
pub mod qc;

pub use cyclic::{
    closed_cyclic_roots, closure, duplicate, solve_closed_cyclic, solve_diacyclic, CyclicConfig,
    CyclicKind, CyclicRoot, Duplication, SignString, SolveOutcome, SolverOptions,
};
pub use error::{ArmError, Result};
pub use geometry::{
    area_gradient, area_hessian, oriented_area, oriented_area_closed, realize, AngleConfig,
    ArmLengths, ClosedPolygon, VertexPath,
};
pub use morse::{
    analyze, cubic_3arm, duplication_check, AnalysisOptions, CriticalPoint, CubicRoot,
    DuplicationCheck, MorseReport,
};
pub use oracle::{
    fd_gradient, fd_hessian, grid_critical_search, match_points, GridSpec, MatchReport,
    OracleCriticalPoint,
};
pub use qc::{enumerate_components, QcAnalysis, QcComponent, SpecialKind, SpecialPoint};
