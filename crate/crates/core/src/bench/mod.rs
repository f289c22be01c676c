//! Benchmark problems with their exact references, drivers for single runs
//! and refinement studies, stress recovery and file export.

mod defs;
mod export;
mod oracles;
mod projection;
mod run;

pub use defs::{BenchmarkDef, BenchmarkName, Monitor};
pub use export::{check_vtk, control_net_vtk, surface_vtk, trace_csv, write_run, write_trace, Manifest};
pub use oracles::{navier_center_deflection, PinchedCylinder};
pub use projection::{lumped_distance, lumped_mass, project_consistent, project_lumped, RecoveredField};
pub use run::{
    node_displacement, observed_order, recover, run, run_convergence, ConvergenceRow, ConvergenceStudy, RunOutput, RunSummary, Timings, Trace,
    FIELD_NAMES,
};

use std::path::PathBuf;

use crate::assembly::AssemblyError;
use crate::constitutive::ConstitutiveError;
use crate::solver::SolverError;
use crate::splines::SplineError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Material(#[from] ConstitutiveError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("Newton iteration failed at load factor {load_factor} after {bisections} bisections; {} steps completed", completed.rows.len())]
    Diverged { load_factor: f64, bisections: usize, completed: Trace },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(String),
}
