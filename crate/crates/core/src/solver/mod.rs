//! Boundary conditions, sparse linear solves and incremental Newton iteration.

mod boundary;
mod linear;
mod newton;

pub use boundary::{edge_quadrature, penalty_element, penalty_energy, BoundarySpec, EdgeFix, EdgeQuadrature, Side, SymmetryEdge};
pub use linear::{apply_dirichlet, is_positive_definite, LinearSolver};
pub use newton::{convergence_order, tail_order, NewtonOptions, Problem, SolveReport, StepRecord};

use crate::assembly::AssemblyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("no convergence at load factor {load_factor} after {bisections} bisections")]
    Diverged { load_factor: f64, bisections: usize },
}
