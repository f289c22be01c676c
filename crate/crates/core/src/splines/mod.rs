//! NURBS patches, Bézier extraction and basis evaluation.

mod bezier;
mod generators;
mod knots;
mod patch;

pub use bezier::{bernstein, bezier_extraction, elevate_bezier};
pub use generators::{cylinder_point, greville, make_cylinder_patch, make_plate_patch};
pub use knots::{insert_knot, make_knot_vector, spans, validate_clamped, Span};
pub use patch::{eval_basis, ElementBasis, ElementGrid, NurbsPatch};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplineError {
    #[error("degree {degree} is too low, C1 continuity needs degree >= 2")]
    DegreeTooLow { degree: usize },
    #[error("at least one element is required")]
    EmptyMesh,
    #[error("knot vector is not clamped")]
    NotClamped,
    #[error("knot vector is decreasing or not finite")]
    DecreasingKnots,
    #[error("control grid has {found} entries, expected {expected}")]
    GridMismatch { expected: usize, found: usize },
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("parameter {xi} lies outside span [{lo}, {hi}]")]
    OutsideSpan { xi: f64, lo: f64, hi: f64 },
    #[error("element {0} does not exist")]
    InvalidElement(usize),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("patch JSON: {0}")]
    Json(String),
}
