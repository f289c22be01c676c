//! Element forces and stiffness matrices, external loads and global assembly.

mod element;
mod loads;
mod mesh;
mod sparse;

pub use element::{element_energy, element_internal, element_internal_contracted, evaluate_point, ElementOutput, PointEval};
pub use loads::{element_external, point_load_vector, skew, LoadSpec, PointLoad, PressureField, PressureLoad};
pub use mesh::{gauss_legendre, Element, Mesh, QuadPoint};
pub use sparse::{assemble, element_dofs, Assembled, SparsePattern};

use crate::constitutive::MaterialSpec;
use crate::kinematics::KinematicsError;
use crate::splines::SplineError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssemblyError {
    #[error("element {element}: {source}")]
    Kinematics {
        element: usize,
        #[source]
        source: KinematicsError,
    },
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// Residual `f_int − λ f_ext` and its tangent at displacement `u`.
pub fn assemble_global(
    mesh: &Mesh,
    pattern: &SparsePattern,
    material: &MaterialSpec,
    loads: &LoadSpec,
    load_factor: f64,
    u: &[f64],
    tangent: bool,
) -> Result<Assembled, AssemblyError> {
    let x = mesh.positions(u);
    let mut out = assemble(mesh, pattern, tangent, |el| {
        let mut own = element_internal(el, &x, material, tangent)?;
        if loads.has_distributed() && load_factor != 0.0 {
            let ext = element_external(el, &x, loads, tangent)?;
            own.force -= ext.force * load_factor;
            if let (Some(k), Some(ke)) = (own.stiffness.as_mut(), ext.stiffness) {
                *k -= ke * load_factor;
            }
        }
        Ok(Some(own))
    })?;
    if !loads.point_loads.is_empty() {
        let fp = point_load_vector(mesh, loads)?;
        for (r, f) in out.vector.iter_mut().zip(fp) {
            *r -= load_factor * f;
        }
    }
    Ok(out)
}

/// External force vector `f_ext` at displacement `u` (unit load factor).
pub fn external_force(mesh: &Mesh, pattern: &SparsePattern, loads: &LoadSpec, u: &[f64]) -> Result<Vec<f64>, AssemblyError> {
    let x = mesh.positions(u);
    let mut out = assemble(mesh, pattern, false, |el| {
        if loads.has_distributed() {
            Ok(Some(element_external(el, &x, loads, false)?))
        } else {
            Ok(None)
        }
    })?;
    for (r, f) in out.vector.iter_mut().zip(point_load_vector(mesh, loads)?) {
        *r += f;
    }
    Ok(out.vector)
}
