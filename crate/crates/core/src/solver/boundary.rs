use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::assembly::{gauss_legendre, skew, AssemblyError, Element, ElementOutput, Mesh};
use crate::kinematics::SurfaceFrame;
use crate::splines::ElementBasis;

/// A boundary edge of the patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    UMin,
    UMax,
    VMin,
    VMax,
}

impl Side {
    /// Parametric direction running along the edge.
    pub fn along(self) -> usize {
        match self {
            Side::UMin | Side::UMax => 1,
            Side::VMin | Side::VMax => 0,
        }
    }

    /// Control points on the edge.
    pub fn nodes(self, mesh: &Mesh) -> Vec<usize> {
        let (nu, nv) = mesh.patch.grid();
        let p = &mesh.patch;
        match self {
            Side::UMin => (0..nv).map(|j| p.cp_index(0, j)).collect(),
            Side::UMax => (0..nv).map(|j| p.cp_index(nu - 1, j)).collect(),
            Side::VMin => (0..nu).map(|i| p.cp_index(i, 0)).collect(),
            Side::VMax => (0..nu).map(|i| p.cp_index(i, nv - 1)).collect(),
        }
    }

    /// Elements adjacent to the edge.
    pub fn elements(self, mesh: &Mesh) -> Vec<usize> {
        let (su, sv) = mesh.grid.shape();
        let g = &mesh.grid;
        match self {
            Side::UMin => (0..sv).map(|j| g.element_id(0, j)).collect(),
            Side::UMax => (0..sv).map(|j| g.element_id(su - 1, j)).collect(),
            Side::VMin => (0..su).map(|i| g.element_id(i, 0)).collect(),
            Side::VMax => (0..su).map(|i| g.element_id(i, sv - 1)).collect(),
        }
    }

    /// Number of elements along the edge.
    pub fn element_count(self, mesh: &Mesh) -> usize {
        let (su, sv) = mesh.grid.shape();
        if self.along() == 0 {
            su
        } else {
            sv
        }
    }
}

/// Displacement components held at zero on every control point of an edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFix {
    pub side: Side,
    pub components: Vec<usize>,
}

/// Mirror symmetry about the coordinate plane normal to `axis`.
///
/// The edge control points keep their `axis` coordinate and the penalty
/// `ε/2 ∫ (n · e_axis)² dS` drives the surface normal into the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryEdge {
    pub side: Side,
    pub axis: usize,
    pub penalty: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub fixed: Vec<EdgeFix>,
    pub symmetry: Vec<SymmetryEdge>,
    /// Individual `(node, component)` pairs.
    pub fixed_dofs: Vec<(usize, usize)>,
}

impl BoundarySpec {
    pub fn fixed_mask(&self, mesh: &Mesh) -> Vec<bool> {
        let mut mask = vec![false; mesh.n_dofs()];
        for f in &self.fixed {
            for a in f.side.nodes(mesh) {
                for &c in &f.components {
                    mask[3 * a + c] = true;
                }
            }
        }
        for s in &self.symmetry {
            for a in s.side.nodes(mesh) {
                mask[3 * a + s.axis] = true;
            }
        }
        for &(a, c) in &self.fixed_dofs {
            mask[3 * a + c] = true;
        }
        mask
    }
}

/// Gauss points on the part of element `el` lying on `side`.
pub struct EdgeQuadrature {
    pub element: usize,
    pub points: Vec<(ElementBasis, f64)>,
}

/// Bases and reference line weights `w |A_t| dt` along an edge.
pub fn edge_quadrature(mesh: &Mesh, side: Side) -> Result<Vec<EdgeQuadrature>, AssemblyError> {
    let (pu, pv) = mesh.patch.degrees();
    let t = side.along();
    let (gx, gw) = gauss_legendre(if t == 0 { pu } else { pv } + 1);
    side.elements(mesh)
        .into_iter()
        .map(|e| {
            let (ru, rv) = mesh.grid.element_range(e);
            let fixed = match side {
                Side::UMin => ru[0],
                Side::UMax => ru[1],
                Side::VMin => rv[0],
                Side::VMax => rv[1],
            };
            let range = if t == 0 { ru } else { rv };
            let mut points = Vec::with_capacity(gx.len());
            for (s, w) in gx.iter().zip(&gw) {
                let run = range[0] + s * (range[1] - range[0]);
                let xi = if t == 0 { [run, fixed] } else { [fixed, run] };
                let basis = mesh.grid.eval(&mesh.patch, e, xi)?;
                let (_, d1, _) = basis.derivatives(mesh.reference_positions());
                points.push((basis, w * (range[1] - range[0]) * d1[t].norm()));
            }
            Ok(EdgeQuadrature { element: e, points })
        })
        .collect()
}

/// Penalty force and stiffness of one edge segment in the element's local dof order.
pub fn penalty_element(
    el: &Element,
    edge: &EdgeQuadrature,
    x: &[Vector3<f64>],
    axis: usize,
    penalty: f64,
    tangent: bool,
) -> Result<ElementOutput, AssemblyError> {
    let n = el.nodes.len();
    let mut force = DVector::zeros(3 * n);
    let mut stiff = tangent.then(|| DMatrix::zeros(3 * n, 3 * n));
    let e = Vector3::ith(axis, 1.0);
    for (basis, ds) in &edge.points {
        let frame = SurfaceFrame::from_basis(x, basis).map_err(|k| AssemblyError::Kinematics { element: el.id, source: k.in_element(el.id) })?;
        let [a1, a2] = frame.tangents;
        let nrm = frame.normal;
        let len = frame.area_density;
        let g = nrm.dot(&e);
        let dg = (e - nrm * g) / len;
        let hess = (-(e * nrm.transpose() + nrm * e.transpose()) - Matrix3::identity() * g + nrm * nrm.transpose() * (3.0 * g)) / (len * len);
        let (s1, s2) = (skew(&a1), skew(&a2));
        let dm: Vec<Matrix3<f64>> = basis.d1.iter().map(|d| s1 * d[1] - s2 * d[0]).collect();
        let grads: Vec<Vector3<f64>> = dm.iter().map(|m| m.transpose() * dg).collect();
        let scale = penalty * ds;
        for k in 0..n {
            let f = grads[k] * (scale * g);
            for i in 0..3 {
                force[3 * k + i] += f[i];
            }
        }
        if let Some(kmat) = stiff.as_mut() {
            let sg = skew(&dg);
            for k in 0..n {
                for l in 0..n {
                    let (dk, dl) = (basis.d1[k], basis.d1[l]);
                    let second = dm[k].transpose() * hess * dm[l] - sg * (dk[0] * dl[1] - dk[1] * dl[0]);
                    let blk = (grads[k] * grads[l].transpose() + second * g) * scale;
                    let mut v = kmat.fixed_view_mut::<3, 3>(3 * k, 3 * l);
                    v += blk;
                }
            }
        }
    }
    Ok(ElementOutput { force, stiffness: stiff })
}

/// Penalty energy of one edge segment.
pub fn penalty_energy(el: &Element, edge: &EdgeQuadrature, x: &[Vector3<f64>], axis: usize, penalty: f64) -> Result<f64, AssemblyError> {
    let mut w = 0.0;
    for (basis, ds) in &edge.points {
        let frame = SurfaceFrame::from_basis(x, basis).map_err(|k| AssemblyError::Kinematics { element: el.id, source: k.in_element(el.id) })?;
        w += 0.5 * penalty * frame.normal[axis].powi(2) * ds;
    }
    Ok(w)
}
