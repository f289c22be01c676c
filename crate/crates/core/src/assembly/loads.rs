use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::element::ElementOutput;
use super::mesh::{Element, Mesh};
use super::AssemblyError;
use crate::kinematics::SurfaceFrame;

/// Pressure magnitude as a function of the reference position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressureField {
    Uniform { value: f64 },
    /// `p0 sin(πX/L) sin(πY/L)`.
    Sine { amplitude: f64, length: f64 },
}

impl PressureField {
    pub fn at(&self, x: &Vector3<f64>) -> f64 {
        match *self {
            PressureField::Uniform { value } => value,
            PressureField::Sine { amplitude, length } => {
                let k = std::f64::consts::PI / length;
                amplitude * (k * x.x).sin() * (k * x.y).sin()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureLoad {
    pub field: PressureField,
    /// Acts along the current normal and contributes a load stiffness;
    /// otherwise acts along the reference normal.
    pub follower: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointLoad {
    /// Parametric location on the patch.
    pub at: [f64; 2],
    pub force: [f64; 3],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadSpec {
    /// Force per reference area.
    pub dead: Option<[f64; 3]>,
    pub pressure: Option<PressureLoad>,
    pub point_loads: Vec<PointLoad>,
}

impl LoadSpec {
    pub fn has_distributed(&self) -> bool {
        self.dead.is_some() || self.pressure.is_some()
    }

    pub fn is_configuration_dependent(&self) -> bool {
        matches!(self.pressure, Some(PressureLoad { follower: true, .. }))
    }
}

/// `[v]×`, the matrix with `[v]× w = v × w`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Distributed external force of one element and the derivative of that
/// force with respect to the element dofs.
pub fn element_external(el: &Element, x: &[Vector3<f64>], loads: &LoadSpec, tangent: bool) -> Result<ElementOutput, AssemblyError> {
    let n = el.nodes.len();
    let mut force = DVector::zeros(3 * n);
    let follower = loads.is_configuration_dependent();
    let mut stiff = if tangent && follower { Some(DMatrix::zeros(3 * n, 3 * n)) } else { None };
    for q in &el.points {
        let mut load = Vector3::zeros();
        if let Some(d) = loads.dead {
            load += Vector3::from(d) * q.weight;
        }
        if let Some(p) = &loads.pressure {
            let pv = p.field.at(&q.position);
            if p.follower {
                let frame = SurfaceFrame::from_basis(x, &q.basis).map_err(|k| AssemblyError::Kinematics { element: el.id, source: k.in_element(el.id) })?;
                let [a1, a2] = frame.tangents;
                load += a1.cross(&a2) * (pv * q.param_weight);
                if let Some(k_el) = stiff.as_mut() {
                    let (s1, s2) = (skew(&a1), skew(&a2));
                    for k in 0..n {
                        for l in 0..n {
                            let d = q.basis.d1[l];
                            let blk = (s2 * (-d[0]) + s1 * d[1]) * (pv * q.param_weight * q.basis.values[k]);
                            let mut v = k_el.fixed_view_mut::<3, 3>(3 * k, 3 * l);
                            v += blk;
                        }
                    }
                }
            } else {
                load += q.normal * (pv * q.weight);
            }
        }
        for k in 0..n {
            let v = load * q.basis.values[k];
            for i in 0..3 {
                force[3 * k + i] += v[i];
            }
        }
    }
    Ok(ElementOutput { force, stiffness: stiff })
}

/// Global vector of the point loads.
pub fn point_load_vector(mesh: &Mesh, loads: &LoadSpec) -> Result<Vec<f64>, AssemblyError> {
    let mut f = vec![0.0; mesh.n_dofs()];
    for p in &loads.point_loads {
        let [u, v] = p.at;
        let e = mesh.grid.locate(u, v);
        let b = mesh.grid.eval(&mesh.patch, e, [u, v])?;
        for (k, &node) in b.indices.iter().enumerate() {
            for i in 0..3 {
                f[3 * node + i] += b.values[k] * p.force[i];
            }
        }
    }
    Ok(f)
}
