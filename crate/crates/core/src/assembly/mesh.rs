use nalgebra::Vector3;

use super::AssemblyError;
use crate::kinematics::{reference_state, ReferenceState};
use crate::splines::{ElementBasis, ElementGrid, NurbsPatch};

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        // Newton on P_n from the Chebyshev-like guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Precomputed data of one quadrature point.
#[derive(Clone, Debug)]
pub struct QuadPoint {
    pub xi: [f64; 2],
    pub basis: ElementBasis,
    /// Gauss weight times the parametric element area.
    pub param_weight: f64,
    /// `param_weight · |A_1 × A_2|`.
    pub weight: f64,
    pub reference: ReferenceState,
    pub position: Vector3<f64>,
    /// Reference unit normal.
    pub normal: Vector3<f64>,
}

#[derive(Clone, Debug)]
pub struct Element {
    pub id: usize,
    /// Global control point of each local function.
    pub nodes: Vec<usize>,
    pub points: Vec<QuadPoint>,
}

impl Element {
    pub fn n_dofs(&self) -> usize {
        3 * self.nodes.len()
    }
}

/// A patch with its elements, quadrature data and reference states.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub patch: NurbsPatch,
    pub grid: ElementGrid,
    pub elements: Vec<Element>,
}

impl Mesh {
    /// Uses `(degree + 1)` Gauss points per direction unless `points` is given.
    pub fn new(patch: NurbsPatch, points: Option<usize>) -> Result<Self, AssemblyError> {
        let grid = patch.elements()?;
        let (pu, pv) = patch.degrees();
        let (gu, wu) = gauss_legendre(points.unwrap_or(pu + 1));
        let (gv, wv) = gauss_legendre(points.unwrap_or(pv + 1));
        let mut elements = Vec::with_capacity(grid.n_elements());
        for e in 0..grid.n_elements() {
            let ([u0, u1], [v0, v1]) = grid.element_range(e);
            let mut pts = Vec::with_capacity(gu.len() * gv.len());
            for (j, &sv) in gv.iter().enumerate() {
                for (i, &su) in gu.iter().enumerate() {
                    let xi = [u0 + su * (u1 - u0), v0 + sv * (v1 - v0)];
                    let basis = grid.eval(&patch, e, xi)?;
                    let (frame, reference) =
                        reference_state(patch.control_points(), &basis).map_err(|k| AssemblyError::Kinematics { element: e, source: k })?;
                    let param_weight = wu[i] * wv[j] * (u1 - u0) * (v1 - v0);
                    pts.push(QuadPoint {
                        xi,
                        weight: param_weight * frame.area_density,
                        param_weight,
                        basis,
                        reference,
                        position: frame.position,
                        normal: frame.normal,
                    });
                }
            }
            elements.push(Element { id: e, nodes: grid.connectivity(e), points: pts });
        }
        Ok(Self { patch, grid, elements })
    }

    pub fn n_nodes(&self) -> usize {
        self.patch.n_control_points()
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.n_nodes()
    }

    pub fn reference_positions(&self) -> &[Vector3<f64>] {
        self.patch.control_points()
    }

    /// Reference area by quadrature.
    pub fn area(&self) -> f64 {
        self.elements.iter().flat_map(|e| e.points.iter()).map(|q| q.weight).sum()
    }

    /// Current positions `X + u` from a dof vector.
    pub fn positions(&self, u: &[f64]) -> Vec<Vector3<f64>> {
        self.reference_positions().iter().enumerate().map(|(a, x)| x + Vector3::new(u[3 * a], u[3 * a + 1], u[3 * a + 2])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::{make_cylinder_patch, make_plate_patch};

    #[test]
    fn gauss_rule_integrates_polynomials() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for p in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn plate_area_with_skew() {
        for &skew in &[0.0, 0.3, 0.6] {
            let m = Mesh::new(make_plate_patch(12.0, 3, 3, skew).unwrap(), None).unwrap();
            assert!((m.area() - 144.0).abs() < 1e-10);
        }
    }

    #[test]
    fn half_tube_area_and_curvatures() {
        let r = 2.0;
        let pi = std::f64::consts::PI;
        let m = Mesh::new(make_cylinder_patch(r, pi * r, [0.0, pi], 4, 3, 2).unwrap(), None).unwrap();
        // the rational arc-length density is not polynomial; a richer rule resolves it
        let fine = Mesh::new(m.patch.clone(), Some(10)).unwrap();
        assert!((fine.area() - pi * r * pi * r).abs() < 1e-8, "{}", fine.area() - pi * r * pi * r);
        assert!((m.area() - pi * r * pi * r).abs() < 1e-3);
        for q in m.elements.iter().flat_map(|e| e.points.iter()) {
            assert!((q.reference.principal_curvatures[0] + 1.0 / r).abs() < 1e-10);
            assert!(q.reference.principal_curvatures[1].abs() < 1e-10);
            assert!(((q.position.x.powi(2) + q.position.z.powi(2)).sqrt() - r).abs() < 1e-12);
        }
    }
}
