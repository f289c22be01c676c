use crate::assembly::{assemble, ElementOutput, Mesh, QuadPoint, SparsePattern};
use crate::solver::{LinearSolver, SolverError};
use nalgebra::{DMatrix, DVector};

/// Control-point values of scalar fields sampled at quadrature points.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveredField {
    pub names: Vec<String>,
    /// `values[field][node]`.
    pub values: Vec<Vec<f64>>,
}

impl RecoveredField {
    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i].as_slice())
    }
}

/// Row sums of the consistent mass matrix `∫ N_A N_B dA`; with a partition of
/// unity these are `∫ N_A dA`.
pub fn lumped_mass(mesh: &Mesh) -> Vec<f64> {
    let mut m = vec![0.0; mesh.n_nodes()];
    for el in &mesh.elements {
        for q in &el.points {
            for (k, &a) in el.nodes.iter().enumerate() {
                m[a] += q.basis.values[k] * q.weight;
            }
        }
    }
    m
}

/// Right-hand sides `∫ N_A f dA` of every sampled field.
fn moments<F>(mesh: &Mesh, n_fields: usize, sample: &F) -> Vec<Vec<f64>>
where
    F: Fn(usize, &QuadPoint) -> Vec<f64>,
{
    let mut rhs = vec![vec![0.0; mesh.n_nodes()]; n_fields];
    for el in &mesh.elements {
        for q in &el.points {
            let f = sample(el.id, q);
            for (k, &a) in el.nodes.iter().enumerate() {
                let w = q.basis.values[k] * q.weight;
                for (r, v) in rhs.iter_mut().zip(&f) {
                    r[a] += w * v;
                }
            }
        }
    }
    rhs
}

/// L2 projection with the lumped mass matrix: `f_A = ∫ N_A f dA / ∫ N_A dA`.
///
/// `sample(element, point)` returns one value per field name.
pub fn project_lumped<F>(mesh: &Mesh, names: &[&str], sample: F) -> RecoveredField
where
    F: Fn(usize, &QuadPoint) -> Vec<f64>,
{
    let mass = lumped_mass(mesh);
    let values = moments(mesh, names.len(), &sample)
        .into_iter()
        .map(|r| r.iter().zip(&mass).map(|(f, m)| f / m).collect())
        .collect();
    RecoveredField { names: names.iter().map(|s| s.to_string()).collect(), values }
}

/// L2 projection with the consistent mass matrix, solved three fields at a time.
pub fn project_consistent<F>(mesh: &Mesh, names: &[&str], sample: F) -> Result<RecoveredField, SolverError>
where
    F: Fn(usize, &QuadPoint) -> Vec<f64>,
{
    let pattern = SparsePattern::new(mesh);
    let mass = assemble(mesh, &pattern, true, |el| {
        let n = el.nodes.len();
        let mut k = DMatrix::zeros(3 * n, 3 * n);
        for q in &el.points {
            for a in 0..n {
                for b in 0..n {
                    let m = q.basis.values[a] * q.basis.values[b] * q.weight;
                    for i in 0..3 {
                        k[(3 * a + i, 3 * b + i)] += m;
                    }
                }
            }
        }
        Ok(Some(ElementOutput { force: DVector::zeros(3 * n), stiffness: Some(k) }))
    })?
    .matrix
    .expect("mass requested");
    let rhs = moments(mesh, names.len(), &sample);
    let mut solver = LinearSolver::new();
    let mut values = Vec::with_capacity(names.len());
    for group in rhs.chunks(3) {
        let mut b = vec![0.0; 3 * mesh.n_nodes()];
        for (i, r) in group.iter().enumerate() {
            for (a, v) in r.iter().enumerate() {
                b[3 * a + i] = *v;
            }
        }
        let x = solver.solve(&pattern, &mass, &b)?;
        for i in 0..group.len() {
            values.push((0..mesh.n_nodes()).map(|a| x[3 * a + i]).collect());
        }
    }
    Ok(RecoveredField { names: names.iter().map(|s| s.to_string()).collect(), values })
}

/// `sqrt(Σ_A m_A (f_A − g_A)²)`, the lumped L2 distance of two nodal fields.
pub fn lumped_distance(mass: &[f64], f: &[f64], g: &[f64]) -> f64 {
    mass.iter().zip(f.iter().zip(g)).map(|(m, (a, b))| m * (a - b) * (a - b)).sum::<f64>().sqrt()
}
