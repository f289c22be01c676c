use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::mesh::{Element, QuadPoint};
use super::AssemblyError;
use crate::constitutive::{MaterialSpec, StressState};
use crate::kinematics::{second_slot, CurrentState, SurfaceFrame};

/// Local force vector and, optionally, stiffness of one element.
#[derive(Clone, Debug)]
pub struct ElementOutput {
    pub force: DVector<f64>,
    pub stiffness: Option<DMatrix<f64>>,
}

/// Kinematic and material data of one quadrature point in the current state.
pub struct PointEval {
    pub frame: SurfaceFrame,
    pub state: CurrentState,
    pub stress: StressState,
}

pub fn evaluate_point(q: &QuadPoint, x: &[Vector3<f64>], material: &MaterialSpec) -> Result<PointEval, crate::kinematics::KinematicsError> {
    let frame = SurfaceFrame::from_basis(x, &q.basis)?;
    let state = CurrentState::from_forms(&q.reference, frame.metric, frame.curvature)?;
    let stress = material.evaluate(&q.reference, &state);
    Ok(PointEval { frame, state, stress })
}

/// Covariant second derivative `N_{;αβ} = N_{,αβ} − Γ^γ_αβ N_{,γ}` in slots (11, 22, 12).
fn covariant_second(q: &QuadPoint, k: usize, frame: &SurfaceFrame) -> [f64; 3] {
    let d1 = q.basis.d1[k];
    let d2 = q.basis.d2[k];
    let mut out = [0.0; 3];
    for (slot, (a, b)) in [(0, 0), (1, 1), (0, 1)].into_iter().enumerate() {
        out[slot] = d2[second_slot(a, b)] - frame.christoffel[0][a][b] * d1[0] - frame.christoffel[1][a][b] * d1[1];
    }
    out
}

/// Internal force and stiffness from the Voigt-packed strain and curvature
/// variations.
pub fn element_internal(el: &Element, x: &[Vector3<f64>], material: &MaterialSpec, tangent: bool) -> Result<ElementOutput, AssemblyError> {
    let n = el.nodes.len();
    let nd = 3 * n;
    let mut force = DVector::zeros(nd);
    let mut stiff = if tangent { Some(DMatrix::zeros(nd, nd)) } else { None };
    let mut bmat = DMatrix::<f64>::zeros(nd, 6);
    let mut cov = vec![[0.0; 3]; n];
    for q in &el.points {
        let PointEval { frame, stress, .. } = evaluate_point(q, x, material).map_err(|k| AssemblyError::Kinematics { element: el.id, source: k.in_element(el.id) })?;
        let [a1, a2] = frame.tangents;
        let nrm = frame.normal;
        for k in 0..n {
            let [n1, n2] = q.basis.d1[k];
            cov[k] = covariant_second(q, k, &frame);
            let cols = [a1 * n1, a2 * n2, a2 * n1 + a1 * n2, nrm * cov[k][0], nrm * cov[k][1], nrm * (2.0 * cov[k][2])];
            for (c, v) in cols.iter().enumerate() {
                for i in 0..3 {
                    bmat[(3 * k + i, c)] = v[i];
                }
            }
        }
        let w = q.weight;
        let sv = nalgebra::Vector6::new(stress.tau[0], stress.tau[1], stress.tau[2], stress.moment[0], stress.moment[1], stress.moment[2]);
        force += &bmat * sv * w;
        if let Some(k_el) = stiff.as_mut() {
            let t = stress.tangent() * w;
            *k_el += &bmat * t * bmat.transpose();
            geometric_stiffness(k_el, q, &frame, &stress, &cov, w);
        }
    }
    Ok(ElementOutput { force, stiffness: stiff })
}

fn geometric_stiffness(k_el: &mut DMatrix<f64>, q: &QuadPoint, frame: &SurfaceFrame, stress: &StressState, cov: &[[f64; 3]], w: f64) {
    let n = cov.len();
    let tau = stress.tau;
    let m = stress.moment;
    let b = &frame.curvature;
    let bm = b[(0, 0)] * m[0] + b[(1, 1)] * m[1] + 2.0 * b[(0, 1)] * m[2];
    let ai = frame.metric_inv;
    let nrm = frame.normal;
    let nn = nrm * nrm.transpose();
    // m_l = M^{αβ} N_{l;αβ}
    let ml: Vec<f64> = cov.iter().map(|c| m[0] * c[0] + m[1] * c[1] + 2.0 * m[2] * c[2]).collect();
    // Σ_γ N_{k,γ} a^γ
    let grad: Vec<Vector3<f64>> = q.basis.d1.iter().map(|d| frame.dual[0] * d[0] + frame.dual[1] * d[1]).collect();
    for k in 0..n {
        let dk = q.basis.d1[k];
        for l in 0..n {
            let dl = q.basis.d1[l];
            let s_tau = tau[0] * dk[0] * dl[0] + tau[1] * dk[1] * dl[1] + tau[2] * (dk[0] * dl[1] + dk[1] * dl[0]);
            let s_a = ai[(0, 0)] * dk[0] * dl[0] + ai[(1, 1)] * dk[1] * dl[1] + ai[(0, 1)] * (dk[0] * dl[1] + dk[1] * dl[0]);
            let mut blk: Matrix3<f64> = Matrix3::identity() * s_tau - nn * (bm * s_a);
            blk -= grad[l] * nrm.transpose() * ml[k];
            blk -= nrm * grad[k].transpose() * ml[l];
            for i in 0..3 {
                for j in 0..3 {
                    k_el[(3 * k + i, 3 * l + j)] += w * blk[(i, j)];
                }
            }
        }
    }
}

/// The same force and stiffness written with explicit index contractions of
/// the fourth-order tangents; slower, used to cross-check the packed path.
pub fn element_internal_contracted(el: &Element, x: &[Vector3<f64>], material: &MaterialSpec) -> Result<ElementOutput, AssemblyError> {
    let n = el.nodes.len();
    let nd = 3 * n;
    let mut force = DVector::zeros(nd);
    let mut stiff = DMatrix::zeros(nd, nd);
    let idx = |a: usize, b: usize| if a == b { a } else { 2 };
    for q in &el.points {
        let PointEval { frame, stress, .. } = evaluate_point(q, x, material).map_err(|k| AssemblyError::Kinematics { element: el.id, source: k })?;
        let full = |v: &Vector3<f64>, a: usize, b: usize| v[idx(a, b)];
        // δε_{αβ} and δb_{αβ} per local dof
        let mut de = vec![[[0.0; 2]; 2]; nd];
        let mut db = vec![[[0.0; 2]; 2]; nd];
        for k in 0..n {
            let d1 = q.basis.d1[k];
            let d2 = q.basis.d2[k];
            for i in 0..3 {
                for a in 0..2 {
                    for b in 0..2 {
                        de[3 * k + i][a][b] = 0.5 * (d1[a] * frame.tangents[b][i] + d1[b] * frame.tangents[a][i]);
                        let cd = d2[second_slot(a, b)] - frame.christoffel[0][a][b] * d1[0] - frame.christoffel[1][a][b] * d1[1];
                        db[3 * k + i][a][b] = cd * frame.normal[i];
                    }
                }
            }
        }
        let w = q.weight;
        for r in 0..nd {
            let mut f = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    f += full(&stress.tau, a, b) * de[r][a][b] + full(&stress.moment, a, b) * db[r][a][b];
                }
            }
            force[r] += w * f;
        }
        for r in 0..nd {
            for s in 0..nd {
                let mut kk = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        for g in 0..2 {
                            for d in 0..2 {
                                let (i, j) = (idx(a, b), idx(g, d));
                                kk += stress.c[(i, j)] * de[r][a][b] * de[s][g][d]
                                    + stress.d[(i, j)] * de[r][a][b] * db[s][g][d]
                                    + stress.e[(i, j)] * db[r][a][b] * de[s][g][d]
                                    + stress.f[(i, j)] * db[r][a][b] * db[s][g][d];
                            }
                        }
                    }
                }
                stiff[(r, s)] += w * kk;
            }
        }
        let cov: Vec<[f64; 3]> = (0..n).map(|k| covariant_second(q, k, &frame)).collect();
        geometric_stiffness(&mut stiff, q, &frame, &stress, &cov, w);
    }
    Ok(ElementOutput { force, stiffness: Some(stiff) })
}

/// Stored energy of the element, when the material has one.
pub fn element_energy(el: &Element, x: &[Vector3<f64>], material: &MaterialSpec) -> Result<Option<f64>, AssemblyError> {
    let mut total = 0.0;
    for q in &el.points {
        let p = evaluate_point(q, x, material).map_err(|k| AssemblyError::Kinematics { element: el.id, source: k })?;
        match material.energy(&q.reference, &p.state) {
            Some(w) => total += q.weight * w,
            None => return Ok(None),
        }
    }
    Ok(Some(total))
}
