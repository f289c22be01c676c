use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::voigt::{outer, pack};
use super::StressState;
use crate::kinematics::{CurrentState, ReferenceState};

/// Moduli of the bending law written in the measures taken along the initial
/// principal directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalModuli {
    pub c1: f64,
    pub c2: f64,
    pub c12: f64,
    pub c3: f64,
}

/// Bending measures `k1, k2, k12` and the data needed for their derivatives.
struct Measures {
    dir: [Vector3<f64>; 3],
    stretch: [f64; 2],
    normal_curv: [f64; 2],
    twist_ratio: f64,
    root: f64,
    k: [f64; 3],
}

fn measures(r: &ReferenceState, s: &CurrentState) -> Measures {
    let l: &[Vector2<f64>; 2] = &r.principal_dirs;
    let dir = [
        pack(&(l[0] * l[0].transpose())),
        pack(&(l[1] * l[1].transpose())),
        pack(&(l[0] * l[1].transpose() + l[1] * l[0].transpose())),
    ];
    let stretch = s.stretches;
    let b: &Matrix2<f64> = &s.curvature;
    let normal_curv = [l[0].dot(&(b * l[0])), l[1].dot(&(b * l[1]))];
    let root = (stretch[0] * stretch[1]).sqrt();
    let twist_ratio = 2.0 * l[0].dot(&(b * l[1])) / root;
    let k = [
        normal_curv[0] / stretch[0] - r.principal_curvatures[0],
        normal_curv[1] / stretch[1] - r.principal_curvatures[1],
        twist_ratio - r.twist_curvature,
    ];
    Measures { dir, stretch, normal_curv, twist_ratio, root, k }
}

pub fn principal(m: &PrincipalModuli, r: &ReferenceState, s: &CurrentState) -> StressState {
    let q = measures(r, s);
    let [l1, l2, l3] = q.dir;
    let [s1, s2] = q.stretch;
    let f = q.twist_ratio;
    let v = l1 / (s1 * s1) + l2 / (s2 * s2);

    let grad_e = [l1 * (-q.normal_curv[0] / s1.powi(3)), l2 * (-q.normal_curv[1] / s2.powi(3)), v * (-0.5 * f)];
    let grad_b = [l1 / s1, l2 / s2, l3 / q.root];
    let hess_ee = [
        outer(&l1, &l1) * (3.0 * q.normal_curv[0] / s1.powi(5)),
        outer(&l2, &l2) * (3.0 * q.normal_curv[1] / s2.powi(5)),
        outer(&v, &v) * (0.25 * f) + (outer(&l1, &l1) / s1.powi(4) + outer(&l2, &l2) / s2.powi(4)) * f,
    ];
    let hess_eb = [outer(&l1, &l1) * (-1.0 / s1.powi(3)), outer(&l2, &l2) * (-1.0 / s2.powi(3)), outer(&v, &l3) * (-0.5 / q.root)];

    let moduli = Matrix3::new(m.c1, m.c12, 0.0, m.c12, m.c2, 0.0, 0.0, 0.0, m.c3);
    let w = moduli * Vector3::from(q.k);

    let mut out = StressState::default();
    for i in 0..3 {
        out.tau += grad_e[i] * w[i];
        out.moment += grad_b[i] * w[i];
        out.c += hess_ee[i] * w[i];
        out.d += hess_eb[i] * w[i];
        for j in 0..3 {
            let mij = moduli[(i, j)];
            if mij != 0.0 {
                out.c += outer(&grad_e[i], &grad_e[j]) * mij;
                out.d += outer(&grad_e[i], &grad_b[j]) * mij;
                out.f += outer(&grad_b[i], &grad_b[j]) * mij;
            }
        }
    }
    out.e = out.d.transpose();
    out
}

pub fn principal_energy(m: &PrincipalModuli, r: &ReferenceState, s: &CurrentState) -> f64 {
    let [k1, k2, k12] = measures(r, s).k;
    0.5 * m.c1 * k1 * k1 + m.c12 * k1 * k2 + 0.5 * m.c2 * k2 * k2 + 0.5 * m.c3 * k12 * k12
}

/// `(k1, k2, k12)` at a state.
pub fn principal_measures(r: &ReferenceState, s: &CurrentState) -> [f64; 3] {
    measures(r, s).k
}
