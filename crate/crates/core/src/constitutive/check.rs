//! Finite-difference checks of the tangent blocks.

use nalgebra::{Matrix2, Vector3};
use rand::Rng;

use super::voigt::unpack_strain;
use super::{MaterialSpec, StressState};
use crate::kinematics::{CurrentState, KinematicsError, ReferenceState};

/// A random reference state with a random current metric and curvature near it.
pub fn random_state<R: Rng>(rng: &mut R) -> (ReferenceState, Matrix2<f64>, Matrix2<f64>) {
    loop {
        let a11: f64 = rng.gen_range(0.5..2.0);
        let a22: f64 = rng.gen_range(0.5..2.0);
        let a12 = rng.gen_range(-0.4..0.4) * (a11 * a22).sqrt();
        let metric = Matrix2::new(a11, a12, a12, a22);
        let curvature = sym(rng, 1.0);
        let strain = sym(rng, 0.2);
        let change = sym(rng, 0.5);
        let current = metric + strain * 2.0;
        let Ok(r) = ReferenceState::from_forms(metric, curvature) else { continue };
        if current.determinant() > 0.1 * metric.determinant() && current[(0, 0)] > 0.0 {
            return (r, current, curvature + change);
        }
    }
}

fn sym<R: Rng>(rng: &mut R, s: f64) -> Matrix2<f64> {
    let o = rng.gen_range(-s..s);
    Matrix2::new(rng.gen_range(-s..s), o, o, rng.gen_range(-s..s))
}

/// Central differences of `τ` and `M0` with respect to the packed strain and
/// curvature, returned in the tangent slots of a [`StressState`].
pub fn fd_tangents(law: &MaterialSpec, r: &ReferenceState, metric: Matrix2<f64>, curvature: Matrix2<f64>) -> Result<StressState, KinematicsError> {
    let h = 1e-6 * (1.0 + metric.abs().max());
    let hb = 1e-6 * (1.0 + curvature.abs().max());
    let eval = |a: Matrix2<f64>, b: Matrix2<f64>| -> Result<StressState, KinematicsError> {
        Ok(law.evaluate(r, &CurrentState::from_forms(r, a, b)?))
    };
    let mut out = eval(metric, curvature)?;
    for k in 0..3 {
        let mut dv = Vector3::zeros();
        dv[k] = 1.0;
        let d = unpack_strain(&dv);
        let p = eval(metric + d * (2.0 * h), curvature)?;
        let m = eval(metric - d * (2.0 * h), curvature)?;
        out.c.set_column(k, &((p.tau - m.tau) / (2.0 * h)));
        out.e.set_column(k, &((p.moment - m.moment) / (2.0 * h)));
        let p = eval(metric, curvature + d * hb)?;
        let m = eval(metric, curvature - d * hb)?;
        out.d.set_column(k, &((p.tau - m.tau) / (2.0 * hb)));
        out.f.set_column(k, &((p.moment - m.moment) / (2.0 * hb)));
    }
    Ok(out)
}

/// Largest entrywise deviation of the four blocks, relative to the largest
/// entry of the reference tangent.
pub fn relative_error(exact: &StressState, reference: &StressState) -> f64 {
    let scale = reference.tangent().abs().max().max(f64::MIN_POSITIVE);
    (exact.tangent() - reference.tangent()).abs().max() / scale
}
