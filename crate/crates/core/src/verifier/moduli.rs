use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use super::VerifierError;
use crate::constitutive::{BendingModel, PrincipalModuli};
use crate::kinematics::{CurrentState, ReferenceState};

/// Linear bending stiffness `F` of a law at the undeformed flat state with metric `metric`.
pub fn flat_stiffness(model: &BendingModel, metric: Matrix2<f64>) -> Result<Matrix3<f64>, VerifierError> {
    let r = ReferenceState::from_forms(metric, Matrix2::zeros())?;
    let s = CurrentState::from_forms(&r, metric, Matrix2::zeros())?;
    Ok(model.evaluate(&r, &s).f)
}

fn require_orthogonal(metric: &Matrix2<f64>) -> Result<(), VerifierError> {
    let (a11, a22, a12) = (metric[(0, 0)], metric[(1, 1)], metric[(0, 1)]);
    if a12.abs() > 1e-12 * (a11 * a22).sqrt() {
        return Err(VerifierError::NonOrthogonal { a12 });
    }
    Ok(())
}

/// Recovers the principal moduli that reproduce the flat stiffness of `model`
/// on an orthogonal parametrization.
pub fn extract_moduli(model: &BendingModel, metric: Matrix2<f64>) -> Result<PrincipalModuli, VerifierError> {
    require_orthogonal(&metric)?;
    let f = flat_stiffness(model, metric)?;
    let (a11, a22) = (metric[(0, 0)], metric[(1, 1)]);
    Ok(PrincipalModuli { c1: f[(0, 0)] * a11 * a11, c2: f[(1, 1)] * a22 * a22, c12: f[(0, 1)] * a11 * a22, c3: f[(2, 2)] * a11 * a22 })
}

/// Comparison of the flat stiffness of the Koiter, Helfrich and principal laws
/// built from the same `(Λ, μ, T)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub lambda: f64,
    pub mu: f64,
    pub thickness: f64,
    pub recovered: PrincipalModuli,
    pub expected: PrincipalModuli,
    /// Largest entry difference between the three stiffness matrices, relative to the largest entry.
    pub stiffness_mismatch: f64,
    pub moduli_mismatch: f64,
}

impl EquivalenceReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.stiffness_mismatch < tol && self.moduli_mismatch < tol
    }
}

/// Equivalent principal moduli of a Koiter law.
pub fn koiter_equivalent(lambda: f64, mu: f64, thickness: f64) -> PrincipalModuli {
    let s = thickness * thickness / 12.0;
    PrincipalModuli { c1: s * (lambda + 2.0 * mu), c2: s * (lambda + 2.0 * mu), c12: s * lambda, c3: s * mu }
}

pub fn linear_equivalence(lambda: f64, mu: f64, thickness: f64, metric: Matrix2<f64>) -> Result<EquivalenceReport, VerifierError> {
    let koiter = BendingModel::Koiter { lambda, mu, thickness };
    let t2 = thickness * thickness;
    let helfrich = BendingModel::Helfrich { k: t2 / 6.0 * (lambda + 2.0 * mu), kbar: -t2 * mu / 6.0, h0: 0.0 };
    let expected = koiter_equivalent(lambda, mu, thickness);
    let new = BendingModel::Principal { c1: expected.c1, c2: expected.c2, c12: expected.c12, c3: expected.c3 };
    let fk = flat_stiffness(&koiter, metric)?;
    let fh = flat_stiffness(&helfrich, metric)?;
    let fnew = flat_stiffness(&new, metric)?;
    let scale = fk.amax();
    let stiffness_mismatch = (fk - fh).amax().max((fk - fnew).amax()) / scale;
    let recovered = extract_moduli(&koiter, metric)?;
    let diff = [
        recovered.c1 - expected.c1,
        recovered.c2 - expected.c2,
        recovered.c12 - expected.c12,
        recovered.c3 - expected.c3,
    ];
    let moduli_mismatch = diff.iter().fold(0.0f64, |m, d| m.max(d.abs())) / expected.c1;
    Ok(EquivalenceReport { lambda, mu, thickness, recovered, expected, stiffness_mismatch, moduli_mismatch })
}
