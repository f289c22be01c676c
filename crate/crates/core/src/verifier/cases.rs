use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use crate::constitutive::voigt::unpack;
use crate::constitutive::{BendingModel, StressState};
use crate::kinematics::{CurrentState, KinematicsError, ReferenceState, SurfaceFrame};

/// Exact deformations of a tube `X(θ, φ) = R e_r(θ) + R φ e_3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum AnalyticCase {
    Identity,
    /// Rotation by 90° about `e_1` followed by a relabeling of the axes.
    RigidRotation,
    /// Isometric rolling of the axial lines into circles of radius `R`.
    CounterBend,
    /// Radius changes to `r` at fixed length.
    Inflation { r: f64 },
    /// Circumferential lines rolled to radius `r` without stretch.
    PureBend { r: f64 },
    /// Twist `θ → θ + γ φ`.
    Torsion { gamma: f64 },
}

/// Position, tangents and `[x_{,11}, x_{,22}, x_{,12}]` of the deformed tube.
fn current_map(case: AnalyticCase, radius: f64, theta: f64, phi: f64) -> (Vector3<f64>, [Vector3<f64>; 2], [Vector3<f64>; 3]) {
    let big = radius;
    let zero = Vector3::zeros();
    let (s, c) = theta.sin_cos();
    match case {
        AnalyticCase::Identity => (
            Vector3::new(big * c, big * s, big * phi),
            [Vector3::new(-big * s, big * c, 0.0), Vector3::new(0.0, 0.0, big)],
            [Vector3::new(-big * c, -big * s, 0.0), zero, zero],
        ),
        AnalyticCase::RigidRotation => (
            Vector3::new(big * c, big * phi, -big * s),
            [Vector3::new(-big * s, 0.0, -big * c), Vector3::new(0.0, big, 0.0)],
            [Vector3::new(-big * c, 0.0, big * s), zero, zero],
        ),
        AnalyticCase::CounterBend => {
            let (sp, cp) = phi.sin_cos();
            (
                Vector3::new(big * sp, -big * theta, big * cp),
                [Vector3::new(0.0, -big, 0.0), Vector3::new(big * cp, 0.0, -big * sp)],
                [zero, Vector3::new(-big * sp, 0.0, -big * cp), zero],
            )
        }
        AnalyticCase::Inflation { r } => (
            Vector3::new(r * c, r * s, big * phi),
            [Vector3::new(-r * s, r * c, 0.0), Vector3::new(0.0, 0.0, big)],
            [Vector3::new(-r * c, -r * s, 0.0), zero, zero],
        ),
        AnalyticCase::PureBend { r } => {
            let (sp, cp) = (big * theta / r).sin_cos();
            (
                Vector3::new(r * cp, r * sp, big * phi),
                [Vector3::new(-big * sp, big * cp, 0.0), Vector3::new(0.0, 0.0, big)],
                [Vector3::new(-cp, -sp, 0.0) * (big * big / r), zero, zero],
            )
        }
        AnalyticCase::Torsion { gamma } => {
            let (sp, cp) = (theta + gamma * phi).sin_cos();
            let radial = Vector3::new(cp, sp, 0.0);
            (
                Vector3::new(big * cp, big * sp, big * phi),
                [Vector3::new(-sp, cp, 0.0) * big, Vector3::new(-gamma * big * sp, gamma * big * cp, big)],
                [-radial * big, -radial * (big * gamma * gamma), -radial * (big * gamma)],
            )
        }
    }
}

/// Exact reference and current states at `(θ, φ)`.
pub fn case_states(case: AnalyticCase, radius: f64, theta: f64, phi: f64) -> Result<(ReferenceState, CurrentState), KinematicsError> {
    let forms = |c| {
        let (x, t, s) = current_map(c, radius, theta, phi);
        SurfaceFrame::new(x, t, s).map(|f| (f.metric, f.curvature))
    };
    let (a0, b0) = forms(AnalyticCase::Identity)?;
    let reference = ReferenceState::from_forms(a0, b0)?;
    let (a, b) = forms(case)?;
    let current = CurrentState::from_forms(&reference, a, b)?;
    Ok((reference, current))
}

/// Stress measures of one model in one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaseResult {
    /// Contravariant Kirchhoff stress `τ^{αβ}`.
    pub tau: Matrix2<f64>,
    /// Contravariant bending moment `M0^{αβ}`.
    pub moment: Matrix2<f64>,
    /// Cauchy stress `N^{αβ} = τ^{αβ}/J + b^β_γ M0^{γα}/J`.
    pub cauchy: Matrix2<f64>,
    /// Part of `N` produced by the bending response.
    pub cauchy_bending: Matrix2<f64>,
    pub metric: Matrix2<f64>,
    pub stretch: f64,
}

impl CaseResult {
    fn from_stress(st: &StressState, s: &CurrentState, tau_is_membrane: bool) -> Self {
        let tau = unpack(&st.tau);
        let moment = unpack(&st.moment);
        let j = s.stretch;
        let mixed = s.metric_inv * s.curvature;
        let from_moment = (mixed * moment / j).transpose();
        let cauchy = tau / j + from_moment;
        let cauchy_bending = if tau_is_membrane { from_moment } else { cauchy };
        Self { tau, moment, cauchy, cauchy_bending, metric: s.metric, stretch: j }
    }

    /// Mixed components `X^{αγ} a_{γβ}`.
    pub fn lower(&self, m: &Matrix2<f64>) -> Matrix2<f64> {
        m * self.metric
    }
    pub fn cauchy_mixed(&self) -> Matrix2<f64> {
        self.lower(&self.cauchy)
    }
    pub fn moment_mixed(&self) -> Matrix2<f64> {
        self.lower(&self.moment)
    }
    pub fn tau_mixed(&self) -> Matrix2<f64> {
        self.lower(&self.tau)
    }
}

/// Evaluates `model` on the exact configuration. The stress of the apH law
/// stems from its own membrane part and is not counted as bending-induced.
pub fn evaluate_case(case: AnalyticCase, model: &BendingModel, radius: f64, theta: f64, phi: f64) -> Result<CaseResult, KinematicsError> {
    let (r, s) = case_states(case, radius, theta, phi)?;
    let st = model.evaluate(&r, &s);
    Ok(CaseResult::from_stress(&st, &s, matches!(model, BendingModel::Aph { .. })))
}
