use nalgebra::Matrix2;

use super::voigt::{outer, pack, raise, sym_identity};
use super::StressState;
use crate::kinematics::{CurrentState, ReferenceState};

/// Linear (St. Venant-Kirchhoff type) membrane with respect to the reference metric.
pub fn koiter_membrane(lambda: f64, mu: f64, r: &ReferenceState, s: &CurrentState) -> StressState {
    let tr = (r.metric_inv * s.strain).trace();
    let tau = pack(&(r.metric_inv * (lambda * tr) + raise(&r.metric_inv, &s.strain) * (2.0 * mu)));
    let ai = pack(&r.metric_inv);
    StressState { tau, c: outer(&ai, &ai) * lambda + sym_identity(&r.metric_inv) * (2.0 * mu), ..StressState::default() }
}

pub fn koiter_membrane_energy(lambda: f64, mu: f64, r: &ReferenceState, s: &CurrentState) -> f64 {
    let tr = (r.metric_inv * s.strain).trace();
    let up = raise(&r.metric_inv, &s.strain);
    0.5 * lambda * tr * tr + mu * up.component_mul(&s.strain).sum()
}

/// Compressible Neo-Hookean surface.
pub fn neo_hooke_membrane(lambda: f64, mu: f64, r: &ReferenceState, s: &CurrentState) -> StressState {
    let j2 = s.stretch * s.stretch;
    let tau_m: Matrix2<f64> = s.metric_inv * (0.5 * lambda * (j2 - 1.0)) + (r.metric_inv - s.metric_inv) * mu;
    let ai = pack(&s.metric_inv);
    let c = outer(&ai, &ai) * (lambda * j2) + sym_identity(&s.metric_inv) * (2.0 * mu - lambda * (j2 - 1.0));
    StressState { tau: pack(&tau_m), c, ..StressState::default() }
}

pub fn neo_hooke_membrane_energy(lambda: f64, mu: f64, r: &ReferenceState, s: &CurrentState) -> f64 {
    let j = s.stretch;
    let i1 = r.metric_inv.component_mul(&s.metric).sum();
    0.25 * lambda * (j * j - 1.0 - 2.0 * j.ln()) + 0.5 * mu * (i1 - 2.0 - 2.0 * j.ln())
}
