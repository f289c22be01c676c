use nalgebra::Matrix2;

use super::voigt::{outer, pack, raise, sym_identity, sym_product};
use super::StressState;
use crate::kinematics::{CurrentState, ReferenceState};

/// Koiter bending: quadratic in the curvature change, measured with the reference metric.
pub fn koiter_bending(lambda: f64, mu: f64, thickness: f64, r: &ReferenceState, s: &CurrentState) -> StressState {
    let s12 = thickness * thickness / 12.0;
    let k = &s.curvature_change;
    let tr = (r.metric_inv * k).trace();
    let m = (r.metric_inv * (lambda * tr) + raise(&r.metric_inv, k) * (2.0 * mu)) * s12;
    let ai = pack(&r.metric_inv);
    let f = (outer(&ai, &ai) * lambda + sym_identity(&r.metric_inv) * (2.0 * mu)) * s12;
    StressState { moment: pack(&m), f, ..StressState::default() }
}

pub fn koiter_bending_energy(lambda: f64, mu: f64, thickness: f64, r: &ReferenceState, s: &CurrentState) -> f64 {
    let k = &s.curvature_change;
    let tr = (r.metric_inv * k).trace();
    let up = raise(&r.metric_inv, k);
    thickness * thickness / 12.0 * (0.5 * lambda * tr * tr + mu * up.component_mul(k).sum())
}

/// Helfrich bending with spontaneous curvature `h0`; Canham is the case
/// `k = 2c`, `kbar = −c`, `h0 = 0`.
pub fn helfrich(k: f64, kbar: f64, h0: f64, s: &CurrentState) -> StressState {
    let j = s.stretch;
    let h = s.mean_curvature;
    let g = s.gauss_curvature;
    let dh = h - h0;
    let ai_m = s.metric_inv;
    let bi_m = raise(&ai_m, &s.curvature);
    let ai = pack(&ai_m);
    let bi = pack(&bi_m);
    let id = sym_identity(&ai_m);
    let ab = sym_product(&ai_m, &bi_m);

    let s1 = j * (k * dh * dh - kbar * g);
    let s2 = -2.0 * k * j * dh;
    let m1 = j * (k * dh + 2.0 * kbar * h);
    let m2 = -kbar * j;

    let s1_e = (ai * (k * dh * dh + kbar * g) - bi * (2.0 * k * dh)) * j;
    let s1_b = (ai * (k * dh - 2.0 * kbar * h) + bi * kbar) * j;
    let s2_e = (ai * dh - bi) * (-2.0 * k * j);
    let s2_b = ai * (-k * j);
    let m1_e = ai * (j * (k * dh + 2.0 * kbar * h)) - bi * (j * (k + 2.0 * kbar));
    let m1_b = ai * (0.5 * j * (k + 2.0 * kbar));
    let m2_e = ai * (-kbar * j);

    StressState {
        tau: ai * s1 + bi * s2,
        moment: ai * m1 + bi * m2,
        c: outer(&ai, &s1_e) - id * (2.0 * s1) + outer(&bi, &s2_e) - ab * (4.0 * s2),
        d: outer(&ai, &s1_b) + outer(&bi, &s2_b) + id * s2,
        e: outer(&ai, &m1_e) - id * (2.0 * m1) + outer(&bi, &m2_e) - ab * (4.0 * m2),
        f: outer(&ai, &m1_b) + id * m2,
    }
}

pub fn helfrich_energy(k: f64, kbar: f64, h0: f64, s: &CurrentState) -> f64 {
    let dh = s.mean_curvature - h0;
    s.stretch * (k * dh * dh + kbar * s.gauss_curvature)
}

/// Analytically thickness-integrated incompressible Neo-Hookean shell.
/// Carries its own membrane response; `mu` is the surface shear modulus.
pub fn aph(mu: f64, thickness: f64, r: &ReferenceState, s: &CurrentState) -> StressState {
    let ca = mu * thickness * thickness / 6.0;
    let j2 = s.stretch * s.stretch;
    let ai_m = s.metric_inv;
    let bi_m = raise(&ai_m, &s.curvature);
    let ai = pack(&ai_m);
    let bi = pack(&bi_m);
    let id = sym_identity(&ai_m);
    let dh = s.mean_curvature - r.mean_curvature;
    let p_m: Matrix2<f64> = bi_m + ai_m * (2.0 * dh);
    let p = pack(&p_m);
    let ref_b = pack(&raise(&r.metric_inv, &r.curvature));
    let aa = outer(&ai, &ai);
    let scale = ca / j2;
    StressState {
        tau: (pack(&r.metric_inv) - ai / j2) * mu,
        moment: ref_b * (-ca) + p * scale,
        c: (id + aa) * (2.0 * mu / j2),
        d: Default::default(),
        e: (outer(&p, &ai) * -2.0 - sym_product(&ai_m, &bi_m) * 4.0 - outer(&ai, &bi) * 2.0 - id * (4.0 * dh)) * scale,
        f: (id + aa) * scale,
    }
}
