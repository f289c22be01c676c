//! Voigt packing of symmetric 2×2 tensors in the order (11, 22, 12).
//!
//! Stress-like tensors keep raw components `[S¹¹, S²², S¹²]`. Strain-like
//! arguments are packed with a doubled shear slot, `[e₁₁, e₂₂, 2e₁₂]`, so the
//! gradient of a scalar with respect to the packed strain is the stress-like
//! packing of its symmetric derivative.

use nalgebra::{Matrix2, Matrix3, Vector3};

pub const PAIRS: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];

/// Stress-like packing of the symmetric part of `m`.
pub fn pack(m: &Matrix2<f64>) -> Vector3<f64> {
    Vector3::new(m[(0, 0)], m[(1, 1)], 0.5 * (m[(0, 1)] + m[(1, 0)]))
}

/// Strain-like packing of the symmetric part of `m`.
pub fn pack_strain(m: &Matrix2<f64>) -> Vector3<f64> {
    Vector3::new(m[(0, 0)], m[(1, 1)], m[(0, 1)] + m[(1, 0)])
}

pub fn unpack(v: &Vector3<f64>) -> Matrix2<f64> {
    Matrix2::new(v[0], v[2], v[2], v[1])
}

pub fn unpack_strain(v: &Vector3<f64>) -> Matrix2<f64> {
    Matrix2::new(v[0], 0.5 * v[2], 0.5 * v[2], v[1])
}

/// `¼(p^{αγ}q^{βδ} + p^{αδ}q^{βγ} + q^{αγ}p^{βδ} + q^{αδ}p^{βγ})` over Voigt pairs.
pub fn sym_product(p: &Matrix2<f64>, q: &Matrix2<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| {
        let (a, b) = PAIRS[i];
        let (g, d) = PAIRS[j];
        0.25 * (p[(a, g)] * q[(b, d)] + p[(a, d)] * q[(b, g)] + q[(a, g)] * p[(b, d)] + q[(a, d)] * p[(b, g)])
    })
}

/// Symmetric fourth-order identity raised with `inv`.
pub fn sym_identity(inv: &Matrix2<f64>) -> Matrix3<f64> {
    sym_product(inv, inv)
}

pub fn outer(u: &Vector3<f64>, v: &Vector3<f64>) -> Matrix3<f64> {
    u * v.transpose()
}

/// `inv · m · inv`.
pub fn raise(inv: &Matrix2<f64>, m: &Matrix2<f64>) -> Matrix2<f64> {
    inv * m * inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        let m = Matrix2::new(1.0, 2.0, 2.0, 3.0);
        assert_eq!(unpack(&pack(&m)), m);
        assert_eq!(unpack_strain(&pack_strain(&m)), m);
        assert_eq!(pack(&m).dot(&pack_strain(&m)), (m.transpose() * m).trace());
    }

    #[test]
    fn identity_acts_as_raise() {
        let inv = Matrix2::new(2.0, 0.3, 0.3, 0.7);
        let e = Matrix2::new(0.1, -0.4, -0.4, 0.25);
        let lhs = sym_identity(&inv) * pack_strain(&e);
        assert!((lhs - pack(&raise(&inv, &e))).norm() < 1e-15);
    }
}
