use serde::{Deserialize, Serialize};

use super::ConstitutiveError;

/// Parameters of every model derived from a Young's modulus, Poisson ratio
/// and thickness, in the surface (thickness-integrated) sense.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub lambda: f64,
    pub mu: f64,
    /// `E T³ / (12 (1 − ν²))`.
    pub bending_stiffness: f64,
    pub helfrich_k: f64,
    pub helfrich_kbar: f64,
    pub c1: f64,
    pub c2: f64,
    pub c12: f64,
    pub c3: f64,
}

pub fn params_from_young(young: f64, poisson: f64, thickness: f64) -> Result<DerivedParams, ConstitutiveError> {
    if !(young > 0.0) || !(thickness > 0.0) {
        return Err(ConstitutiveError::InvalidParameter(format!("E and T must be positive, got E={young}, T={thickness}")));
    }
    if !(poisson > -1.0 && poisson < 1.0) {
        return Err(ConstitutiveError::InvalidParameter(format!("Poisson ratio must lie in (-1, 1), got {poisson}")));
    }
    let mu = thickness * young / (2.0 * (1.0 + poisson));
    let lambda = 2.0 * mu * poisson / (1.0 - poisson);
    let t2 = thickness * thickness;
    let c = t2 / 12.0 * (lambda + 2.0 * mu);
    Ok(DerivedParams {
        lambda,
        mu,
        bending_stiffness: young * thickness.powi(3) / (12.0 * (1.0 - poisson * poisson)),
        helfrich_k: t2 / 6.0 * (lambda + 2.0 * mu),
        helfrich_kbar: -t2 * mu / 6.0,
        c1: c,
        c2: c,
        c12: t2 * lambda / 12.0,
        c3: t2 * mu / 12.0,
    })
}
