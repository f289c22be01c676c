//! Membrane and bending laws with their stresses, moments and tangent blocks.
//!
//! Every law returns a [`StressState`]: the Kirchhoff membrane stress `τ`, the
//! bending moment `M0` (both contravariant, per reference area) and the four
//! blocks `C = ∂τ/∂ε`, `D = ∂τ/∂b`, `E = ∂M0/∂ε`, `F = ∂M0/∂b` in the Voigt
//! conventions of [`voigt`].

mod bending;
pub mod check;
mod membrane;
mod params;
mod principal;
pub mod voigt;

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

pub use bending::{aph, helfrich, helfrich_energy, koiter_bending, koiter_bending_energy};
pub use membrane::{koiter_membrane, koiter_membrane_energy, neo_hooke_membrane, neo_hooke_membrane_energy};
pub use params::{params_from_young, DerivedParams};
pub use principal::{principal, principal_energy, principal_measures, PrincipalModuli};

use crate::kinematics::{CurrentState, ReferenceState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstitutiveError {
    #[error("invalid material parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown model tag `{0}`")]
    UnknownModel(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StressState {
    pub tau: Vector3<f64>,
    pub moment: Vector3<f64>,
    pub c: Matrix3<f64>,
    pub d: Matrix3<f64>,
    pub e: Matrix3<f64>,
    pub f: Matrix3<f64>,
}

impl AddAssign for StressState {
    fn add_assign(&mut self, o: Self) {
        self.tau += o.tau;
        self.moment += o.moment;
        self.c += o.c;
        self.d += o.d;
        self.e += o.e;
        self.f += o.f;
    }
}

impl StressState {
    /// 6×6 tangent `[[C, D], [E, F]]`.
    pub fn tangent(&self) -> nalgebra::SMatrix<f64, 6, 6> {
        let mut t = nalgebra::SMatrix::<f64, 6, 6>::zeros();
        t.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.c);
        t.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.d);
        t.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.e);
        t.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.f);
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum MembraneModel {
    Koiter { lambda: f64, mu: f64 },
    NeoHooke { lambda: f64, mu: f64 },
}

impl MembraneModel {
    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        let (MembraneModel::Koiter { lambda, mu } | MembraneModel::NeoHooke { lambda, mu }) = *self;
        if !(mu > 0.0) || !(lambda >= 0.0) {
            return Err(ConstitutiveError::InvalidParameter(format!("membrane needs mu > 0 and lambda >= 0, got mu={mu}, lambda={lambda}")));
        }
        Ok(())
    }

    pub fn evaluate(&self, r: &ReferenceState, s: &CurrentState) -> StressState {
        match *self {
            MembraneModel::Koiter { lambda, mu } => koiter_membrane(lambda, mu, r, s),
            MembraneModel::NeoHooke { lambda, mu } => neo_hooke_membrane(lambda, mu, r, s),
        }
    }

    pub fn energy(&self, r: &ReferenceState, s: &CurrentState) -> f64 {
        match *self {
            MembraneModel::Koiter { lambda, mu } => koiter_membrane_energy(lambda, mu, r, s),
            MembraneModel::NeoHooke { lambda, mu } => neo_hooke_membrane_energy(lambda, mu, r, s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum BendingModel {
    Koiter { lambda: f64, mu: f64, thickness: f64 },
    Canham { c: f64 },
    Helfrich { k: f64, kbar: f64, h0: f64 },
    Aph { mu: f64, thickness: f64 },
    Principal { c1: f64, c2: f64, c12: f64, c3: f64 },
}

impl BendingModel {
    pub fn kind(&self) -> BendingKind {
        match self {
            BendingModel::Koiter { .. } => BendingKind::Koiter,
            BendingModel::Canham { .. } => BendingKind::Canham,
            BendingModel::Helfrich { .. } => BendingKind::Helfrich,
            BendingModel::Aph { .. } => BendingKind::Aph,
            BendingModel::Principal { .. } => BendingKind::Principal,
        }
    }

    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        let bad = |m: String| Err(ConstitutiveError::InvalidParameter(m));
        match *self {
            BendingModel::Koiter { lambda, mu, thickness } if !(mu > 0.0 && lambda >= 0.0 && thickness > 0.0) => {
                bad(format!("Koiter bending needs mu > 0, lambda >= 0, T > 0 (mu={mu}, lambda={lambda}, T={thickness})"))
            }
            BendingModel::Canham { c } if !(c > 0.0) => bad(format!("Canham modulus must be positive, got {c}")),
            BendingModel::Helfrich { k, .. } if !(k > 0.0) => bad(format!("Helfrich k must be positive, got {k}")),
            BendingModel::Aph { mu, thickness } if !(mu > 0.0 && thickness > 0.0) => {
                bad(format!("apH needs mu > 0 and T > 0 (mu={mu}, T={thickness})"))
            }
            BendingModel::Principal { c1, c2, c12, c3 } if !(c1 > 0.0 && c2 > 0.0 && c1 * c2 >= c12 * c12 && c3 >= 0.0) => {
                bad(format!("principal moduli must satisfy c1, c2 > 0, c1 c2 >= c12², c3 >= 0 (got {c1}, {c2}, {c12}, {c3})"))
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, r: &ReferenceState, s: &CurrentState) -> StressState {
        match *self {
            BendingModel::Koiter { lambda, mu, thickness } => koiter_bending(lambda, mu, thickness, r, s),
            BendingModel::Canham { c } => helfrich(2.0 * c, -c, 0.0, s),
            BendingModel::Helfrich { k, kbar, h0 } => helfrich(k, kbar, h0, s),
            BendingModel::Aph { mu, thickness } => aph(mu, thickness, r, s),
            BendingModel::Principal { c1, c2, c12, c3 } => principal(&PrincipalModuli { c1, c2, c12, c3 }, r, s),
        }
    }

    /// Stored energy per reference area; `None` for the apH law, whose stress
    /// and moment are not derived from a single surface potential.
    pub fn energy(&self, r: &ReferenceState, s: &CurrentState) -> Option<f64> {
        match *self {
            BendingModel::Koiter { lambda, mu, thickness } => Some(koiter_bending_energy(lambda, mu, thickness, r, s)),
            BendingModel::Canham { c } => Some(helfrich_energy(2.0 * c, -c, 0.0, s)),
            BendingModel::Helfrich { k, kbar, h0 } => Some(helfrich_energy(k, kbar, h0, s)),
            BendingModel::Aph { .. } => None,
            BendingModel::Principal { c1, c2, c12, c3 } => Some(principal_energy(&PrincipalModuli { c1, c2, c12, c3 }, r, s)),
        }
    }
}

/// Bending-law family, selectable by string tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BendingKind {
    Koiter,
    Canham,
    Helfrich,
    Aph,
    Principal,
}

impl BendingKind {
    pub const ALL: [BendingKind; 5] = [BendingKind::Koiter, BendingKind::Canham, BendingKind::Helfrich, BendingKind::Aph, BendingKind::Principal];

    pub fn tag(&self) -> &'static str {
        match self {
            BendingKind::Koiter => "koiter",
            BendingKind::Canham => "canham",
            BendingKind::Helfrich => "helfrich",
            BendingKind::Aph => "aph",
            BendingKind::Principal => "principal",
        }
    }
}

impl fmt::Display for BendingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BendingKind {
    type Err = ConstitutiveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "koiter" => Ok(BendingKind::Koiter),
            "canham" => Ok(BendingKind::Canham),
            "helfrich" => Ok(BendingKind::Helfrich),
            "aph" => Ok(BendingKind::Aph),
            "principal" | "new" => Ok(BendingKind::Principal),
            other => Err(ConstitutiveError::UnknownModel(other.to_string())),
        }
    }
}

/// A membrane law and a bending law acting together.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub membrane: Option<MembraneModel>,
    pub bending: Option<BendingModel>,
}

impl MaterialSpec {
    pub fn new(membrane: Option<MembraneModel>, bending: Option<BendingModel>) -> Result<Self, ConstitutiveError> {
        if let Some(m) = &membrane {
            m.validate()?;
        }
        if let Some(b) = &bending {
            b.validate()?;
        }
        Ok(Self { membrane, bending })
    }

    pub fn evaluate(&self, r: &ReferenceState, s: &CurrentState) -> StressState {
        let mut out = StressState::default();
        if let Some(m) = &self.membrane {
            out += m.evaluate(r, s);
        }
        if let Some(b) = &self.bending {
            out += b.evaluate(r, s);
        }
        out
    }

    pub fn energy(&self, r: &ReferenceState, s: &CurrentState) -> Option<f64> {
        let m = self.membrane.map_or(0.0, |m| m.energy(r, s));
        match &self.bending {
            Some(b) => b.energy(r, s).map(|w| w + m),
            None => Some(m),
        }
    }

    /// Whether stresses derive from a stored energy, so `E = Dᵀ` and the
    /// element tangent is symmetric.
    pub fn is_potential(&self) -> bool {
        !matches!(self.bending, Some(BendingModel::Aph { .. }))
    }
}
