use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::cases::{AnalyticCase, CaseResult};
use crate::constitutive::{BendingKind, BendingModel};

/// Parameters shared by all closed forms. Every model is calibrated to the
/// same bending modulus `c`; `mu` is the membrane modulus of the apH law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableParams {
    pub radius: f64,
    /// Current radius of the inflation and pure-bending cases.
    pub r: f64,
    pub gamma: f64,
    pub c: f64,
    pub c12: f64,
    pub c3: f64,
    pub mu: f64,
}

impl TableParams {
    /// The bending law of `kind` at these parameters.
    pub fn model(&self, kind: BendingKind) -> BendingModel {
        let c = self.c;
        match kind {
            // Λ = 0 and μT²/6 = c
            BendingKind::Koiter => BendingModel::Koiter { lambda: 0.0, mu: 6.0 * c, thickness: 1.0 },
            BendingKind::Canham => BendingModel::Canham { c },
            BendingKind::Helfrich => BendingModel::Helfrich { k: 2.0 * c, kbar: -c, h0: -0.5 / self.radius },
            BendingKind::Aph => BendingModel::Aph { mu: self.mu, thickness: (6.0 * c / self.mu).sqrt() },
            BendingKind::Principal => BendingModel::Principal { c1: c, c2: c, c12: self.c12, c3: self.c3 },
        }
    }
}

/// The five configurations reported in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableCase {
    RigidRotation,
    CounterBend,
    Inflation,
    PureBend,
    Torsion,
}

impl TableCase {
    pub const ALL: [TableCase; 5] = [TableCase::RigidRotation, TableCase::CounterBend, TableCase::Inflation, TableCase::PureBend, TableCase::Torsion];

    /// Table number in the order the cases are reported.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn analytic(self, p: &TableParams) -> AnalyticCase {
        match self {
            TableCase::RigidRotation => AnalyticCase::RigidRotation,
            TableCase::CounterBend => AnalyticCase::CounterBend,
            TableCase::Inflation => AnalyticCase::Inflation { r: p.r },
            TableCase::PureBend => AnalyticCase::PureBend { r: p.r },
            TableCase::Torsion => AnalyticCase::Torsion { gamma: p.gamma },
        }
    }

    /// Quantity labels. The torsion table lists contravariant `M0` and `τ`.
    pub fn labels(self) -> [&'static str; 3] {
        match self {
            TableCase::Torsion => ["N^a_b", "M0^ab", "tau^ab"],
            _ => ["N^a_b", "M^a_b", "tau^a_b"],
        }
    }

    /// Computed values in the convention of the table.
    pub fn reported(self, res: &CaseResult) -> [Matrix2<f64>; 3] {
        match self {
            TableCase::Torsion => [res.cauchy_mixed(), res.moment, res.tau],
            _ => [res.cauchy_mixed(), res.moment_mixed(), res.tau_mixed()],
        }
    }
}

/// Cells whose printed form contains a typesetting error, with a note.
pub const ERRATA: [(TableCase, BendingKind, usize, &str); 3] = [
    (TableCase::Inflation, BendingKind::Koiter, 0, "sign of N^1_1; N = b M / J with the listed M gives the minus sign"),
    (TableCase::Torsion, BendingKind::Canham, 2, "sign of tau^21; tau is symmetric"),
    (TableCase::Torsion, BendingKind::Koiter, 0, "undefined symbol in N^2_2, read as lambda_2^2 gamma"),
];

pub fn is_erratum(case: TableCase, kind: BendingKind, quantity: usize) -> bool {
    ERRATA.iter().any(|&(c, k, q, _)| c == case && k == kind && q == quantity)
}

fn diag(a: f64, b: f64) -> Matrix2<f64> {
    Matrix2::new(a, 0.0, 0.0, b)
}

/// Closed-form `[N, M, τ]` of a cell. `printed` returns the literal form as
/// typeset, which differs from the corrected one only in [`ERRATA`].
pub fn closed_form(case: TableCase, kind: BendingKind, p: &TableParams, printed: bool) -> [Matrix2<f64>; 3] {
    let (c, c12, c3, mu) = (p.c, p.c12, p.c3, p.mu);
    let k01 = -1.0 / p.radius;
    let z = Matrix2::zeros();
    use BendingKind::*;
    match case {
        TableCase::RigidRotation => {
            let k1 = k01;
            match kind {
                Koiter | Aph | Principal => [z; 3],
                Canham => [diag(-1.0, 1.0) * (c * k1 * k1 / 2.0), diag(1.0, 0.0) * (c * k1), diag(-3.0, 1.0) * (c * k1 * k1 / 2.0)],
                Helfrich => [z, diag(0.0, -1.0) * (c * k1), z],
            }
        }
        TableCase::CounterBend => {
            let k2 = -1.0 / p.radius;
            match kind {
                Koiter | Aph => [diag(0.0, 1.0) * (c * k2 * k2), diag(-1.0, 1.0) * (c * k2), z],
                Canham => [diag(1.0, -1.0) * (c * k2 * k2 / 2.0), diag(0.0, 1.0) * (c * k2), diag(1.0, -3.0) * (c * k2 * k2 / 2.0)],
                Helfrich => [z, diag(-1.0, 0.0) * (c * k2), z],
                Principal => [z, diag(-1.0, 1.0) * ((c - c12) * k2), diag(0.0, 1.0) * ((c12 - c) * k2 * k2)],
            }
        }
        TableCase::Inflation => {
            let k1 = -1.0 / p.r;
            let dk = k1 - k01;
            let j = p.r / p.radius;
            let e = (k01 + k1) * (k01 * k01 + k1 * k1);
            let d = 2.0 * k1.powi(4) + k01 * e;
            match kind {
                Koiter => {
                    let sign = if printed { 1.0 } else { -1.0 };
                    [diag(1.0, 0.0) * (sign * c * dk * k01 * k01 / k1), diag(-1.0, 0.0) * (c * dk * k01.powi(3) / k1.powi(3)), z]
                }
                Canham => [diag(-1.0, 1.0) * (c * k1 * k1 / 2.0), diag(1.0, 0.0) * (c * j * k1), diag(-3.0, 1.0) * (c * j * k1 * k1 / 2.0)],
                Helfrich => [
                    diag(k01 + k1, -dk) * (-c * dk / 2.0),
                    diag(dk, -k01) * (j * c),
                    diag(k01 + 3.0 * k1, -dk) * (-j * c * dk / 2.0),
                ],
                Aph => [
                    diag(mu * e - c * d * k1, mu * k1 * k1 * (k01 + k1)) * (-dk / (k01.powi(3) * k1)),
                    diag(d / (k1 * k1), k1 * k1) * (c * dk / (k01 * k01)),
                    diag(e / (k1 * k1), k01 + k1) * (-mu * dk / (k01 * k01)),
                ],
                Principal => [z; 3],
            }
        }
        TableCase::PureBend => {
            let k1 = -1.0 / p.r;
            let dk = k1 - k01;
            match kind {
                Koiter => [diag(1.0, 0.0) * (c * dk * k1), diag(1.0, 0.0) * (c * dk), z],
                Canham => [diag(-1.0, 1.0) * (c * k1 * k1 / 2.0), diag(1.0, 0.0) * (c * k1), diag(-3.0, 1.0) * (c * k1 * k1 / 2.0)],
                Helfrich => [diag(k01 + k1, -dk) * (-c * dk / 2.0), diag(dk, -k01) * c, diag(3.0 * k1 + k01, -dk) * (-c * dk / 2.0)],
                Aph => [diag(1.0, 0.0) * (2.0 * c * k1 * dk), diag(2.0, 1.0) * (c * dk), z],
                Principal => [z, diag(c, c12) * dk, diag(1.0, 0.0) * (-c * dk * k1)],
            }
        }
        TableCase::Torsion => {
            let k1 = k01;
            let g = p.gamma;
            let l2 = (g * g + 1.0).sqrt();
            match kind {
                Koiter => {
                    let last = if printed { l2 * g } else { l2 * l2 * g };
                    [Matrix2::new(g, g * g, l2 * l2, last) * (c * k1 * k1 * g), Matrix2::new(0.0, g, g, g * g) * (c * k1.powi(3)), z]
                }
                Canham => {
                    let lower = if printed { g } else { -g };
                    [
                        Matrix2::new(-1.0, -2.0 * g, 0.0, 1.0) * (c * k1 * k1 / 2.0),
                        diag(1.0, 0.0) * (c * k1.powi(3)),
                        Matrix2::new(g * g - 3.0, -g, lower, 1.0) * (c * k1.powi(4) / 2.0),
                    ]
                }
                Helfrich => [z, Matrix2::new(-g * g, g, g, -1.0) * (c * k1.powi(3)), z],
                Aph => [Matrix2::new(0.0, g, g, g * g) * mu, z, Matrix2::new(-g * g, g, g, 0.0) * (mu * k1 * k1)],
                Principal => [
                    Matrix2::new(0.0, 0.0, c * g * g + 2.0 * c3 * l2, 0.0) * (g * k1 * k1 / l2.powi(4)),
                    Matrix2::new(c12 * g, 2.0 * c3, 2.0 * c3, c * g / l2) * (g * k1.powi(3) / l2),
                    diag(c12 + 2.0 * c3, c * g * g / l2.powi(3) + 2.0 * c3 / (l2 * l2)) * (-g * g * k1.powi(4) / l2),
                ],
            }
        }
    }
}
