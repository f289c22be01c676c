use std::fmt;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::cases::{evaluate_case, case_states, AnalyticCase, CaseResult};
use super::tables::TableParams;
use super::VerifierError;
use crate::constitutive::voigt::unpack;
use crate::constitutive::{neo_hooke_membrane, principal, BendingKind, PrincipalModuli};

/// Classification of one model in one test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    Pass,
    /// Moments exact, membrane error vanishes only for small deformation.
    PassSmallStress,
    /// Membrane response acceptable, moment error vanishes only for small deformation.
    PassSmallMoment,
    Fail,
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Pass => "✓",
            Mark::PassSmallStress => "[✓]",
            Mark::PassSmallMoment => "{✓}",
            Mark::Fail => "✗",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixRow {
    StressFree,
    RigidRotation,
    CounterBend,
    Inflation,
    PureBend,
    Torsion,
}

impl MatrixRow {
    pub const ALL: [MatrixRow; 6] =
        [MatrixRow::StressFree, MatrixRow::RigidRotation, MatrixRow::CounterBend, MatrixRow::Inflation, MatrixRow::PureBend, MatrixRow::Torsion];

    pub fn label(self) -> &'static str {
        match self {
            MatrixRow::StressFree => "0  initially stress-free",
            MatrixRow::RigidRotation => "1a rigid rotation",
            MatrixRow::CounterBend => "1b counter bending",
            MatrixRow::Inflation => "2a inflation",
            MatrixRow::PureBend => "2b pure bending",
            MatrixRow::Torsion => "3  torsion",
        }
    }
}

/// The expected classification, columns in [`BendingKind::ALL`] order.
pub const EXPECTED_MATRIX: [[Mark; 5]; 6] = {
    use Mark::*;
    [
        [Pass, Fail, Fail, Pass, Pass],
        [Pass, Pass, Pass, Pass, Pass],
        [PassSmallStress, Fail, Fail, PassSmallStress, Pass],
        [PassSmallMoment, Fail, Fail, PassSmallMoment, Pass],
        [Fail, Fail, Fail, Fail, Pass],
        [Pass, Fail, Fail, Fail, Pass],
    ]
};

/// Slenderness at which bending-induced membrane stress is compared with a
/// membrane model.
pub const SLENDERNESS: f64 = 100.0;
/// Largest acceptable ratio of bending-induced to membrane stress.
pub const STRESS_RATIO_LIMIT: f64 = 1e-3;
const EXACT: f64 = 1e-10;

/// Parameters of the classification: `R = 1`, `c = 1`, `Λ = 0`, `R/T = 100`,
/// and the principal moduli equivalent to Koiter at `Λ = 0`.
fn matrix_params(radius: f64, r: f64) -> TableParams {
    let c = 1.0;
    let t = 1.0 / SLENDERNESS;
    TableParams { radius, r, gamma: 1.0, c, c12: 0.0, c3: 0.5 * c, mu: 6.0 * c / (t * t) }
}

fn amax(m: &Matrix2<f64>) -> f64 {
    m.amax()
}

fn eval(case: AnalyticCase, kind: BendingKind, p: &TableParams) -> Result<CaseResult, VerifierError> {
    Ok(evaluate_case(case, &p.model(kind), p.radius, 0.37, 0.21)?)
}

/// Mixed Neo-Hooke membrane stress with the same `μ` and `Λ = 0`.
fn membrane_stress(case: AnalyticCase, p: &TableParams) -> Result<f64, VerifierError> {
    let (r, s) = case_states(case, p.radius, 0.37, 0.21)?;
    let st = neo_hooke_membrane(0.0, p.mu, &r, &s);
    Ok(amax(&(unpack(&st.tau) * s.metric)))
}

fn mark(moment_ok: bool, stress_ok: bool, moment_small: bool, stress_small: bool) -> Mark {
    match (moment_ok, stress_ok) {
        (true, true) => Mark::Pass,
        (true, false) if stress_small => Mark::PassSmallStress,
        (false, true) if moment_small => Mark::PassSmallMoment,
        _ => Mark::Fail,
    }
}

/// Classifies one model in one test.
pub fn classify(row: MatrixRow, kind: BendingKind) -> Result<Mark, VerifierError> {
    let base = matrix_params(1.0, 1.0);
    let c = base.c;
    let tol_m = EXACT * c;
    let tol_n = EXACT * c;
    Ok(match row {
        MatrixRow::StressFree => {
            let r = eval(AnalyticCase::Identity, kind, &base)?;
            mark(amax(&r.moment_mixed()) < tol_m, amax(&r.cauchy_mixed()) < tol_n, false, false)
        }
        MatrixRow::RigidRotation => {
            let r0 = eval(AnalyticCase::Identity, kind, &base)?;
            let r = eval(AnalyticCase::RigidRotation, kind, &base)?;
            mark(
                amax(&(r.moment_mixed() - r0.moment_mixed())) < tol_m,
                amax(&(r.cauchy_mixed() - r0.cauchy_mixed())) < tol_n,
                false,
                false,
            )
        }
        MatrixRow::CounterBend => {
            // M^1_1 = −M^2_2 = −c κ2 with no membrane stress; κ2 halves when R doubles
            let err = |radius: f64| -> Result<(f64, f64), VerifierError> {
                let p = matrix_params(radius, radius);
                let r = eval(AnalyticCase::CounterBend, kind, &p)?;
                let k2 = -1.0 / radius;
                let target = Matrix2::new(-1.0, 0.0, 0.0, 1.0) * (c * k2);
                Ok((amax(&(r.moment_mixed() - target)), amax(&r.cauchy_mixed())))
            };
            let (m1, n1) = err(1.0)?;
            let (_, n2) = err(2.0)?;
            mark(m1 < tol_m, n1 < tol_n, false, n1 > 0.0 && n1 / n2 > 3.0)
        }
        MatrixRow::Inflation => {
            // M = 0 and no bending-induced stress; smallness as Δκ1 → 0
            let at = |delta: f64| -> Result<(f64, f64, f64), VerifierError> {
                let p = matrix_params(1.0, 1.0 / (1.0 - delta));
                let case = AnalyticCase::Inflation { r: p.r };
                let r = eval(case, kind, &p)?;
                Ok((amax(&r.moment_mixed()), amax(&(r.cauchy_bending * r.metric)), membrane_stress(case, &p)?))
            };
            let (m1, n1, s1) = at(0.2)?;
            let (m2, _, _) = at(0.1)?;
            let stress_ok = n1 < tol_n || n1 < STRESS_RATIO_LIMIT * s1;
            mark(m1 < tol_m, stress_ok, m1 > 0.0 && m1 / m2 > 1.5, false)
        }
        MatrixRow::PureBend => {
            // M = Δκ1 diag(c, c12) and N = 0; smallness as Δκ1 → 0 at second order
            let at = |delta: f64| -> Result<(f64, f64), VerifierError> {
                let p = matrix_params(1.0, 1.0 / (1.0 - delta));
                let r = eval(AnalyticCase::PureBend { r: p.r }, kind, &p)?;
                let dk = -1.0 / p.r + 1.0;
                let target = Matrix2::new(p.c, 0.0, 0.0, p.c12) * dk;
                Ok((amax(&(r.moment_mixed() - target)), amax(&r.cauchy_mixed())))
            };
            let (m1, n1) = at(0.2)?;
            let (_, n2) = at(0.1)?;
            mark(m1 < tol_m, n1 < tol_n, false, n1 > 0.0 && n1 / n2 > 3.0)
        }
        MatrixRow::Torsion => {
            // M0^{11} = 0, M0^{22} ≠ 0 and negligible bending-induced stress
            let case = AnalyticCase::Torsion { gamma: base.gamma };
            let r = eval(case, kind, &base)?;
            let m_ok = r.moment[(0, 0)].abs() < tol_m && r.moment[(1, 1)].abs() > 1e3 * tol_m;
            let n = amax(&(r.cauchy_bending * r.metric));
            mark(m_ok, n < STRESS_RATIO_LIMIT * membrane_stress(case, &base)?, false, false)
        }
    })
}

/// All rows, columns in [`BendingKind::ALL`] order.
pub fn run_matrix() -> Result<Vec<(MatrixRow, [Mark; 5])>, VerifierError> {
    MatrixRow::ALL
        .iter()
        .map(|&row| {
            let mut marks = [Mark::Fail; 5];
            for (m, kind) in marks.iter_mut().zip(BendingKind::ALL) {
                *m = classify(row, kind)?;
            }
            Ok((row, marks))
        })
        .collect()
}

/// Largest membrane stress component of the principal bending law divided by
/// that of a Neo-Hooke membrane under torsion, both with `Λ = 0`.
pub fn torsion_stress_ratio(r_over_t: f64, gamma: f64) -> Result<f64, VerifierError> {
    if !(r_over_t > 0.0) {
        return Err(VerifierError::InvalidParameter(format!("slenderness {r_over_t}")));
    }
    let (radius, mu) = (1.0, 1.0);
    let t = radius / r_over_t;
    let m = PrincipalModuli { c1: mu * t * t / 6.0, c2: mu * t * t / 6.0, c12: 0.0, c3: mu * t * t / 12.0 };
    let (r, s) = case_states(AnalyticCase::Torsion { gamma }, radius, 0.0, 0.0)?;
    let bend = principal(&m, &r, &s).tau.amax();
    let membrane = neo_hooke_membrane(0.0, mu, &r, &s).tau.amax();
    if membrane == 0.0 {
        return Ok(if bend == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(bend / membrane)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_matches_expectation() {
        let got = run_matrix().unwrap();
        for ((row, marks), want) in got.iter().zip(EXPECTED_MATRIX) {
            assert_eq!(*marks, want, "{}", row.label());
        }
    }

    #[test]
    fn torsion_ratio_scales_with_thickness_squared() {
        let a = torsion_stress_ratio(100.0, 1.0).unwrap();
        assert!((a / 1e-5 - 1.0).abs() < 0.2, "{a}");
        let b = torsion_stress_ratio(10.0, 1.0).unwrap();
        assert!((b / a - 100.0).abs() < 1e-8);
        assert_eq!(torsion_stress_ratio(100.0, 0.0).unwrap(), 0.0);
    }
}
