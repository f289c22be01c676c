//! Exact deformations of a tube, closed-form stresses of every bending law on
//! them, the resulting pass/fail classification, and linear moduli equivalence.

mod cases;
mod matrix;
mod moduli;
mod tables;

pub use cases::{case_states, evaluate_case, AnalyticCase, CaseResult};
pub use matrix::{classify, run_matrix, torsion_stress_ratio, Mark, MatrixRow, EXPECTED_MATRIX, SLENDERNESS, STRESS_RATIO_LIMIT};
pub use moduli::{extract_moduli, flat_stiffness, koiter_equivalent, linear_equivalence, EquivalenceReport};
pub use tables::{closed_form, is_erratum, TableCase, TableParams, ERRATA};

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constitutive::BendingKind;
use crate::kinematics::KinematicsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifierError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("parametrization is not orthogonal (A_12 = {a12})")]
    NonOrthogonal { a12: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub const RELATIVE_TOL: f64 = 1e-10;
pub const ZERO_TOL: f64 = 1e-12;

/// Agreement of one closed-form cell with the computation over all draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub table: usize,
    pub case: TableCase,
    pub model: String,
    pub quantity: String,
    /// Largest error, relative for nonzero entries and scaled for zero entries.
    pub error: f64,
    pub passed: bool,
    /// The literal printed form agrees as well.
    pub printed_agrees: bool,
    pub erratum: bool,
}

/// Error of `computed` against `expected`: entries larger than `ZERO_TOL·scale`
/// are compared relatively, the others absolutely against `scale`.
fn cell_error(computed: &Matrix2<f64>, expected: &Matrix2<f64>, scale: f64) -> (f64, bool) {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (c, e) in computed.iter().zip(expected.iter()) {
        if e.abs() > ZERO_TOL * scale {
            let rel = (c - e).abs() / e.abs();
            worst = worst.max(rel);
            ok &= rel < RELATIVE_TOL;
        } else {
            let abs = (c - e).abs() / scale;
            worst = worst.max(abs);
            ok &= abs < ZERO_TOL;
        }
    }
    (worst, ok)
}

/// Random parameter draw covering all closed forms.
pub fn random_params<R: Rng>(rng: &mut R) -> TableParams {
    let radius = rng.gen_range(0.5..5.0);
    let c = rng.gen_range(0.1..10.0);
    let r = radius * if rng.gen_bool(0.5) { rng.gen_range(0.3..0.9) } else { rng.gen_range(1.1..3.0) };
    TableParams {
        radius,
        r,
        gamma: rng.gen_range(0.2..2.0),
        c,
        c12: rng.gen_range(0.0..0.9) * c,
        c3: rng.gen_range(0.1..1.0) * c,
        mu: rng.gen_range(0.5..5.0),
    }
}

/// Compares every cell at `draws` random parameter sets and material points.
pub fn check_tables(draws: usize, seed: u64) -> Result<Vec<CellReport>, VerifierError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<CellReport> = Vec::new();
    for draw in 0..draws {
        let p = random_params(&mut rng);
        let (theta, phi) = (rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.0..1.0));
        for case in TableCase::ALL {
            for kind in BendingKind::ALL {
                let res = evaluate_case(case.analytic(&p), &p.model(kind), p.radius, theta, phi)?;
                let computed = case.reported(&res);
                let expected = closed_form(case, kind, &p, false);
                let printed = closed_form(case, kind, &p, true);
                // one scale per cell group: stress and moment magnitudes at this draw
                let scale = computed.iter().chain(expected.iter()).map(|m| m.amax()).fold(p.c / p.radius.powi(2), f64::max);
                for (q, label) in case.labels().iter().enumerate() {
                    let (error, passed) = cell_error(&computed[q], &expected[q], scale);
                    let (_, printed_ok) = cell_error(&computed[q], &printed[q], scale);
                    if draw == 0 {
                        cells.push(CellReport {
                            table: case.number(),
                            case,
                            model: kind.tag().to_string(),
                            quantity: label.to_string(),
                            error,
                            passed,
                            printed_agrees: printed_ok,
                            erratum: is_erratum(case, kind, q),
                        });
                    } else {
                        let cell = cells
                            .iter_mut()
                            .find(|c| c.case == case && c.model == kind.tag() && c.quantity == *label)
                            .expect("cell registered on the first draw");
                        cell.error = cell.error.max(error);
                        cell.passed &= passed;
                        cell.printed_agrees &= printed_ok;
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// Everything `verify` checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub draws: usize,
    pub cells: Vec<CellReport>,
    pub tables_passed: bool,
    pub matrix: Vec<(MatrixRow, Vec<Mark>)>,
    pub matrix_passed: bool,
    pub torsion_ratio: f64,
    pub torsion_passed: bool,
    pub equivalence: EquivalenceReport,
    pub equivalence_passed: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.tables_passed && self.matrix_passed && self.torsion_passed && self.equivalence_passed
    }
}

pub fn run_verification(draws: usize, seed: u64) -> Result<VerifyReport, VerifierError> {
    let cells = check_tables(draws, seed)?;
    let tables_passed = cells.iter().all(|c| c.passed);
    let rows = run_matrix()?;
    let matrix_passed = rows.iter().zip(EXPECTED_MATRIX).all(|((_, got), want)| *got == want);
    let torsion_ratio = torsion_stress_ratio(SLENDERNESS, 1.0)?;
    let torsion_passed = (torsion_ratio / 1e-5 - 1.0).abs() <= 0.2;
    let metric = Matrix2::new(1.7, 0.0, 0.0, 0.6);
    let equivalence = linear_equivalence(0.8, 1.3, 0.12, metric)?;
    let equivalence_passed = equivalence.passed(1e-12);
    Ok(VerifyReport {
        draws,
        cells,
        tables_passed,
        matrix: rows.into_iter().map(|(r, m)| (r, m.to_vec())).collect(),
        matrix_passed,
        torsion_ratio,
        torsion_passed,
        equivalence,
        equivalence_passed,
    })
}
