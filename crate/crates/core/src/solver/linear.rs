use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu, SymbolicLlt, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Mat, Side};

use super::SolverError;
use crate::assembly::SparsePattern;

/// Sparse LU solver that keeps the symbolic factorization of a fixed pattern.
#[derive(Default)]
pub struct LinearSolver {
    symbolic: Option<SymbolicLu<usize>>,
}

impl LinearSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&mut self, pattern: &SparsePattern, values: &[f64], rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        let n = pattern.dim();
        let sym = SymbolicSparseColMatRef::new_checked(n, n, pattern.col_ptr(), None, pattern.row_idx());
        if self.symbolic.is_none() {
            self.symbolic = Some(SymbolicLu::try_new(sym).map_err(|e| SolverError::Factorization(format!("{e:?}")))?);
        }
        let mat = SparseColMatRef::new(sym, values);
        let lu = Lu::try_new_with_symbolic(self.symbolic.clone().expect("symbolic factorization"), mat)
            .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
        let mut x = Mat::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_in_place(x.as_mut());
        let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::Factorization("singular tangent: non-finite solution".into()));
        }
        Ok(out)
    }
}

/// Whether a sparse Cholesky factorization of the lower triangle succeeds.
pub fn is_positive_definite(pattern: &SparsePattern, values: &[f64]) -> bool {
    let n = pattern.dim();
    let sym = SymbolicSparseColMatRef::new_checked(n, n, pattern.col_ptr(), None, pattern.row_idx());
    let Ok(s) = SymbolicLlt::try_new(sym, Side::Lower) else { return false };
    Llt::try_new_with_symbolic(s, SparseColMatRef::new(sym, values), Side::Lower).is_ok()
}

/// Zeroes the rows and columns of fixed dofs, puts one on their diagonal and
/// zero in the right-hand side.
pub fn apply_dirichlet(pattern: &SparsePattern, values: &mut [f64], rhs: &mut [f64], fixed: &[bool]) {
    let (cp, ri) = (pattern.col_ptr(), pattern.row_idx());
    for j in 0..pattern.dim() {
        for p in cp[j]..cp[j + 1] {
            let i = ri[p];
            if fixed[i] || fixed[j] {
                values[p] = if i == j { 1.0 } else { 0.0 };
            }
        }
        if fixed[j] {
            rhs[j] = 0.0;
        }
    }
}
