use rayon::prelude::*;

use super::element::ElementOutput;
use super::mesh::{Element, Mesh};
use super::AssemblyError;

/// Compressed-column pattern of the global stiffness with, per element, the
/// position of every local entry in the value array.
#[derive(Clone, Debug)]
pub struct SparsePattern {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    scatter: Vec<Vec<usize>>,
}

pub fn element_dofs(el: &Element) -> Vec<usize> {
    el.nodes.iter().flat_map(|&a| [3 * a, 3 * a + 1, 3 * a + 2]).collect()
}

impl SparsePattern {
    pub fn new(mesh: &Mesh) -> Self {
        let n = mesh.n_dofs();
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for el in &mesh.elements {
            let dofs = element_dofs(el);
            for &j in &dofs {
                cols[j].extend_from_slice(&dofs);
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for c in cols.iter_mut() {
            c.sort_unstable();
            c.dedup();
            row_idx.extend_from_slice(c);
            col_ptr.push(row_idx.len());
        }
        let scatter = mesh
            .elements
            .iter()
            .map(|el| {
                let dofs = element_dofs(el);
                let nd = dofs.len();
                let mut map = vec![0; nd * nd];
                for (b, &j) in dofs.iter().enumerate() {
                    let col = &row_idx[col_ptr[j]..col_ptr[j + 1]];
                    for (a, &i) in dofs.iter().enumerate() {
                        map[a * nd + b] = col_ptr[j] + col.binary_search(&i).expect("pattern covers element");
                    }
                }
                map
            })
            .collect();
        Self { n, col_ptr, row_idx, scatter }
    }

    /// Pattern holding the given `(row, col)` entries, without element maps.
    pub fn from_entries(n: usize, entries: &[(usize, usize)]) -> Self {
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j) in entries {
            cols[j].push(i);
        }
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        for c in cols.iter_mut() {
            c.sort_unstable();
            c.dedup();
            row_idx.extend_from_slice(c);
            col_ptr.push(row_idx.len());
        }
        Self { n, col_ptr, row_idx, scatter: Vec::new() }
    }

    /// Position of entry `(row, col)` in the value array.
    pub fn position(&self, row: usize, col: usize) -> Option<usize> {
        let lo = self.col_ptr[col];
        self.row_idx[lo..self.col_ptr[col + 1]].binary_search(&row).ok().map(|p| lo + p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }
    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }
    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }
    pub fn scatter(&self, element: usize) -> &[usize] {
        &self.scatter[element]
    }

    /// `y = A x` for values laid out on this pattern.
    pub fn matvec(&self, values: &[f64], x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[p]] += values[p] * x[j];
            }
        }
        y
    }

    pub fn to_dense(&self, values: &[f64]) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                m[(self.row_idx[p], j)] += values[p];
            }
        }
        m
    }
}

/// Global vector and optional matrix values.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub vector: Vec<f64>,
    pub matrix: Option<Vec<f64>>,
}

/// Evaluates `local` on every element in parallel and scatters the results in
/// element order, so the sums do not depend on thread scheduling.
pub fn assemble<F>(mesh: &Mesh, pattern: &SparsePattern, tangent: bool, local: F) -> Result<Assembled, AssemblyError>
where
    F: Fn(&Element) -> Result<Option<ElementOutput>, AssemblyError> + Sync,
{
    let outputs: Vec<Option<ElementOutput>> = mesh.elements.par_iter().map(&local).collect::<Result<_, _>>()?;
    let mut vector = vec![0.0; mesh.n_dofs()];
    let mut matrix = if tangent { Some(vec![0.0; pattern.nnz()]) } else { None };
    for (el, out) in mesh.elements.iter().zip(outputs) {
        let Some(out) = out else { continue };
        let dofs = element_dofs(el);
        for (a, &i) in dofs.iter().enumerate() {
            vector[i] += out.force[a];
        }
        if let (Some(vals), Some(k)) = (matrix.as_mut(), out.stiffness.as_ref()) {
            let map = pattern.scatter(el.id);
            let nd = dofs.len();
            for b in 0..nd {
                for a in 0..nd {
                    vals[map[a * nd + b]] += k[(a, b)];
                }
            }
        }
    }
    Ok(Assembled { vector, matrix })
}
