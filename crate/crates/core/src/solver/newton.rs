use serde::{Deserialize, Serialize};

use super::boundary::{edge_quadrature, penalty_element, BoundarySpec, EdgeQuadrature};
use super::linear::{apply_dirichlet, LinearSolver};
use super::SolverError;
use crate::assembly::{assemble, assemble_global, external_force, Assembled, ElementOutput, LoadSpec, Mesh, SparsePattern};
use crate::constitutive::MaterialSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    /// Relative to `max(‖λ f_ext‖, 1)`.
    pub tolerance: f64,
    /// Bound on `|Δu·r|` relative to the first iterate; stops iterations that
    /// reach the round-off floor of the residual before `tolerance`.
    pub energy_tolerance: f64,
    pub max_iterations: usize,
    /// Nesting depth of step halvings before giving up.
    pub max_bisections: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, energy_tolerance: 1e-16, max_iterations: 25, max_bisections: 4 }
    }
}

/// One converged load increment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub load_factor: f64,
    pub iterations: usize,
    /// Free-dof residual norm before each update and at convergence.
    pub residuals: Vec<f64>,
    /// Energy norm `sqrt|du · r|` of each Newton correction.
    #[serde(default)]
    pub energies: Vec<f64>,
    pub tolerance: f64,
    /// Number of halvings that produced this increment.
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub steps: Vec<StepRecord>,
    pub displacement: Vec<f64>,
}

struct Segment {
    axis: usize,
    penalty: f64,
    quadrature: EdgeQuadrature,
}

/// A discretized shell with material, loads and supports.
pub struct Problem {
    pub mesh: Mesh,
    pub pattern: SparsePattern,
    pub material: MaterialSpec,
    pub loads: LoadSpec,
    pub boundary: BoundarySpec,
    fixed: Vec<bool>,
    segments: Vec<Vec<Segment>>,
    load_norm: f64,
}

impl Problem {
    pub fn new(mesh: Mesh, material: MaterialSpec, loads: LoadSpec, boundary: BoundarySpec) -> Result<Self, SolverError> {
        let pattern = SparsePattern::new(&mesh);
        let fixed = boundary.fixed_mask(&mesh);
        let mut segments: Vec<Vec<Segment>> = (0..mesh.elements.len()).map(|_| Vec::new()).collect();
        for s in &boundary.symmetry {
            for quadrature in edge_quadrature(&mesh, s.side)? {
                segments[quadrature.element].push(Segment { axis: s.axis, penalty: s.penalty, quadrature });
            }
        }
        let f = external_force(&mesh, &pattern, &loads, &vec![0.0; mesh.n_dofs()])?;
        let load_norm = free_norm(&f, &fixed);
        Ok(Self { mesh, pattern, material, loads, boundary, fixed, segments, load_norm })
    }

    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    /// Norm of the reference external force on free dofs.
    pub fn load_norm(&self) -> f64 {
        self.load_norm
    }

    /// Out-of-balance force `f_int + f_pen − λ f_ext` and its tangent.
    pub fn residual(&self, u: &[f64], load_factor: f64, tangent: bool) -> Result<Assembled, SolverError> {
        let mut out = assemble_global(&self.mesh, &self.pattern, &self.material, &self.loads, load_factor, u, tangent)?;
        if self.boundary.symmetry.is_empty() {
            return Ok(out);
        }
        let x = self.mesh.positions(u);
        let pen = assemble(&self.mesh, &self.pattern, tangent, |el| {
            let mut acc: Option<ElementOutput> = None;
            for s in &self.segments[el.id] {
                let o = penalty_element(el, &s.quadrature, &x, s.axis, s.penalty, tangent)?;
                acc = Some(match acc {
                    None => o,
                    Some(mut a) => {
                        a.force += o.force;
                        if let (Some(k), Some(ko)) = (a.stiffness.as_mut(), o.stiffness) {
                            *k += ko;
                        }
                        a
                    }
                });
            }
            Ok(acc)
        })?;
        for (r, p) in out.vector.iter_mut().zip(pen.vector) {
            *r += p;
        }
        if let (Some(k), Some(kp)) = (out.matrix.as_mut(), pen.matrix) {
            for (a, b) in k.iter_mut().zip(kp) {
                *a += b;
            }
        }
        Ok(out)
    }

    /// Single solve with the tangent of the reference configuration.
    pub fn solve_linear(&self, load_factor: f64) -> Result<Vec<f64>, SolverError> {
        let zero = vec![0.0; self.mesh.n_dofs()];
        let asm = self.residual(&zero, 0.0, true)?;
        let f = external_force(&self.mesh, &self.pattern, &self.loads, &zero)?;
        let mut rhs: Vec<f64> = f.iter().zip(&asm.vector).map(|(f, r)| load_factor * f - r).collect();
        let mut k = asm.matrix.expect("tangent requested");
        apply_dirichlet(&self.pattern, &mut k, &mut rhs, &self.fixed);
        LinearSolver::new().solve(&self.pattern, &k, &rhs)
    }
}

struct Equilibrium {
    u: Vec<f64>,
    residuals: Vec<f64>,
    energies: Vec<f64>,
    tolerance: f64,
}

impl Problem {
    /// Full Newton iteration at a fixed load factor starting from `u`.
    fn equilibrate(&self, solver: &mut LinearSolver, u: &[f64], load_factor: f64, opts: &NewtonOptions) -> Result<Equilibrium, SolverError> {
        let mut u = u.to_vec();
        let tol = opts.tolerance * (load_factor.abs() * self.load_norm).max(1.0);
        let mut history = Vec::new();
        let mut energies = Vec::new();
        let mut first_energy = None;
        let mut at_floor = false;
        for it in 0..=opts.max_iterations {
            let asm = self.residual(&u, load_factor, true)?;
            let mut r = asm.vector;
            let norm = free_norm(&r, &self.fixed);
            history.push(norm);
            if norm <= tol || at_floor {
                return Ok(Equilibrium { u, residuals: history, energies, tolerance: tol });
            }
            if !norm.is_finite() || it == opts.max_iterations || norm > 1e12 * history[0].max(tol) {
                break;
            }
            let mut k = asm.matrix.expect("tangent requested");
            apply_dirichlet(&self.pattern, &mut k, &mut r, &self.fixed);
            let du = solver.solve(&self.pattern, &k, &r)?;
            let energy = du.iter().zip(&r).map(|(d, r)| d * r).sum::<f64>().abs();
            let e0 = *first_energy.get_or_insert(energy);
            at_floor = it > 0 && energy <= opts.energy_tolerance * e0;
            energies.push(energy.sqrt());
            for (a, d) in u.iter_mut().zip(du) {
                *a -= d;
            }
        }
        Err(SolverError::Diverged { load_factor, bisections: 0 })
    }

    /// Advances from `from` to `to`, halving the increment on failure.
    #[allow(clippy::too_many_arguments)]
    fn advance(
        &self,
        solver: &mut LinearSolver,
        u: &mut Vec<f64>,
        from: f64,
        to: f64,
        depth: usize,
        opts: &NewtonOptions,
        steps: &mut Vec<StepRecord>,
        on_step: &mut dyn FnMut(&StepRecord, &[f64]),
    ) -> Result<(), SolverError> {
        match self.equilibrate(solver, u, to, opts) {
            Ok(Equilibrium { u: next, residuals, energies, tolerance }) => {
                *u = next;
                let rec = StepRecord { load_factor: to, iterations: residuals.len() - 1, residuals, energies, tolerance, depth };
                on_step(&rec, u);
                steps.push(rec);
                Ok(())
            }
            Err(_) if depth < opts.max_bisections => {
                let mid = 0.5 * (from + to);
                self.advance(solver, u, from, mid, depth + 1, opts, steps, on_step)?;
                self.advance(solver, u, mid, to, depth + 1, opts, steps, on_step)
            }
            Err(SolverError::Diverged { .. }) | Err(SolverError::Assembly(_)) | Err(SolverError::Factorization(_)) => {
                Err(SolverError::Diverged { load_factor: to, bisections: depth })
            }
        }
    }

    /// Equal load increments up to `λ = 1`; `on_step` sees every converged state.
    pub fn solve_incremental(
        &self,
        n_steps: usize,
        opts: &NewtonOptions,
        mut on_step: impl FnMut(&StepRecord, &[f64]),
    ) -> Result<SolveReport, SolverError> {
        let mut solver = LinearSolver::new();
        let mut u = vec![0.0; self.mesh.n_dofs()];
        let mut steps = Vec::new();
        for s in 0..n_steps {
            let (from, to) = (s as f64 / n_steps as f64, (s + 1) as f64 / n_steps as f64);
            self.advance(&mut solver, &mut u, from, to, 0, opts, &mut steps, &mut on_step)?;
        }
        Ok(SolveReport { steps, displacement: u })
    }
}

/// Observed order of the last three residuals that sit well above round-off,
/// `ln(r_{k+1}/r_k) / ln(r_k/r_{k-1})`.
pub fn convergence_order(residuals: &[f64]) -> Option<f64> {
    let top = residuals.iter().cloned().fold(0.0, f64::max);
    let usable: Vec<f64> = residuals.iter().cloned().filter(|&r| r > 1e-12 * top).collect();
    usable
        .windows(3)
        .filter(|w| w[1] < 1e-2 * top && w[1] < w[0] && w[2] < w[1])
        .map(|w| (w[2] / w[1]).ln() / (w[1] / w[0]).ln())
        .last()
}

/// Order fitted over every converged increment of a run: the least-squares
/// slope of `ln e_{k+1}` against `ln e_k`, with `e_k` the energy norm of the
/// k-th Newton correction.
///
/// The energy norm is used because the force residual of a thin shell mixes
/// stiff membrane and soft bending modes, so its constant in
/// `r_{k+1} = C r_k^2` jumps by orders of magnitude between iterations. Pairs
/// are skipped if they start at the predictor or before the norm has dropped
/// two decades below its peak, or if they end near the round-off floor.
pub fn tail_order(steps: &[StepRecord]) -> Option<f64> {
    let mut pairs = Vec::new();
    for s in steps {
        let top = s.energies.iter().cloned().fold(0.0, f64::max);
        for w in s.energies.windows(2).skip(1) {
            if w[0] < 1e-2 * top && w[1] < w[0] && w[1] > ENERGY_FLOOR * top {
                pairs.push((w[0].ln(), w[1].ln()));
            }
        }
    }
    if pairs.len() < 3 {
        return None;
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxx: f64 = pairs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pairs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Relative energy norm below which corrections are dominated by round-off.
const ENERGY_FLOOR: f64 = 1e-7;

fn free_norm(v: &[f64], fixed: &[bool]) -> f64 {
    v.iter().zip(fixed).filter(|(_, &f)| !f).map(|(x, _)| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{PressureField, PressureLoad};
    use crate::constitutive::{BendingModel, MembraneModel};
    use crate::solver::{EdgeFix, Side, SymmetryEdge};
    use crate::splines::make_plate_patch;

    fn koiter(lambda: f64, mu: f64, t: f64) -> MaterialSpec {
        MaterialSpec::new(Some(MembraneModel::Koiter { lambda, mu }), Some(BendingModel::Koiter { lambda, mu, thickness: t })).unwrap()
    }

    fn hinged_plate(n: usize, p0: f64) -> Problem {
        let mesh = Mesh::new(make_plate_patch(1.0, n, 2, 0.0).unwrap(), None).unwrap();
        let all = |side| EdgeFix { side, components: vec![0, 1, 2] };
        let boundary = BoundarySpec { fixed: vec![all(Side::UMin), all(Side::UMax), all(Side::VMin), all(Side::VMax)], ..Default::default() };
        let loads = LoadSpec { pressure: Some(PressureLoad { field: PressureField::Uniform { value: p0 }, follower: true }), ..Default::default() };
        Problem::new(mesh, koiter(1.0, 1.0, 0.05), loads, boundary).unwrap()
    }

    #[test]
    fn one_dimensional_laplacian() {
        let n = 100;
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i));
            if i + 1 < n {
                entries.push((i, i + 1));
                entries.push((i + 1, i));
            }
        }
        let p = SparsePattern::from_entries(n, &entries);
        let mut vals = vec![0.0; p.nnz()];
        for i in 0..n {
            vals[p.position(i, i).unwrap()] = 2.0;
            if i + 1 < n {
                vals[p.position(i, i + 1).unwrap()] = -1.0;
                vals[p.position(i + 1, i).unwrap()] = -1.0;
            }
        }
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 % 13) as f64).sin()).collect();
        let b = p.matvec(&vals, &x);
        let y = LinearSolver::new().solve(&p, &vals, &b).unwrap();
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        assert!(super::super::is_positive_definite(&p, &vals));
    }

    #[test]
    fn small_loads_reproduce_the_linear_solution() {
        let prob = hinged_plate(4, 1e-7);
        let lin = prob.solve_linear(1.0).unwrap();
        let rep = prob.solve_incremental(1, &NewtonOptions { tolerance: 1e-12, ..Default::default() }, |_, _| {}).unwrap();
        let scale = lin.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = lin.iter().zip(&rep.displacement).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(scale > 0.0 && diff < 1e-6 * scale, "{diff} vs {scale}");
    }

    #[test]
    fn newton_converges_quadratically() {
        let prob = hinged_plate(4, 0.05);
        let rep = prob.solve_incremental(2, &NewtonOptions { tolerance: 1e-10, ..Default::default() }, |_, _| {}).unwrap();
        assert_eq!(rep.steps.len(), 2);
        for s in &rep.steps {
            let order = convergence_order(&s.residuals).expect("enough iterations");
            assert!(order > 1.8, "order {order} in {:?}", s.residuals);
        }
    }

    #[test]
    fn tail_order_ignores_the_constant() {
        let step = |e1: f64| {
            let mut energies = vec![1.0, e1];
            loop {
                let e = 30.0 * energies.last().unwrap().powi(2);
                if e < 1e-6 {
                    break;
                }
                energies.push(e);
            }
            // the last correction is swamped by round-off
            energies.push(1e-9);
            StepRecord { load_factor: 1.0, iterations: energies.len(), residuals: vec![], energies, tolerance: 1e-12, depth: 0 }
        };
        let steps = [step(1e-3), step(3e-3), step(5e-4)];
        let p = tail_order(&steps).unwrap();
        assert!((p - 2.0).abs() < 1e-10, "{p}");
    }

    #[test]
    fn bisection_rescues_large_increments() {
        let prob = hinged_plate(4, 0.1);
        let tight = NewtonOptions { max_iterations: 3, max_bisections: 0, ..Default::default() };
        assert!(matches!(prob.solve_incremental(1, &tight, |_, _| {}), Err(SolverError::Diverged { .. })));
        let mut loads = Vec::new();
        let rep = prob.solve_incremental(1, &NewtonOptions { max_iterations: 6, ..Default::default() }, |s, _| loads.push(s.load_factor)).unwrap();
        assert!(rep.steps.iter().any(|s| s.depth > 0));
        assert!(loads.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*loads.last().unwrap(), 1.0);
    }

    #[test]
    fn symmetric_half_matches_full_plate() {
        // full hinged plate versus the quarter with symmetry edges through the center
        let p0 = 1e-6;
        let full = hinged_plate(4, p0);
        let uf = full.solve_linear(1.0).unwrap();
        let c = full.mesh.grid.locate(0.5, 0.5);
        let bc = full.mesh.grid.eval(&full.mesh.patch, c, [0.5, 0.5]).unwrap();
        let wf: f64 = bc.indices.iter().zip(&bc.values).map(|(&a, v)| v * uf[3 * a + 2]).sum();

        let mesh = Mesh::new(make_plate_patch(0.5, 2, 2, 0.0).unwrap(), None).unwrap();
        let boundary = BoundarySpec {
            fixed: vec![EdgeFix { side: Side::UMin, components: vec![0, 1, 2] }, EdgeFix { side: Side::VMin, components: vec![0, 1, 2] }],
            symmetry: vec![SymmetryEdge { side: Side::UMax, axis: 0, penalty: 1e3 }, SymmetryEdge { side: Side::VMax, axis: 1, penalty: 1e3 }],
            fixed_dofs: vec![],
        };
        let loads = LoadSpec { pressure: Some(PressureLoad { field: PressureField::Uniform { value: p0 }, follower: true }), ..Default::default() };
        let q = Problem::new(mesh, koiter(1.0, 1.0, 0.05), loads, boundary).unwrap();
        let uq = q.solve_linear(1.0).unwrap();
        let corner = q.mesh.patch.cp_index(q.mesh.patch.grid().0 - 1, q.mesh.patch.grid().1 - 1);
        let wq = uq[3 * corner + 2];
        assert!(((wq - wf) / wf).abs() < 1e-3, "{wq} vs {wf}");
    }
}
