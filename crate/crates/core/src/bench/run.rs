use std::time::Instant;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::defs::{BenchmarkDef, Monitor};
use super::projection::{project_lumped, RecoveredField};
use super::BenchError;
use crate::assembly::{evaluate_point, AssemblyError};
use crate::constitutive::voigt::unpack;
use crate::solver::{convergence_order, tail_order, Problem, SolverError, StepRecord};
use crate::splines::ElementBasis;

/// Rows of named numeric columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Trace {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub setup_s: f64,
    pub solve_s: f64,
    pub recovery_s: f64,
}

/// A finished benchmark run.
pub struct RunOutput {
    pub def: BenchmarkDef,
    pub problem: Problem,
    pub displacement: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub trace: Trace,
    /// Final value of every monitor.
    pub monitors: Vec<f64>,
    pub reference: Option<f64>,
    pub fields: RecoveredField,
    pub timings: Timings,
}

/// Headline numbers of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub dofs: usize,
    pub monitors: Vec<(String, f64)>,
    pub reference: Option<f64>,
    pub relative_error: Option<f64>,
    pub load_steps: usize,
    pub newton_iterations: usize,
    pub max_bisection_depth: usize,
    /// Newton order fitted over the whole load path.
    pub tail_order: Option<f64>,
}

impl RunOutput {
    /// `|w − w_ref| / |w_ref|` of the first monitor.
    pub fn relative_error(&self) -> Option<f64> {
        let r = self.reference?;
        Some((self.monitors.first()? - r).abs() / r.abs())
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            dofs: self.problem.mesh.n_dofs(),
            monitors: self.def.monitors.iter().map(|m| m.name.clone()).zip(self.monitors.iter().cloned()).collect(),
            reference: self.reference,
            relative_error: self.relative_error(),
            load_steps: self.steps.len(),
            newton_iterations: self.steps.iter().map(|s| s.iterations).sum(),
            max_bisection_depth: self.steps.iter().map(|s| s.depth).max().unwrap_or(0),
            tail_order: tail_order(&self.steps),
        }
    }
}

/// Precomputed bases of the monitored points.
struct Probes(Vec<(ElementBasis, usize, f64)>);

impl Probes {
    fn new(problem: &Problem, monitors: &[Monitor]) -> Result<Self, BenchError> {
        let mesh = &problem.mesh;
        let mut out = Vec::with_capacity(monitors.len());
        for m in monitors {
            let [u, v] = m.at;
            let e = mesh.grid.locate(u, v);
            let b = mesh.grid.eval(&mesh.patch, e, [u, v]).map_err(AssemblyError::from)?;
            out.push((b, m.component, m.sign));
        }
        Ok(Self(out))
    }

    fn values(&self, u: &[f64]) -> Vec<f64> {
        self.0
            .iter()
            .map(|(b, c, s)| s * b.values.iter().zip(&b.indices).map(|(n, &a)| n * u[3 * a + c]).sum::<f64>())
            .collect()
    }
}

/// Names of the recovered fields: mixed Cauchy stress `N^α_β`, mixed moment
/// `M^α_β = M0^{αγ} a_{γβ}` and the stretches along the reference principal directions.
pub const FIELD_NAMES: [&str; 10] = ["N11", "N12", "N21", "N22", "M11", "M12", "M21", "M22", "stretch1", "stretch2"];

/// Stress and moment fields at the control points by lumped L2 projection.
pub fn recover(problem: &Problem, u: &[f64]) -> Result<RecoveredField, BenchError> {
    let x = problem.mesh.positions(u);
    // evaluate every point up front so failures surface as errors
    let mut samples: Vec<Vec<Vec<f64>>> = Vec::with_capacity(problem.mesh.elements.len());
    for el in &problem.mesh.elements {
        let mut per = Vec::with_capacity(el.points.len());
        for q in &el.points {
            let p = evaluate_point(q, &x, &problem.material).map_err(|k| AssemblyError::Kinematics { element: el.id, source: k.in_element(el.id) })?;
            let s = &p.state;
            let j = s.stretch;
            let tau = unpack(&p.stress.tau);
            let m0 = unpack(&p.stress.moment);
            let cauchy = tau / j + (s.metric_inv * s.curvature * m0 / j).transpose();
            let n = cauchy * s.metric;
            let m = m0 * s.metric;
            per.push(vec![n[(0, 0)], n[(0, 1)], n[(1, 0)], n[(1, 1)], m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)], s.stretches[0], s.stretches[1]]);
        }
        samples.push(per);
    }
    let point_index: Vec<Vec<[f64; 2]>> = problem.mesh.elements.iter().map(|e| e.points.iter().map(|q| q.xi).collect()).collect();
    Ok(project_lumped(&problem.mesh, &FIELD_NAMES, |e, q| {
        let k = point_index[e].iter().position(|xi| *xi == q.xi).expect("quadrature point of this element");
        samples[e][k].clone()
    }))
}

fn trace_columns(def: &BenchmarkDef) -> Vec<String> {
    let mut cols = vec!["step".to_string(), "load_factor".to_string(), "force".to_string()];
    cols.extend(def.monitors.iter().map(|m| m.name.clone()));
    if !def.name.is_linear() {
        cols.extend(["iterations", "residual", "order", "depth"].map(String::from));
    }
    cols
}

/// Builds, solves and post-processes one benchmark.
pub fn run(def: &BenchmarkDef) -> Result<RunOutput, BenchError> {
    let t0 = Instant::now();
    let problem = def.problem()?;
    let probes = Probes::new(&problem, &def.monitors)?;
    let reference = def.reference();
    let setup_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let mut trace = Trace::new(trace_columns(def));
    let (displacement, steps) = if def.name.is_linear() {
        let u = problem.solve_linear(1.0)?;
        let mut row = vec![1.0, 1.0, def.load];
        row.extend(probes.values(&u));
        trace.rows.push(row);
        (u, Vec::new())
    } else {
        let mut record = |s: &StepRecord, u: &[f64]| {
            let mut row = vec![(trace.rows.len() + 1) as f64, s.load_factor, s.load_factor * def.load];
            row.extend(probes.values(u));
            row.push(s.iterations as f64);
            row.push(*s.residuals.last().expect("at least one residual"));
            row.push(convergence_order(&s.residuals).unwrap_or(f64::NAN));
            row.push(s.depth as f64);
            trace.rows.push(row);
        };
        match problem.solve_incremental(def.steps, &def.newton, &mut record) {
            Ok(report) => (report.displacement, report.steps),
            Err(SolverError::Diverged { load_factor, bisections }) => {
                return Err(BenchError::Diverged { load_factor, bisections, completed: trace });
            }
            Err(e) => return Err(e.into()),
        }
    };
    let solve_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let fields = recover(&problem, &displacement)?;
    let recovery_s = t2.elapsed().as_secs_f64();
    let monitors = probes.values(&displacement);
    Ok(RunOutput {
        def: def.clone(),
        problem,
        displacement,
        steps,
        trace,
        monitors,
        reference,
        fields,
        timings: Timings { setup_s, solve_s, recovery_s },
    })
}

/// One mesh of a refinement study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub mesh: usize,
    pub dofs: usize,
    pub value: f64,
    /// Relative to the exact value, or to the finest mesh without one.
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub config: BenchmarkDef,
    pub reference: Option<f64>,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `−log error` against `log n` over the last three errors.
    pub observed_order: Option<f64>,
}

impl ConvergenceStudy {
    pub fn trace(&self) -> Trace {
        let mut t = Trace::new(["mesh", "dofs", "value", "reference", "error"].map(String::from).to_vec());
        for r in &self.rows {
            t.rows.push(vec![r.mesh as f64, r.dofs as f64, r.value, self.reference.unwrap_or(f64::NAN), r.error.unwrap_or(f64::NAN)]);
        }
        t
    }
}

/// Slope of the least-squares line through `(log n, −log e)`.
pub fn observed_order(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(n, e)| *n > 0.0 && *e > 0.0 && e.is_finite()).map(|(n, e)| (n.ln(), -e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Runs `def` on each mesh and tracks the first monitor.
pub fn run_convergence(def: &BenchmarkDef, meshes: &[usize]) -> Result<ConvergenceStudy, BenchError> {
    if meshes.is_empty() {
        return Err(BenchError::Config("no meshes given".into()));
    }
    let mut rows = Vec::with_capacity(meshes.len());
    for &n in meshes {
        let out = run(&BenchmarkDef { mesh: n, ..def.clone() })?;
        let value = *out.monitors.first().ok_or_else(|| BenchError::Config("convergence needs a monitor".into()))?;
        rows.push(ConvergenceRow { mesh: n, dofs: out.problem.mesh.n_dofs(), value, error: None });
    }
    let reference = def.reference();
    let target = reference.unwrap_or(rows.last().expect("nonempty").value);
    let last = rows.len() - 1;
    for (i, r) in rows.iter_mut().enumerate() {
        if reference.is_some() || i < last {
            r.error = Some((r.value - target).abs() / target.abs());
        }
    }
    let errs: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.error.map(|e| (r.mesh as f64, e))).collect();
    let tail = &errs[errs.len().saturating_sub(3)..];
    let observed_order = if tail.len() >= 3 { observed_order(tail) } else { None };
    Ok(ConvergenceStudy { config: def.clone(), reference, rows, observed_order })
}

/// Displacement of a control point as a vector.
pub fn node_displacement(u: &[f64], node: usize) -> Vector3<f64> {
    Vector3::new(u[3 * node], u[3 * node + 1], u[3 * node + 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::BenchmarkName;
    use crate::constitutive::BendingKind;

    #[test]
    fn order_fit() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-2.5))).collect();
        assert!((observed_order(&pts).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(observed_order(&pts[..1]), None);
    }

    #[test]
    fn coarse_plate_runs_and_recovers_fields() {
        let def = BenchmarkDef { mesh: 4, ..BenchmarkDef::new(BenchmarkName::Plate) };
        let out = run(&def).unwrap();
        assert_eq!(out.trace.rows.len(), 1);
        let err = out.relative_error().unwrap();
        assert!(err < 0.05, "{err}");
        // the center is a corner control point of the quarter model
        let corner = out.problem.mesh.patch.cp_index(def.mesh + 2, def.mesh + 2);
        assert_eq!(out.monitors[0], node_displacement(&out.displacement, corner).z);
        let m11 = out.fields.field("M11").unwrap();
        assert!(m11.iter().all(|v| v.is_finite()) && m11.iter().any(|v| v.abs() > 0.0));
    }

    #[test]
    fn zero_load_keeps_the_reference_state() {
        let def = BenchmarkDef { mesh: 3, steps: 2, load: 0.0, model: BendingKind::Koiter, ..BenchmarkDef::new(BenchmarkName::PinchedNonlinear) };
        let out = run(&def).unwrap();
        assert!(out.displacement.iter().all(|&v| v == 0.0));
        assert_eq!(out.trace.rows.len(), 2);
        assert!(out.steps.iter().all(|s| s.iterations == 0));
    }
}
