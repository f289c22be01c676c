use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::defs::BenchmarkDef;
use super::projection::RecoveredField;
use super::run::{RunOutput, RunSummary, Timings, Trace};
use super::BenchError;
use crate::assembly::{AssemblyError, Mesh};

fn io_error(path: &Path, source: std::io::Error) -> BenchError {
    BenchError::Io { path: path.to_path_buf(), source }
}

/// CSV text of a trace. Numbers use the shortest exponent form that round-trips.
pub fn trace_csv(trace: &Trace) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&trace.columns).map_err(|e| BenchError::Csv(e.to_string()))?;
    for row in &trace.rows {
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(|e| BenchError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| BenchError::Csv(e.to_string()))
}

pub fn write_trace(path: &Path, trace: &Trace) -> Result<(), BenchError> {
    fs::write(path, trace_csv(trace)?).map_err(|e| io_error(path, e))
}

/// Legacy VTK header and point/cell blocks of a quad mesh.
fn vtk_geometry(out: &mut String, title: &str, points: &[Vector3<f64>], quads: &[[usize; 4]]) {
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "{title}");
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", points.len());
    for p in points {
        let _ = writeln!(out, "{:e} {:e} {:e}", p.x, p.y, p.z);
    }
    let _ = writeln!(out, "CELLS {} {}", quads.len(), 5 * quads.len());
    for q in quads {
        let _ = writeln!(out, "4 {} {} {} {}", q[0], q[1], q[2], q[3]);
    }
    let _ = writeln!(out, "CELL_TYPES {}", quads.len());
    for _ in quads {
        out.push_str("9\n");
    }
}

fn vtk_point_data(out: &mut String, n: usize, displacement: &[Vector3<f64>], fields: &[(&str, Vec<f64>)]) {
    let _ = writeln!(out, "POINT_DATA {n}");
    out.push_str("VECTORS displacement double\n");
    for d in displacement {
        let _ = writeln!(out, "{:e} {:e} {:e}", d.x, d.y, d.z);
    }
    for (name, values) in fields {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in values {
            let _ = writeln!(out, "{v:e}");
        }
    }
}

/// Deformed surface sampled on an `s × s` bilinear grid per element, with
/// displacement and recovered fields interpolated by the spline basis.
pub fn surface_vtk(mesh: &Mesh, u: &[f64], fields: &RecoveredField, s: usize) -> Result<String, BenchError> {
    let x = mesh.positions(u);
    let disp: Vec<Vector3<f64>> = (0..mesh.n_nodes()).map(|a| Vector3::new(u[3 * a], u[3 * a + 1], u[3 * a + 2])).collect();
    let mut points = Vec::new();
    let mut displacement = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); fields.names.len()];
    let mut quads = Vec::new();
    for e in 0..mesh.grid.n_elements() {
        let ([u0, u1], [v0, v1]) = mesh.grid.element_range(e);
        let base = points.len();
        for j in 0..=s {
            for i in 0..=s {
                let xi = [u0 + (u1 - u0) * i as f64 / s as f64, v0 + (v1 - v0) * j as f64 / s as f64];
                let b = mesh.grid.eval(&mesh.patch, e, xi).map_err(AssemblyError::from)?;
                points.push(b.interpolate(&x));
                displacement.push(b.interpolate(&disp));
                for (f, out) in fields.values.iter().zip(values.iter_mut()) {
                    out.push(b.values.iter().zip(&b.indices).map(|(n, &a)| n * f[a]).sum());
                }
            }
        }
        let id = |i: usize, j: usize| base + j * (s + 1) + i;
        for j in 0..s {
            for i in 0..s {
                quads.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    let mut out = String::new();
    vtk_geometry(&mut out, "deformed surface", &points, &quads);
    let named: Vec<(&str, Vec<f64>)> = fields.names.iter().map(|n| n.as_str()).zip(values).collect();
    vtk_point_data(&mut out, points.len(), &displacement, &named);
    Ok(out)
}

/// Deformed control net with control-point displacements and recovered values.
pub fn control_net_vtk(mesh: &Mesh, u: &[f64], fields: &RecoveredField) -> String {
    let x = mesh.positions(u);
    let (nu, nv) = mesh.patch.grid();
    let mut quads = Vec::new();
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let p = &mesh.patch;
            quads.push([p.cp_index(i, j), p.cp_index(i + 1, j), p.cp_index(i + 1, j + 1), p.cp_index(i, j + 1)]);
        }
    }
    let disp: Vec<Vector3<f64>> = (0..mesh.n_nodes()).map(|a| Vector3::new(u[3 * a], u[3 * a + 1], u[3 * a + 2])).collect();
    let mut out = String::new();
    vtk_geometry(&mut out, "deformed control net", &x, &quads);
    let named: Vec<(&str, Vec<f64>)> = fields.names.iter().map(|n| n.as_str()).zip(fields.values.iter().cloned()).collect();
    vtk_point_data(&mut out, x.len(), &disp, &named);
    out
}

/// Point and cell counts of a legacy VTK unstructured grid after checking
/// that every section agrees with its declared size.
pub fn check_vtk(text: &str) -> Result<(usize, usize), String> {
    let mut tokens = text.split_whitespace().peekable();
    let (mut n_points, mut n_cells) = (None, None);
    let num = |t: Option<&str>| -> Result<usize, String> { t.ok_or("truncated file")?.parse::<usize>().map_err(|e| e.to_string()) };
    let float = |t: Option<&str>| -> Result<f64, String> { t.ok_or("truncated file")?.parse::<f64>().map_err(|e| e.to_string()) };
    while let Some(t) = tokens.next() {
        match t {
            "POINTS" => {
                let n = num(tokens.next())?;
                tokens.next();
                for _ in 0..3 * n {
                    float(tokens.next())?;
                }
                n_points = Some(n);
            }
            "CELLS" => {
                let (n, size) = (num(tokens.next())?, num(tokens.next())?);
                let np = n_points.ok_or("CELLS before POINTS")?;
                let mut seen = 0;
                for _ in 0..n {
                    let k = num(tokens.next())?;
                    seen += k + 1;
                    for _ in 0..k {
                        if num(tokens.next())? >= np {
                            return Err("cell references a missing point".into());
                        }
                    }
                }
                if seen != size {
                    return Err(format!("CELLS declares {size} entries, found {seen}"));
                }
                n_cells = Some(n);
            }
            "CELL_TYPES" => {
                if Some(num(tokens.next())?) != n_cells {
                    return Err("CELL_TYPES count differs from CELLS".into());
                }
            }
            "POINT_DATA" => {
                if Some(num(tokens.next())?) != n_points {
                    return Err("POINT_DATA count differs from POINTS".into());
                }
            }
            _ => {}
        }
    }
    Ok((n_points.ok_or("no POINTS")?, n_cells.ok_or("no CELLS")?))
}

/// Configuration, versions and timings of a run; enough to repeat it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: BenchmarkDef,
    pub version: String,
    pub timings: Timings,
    pub summary: Option<RunSummary>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(config: BenchmarkDef) -> Self {
        Self { config, version: env!("CARGO_PKG_VERSION").to_string(), timings: Timings::default(), summary: None, outputs: Vec::new() }
    }

    pub fn read(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), BenchError> {
        fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| io_error(path, e))
    }
}

/// Writes the trace, both VTK files and the manifest of a run into `dir`.
pub fn write_run(run: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mesh = &run.problem.mesh;
    let trace = dir.join("trace.csv");
    write_trace(&trace, &run.trace)?;
    let surface = dir.join("surface.vtk");
    let text = surface_vtk(mesh, &run.displacement, &run.fields, run.def.vtk_subdivision)?;
    fs::write(&surface, text).map_err(|e| io_error(&surface, e))?;
    let net = dir.join("control_net.vtk");
    fs::write(&net, control_net_vtk(mesh, &run.displacement, &run.fields)).map_err(|e| io_error(&net, e))?;
    let manifest_path = dir.join("manifest.json");
    let mut paths = vec![trace, surface, net];
    let manifest = Manifest {
        timings: run.timings,
        summary: Some(run.summary()),
        outputs: paths.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
        ..Manifest::new(run.def.clone())
    };
    manifest.write(&manifest_path)?;
    paths.push(manifest_path);
    Ok(paths)
}
