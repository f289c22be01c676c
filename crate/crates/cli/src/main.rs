use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use klshell_core::bench::{self, run_convergence, write_run, write_trace, BenchError, BenchmarkDef, BenchmarkName, Manifest, Timings};
use klshell_core::constitutive::BendingKind;
use klshell_core::verifier::{run_verification, VerifyReport};

#[derive(Parser)]
#[command(name = "klshell", version, about = "Kirchhoff-Love shell verification and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every bending law against closed-form stresses on exact deformations.
    Verify {
        /// Random parameter draws per table cell.
        #[arg(long, default_value_t = 5)]
        draws: usize,
        #[arg(long, default_value_t = 2021)]
        seed: u64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run one benchmark and write its trace, VTK files and manifest.
    Bench {
        name: BenchmarkName,
        #[command(flatten)]
        setup: Setup,
        #[arg(long)]
        mesh: Option<usize>,
    },
    /// Refine a benchmark over several meshes and fit the convergence order.
    Convergence {
        name: BenchmarkName,
        #[command(flatten)]
        setup: Setup,
        /// Elements per side, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        meshes: Vec<usize>,
    },
}

/// Options shared by the benchmark commands. A config file wins over flags.
#[derive(Args)]
struct Setup {
    #[arg(long)]
    model: Option<BendingKind>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Interior shear of the plate mesh.
    #[arg(long)]
    skew: Option<f64>,
    /// JSON file with any `BenchmarkDef` fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; defaults to `out/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Setup {
    fn resolve(&self, name: BenchmarkName, mesh: Option<usize>) -> Result<BenchmarkDef, BenchError> {
        let mut def = BenchmarkDef::new(name);
        if let Some(model) = self.model {
            def.model = model;
        }
        if let Some(q) = self.degree {
            def.degree = q;
        }
        if let Some(n) = mesh {
            def.mesh = n;
        }
        if let Some(k) = self.steps {
            def.steps = k;
        }
        if let Some(s) = self.skew {
            def.skew = s;
        }
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
            def = def.with_config(&text)?;
        }
        def.validate()?;
        Ok(def)
    }

    fn out_dir(&self, name: BenchmarkName) -> PathBuf {
        self.out.clone().unwrap_or_else(|| Path::new("out").join(name.tag()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { draws, seed, json } => verify(draws, seed, json),
        Command::Bench { name, setup, mesh } => bench_one(name, &setup, mesh),
        Command::Convergence { name, setup, meshes } => convergence(name, &setup, &meshes),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn verify(draws: usize, seed: u64, json: bool) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let t = Instant::now();
    let report = run_verification(draws, seed)?;
    let elapsed = t.elapsed().as_secs_f64();
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_report(&report, elapsed);
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn print_report(report: &VerifyReport, elapsed: f64) {
    let failed: Vec<_> = report.cells.iter().filter(|c| !c.passed).collect();
    let worst = report.cells.iter().map(|c| c.error).fold(0.0, f64::max);
    println!("closed-form cells: {} checked at {} draws, worst error {worst:.2e} [{}]", report.cells.len(), report.draws, status(report.tables_passed));
    for c in &failed {
        println!("  table {} {} {}: error {:.2e}", c.table, c.model, c.quantity, c.error);
    }
    for c in report.cells.iter().filter(|c| c.erratum) {
        println!("  corrected printed form: table {} {} {}", c.table, c.model, c.quantity);
    }
    println!();
    let header: String = BendingKind::ALL.iter().map(|k| format!("{:>10}", k.tag())).collect();
    println!("{:<26}{header}", "test");
    for (row, marks) in &report.matrix {
        let cells: String = marks.iter().map(|m| format!("{:>10}", m.to_string())).collect();
        println!("{:<26}{cells}", row.label());
    }
    println!("pass/fail matrix [{}]", status(report.matrix_passed));
    println!();
    println!("torsion stress ratio {:.3e} [{}]", report.torsion_ratio, status(report.torsion_passed));
    println!("linear moduli equivalence [{}]", status(report.equivalence_passed));
    println!("{:.2} s", elapsed);
}

fn bench_one(name: BenchmarkName, setup: &Setup, mesh: Option<usize>) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let def = setup.resolve(name, mesh)?;
    let dir = setup.out_dir(name);
    match bench::run(&def) {
        Ok(out) => {
            let files = write_run(&out, &dir)?;
            let s = out.summary();
            println!("{} {} q={} n={} dofs={}", def.name, def.model.tag(), def.degree, def.mesh, s.dofs);
            for (m, v) in &s.monitors {
                println!("  {m} = {v:.6e}");
            }
            if let (Some(r), Some(e)) = (s.reference, s.relative_error) {
                println!("  reference {r:.6e}, relative error {e:.3e}");
            }
            if !def.name.is_linear() {
                let order = s.tail_order.map_or("n/a".to_string(), |p| format!("{p:.2}"));
                println!("  {} increments, {} Newton iterations, deepest halving {}, tail order {order}", s.load_steps, s.newton_iterations, s.max_bisection_depth);
            }
            println!("  solve {:.2} s", out.timings.solve_s);
            for f in files {
                println!("  wrote {}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(BenchError::Diverged { load_factor, bisections, completed }) => {
            fs::create_dir_all(&dir).map_err(|source| BenchError::Io { path: dir.clone(), source })?;
            let path = dir.join("trace.csv");
            write_trace(&path, &completed)?;
            eprintln!("Newton failed at load factor {load_factor} after {bisections} halvings; partial trace in {}", path.display());
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}

fn convergence(name: BenchmarkName, setup: &Setup, meshes: &[usize]) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let def = setup.resolve(name, None)?;
    let dir = setup.out_dir(name);
    let t = Instant::now();
    let study = run_convergence(&def, meshes)?;
    let elapsed = t.elapsed().as_secs_f64();
    fs::create_dir_all(&dir).map_err(|source| BenchError::Io { path: dir.clone(), source })?;
    let csv = dir.join("convergence.csv");
    write_trace(&csv, &study.trace())?;
    let manifest = Manifest {
        timings: Timings { solve_s: elapsed, ..Timings::default() },
        outputs: vec!["convergence.csv".into()],
        ..Manifest::new(def.clone())
    };
    let manifest_path = dir.join("manifest.json");
    manifest.write(&manifest_path)?;
    println!("{} {} q={}", def.name, def.model.tag(), def.degree);
    println!("{:>6}{:>10}{:>16}{:>12}", "mesh", "dofs", "value", "error");
    for r in &study.rows {
        let e = r.error.map_or("-".to_string(), |e| format!("{e:.3e}"));
        println!("{:>6}{:>10}{:>16.6e}{:>12}", r.mesh, r.dofs, r.value, e);
    }
    if let Some(r) = study.reference {
        println!("reference {r:.6e}");
    }
    if let Some(p) = study.observed_order {
        println!("observed order {p:.3}");
    }
    println!("wrote {} and {}", csv.display(), manifest_path.display());
    Ok(ExitCode::SUCCESS)
}
