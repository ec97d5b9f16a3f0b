use clap::Parser;
use curlfem::solver::SolverMethod;
use curlfem::study::{run_study, MeshSource, StudyConfig, StudyKind};
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs a refinement study of the Nedelec cavity solver and writes CSV, SVG
/// and JSON reports.
///
/// Flags override values read from `--config`.
#[derive(Parser, Debug)]
#[command(name = "curlfem", version)]
struct Cli {
    /// JSON study configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ball-convergence, cube-control, interpolation-rates or domain-metrics.
    #[arg(long, value_parser = parse_study)]
    study: Option<StudyKind>,
    /// Nedelec degree (1 or 2).
    #[arg(long)]
    k: Option<usize>,
    /// Geometric order of the mesh (1 or 2).
    #[arg(long)]
    geo_order: Option<usize>,
    /// Number of refinement levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Coarsest level.
    #[arg(long)]
    first_level: Option<usize>,
    /// Material preset.
    #[arg(long)]
    material: Option<String>,
    /// builtin or gmsh.
    #[arg(long, value_parser = parse_source)]
    mesh_source: Option<MeshSource>,
    /// Gmsh file pattern containing `{level}`.
    #[arg(long)]
    gmsh_pattern: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature exactness for the curl term.
    #[arg(long)]
    q1: Option<usize>,
    /// Quadrature exactness for the mass term.
    #[arg(long)]
    q2: Option<usize>,
    /// Quadrature exactness for the load.
    #[arg(long)]
    q3: Option<usize>,
    /// direct or iterative.
    #[arg(long, value_parser = parse_solver)]
    solver: Option<SolverMethod>,
    /// Relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Also report the error against the pulled-back exact solution.
    #[arg(long)]
    pullback: bool,
}

fn kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown value {s:?}"))
}

fn parse_study(s: &str) -> Result<StudyKind, String> {
    kebab(s)
}

fn parse_source(s: &str) -> Result<MeshSource, String> {
    kebab(s)
}

fn parse_solver(s: &str) -> Result<SolverMethod, String> {
    kebab(s)
}

fn config(cli: Cli) -> curlfem::Result<StudyConfig> {
    let mut c = match &cli.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => StudyConfig::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = cli.$f { c.$f = v; })* };
    }
    set!(study, k, geo_order, levels, first_level, mesh_source, solver, tol);
    macro_rules! set_opt {
        ($($f:ident),*) => { $(if cli.$f.is_some() { c.$f = cli.$f; })* };
    }
    if cli.gmsh_pattern.is_some() && cli.mesh_source.is_none() {
        c.mesh_source = MeshSource::Gmsh;
    }
    set_opt!(material, gmsh_pattern, out, q1, q2, q3);
    c.pullback |= cli.pullback;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("CURLFEM_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: CURLFEM_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let config = match config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_study(&config) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", outcome.report.to_csv());
            let s = outcome.report.slopes();
            let show = |name: &str, v: Option<f64>| {
                if let Some(v) = v {
                    println!("eoc {name}: {v:.3}");
                }
            };
            show("l2_error", s.l2_error);
            show("hcurl_error", s.hcurl_error);
            show("pullback_error", s.pullback_error);
            show("d0", s.d0);
            show("d1", s.d1);
            show("hausdorff", s.hausdorff);
            for t in &outcome.timings {
                eprintln!(
                    "level {}: mesh {:.2}s, assemble {:.2}s, solve {:.2}s, errors {:.2}s",
                    t.level, t.mesh, t.assemble, t.solve, t.errors
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
