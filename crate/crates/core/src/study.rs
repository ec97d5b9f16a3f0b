//! End-to-end refinement studies: mesh, assemble, solve and measure on a
//! sequence of levels, then report convergence orders.

use crate::analysis::{error_norms, field_norms, pullback_error, ConvergenceReport, ReportRow, ERROR_EXACTNESS};
use crate::assembly::{apply_pec, assemble, MaterialCoefficients, QuadratureDegrees};
use crate::fields::{BallSolution, CubeSolution, VectorField};
use crate::interpolation::{global_interpolate, FeSpace, FemFunction};
use crate::mesh::{generate_ball_mesh, generate_cube_mesh, read_gmsh, Mesh};
use crate::solver::{solve_system, SolveOptions, SolverMethod, DEFAULT_TOL};
use crate::transforms::{discrepancies, domain_samples, hausdorff_estimate, radial_domain_map};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    /// Cavity problem on ball meshes against the exact solution.
    BallConvergence,
    /// Cavity problem on exactly fitted cube meshes.
    CubeControl,
    /// Canonical interpolation error of the ball solution.
    InterpolationRates,
    /// Discrepancies and Hausdorff distance of the radial domain map.
    DomainMetrics,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::BallConvergence => "ball-convergence",
            StudyKind::CubeControl => "cube-control",
            StudyKind::InterpolationRates => "interpolation-rates",
            StudyKind::DomainMetrics => "domain-metrics",
        }
    }

    fn default_material(self) -> &'static str {
        match self {
            StudyKind::CubeControl => "cube",
            _ => "ball",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshSource {
    Builtin,
    Gmsh,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub k: usize,
    pub geo_order: usize,
    /// Number of refinement levels.
    pub levels: usize,
    pub first_level: usize,
    /// Material preset; the study's own preset when absent.
    pub material: Option<String>,
    pub q1: Option<usize>,
    pub q2: Option<usize>,
    pub q3: Option<usize>,
    pub out: Option<PathBuf>,
    pub mesh_source: MeshSource,
    /// Path with a `{level}` placeholder, for Gmsh meshes.
    pub gmsh_pattern: Option<String>,
    pub solver: SolverMethod,
    pub tol: f64,
    /// Also measure the error against the pulled-back exact solution.
    pub pullback: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            study: StudyKind::BallConvergence,
            k: 1,
            geo_order: 1,
            levels: 3,
            first_level: 1,
            material: None,
            q1: None,
            q2: None,
            q3: None,
            out: None,
            mesh_source: MeshSource::Builtin,
            gmsh_pattern: None,
            solver: SolverMethod::Direct,
            tol: DEFAULT_TOL,
            pullback: false,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.k) {
            return Err(Error::UnsupportedDegree(self.k));
        }
        if !(1..=2).contains(&self.geo_order) {
            return Err(Error::UnsupportedOrder(self.geo_order));
        }
        if self.levels < 2 && self.study != StudyKind::DomainMetrics {
            return Err(Error::InvalidInput(format!("at least 2 levels are needed, got {}", self.levels)));
        }
        if self.levels == 0 {
            return Err(Error::InvalidInput("at least 1 level is needed".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.mesh_source == MeshSource::Gmsh {
            match &self.gmsh_pattern {
                Some(p) if p.contains("{level}") => {}
                Some(p) => return Err(Error::InvalidInput(format!("gmsh pattern {p:?} has no {{level}} placeholder"))),
                None => return Err(Error::InvalidInput("gmsh mesh source needs a gmsh pattern".into())),
            }
        }
        if self.study == StudyKind::CubeControl && self.geo_order != 1 && self.mesh_source == MeshSource::Builtin {
            return Err(Error::InvalidInput("built-in cube meshes are straight; use geo_order 1".into()));
        }
        if self.study == StudyKind::DomainMetrics && self.pullback {
            return Err(Error::InvalidInput("domain-metrics has no solution to pull back".into()));
        }
        Ok(())
    }

    pub fn material_name(&self) -> &str {
        self.material.as_deref().unwrap_or(self.study.default_material())
    }

    /// Assembly degrees: defaults for rate `k` with any overrides applied.
    pub fn degrees(&self) -> QuadratureDegrees {
        let d = QuadratureDegrees::defaults(self.k, self.geo_order, self.k);
        QuadratureDegrees {
            q1: self.q1.unwrap_or(d.q1),
            q2: self.q2.unwrap_or(d.q2),
            q3: self.q3.unwrap_or(d.q3),
        }
    }

    /// File stem of the emitted report.
    pub fn stem(&self) -> String {
        format!("{}_k{}_order{}", self.study.name(), self.k, self.geo_order)
    }

    fn mesh(&self, level: usize) -> Result<Mesh> {
        match self.mesh_source {
            MeshSource::Gmsh => {
                let pattern = self.gmsh_pattern.as_deref().unwrap_or_default();
                let mesh = read_gmsh(pattern.replace("{level}", &level.to_string()))?;
                if mesh.order() != self.geo_order {
                    return Err(Error::InvalidInput(format!(
                        "gmsh mesh has geometric order {}, configuration asks for {}",
                        mesh.order(),
                        self.geo_order
                    )));
                }
                Ok(mesh)
            }
            MeshSource::Builtin => match self.study {
                StudyKind::CubeControl => generate_cube_mesh(level, self.geo_order),
                _ => generate_ball_mesh(level, self.geo_order),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelTiming {
    pub level: usize,
    pub mesh: f64,
    pub assemble: f64,
    pub solve: f64,
    pub errors: f64,
}

#[derive(Clone, Debug)]
pub struct StudyOutcome {
    pub report: ConvergenceReport,
    pub warnings: Vec<String>,
    pub timings: Vec<LevelTiming>,
    /// Largest relative residual over all solves.
    pub max_residual: Option<f64>,
    /// Largest determinant ratio of the domain map, for domain-metrics.
    pub max_theta: Option<f64>,
}

impl StudyOutcome {
    /// JSON fields added to the report sidecar.
    pub fn metadata(&self, config: &StudyConfig) -> serde_json::Value {
        serde_json::json!({
            "config": config,
            "quadrature": {
                "q1": config.degrees().q1,
                "q2": config.degrees().q2,
                "q3": config.degrees().q3,
                "error_exactness": ERROR_EXACTNESS,
            },
            "warnings": self.warnings,
            "max_relative_residual": self.max_residual,
            "max_theta": self.max_theta,
            "timings": self.timings,
        })
    }
}

fn exact_solution(study: StudyKind) -> &'static dyn VectorField {
    match study {
        StudyKind::CubeControl => &CubeSolution,
        _ => &BallSolution,
    }
}

/// Runs every level of `config`, writing CSV, SVG and JSON files when an
/// output directory is configured.
pub fn run_study(config: &StudyConfig) -> Result<StudyOutcome> {
    config.validate()?;
    let materials = MaterialCoefficients::preset(config.material_name())?;
    let degrees = config.degrees();
    let mut warnings = Vec::new();
    if config.k > config.geo_order && config.study != StudyKind::CubeControl {
        warnings.push(format!(
            "k = {} exceeds the geometric order {}; rates may be limited by the domain approximation",
            config.k, config.geo_order
        ));
    }
    if config.study != StudyKind::DomainMetrics {
        warnings.extend(degrees.warnings(config.k, config.k));
    }
    let mut report = ConvergenceReport::new(config.study.name(), config.k, config.geo_order, config.material_name());
    let mut timings = Vec::new();
    let mut max_residual: Option<f64> = None;
    let mut max_theta: Option<f64> = None;
    let opts = SolveOptions {
        method: config.solver,
        tol: config.tol,
        max_iterations: None,
    };
    for level in config.first_level..config.first_level + config.levels {
        let at = |e: Error| Error::AtLevel {
            level,
            source: Box::new(e),
        };
        let mut t = LevelTiming {
            level,
            mesh: 0.0,
            assemble: 0.0,
            solve: 0.0,
            errors: 0.0,
        };
        let clock = Instant::now();
        let mesh = Arc::new(config.mesh(level).map_err(at)?);
        mesh.check_positive_jacobians().map_err(at)?;
        t.mesh = clock.elapsed().as_secs_f64();
        let mut row = ReportRow {
            level,
            h: mesh.h(),
            ..Default::default()
        };
        match config.study {
            StudyKind::DomainMetrics => {
                let clock = Instant::now();
                let map = radial_domain_map(&mesh).map_err(at)?;
                let samples = domain_samples(&mesh).map_err(at)?;
                let d = discrepancies(&map, &samples).map_err(at)?;
                row.d0 = Some(d.d0);
                row.d1 = Some(d.d1);
                row.hausdorff = Some(hausdorff_estimate(&mesh));
                max_theta = Some(max_theta.unwrap_or(0.0).max(d.theta));
                row.ndof = FeSpace::new(mesh.clone(), config.k).map_err(at)?.ndofs();
                t.errors = clock.elapsed().as_secs_f64();
            }
            StudyKind::InterpolationRates => {
                let clock = Instant::now();
                let space = FeSpace::new(mesh.clone(), config.k).map_err(at)?;
                let exact = exact_solution(config.study);
                let u = global_interpolate(&space, exact).map_err(at)?;
                let e = error_norms(&u, exact, ERROR_EXACTNESS).map_err(at)?;
                row.ndof = space.ndofs();
                row.l2_error = Some(e.l2);
                row.hcurl_error = Some(e.hcurl);
                t.errors = clock.elapsed().as_secs_f64();
            }
            StudyKind::BallConvergence | StudyKind::CubeControl => {
                let space = FeSpace::new(mesh.clone(), config.k).map_err(at)?;
                row.ndof = space.ndofs();
                let clock = Instant::now();
                let system = assemble(&space, &materials, degrees).map_err(at)?;
                let reduced = apply_pec(&system).map_err(at)?;
                drop(system);
                t.assemble = clock.elapsed().as_secs_f64();
                let clock = Instant::now();
                let (x, solved) = solve_system(&reduced, &opts).map_err(at)?;
                drop(reduced);
                max_residual = Some(max_residual.unwrap_or(0.0).max(solved.relative_residual));
                t.solve = clock.elapsed().as_secs_f64();
                let clock = Instant::now();
                let uh = FemFunction::new(&space, x).map_err(at)?;
                let exact = exact_solution(config.study);
                let e = error_norms(&uh, exact, ERROR_EXACTNESS).map_err(at)?;
                row.l2_error = Some(e.l2);
                row.hcurl_error = Some(e.hcurl);
                if config.pullback {
                    let map = radial_domain_map(&mesh).map_err(at)?;
                    row.pullback_error = Some(pullback_error(&map, &uh, exact, ERROR_EXACTNESS).map_err(at)?.hcurl);
                }
                t.errors = clock.elapsed().as_secs_f64();
            }
        }
        report.push(row);
        timings.push(t);
    }
    let outcome = StudyOutcome {
        report,
        warnings,
        timings,
        max_residual,
        max_theta,
    };
    if let Some(dir) = &config.out {
        outcome.report.emit(dir, &config.stem(), outcome.metadata(config))?;
    }
    Ok(outcome)
}

/// Norm of the study's exact solution over a mesh, as a scale for errors.
pub fn exact_norm(config: &StudyConfig, level: usize) -> Result<f64> {
    let mesh = config.mesh(level)?;
    Ok(field_norms(&mesh, exact_solution(config.study), ERROR_EXACTNESS)?.hcurl)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_roundtrip_and_defaults() {
        let c: StudyConfig = serde_json::from_str(r#"{"study": "cube-control", "k": 2}"#).unwrap();
        assert_eq!(c.study, StudyKind::CubeControl);
        assert_eq!(c.levels, 3);
        assert_eq!(c.material_name(), "cube");
        assert!(serde_json::from_str::<StudyConfig>(r#"{"studdy": "x"}"#).is_err());
        let back: StudyConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            StudyConfig { k: 3, ..Default::default() },
            StudyConfig { geo_order: 0, ..Default::default() },
            StudyConfig { levels: 1, ..Default::default() },
            StudyConfig { tol: 0.0, ..Default::default() },
            StudyConfig {
                mesh_source: MeshSource::Gmsh,
                gmsh_pattern: Some("ball.msh".into()),
                ..Default::default()
            },
            StudyConfig {
                study: StudyKind::CubeControl,
                geo_order: 2,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(run_study(&c).is_err(), "{c:?}");
        }
    }

    #[test]
    fn degraded_configuration_warns() {
        let c = StudyConfig {
            study: StudyKind::InterpolationRates,
            k: 2,
            geo_order: 1,
            levels: 2,
            first_level: 0,
            ..Default::default()
        };
        let out = run_study(&c).unwrap();
        assert!(out.warnings.iter().any(|w| w.contains("exceeds the geometric order")));
        assert_eq!(out.report.rows().len(), 2);
    }

    #[test]
    fn failing_level_is_named() {
        let c = StudyConfig {
            mesh_source: MeshSource::Gmsh,
            gmsh_pattern: Some("/nonexistent/ball_{level}.msh".into()),
            ..Default::default()
        };
        match run_study(&c) {
            Err(Error::AtLevel { level: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_ball_study_emits_files() {
        let dir = tempfile::tempdir().unwrap();
        let c = StudyConfig {
            levels: 2,
            first_level: 0,
            pullback: true,
            out: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let out = run_study(&c).unwrap();
        let rows = out.report.rows();
        assert!(rows[0].h > rows[1].h);
        assert!(rows[1].hcurl_error.unwrap() < rows[0].hcurl_error.unwrap());
        assert!(rows.iter().all(|r| r.pullback_error.is_some()));
        let csv = std::fs::read_to_string(dir.path().join(format!("{}.csv", c.stem()))).unwrap();
        assert!(csv.starts_with("level,h,ndof,l2_error,hcurl_error,pullback_error\n"));
        assert!(out.max_residual.unwrap() <= c.tol);
    }
}
