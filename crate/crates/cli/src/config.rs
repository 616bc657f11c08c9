//! TOML experiment configuration. Every field is optional; absent fields
//! keep the library defaults. Command-line flags are applied afterwards.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use riemann_accel::constants::Regime;
use riemann_accel::experiments::{Fig1Config, Fig2Config, Fig3Config};
use riemann_accel::optimizer::{Method, RunConfig, SirnagOption};
use riemann_accel::suites::SuiteOptions;
use riemann_accel::{Execution, ManifoldKind, ManifoldSpec};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub paper_scale: Option<bool>,
    pub sequential: Option<bool>,
    #[serde(default)]
    pub fig1: Fig1Section,
    #[serde(default)]
    pub fig2: Fig2Section,
    #[serde(default)]
    pub fig3: Fig3Section,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default)]
    pub run: RunSection,
    /// Directory that relative paths inside the file are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Section {
    pub dim: Option<usize>,
    pub curvature: Option<f64>,
    pub diameter: Option<f64>,
    pub initial_distance: Option<f64>,
    pub h: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Section {
    pub m: Option<usize>,
    pub cond: Option<f64>,
    pub steps: Option<usize>,
    pub initial_distance: Option<f64>,
    /// Load Q from this matrix file instead of generating it.
    pub matrix: Option<PathBuf>,
    /// Write the matrix that was used to this file.
    pub save_matrix: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig3Section {
    pub hs: Option<Vec<f64>>,
    pub h_ref: Option<f64>,
    pub horizon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    pub suite: Option<String>,
    pub h_ref: Option<f64>,
    pub horizon: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub manifold: Option<String>,
    pub dim: Option<usize>,
    pub curvature: Option<f64>,
    pub diameter: Option<f64>,
    /// `half_squared_distance`, `quadratic` or `rayleigh`.
    pub objective: Option<String>,
    pub mu: Option<f64>,
    pub cond: Option<f64>,
    pub method: Option<String>,
    pub regime: Option<String>,
    pub alpha: Option<f64>,
    pub h: Option<f64>,
    pub eta: Option<f64>,
    pub steps: Option<usize>,
    pub option: Option<String>,
    pub initial_distance: Option<f64>,
}

/// Values that may come from both the file and the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub paper_scale: bool,
    pub sequential: bool,
    pub matrix: Option<PathBuf>,
    pub save_matrix: Option<PathBuf>,
    pub suite: Option<String>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: FileConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
    cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(cfg)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<usize, CliError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be at least 1")))
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug)]
pub struct Settings {
    pub file: FileConfig,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub paper_scale: bool,
    pub exec: Execution,
    pub matrix: Option<PathBuf>,
    pub save_matrix: Option<PathBuf>,
    pub suite: Option<String>,
}

impl Settings {
    pub fn new(file: FileConfig, flags: Overrides) -> Self {
        let rel = |p: PathBuf| if p.is_relative() { file.base_dir.join(p) } else { p };
        let sequential = flags.sequential || file.sequential.unwrap_or(false);
        Settings {
            seed: flags.seed.or(file.seed),
            out: flags.out.or_else(|| file.out.clone().map(rel)),
            paper_scale: flags.paper_scale || file.paper_scale.unwrap_or(false),
            exec: if sequential { Execution::Sequential } else { Execution::Parallel },
            matrix: flags.matrix.or_else(|| file.fig2.matrix.clone().map(rel)),
            save_matrix: flags.save_matrix.or_else(|| file.fig2.save_matrix.clone().map(rel)),
            suite: flags.suite.or_else(|| file.check.suite.clone()),
            file,
        }
    }

    pub fn fig1(&self) -> Result<Fig1Config, CliError> {
        let s = &self.file.fig1;
        let d = Fig1Config::default();
        let cfg = Fig1Config {
            dim: s.dim.unwrap_or(d.dim),
            curvature: s.curvature.unwrap_or(d.curvature),
            diameter: s.diameter.unwrap_or(d.diameter),
            initial_distance: s.initial_distance.unwrap_or(d.initial_distance),
            h: s.h.unwrap_or(d.h),
            steps: s.steps.unwrap_or(d.steps),
            seed: self.seed.unwrap_or(d.seed),
        };
        cfg.validate().map_err(CliError::from_validation)?;
        Ok(cfg)
    }

    pub fn fig2(&self) -> Result<Fig2Config, CliError> {
        let s = &self.file.fig2;
        let d = if self.paper_scale { Fig2Config::paper_scale() } else { Fig2Config::default() };
        Ok(Fig2Config {
            m: at_least_one("fig2.m", s.m.unwrap_or(d.m))?,
            cond: positive("fig2.cond", s.cond.unwrap_or(d.cond))?,
            steps: s.steps.unwrap_or(d.steps),
            seed: self.seed.unwrap_or(d.seed),
            initial_distance: s.initial_distance.unwrap_or(d.initial_distance),
            matrix: None,
        })
    }

    pub fn fig3(&self) -> Result<Fig3Config, CliError> {
        let s = &self.file.fig3;
        let d = if self.paper_scale { Fig3Config::paper_scale() } else { Fig3Config::default() };
        let hs = s.hs.clone().unwrap_or(d.hs);
        for &h in &hs {
            positive("fig3.hs", h)?;
        }
        Ok(Fig3Config {
            hs,
            h_ref: positive("fig3.h_ref", s.h_ref.unwrap_or(d.h_ref))?,
            horizon: positive("fig3.horizon", s.horizon.unwrap_or(d.horizon))?,
            fig1: self.fig1()?,
        })
    }

    pub fn suite_options(&self) -> Result<SuiteOptions, CliError> {
        let s = &self.file.check;
        let d = SuiteOptions::default();
        Ok(SuiteOptions {
            exec: self.exec,
            h_ref: positive("check.h_ref", s.h_ref.unwrap_or(d.h_ref))?,
            horizon: positive("check.horizon", s.horizon.unwrap_or(d.horizon))?,
            samples: at_least_one("check.samples", s.samples.unwrap_or(d.samples))?,
        })
    }

    pub fn run(&self) -> Result<RunSettings, CliError> {
        RunSettings::from_section(&self.file.run, self.seed.unwrap_or(7))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    HalfSquaredDistance,
    Quadratic,
    Rayleigh,
}

#[derive(Debug, Clone)]
pub struct RunSettings {
    pub spec: ManifoldSpec,
    pub objective: ObjectiveKind,
    pub mu: f64,
    pub cond: f64,
    pub config: RunConfig,
    pub initial_distance: f64,
    pub seed: u64,
}

impl RunSettings {
    fn from_section(s: &RunSection, seed: u64) -> Result<Self, CliError> {
        let objective = match s.objective.as_deref().unwrap_or("half_squared_distance") {
            "half_squared_distance" => ObjectiveKind::HalfSquaredDistance,
            "quadratic" => ObjectiveKind::Quadratic,
            "rayleigh" => ObjectiveKind::Rayleigh,
            o => {
                return Err(CliError::Config(format!(
                    "unknown objective `{o}` (expected half_squared_distance, quadratic or rayleigh)"
                )))
            }
        };
        let default_kind = match objective {
            ObjectiveKind::HalfSquaredDistance => "hyperboloid",
            ObjectiveKind::Quadratic => "euclidean",
            ObjectiveKind::Rayleigh => "sphere",
        };
        let kind = match s.manifold.as_deref().unwrap_or(default_kind) {
            "euclidean" => ManifoldKind::Euclidean,
            "sphere" => ManifoldKind::Sphere,
            "hyperboloid" => ManifoldKind::Hyperboloid,
            k => return Err(CliError::Config(format!("unknown manifold `{k}` (expected euclidean, sphere or hyperboloid)"))),
        };
        let dim = s.dim.unwrap_or(2);
        let spec = match kind {
            ManifoldKind::Euclidean => ManifoldSpec::euclidean(dim, s.diameter.unwrap_or(10.0)),
            ManifoldKind::Sphere => ManifoldSpec::sphere(dim, s.curvature.unwrap_or(1.0), s.diameter.unwrap_or(3.0)),
            ManifoldKind::Hyperboloid => {
                ManifoldSpec::hyperboloid(dim, s.curvature.unwrap_or(-1.0), s.diameter.unwrap_or(1.0))
            }
        };
        spec.validate().map_err(CliError::from_validation)?;
        match (objective, kind) {
            (ObjectiveKind::Quadratic, ManifoldKind::Euclidean) | (ObjectiveKind::HalfSquaredDistance, _) => {}
            (ObjectiveKind::Rayleigh, ManifoldKind::Sphere) if spec.curvature == 1.0 => {}
            _ => return Err(CliError::Config(format!("objective {objective:?} is not available on this manifold"))),
        }

        let mu = s.mu.unwrap_or(1.0);
        let regime = match s.regime.as_deref().unwrap_or("convex") {
            "convex" => Regime::Convex,
            "wqc" => Regime::WeaklyQuasiConvex { alpha: s.alpha.unwrap_or(2.0) },
            "sc" => Regime::StronglyConvex { mu },
            r => return Err(CliError::Config(format!("unknown regime `{r}` (expected convex, wqc or sc)"))),
        };
        let steps = s.steps.unwrap_or(1000);
        let h = s.h.unwrap_or(0.1);
        let method = match s.method.as_deref().unwrap_or("sirnag") {
            "sirnag" => Method::Sirnag,
            "rgd" => Method::Rgd,
            m => return Err(CliError::Config(format!("unknown method `{m}` (expected sirnag or rgd)"))),
        };
        let config = match method {
            Method::Sirnag => {
                let option: SirnagOption = s
                    .option
                    .as_deref()
                    .unwrap_or("I")
                    .parse()
                    .map_err(CliError::from_validation)?;
                let mut c = RunConfig::sirnag(regime, h, steps, option);
                if let Some(eta) = s.eta {
                    c.eta = eta;
                }
                c
            }
            Method::Rgd => RunConfig::rgd(s.eta.unwrap_or(h * h), steps),
        };
        config.validate().map_err(CliError::from_validation)?;
        let initial_distance = s.initial_distance.unwrap_or(0.5);
        if !(initial_distance >= 0.0) {
            return Err(CliError::Config("run.initial_distance must be ≥ 0".into()));
        }
        Ok(RunSettings {
            spec,
            objective,
            mu: positive("run.mu", mu)?,
            cond: positive("run.cond", s.cond.unwrap_or(100.0))?,
            config,
            initial_distance,
            seed,
        })
    }
}
