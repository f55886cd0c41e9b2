//! Run configuration: built-in defaults, then the TOML file named by
//! `--config` or `MANIFOLDKIT_CONFIG`, then command-line flags.
//!
//! ```toml
//! membership_tol = 1e-8
//! round_trip_tol = 1e-9
//! karcher_tau = 1e-9
//! max_iter = 200
//! stiefel_tau = 1e-11
//! stiefel_max_iter = 100
//! metric = "canonical"
//! scheme = "linear"        # linear | lagrange | rbf-gaussian | rbf-thin-plate
//! rbf_shape = 1.0
//! rbf_normalize = false
//! base = "first"           # first | medoid | <sample index>
//! ```

use std::path::Path;
use std::str::FromStr;

use manifoldkit::interp::{BasePolicy, KarcherOptions, RbfKernel, WeightScheme};
use manifoldkit::stiefel::LogOptions;
use manifoldkit::tol::Tolerances;
use manifoldkit::MetricTag;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Linear,
    Lagrange,
    RbfGaussian,
    RbfThinPlate,
}

impl SchemeKind {
    pub fn id(self) -> &'static str {
        match self {
            SchemeKind::Linear => "linear",
            SchemeKind::Lagrange => "lagrange",
            SchemeKind::RbfGaussian => "rbf-gaussian",
            SchemeKind::RbfThinPlate => "rbf-thin-plate",
        }
    }

    pub fn is_rbf(self) -> bool {
        matches!(self, SchemeKind::RbfGaussian | SchemeKind::RbfThinPlate)
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "linear" => Ok(SchemeKind::Linear),
            "lagrange" => Ok(SchemeKind::Lagrange),
            "rbf-gaussian" | "gaussian" => Ok(SchemeKind::RbfGaussian),
            "rbf-thin-plate" | "thin-plate" => Ok(SchemeKind::RbfThinPlate),
            _ => Err(format!("unknown weight scheme '{s}'")),
        }
    }
}

pub fn parse_base(s: &str) -> Result<BasePolicy, String> {
    match s.to_ascii_lowercase().as_str() {
        "first" => Ok(BasePolicy::First),
        "medoid" => Ok(BasePolicy::Medoid),
        other => other
            .parse::<usize>()
            .map(BasePolicy::Index)
            .map_err(|_| format!("base must be 'first', 'medoid' or a sample index, got '{s}'")),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    membership_tol: Option<f64>,
    round_trip_tol: Option<f64>,
    karcher_tau: Option<f64>,
    max_iter: Option<usize>,
    stiefel_tau: Option<f64>,
    stiefel_max_iter: Option<usize>,
    metric: Option<String>,
    scheme: Option<String>,
    rbf_shape: Option<f64>,
    rbf_normalize: Option<bool>,
    base: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub membership_tol: f64,
    pub round_trip_tol: f64,
    pub karcher_tau: f64,
    pub max_iter: usize,
    pub stiefel_tau: f64,
    pub stiefel_max_iter: usize,
    /// `None` selects the manifold's default metric.
    pub metric: Option<MetricTag>,
    pub scheme: SchemeKind,
    pub rbf_shape: f64,
    pub rbf_normalize: bool,
    pub base: BasePolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        let karcher = KarcherOptions::default();
        let stiefel = LogOptions::default();
        let tols = Tolerances::default();
        RunConfig {
            membership_tol: tols.membership,
            round_trip_tol: tols.round_trip,
            karcher_tau: karcher.tau,
            max_iter: karcher.max_iter,
            stiefel_tau: stiefel.tau,
            stiefel_max_iter: stiefel.max_iter,
            metric: None,
            scheme: SchemeKind::Linear,
            rbf_shape: 1.0,
            rbf_normalize: false,
            base: BasePolicy::First,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn from_toml(text: &str, origin: &str) -> Result<Self, CliError> {
        let usage = |m: String| CliError::Usage(format!("{origin}: {m}"));
        let file: FileConfig = toml::from_str(text).map_err(|e| usage(e.to_string()))?;
        let mut cfg = RunConfig::default();
        cfg.membership_tol = file.membership_tol.unwrap_or(cfg.membership_tol);
        cfg.round_trip_tol = file.round_trip_tol.unwrap_or(cfg.round_trip_tol);
        cfg.karcher_tau = file.karcher_tau.unwrap_or(cfg.karcher_tau);
        cfg.max_iter = file.max_iter.unwrap_or(cfg.max_iter);
        cfg.stiefel_tau = file.stiefel_tau.unwrap_or(cfg.stiefel_tau);
        cfg.stiefel_max_iter = file.stiefel_max_iter.unwrap_or(cfg.stiefel_max_iter);
        cfg.rbf_shape = file.rbf_shape.unwrap_or(cfg.rbf_shape);
        cfg.rbf_normalize = file.rbf_normalize.unwrap_or(cfg.rbf_normalize);
        if let Some(m) = file.metric {
            cfg.metric = Some(m.parse().map_err(|e: manifoldkit::Error| usage(e.to_string()))?);
        }
        if let Some(s) = file.scheme {
            cfg.scheme = s.parse().map_err(usage)?;
        }
        if let Some(b) = file.base {
            cfg.base = parse_base(&b).map_err(usage)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let tols = [
            ("membership_tol", self.membership_tol),
            ("round_trip_tol", self.round_trip_tol),
            ("karcher_tau", self.karcher_tau),
            ("stiefel_tau", self.stiefel_tau),
            ("rbf_shape", self.rbf_shape),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            membership: self.membership_tol,
            round_trip: self.round_trip_tol,
        }
    }

    pub fn stiefel(&self) -> LogOptions {
        LogOptions {
            tau: self.stiefel_tau,
            max_iter: self.stiefel_max_iter,
        }
    }

    pub fn karcher(&self) -> KarcherOptions {
        KarcherOptions {
            tau: self.karcher_tau,
            max_iter: self.max_iter,
            stiefel: self.stiefel(),
            ..KarcherOptions::default()
        }
    }

    pub fn scheme(&self) -> WeightScheme {
        match self.scheme {
            SchemeKind::Linear => WeightScheme::Linear,
            SchemeKind::Lagrange => WeightScheme::Lagrange,
            SchemeKind::RbfGaussian => WeightScheme::Rbf {
                kernel: RbfKernel::Gaussian,
                shape: self.rbf_shape,
                normalize: self.rbf_normalize,
            },
            SchemeKind::RbfThinPlate => WeightScheme::Rbf {
                kernel: RbfKernel::ThinPlate,
                shape: self.rbf_shape,
                normalize: self.rbf_normalize,
            },
        }
    }
}
