//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Coulomb potential plus a point interaction at the origin.
    CoulombDelta,
    /// The trivial pair with vanishing relative trace.
    Zero,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Coulomb coupling γ ≥ 0.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Point-interaction parameter α.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Circle circumference parameter β > 0.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Renormalization constant ℓ > 0.
    #[arg(long, allow_negative_numbers = true)]
    pub ell: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Lower end of the spectral grid.
    #[arg(long = "v-min", allow_negative_numbers = true)]
    pub v_min: Option<f64>,
    /// Upper end of the spectral grid.
    #[arg(long = "v-max", allow_negative_numbers = true)]
    pub v_max: Option<f64>,
    /// Number of log-spaced grid points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML file with default values for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Evaluate on the continuous spectrum when A has negative eigenvalues.
    #[arg(long = "continuous-only")]
    pub continuous_only: bool,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Flip the printed e₃₁ before sign resolution (fault injection).
    #[arg(long = "inject-sign-flip", hide = true)]
    pub inject_sign_flip: bool,
}

/// Keys accepted in the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub ell: Option<f64>,
    pub tol: Option<f64>,
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
    pub points: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub continuous_only: Option<bool>,
    pub model: Option<ModelKind>,
    pub s: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelKind,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub ell: f64,
    pub tol: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
    pub spacing: &'static str,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub continuous_only: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub inject_sign_flip: bool,
}

impl RunConfig {
    pub fn resolve(flags: &Flags, default_format: Format) -> Result<(Self, FileConfig), String> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let cfg = Self {
            model: flags.model.or(file.model).unwrap_or(ModelKind::CoulombDelta),
            gamma: flags.gamma.or(file.gamma).unwrap_or(1.0),
            alpha: flags.alpha.or(file.alpha).unwrap_or(0.0),
            beta: flags.beta.or(file.beta).unwrap_or(1.0),
            ell: flags.ell.or(file.ell).unwrap_or(1.0),
            tol: flags.tol.or(file.tol).unwrap_or(1e-8),
            v_min: flags.v_min.or(file.v_min).unwrap_or(1e-3),
            v_max: flags.v_max.or(file.v_max).unwrap_or(1e4),
            points: flags.points.or(file.points).unwrap_or(400),
            spacing: "log",
            format: flags.format.or(file.format).unwrap_or(default_format),
            output: flags.output.clone().or_else(|| file.output.clone()),
            continuous_only: flags.continuous_only || file.continuous_only.unwrap_or(false),
            inject_sign_flip: flags.inject_sign_flip,
        };
        cfg.validate()?;
        Ok((cfg, file))
    }

    fn validate(&self) -> Result<(), String> {
        let finite = [
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("ell", self.ell),
            ("tol", self.tol),
            ("v-min", self.v_min),
            ("v-max", self.v_max),
        ];
        if let Some((name, _)) = finite.iter().find(|(_, x)| !x.is_finite()) {
            return Err(format!("--{name} must be finite"));
        }
        if self.gamma < 0.0 {
            return Err(format!("--gamma must be ≥ 0, got {}", self.gamma));
        }
        for (name, x) in [("beta", self.beta), ("ell", self.ell), ("tol", self.tol)] {
            if x <= 0.0 {
                return Err(format!("--{name} must be > 0, got {x}"));
            }
        }
        if !(self.v_min > 0.0 && self.v_max > self.v_min) {
            return Err(format!(
                "need 0 < --v-min < --v-max, got {} and {}",
                self.v_min, self.v_max
            ));
        }
        if self.points < 2 {
            return Err(format!("--points must be at least 2, got {}", self.points));
        }
        Ok(())
    }
}
