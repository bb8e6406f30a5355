use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use warpzeta::geometry::{BaseSpectralData, Geometry, Interval, WarpKind, WarpingFunction, DEFAULT_TOLERANCE};
use warpzeta::ode::{BoundaryKind, OdeOptions};
use warpzeta::zeta::{FinitePartOptions, ZetaOptions};
use warpzeta::{Error, Result};

/// Number of base heat coefficients tabulated for the built-in circle.
const CIRCLE_HEAT_ORDERS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BaseConfig {
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    File {
        spectrum_path: PathBuf,
        zeta_path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub quadrature: f64,
    pub ode_rtol: f64,
    pub tail_window: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            quadrature: DEFAULT_TOLERANCE,
            ode_rtol: OdeOptions::default().rtol,
            tail_window: FinitePartOptions::default().tail_window,
        }
    }
}

/// Run configuration, read from a single JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub interval: Interval,
    pub warp: WarpKind,
    #[serde(default = "circle")]
    pub base: BaseConfig,
    #[serde(default)]
    pub bc: BoundaryKind,
    /// Subtracted asymptotic orders `L` (defaults to `d`).
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_nu_cutoff")]
    pub nu_cutoff: f64,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    /// Field mass; every report is computed for `mass = 0`.
    #[serde(default)]
    pub mass: f64,
}

fn circle() -> BaseConfig {
    BaseConfig::Circle { radius: 1.0 }
}

fn default_n_max() -> usize {
    4
}

fn default_nu_cutoff() -> f64 {
    500.0
}

/// Named geometries shared by `validate` and the default configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// `[0,1] x S^1` with `f = 1`.
    Cylinder,
    /// `f = 2 + sin r` on `[0,1]`.
    Sin,
    /// `f = e^{r/2}` on `[0,1]`.
    Exp,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Cylinder => "cylinder",
            Preset::Sin => "sin",
            Preset::Exp => "exp",
        }
    }

    pub fn config(self) -> Config {
        let warp = match self {
            Preset::Cylinder => WarpKind::Constant { value: 1.0 },
            Preset::Sin => WarpKind::Sinusoidal {
                offset: 2.0,
                amplitude: 1.0,
                frequency: 1.0,
                phase: 0.0,
            },
            Preset::Exp => WarpKind::Exponential {
                amplitude: 1.0,
                rate: 0.5,
            },
        };
        Config {
            interval: Interval { a: 0.0, b: 1.0 },
            warp,
            base: circle(),
            bc: BoundaryKind::Dirichlet,
            order: None,
            n_max: default_n_max(),
            nu_cutoff: default_nu_cutoff(),
            tolerances: ToleranceConfig::default(),
            mass: 0.0,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let cfg: Config = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let base_dir = path.parent().unwrap_or(Path::new("."));
        let cfg = cfg.resolve_paths(base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(mut self, dir: &Path) -> Self {
        if let BaseConfig::File {
            spectrum_path,
            zeta_path,
        } = &mut self.base
        {
            for p in [spectrum_path, zeta_path] {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        self
    }

    /// Checks everything that does not need the geometry to be built.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        Interval::new(self.interval.a, self.interval.b)?;
        if !(self.nu_cutoff.is_finite() && self.nu_cutoff >= 1.0) {
            return bad(format!("nu_cutoff must be a finite number >= 1, got {}", self.nu_cutoff));
        }
        let t = &self.tolerances;
        for (name, v) in [("quadrature", t.quadrature), ("ode_rtol", t.ode_rtol)] {
            if !(v > 0.0 && v < 1e-3) {
                return bad(format!("tolerances.{name} must lie in (0, 1e-3), got {v}"));
            }
        }
        if !(t.tail_window > 0.0 && t.tail_window < 1.0) {
            return bad(format!("tolerances.tail_window must lie in (0, 1), got {}", t.tail_window));
        }
        if !self.mass.is_finite() || self.mass < 0.0 {
            return bad(format!("mass must be finite and non-negative, got {}", self.mass));
        }
        if let BaseConfig::Circle { radius } = self.base {
            if !(radius > 0.0 && radius.is_finite()) {
                return bad(format!("base.radius must be positive, got {radius}"));
            }
        }
        Ok(())
    }

    /// Determinant and `zeta(0)` assemblies are massless.
    pub fn require_massless(&self, task: &str) -> Result<()> {
        if self.mass != 0.0 {
            return Err(Error::InvalidConfig(format!(
                "{task} is only available for a massless field (mass = {})",
                self.mass
            )));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<Geometry> {
        let interval = Interval::new(self.interval.a, self.interval.b)?;
        let warp = WarpingFunction::new(self.warp.clone(), interval)?;
        let base = match &self.base {
            BaseConfig::Circle { radius } => BaseSpectralData::circle(*radius, CIRCLE_HEAT_ORDERS)?,
            BaseConfig::File {
                spectrum_path,
                zeta_path,
            } => BaseSpectralData::from_files(spectrum_path, zeta_path)?,
        };
        Ok(Geometry::new(warp, base).with_tolerance(self.tolerances.quadrature))
    }

    pub fn zeta_options(&self) -> ZetaOptions {
        ZetaOptions {
            order: self.order,
            finite: FinitePartOptions {
                nu_cutoff: self.nu_cutoff,
                tail_window: self.tolerances.tail_window,
                ode: OdeOptions {
                    rtol: self.tolerances.ode_rtol,
                    ..OdeOptions::default()
                },
            },
        }
    }
}
