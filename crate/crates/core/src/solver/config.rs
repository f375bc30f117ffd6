use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{leray_project, taylor_green, FlowState, Forcing};
use crate::error::{Error, Result};
use crate::field::{Grid, SampledField, SpectralField};
use crate::generate::{band_random_spectral, power_law_spectral, PowerLawSpec};

fn two_pi() -> f64 {
    2.0 * PI
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dims: usize,
    pub resolution: usize,
    #[serde(default = "two_pi")]
    pub period: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dims, self.resolution, self.period)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    #[default]
    TaylorGreen,
    Random,
    SingleMode,
    Zero,
}

/// Parameters shared by initial conditions and forcings; each kind reads
/// the subset it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeParams {
    pub mode: Option<Vec<i64>>,
    pub component: Option<usize>,
    pub amplitude: Option<f64>,
    pub band: Option<i32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitParams {
    /// `L^2` norm of the random or single-mode velocity.
    pub amplitude: Option<f64>,
    pub seed: Option<u64>,
    /// Spectral decay `|u_hat(k)| ~ |k|^-exponent` for random fields.
    pub exponent: Option<f64>,
    /// Largest integer wavenumber magnitude populated by random fields.
    pub k_max: Option<f64>,
    pub mode: Option<Vec<i64>>,
    pub component: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    #[serde(default)]
    pub kind: InitKind,
    #[serde(default)]
    pub params: InitParams,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    #[default]
    None,
    /// `amplitude * sin(m . x)` in one component, projected.
    SingleMode,
    /// Zero-mean random field on one sharp band, projected and scaled to
    /// `L^2` norm `amplitude`.
    RandomBand,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    #[serde(default)]
    pub kind: ForcingKind,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: ModeParams,
}

fn sine_mode(grid: &Grid, mode: &[i64], component: usize, amplitude: f64) -> Result<SpectralField> {
    let dims = grid.dims();
    if mode.len() != dims || component >= dims {
        return Err(Error::InvalidParams(format!(
            "mode {mode:?} / component {component} do not fit a {dims}-dimensional grid"
        )));
    }
    let kappa = grid.spacing();
    let field = SampledField::from_fn(grid.clone(), dims, |x, c| {
        if c != component {
            return 0.0;
        }
        let phase: f64 = mode.iter().zip(x).map(|(m, xi)| *m as f64 * xi).sum();
        amplitude * (kappa * phase).sin()
    })?;
    Ok(field.to_spectral())
}

impl ForcingSpec {
    pub fn build(&self, grid: &Grid) -> Result<Forcing> {
        let p = &self.params;
        let field = match self.kind {
            ForcingKind::None => return Ok(Forcing::none()),
            ForcingKind::SingleMode => {
                let mode = p.mode.as_ref().ok_or_else(|| {
                    Error::InvalidParams("single-mode forcing needs `mode`".into())
                })?;
                sine_mode(
                    grid,
                    mode,
                    p.component.unwrap_or(0),
                    p.amplitude.unwrap_or(1.0),
                )?
            }
            ForcingKind::RandomBand => {
                let seed = self.seed.ok_or(Error::MissingSeed)?;
                let raw = band_random_spectral(grid, grid.dims(), p.band.unwrap_or(2), seed)?;
                let projected = leray_project(&raw)?;
                let norm = projected.l2_norm();
                if norm == 0.0 {
                    return Err(Error::InvalidParams(
                        "forcing band holds no solenoidal modes".into(),
                    ));
                }
                projected.scaled(Complex64::new(p.amplitude.unwrap_or(1.0) / norm, 0.0))
            }
        };
        let raw = field.max_abs();
        let forcing = Forcing::from_field(self.clone(), field)?;
        if forcing.field().map_or(0.0, |f| f.max_abs()) <= 1e-12 * raw {
            return Err(Error::InvalidParams(
                "forcing vanishes after projection".into(),
            ));
        }
        Ok(forcing)
    }
}

/// Simulation setup, read from TOML or JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    /// Steps between snapshots.
    #[serde(default = "one")]
    pub snapshot_every: usize,
    #[serde(default = "yes")]
    pub dealias: bool,
}

impl SimConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            Some("toml") => Self::from_toml(&text),
            _ => Self::from_toml(&text).or_else(|_| Self::from_json(&text)),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::Config(format!("nu must be >= 0, got {}", self.nu)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::Config("snapshot_every must be >= 1".into()));
        }
        if self.grid.dims < 2 {
            return Err(Error::InvalidDimension(self.grid.dims));
        }
        Ok(())
    }

    /// Number of steps; `t_end` must be a whole multiple of `dt`.
    pub fn step_count(&self) -> Result<usize> {
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(Error::Config(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }

    pub fn initial_state(&self) -> Result<FlowState> {
        let grid = self.grid.build()?;
        let p = &self.init.params;
        let velocity = match self.init.kind {
            InitKind::TaylorGreen => taylor_green(&grid, self.nu, 0.0)?.velocity().clone(),
            InitKind::Zero => SpectralField::zeros(grid.clone(), grid.dims())?,
            InitKind::Random => {
                let spec = PowerLawSpec {
                    exponent: p.exponent.unwrap_or(1.0),
                    k_min: 1.0,
                    k_max: Some(p.k_max.unwrap_or((grid.resolution() / 8) as f64)),
                    seed: p.seed.ok_or(Error::MissingSeed)?,
                };
                normalized(
                    leray_project(&power_law_spectral(&grid, grid.dims(), &spec)?)?,
                    p.amplitude,
                )?
            }
            InitKind::SingleMode => {
                let mode = p
                    .mode
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParams("single-mode init needs `mode`".into()))?;
                let raw = sine_mode(&grid, mode, p.component.unwrap_or(0), 1.0)?;
                normalized(leray_project(&raw)?, p.amplitude)?
            }
        };
        FlowState::new(velocity, 0.0, self.nu)?
            .with_forcing(self.forcing.build(&grid)?)
            .map(|s| s.with_dealiasing(self.dealias))
    }
}

fn normalized(field: SpectralField, amplitude: Option<f64>) -> Result<SpectralField> {
    let norm = field.l2_norm();
    if norm == 0.0 {
        return Err(Error::InvalidParams(
            "initial velocity vanishes after projection".into(),
        ));
    }
    Ok(field.scaled(Complex64::new(amplitude.unwrap_or(1.0) / norm, 0.0)))
}
