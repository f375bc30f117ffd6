//! Deterministic field generators: single Fourier modes, power-law spectra
//! with random phases, white noise and the Taylor-Green vortex.
//!
//! Random kinds draw from `ChaCha8Rng` seeded with the mandatory seed, so
//! output is reproducible across platforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid, SampledField, SpectralField};
use crate::littlewood_paley::sharp_band_of;
use crate::solver::{taylor_green, FlowState};

/// Random-phase spectrum `|f_hat(k)| = |k|^-exponent` on
/// `k_min <= |k| <= k_max` (integer magnitudes), zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpec {
    pub exponent: f64,
    pub k_min: f64,
    pub k_max: Option<f64>,
    pub seed: u64,
}

/// Fills Hermitian-symmetric coefficients from a magnitude per flat index.
/// Self-conjugate points get a random sign.
fn hermitian_random(
    grid: &Grid,
    components: usize,
    rng: &mut ChaCha8Rng,
    magnitude: impl Fn(usize) -> f64,
) -> Result<SpectralField> {
    let len = grid.len();
    let mut comps = Vec::with_capacity(components);
    for _ in 0..components {
        let mut c = vec![Complex64::new(0.0, 0.0); len];
        for i in 0..len {
            let partner = grid.conjugate_flat(i);
            if partner < i {
                continue;
            }
            let mag = magnitude(i);
            if partner == i {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                c[i] = Complex64::new(sign * mag, 0.0);
            } else {
                let theta = 2.0 * PI * rng.random::<f64>();
                let v = Complex64::from_polar(mag, theta);
                c[i] = v;
                c[partner] = v.conj();
            }
        }
        comps.push(c);
    }
    SpectralField::new(grid.clone(), comps)
}

pub fn power_law_spectral(
    grid: &Grid,
    components: usize,
    spec: &PowerLawSpec,
) -> Result<SpectralField> {
    if !spec.exponent.is_finite() {
        return Err(Error::InvalidParams(format!("exponent {}", spec.exponent)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k_max = spec.k_max.unwrap_or(f64::INFINITY);
    hermitian_random(grid, components, &mut rng, |i| {
        let r = (grid.lattice_norm_sq(i) as f64).sqrt();
        if r == 0.0 || r < spec.k_min || r > k_max {
            0.0
        } else {
            r.powf(-spec.exponent)
        }
    })
}

/// Unit-magnitude random phases on the sharp band `j` (physical
/// frequencies), zero elsewhere.
pub fn band_random_spectral(
    grid: &Grid,
    components: usize,
    band: i32,
    seed: u64,
) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = hermitian_random(grid, components, &mut rng, |i| {
        if i != 0 && sharp_band_of(grid.radius(i)) == band {
            1.0
        } else {
            0.0
        }
    })?;
    if f.max_abs() == 0.0 {
        return Err(Error::InvalidParams(format!(
            "band {band} holds no lattice points"
        )));
    }
    Ok(f)
}

/// `amplitude * sqrt(2) * cos(kappa m . x)`, whose `L^2` norm is
/// `amplitude`; the constant `amplitude` when `m = 0`.
pub fn single_mode(
    grid: &Grid,
    mode: &[i64],
    amplitude: f64,
    components: usize,
) -> Result<SampledField> {
    if mode.len() != grid.dims() {
        return Err(Error::InvalidParams(format!(
            "mode {mode:?} does not fit a {}-dimensional grid",
            grid.dims()
        )));
    }
    let kappa = grid.spacing();
    let zero = mode.iter().all(|&m| m == 0);
    SampledField::from_fn(grid.clone(), components, |x, _| {
        if zero {
            return amplitude;
        }
        let phase: f64 = mode.iter().zip(x).map(|(m, xi)| *m as f64 * xi).sum();
        amplitude * 2f64.sqrt() * (kappa * phase).cos()
    })
}

pub fn white_noise(grid: &Grid, components: usize, seed: u64) -> Result<SampledField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = (0..components)
        .map(|_| {
            (0..grid.len())
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    SampledField::new(grid.clone(), comps)
}

/// Power-law exponent whose shell-summed spectrum of a field in `dims`
/// dimensions decays like `k^slope`: shells hold `~ k^(dims-1)` modes, so
/// `E(k) ~ k^(dims - 1 - 2a)`.
pub fn exponent_for_spectrum_slope(slope: f64, dims: usize) -> f64 {
    (dims as f64 - 1.0 - slope) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    SingleMode,
    PowerLaw,
    TaylorGreen,
    WhiteNoise,
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-mode" => Ok(GeneratorKind::SingleMode),
            "power-law" => Ok(GeneratorKind::PowerLaw),
            "taylor-green" => Ok(GeneratorKind::TaylorGreen),
            "white-noise" => Ok(GeneratorKind::WhiteNoise),
            other => Err(Error::InvalidParams(format!("unknown generator {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub dims: usize,
    pub resolution: usize,
    pub period: f64,
    pub components: usize,
    pub mode: Option<Vec<i64>>,
    pub amplitude: Option<f64>,
    pub exponent: Option<f64>,
    pub seed: Option<u64>,
    pub viscosity: Option<f64>,
    pub time: Option<f64>,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, dims: usize, resolution: usize) -> Self {
        GeneratorSpec {
            kind,
            dims,
            resolution,
            period: 2.0 * PI,
            components: 1,
            mode: None,
            amplitude: None,
            exponent: None,
            seed: None,
            viscosity: None,
            time: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generated {
    Field(SampledField),
    Flow(FlowState),
}

impl Generated {
    /// Physical samples, for flows the velocity field.
    pub fn into_field(self) -> SampledField {
        match self {
            Generated::Field(f) => f,
            Generated::Flow(s) => s.velocity().to_physical(),
        }
    }
}

pub fn generate_field(spec: &GeneratorSpec) -> Result<Generated> {
    let grid = Grid::new(spec.dims, spec.resolution, spec.period)?;
    if spec.components != 1 && spec.components != spec.dims {
        return Err(Error::InvalidParams(format!(
            "components must be 1 or {}, got {}",
            spec.dims, spec.components
        )));
    }
    match spec.kind {
        GeneratorKind::SingleMode => {
            let mode = spec
                .mode
                .as_ref()
                .ok_or_else(|| Error::InvalidParams("single-mode needs a mode".into()))?;
            single_mode(&grid, mode, spec.amplitude.unwrap_or(1.0), spec.components)
                .map(Generated::Field)
        }
        GeneratorKind::PowerLaw => {
            let exponent = spec
                .exponent
                .ok_or_else(|| Error::InvalidParams("power-law needs an exponent".into()))?;
            let seed = spec.seed.ok_or(Error::MissingSeed)?;
            let pl = PowerLawSpec {
                exponent,
                k_min: 1.0,
                k_max: None,
                seed,
            };
            let mut f = power_law_spectral(&grid, spec.components, &pl)?;
            if let Some(a) = spec.amplitude {
                f = f.scaled(Complex64::new(a, 0.0));
            }
            Ok(Generated::Field(f.to_physical()))
        }
        GeneratorKind::WhiteNoise => {
            let seed = spec.seed.ok_or(Error::MissingSeed)?;
            white_noise(&grid, spec.components, seed).map(Generated::Field)
        }
        GeneratorKind::TaylorGreen => taylor_green(
            &grid,
            spec.viscosity.unwrap_or(0.0),
            spec.time.unwrap_or(0.0),
        )
        .map(Generated::Flow),
    }
}
