//! Pseudo-spectral solver for the incompressible Navier-Stokes equations on
//! the 2D/3D torus.
//!
//! Pressure is eliminated with the Leray projector, so the evolved equation
//! is `du_hat/dt = -nu |xi|^2 u_hat + P[-(u.grad)u + f]`. The viscous term is
//! integrated exactly through the factor `exp(-nu |xi|^2 t)` and the rest with
//! classical fourth-order Runge-Kutta. Products are formed in physical space
//! with the 2/3 rule applied to inputs and output.

mod config;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

pub use config::{ForcingKind, ForcingSpec, GridSpec, InitKind, InitSpec, ModeParams, SimConfig};

use crate::error::{Error, Result};
use crate::field::{
    pointwise_magnitudes_real, spectral_derivative, Grid, SampledField, SpectralField,
};

/// Relative divergence tolerance of the `FlowState` invariant.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Body force added to the right-hand side, frozen in time.
#[derive(Clone, Debug, PartialEq)]
pub struct Forcing {
    pub spec: ForcingSpec,
    field: Option<SpectralField>,
}

impl Forcing {
    pub fn none() -> Self {
        Forcing {
            spec: ForcingSpec::default(),
            field: None,
        }
    }

    /// Wraps a forcing field; it is Leray-projected and its mean removed.
    pub fn from_field(spec: ForcingSpec, field: SpectralField) -> Result<Self> {
        let mut projected = leray_project(&field)?;
        for c in projected.components_mut() {
            c[0] = Complex64::new(0.0, 0.0);
        }
        Ok(Forcing {
            spec,
            field: Some(projected),
        })
    }

    pub fn field(&self) -> Option<&SpectralField> {
        self.field.as_ref()
    }
}

/// Divergence-free velocity with its time, viscosity and forcing.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    velocity: SpectralField,
    time: f64,
    viscosity: f64,
    forcing: Arc<Forcing>,
    dealias: bool,
}

impl FlowState {
    /// Rejects velocities that are not divergence-free to
    /// [`DIVERGENCE_TOLERANCE`] relative to their `L^2` norm.
    pub fn new(velocity: SpectralField, time: f64, viscosity: f64) -> Result<Self> {
        let dims = velocity.grid().dims();
        if velocity.n_components() != dims || dims < 2 {
            return Err(Error::MismatchedComponents {
                expected: dims.max(2),
                actual: velocity.n_components(),
            });
        }
        if !(viscosity >= 0.0 && viscosity.is_finite()) {
            return Err(Error::InvalidParams(format!("viscosity {viscosity}")));
        }
        if !time.is_finite() {
            return Err(Error::non_finite("time"));
        }
        let div = max_divergence(&velocity)?;
        if div > DIVERGENCE_TOLERANCE * velocity.l2_norm() {
            return Err(Error::InvalidParams(format!(
                "velocity is not divergence-free (max |xi.u_hat| = {div:.3e})"
            )));
        }
        Ok(FlowState {
            velocity,
            time,
            viscosity,
            forcing: Arc::new(Forcing::none()),
            dealias: true,
        })
    }

    /// Projects an arbitrary vector field before wrapping it.
    pub fn projected(velocity: SpectralField, time: f64, viscosity: f64) -> Result<Self> {
        Self::new(leray_project(&velocity)?, time, viscosity)
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Result<Self> {
        if let Some(f) = forcing.field() {
            f.check_compatible(&self.velocity)?;
        }
        self.forcing = Arc::new(forcing);
        Ok(self)
    }

    pub fn with_dealiasing(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn velocity(&self) -> &SpectralField {
        &self.velocity
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    pub fn grid(&self) -> &Grid {
        self.velocity.grid()
    }

    /// `1/2 ||u||^2_{L^2}`.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.velocity.energy()
    }

    /// `||grad u||^2_{L^2} = sum |xi|^2 |u_hat|^2`.
    pub fn enstrophy(&self) -> f64 {
        let grid = self.grid();
        self.velocity
            .components()
            .iter()
            .flat_map(|c| {
                c.iter().enumerate().map(move |(i, v)| {
                    let r = grid.radius(i);
                    r * r * v.norm_sqr()
                })
            })
            .sum()
    }

    pub fn max_speed(&self) -> f64 {
        pointwise_magnitudes_real(self.velocity.to_physical().components())
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Largest `|xi . u_hat(k)|` with the Nyquist convention of
    /// [`spectral_derivative`].
    pub fn max_divergence(&self) -> f64 {
        max_divergence(&self.velocity).unwrap_or(f64::INFINITY)
    }
}

/// Wavevector used by the projector: the Nyquist entry of each axis is
/// zeroed, consistent with odd-order spectral derivatives.
fn effective_wavevector(grid: &Grid, flat: usize) -> [f64; 3] {
    let idx = grid.multi_index(flat);
    let mut k = [0.0; 3];
    for axis in 0..grid.dims() {
        if !grid.is_nyquist(idx[axis]) {
            k[axis] = grid.wavenumber_of(idx[axis]) as f64;
        }
    }
    k
}

fn max_divergence(v: &SpectralField) -> Result<f64> {
    let grid = v.grid();
    if v.n_components() != grid.dims() {
        return Err(Error::MismatchedComponents {
            expected: grid.dims(),
            actual: v.n_components(),
        });
    }
    let scale = grid.spacing();
    Ok((0..grid.len())
        .map(|i| {
            let k = effective_wavevector(grid, i);
            (0..grid.dims())
                .map(|a| v.component(a)[i] * (scale * k[a]))
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max))
}

/// Leray projection `v_hat - k (k . v_hat) / |k|^2`; modes with vanishing
/// effective wavevector (the mean) pass through.
pub fn leray_project(v: &SpectralField) -> Result<SpectralField> {
    let grid = v.grid().clone();
    let dims = grid.dims();
    if v.n_components() != dims {
        return Err(Error::MismatchedComponents {
            expected: dims,
            actual: v.n_components(),
        });
    }
    let mut comps: Vec<Vec<Complex64>> = v.components().to_vec();
    for i in 0..grid.len() {
        let k = effective_wavevector(&grid, i);
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let dot: Complex64 = (0..dims).map(|a| comps[a][i] * k[a]).sum();
        let factor = dot / k2;
        for (c, ka) in comps.iter_mut().zip(&k) {
            c[i] -= factor * ka;
        }
    }
    SpectralField::new(grid, comps)
}

/// Whether an axis index survives the 2/3 rule (`|m| <= N/3`).
#[inline]
fn kept(grid: &Grid, i: usize) -> bool {
    3 * grid.wavenumber_of(i).unsigned_abs() as usize <= grid.resolution() && !grid.is_nyquist(i)
}

/// Zeros every coefficient with some axis index `|m| > N/3`.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let grid = field.grid().clone();
    let mask: Vec<bool> = (0..grid.resolution()).map(|i| kept(&grid, i)).collect();
    field.apply_multiplier(|flat| {
        let idx = grid.multi_index(flat);
        if idx[..grid.dims()].iter().all(|&i| mask[i]) {
            1.0
        } else {
            0.0
        }
    })
}

/// `(u . grad) u` of a vector field, optionally with 2/3 dealiasing.
pub fn convective_term(u: &SpectralField, dealiased: bool) -> Result<SpectralField> {
    let grid = u.grid().clone();
    let dims = grid.dims();
    if u.n_components() != dims {
        return Err(Error::MismatchedComponents {
            expected: dims,
            actual: u.n_components(),
        });
    }
    let filtered;
    let u = if dealiased {
        filtered = dealias(u);
        &filtered
    } else {
        u
    };
    let velocity = u.to_physical();
    let mut out = Vec::with_capacity(dims);
    for a in 0..dims {
        let ua = SpectralField::from_parts_unchecked(grid.clone(), vec![u.component(a).to_vec()]);
        let mut acc = vec![0.0; grid.len()];
        for b in 0..dims {
            let du = spectral_derivative(&ua, b, 1)?.to_physical();
            for ((s, ub), d) in acc
                .iter_mut()
                .zip(velocity.component(b))
                .zip(du.component(0))
            {
                *s += ub * d;
            }
        }
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(Error::non_finite("convective term"));
        }
        out.push(acc);
    }
    let product = SampledField::new(grid, out)?.to_spectral();
    Ok(if dealiased {
        dealias(&product)
    } else {
        product
    })
}

/// Convective term of a flow state, dealiased unless the state opts out.
pub fn nonlinear_term(state: &FlowState) -> Result<SpectralField> {
    convective_term(&state.velocity, state.dealias)
}

/// Reusable IF-RK4 stepper for a fixed grid, viscosity and time step.
pub struct Integrator {
    dt: f64,
    half: Vec<f64>,
    full: Vec<f64>,
}

impl Integrator {
    pub fn new(grid: &Grid, viscosity: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("time step {dt}")));
        }
        let decay = |i: usize, h: f64| {
            let r = grid.radius(i);
            (-viscosity * r * r * h).exp()
        };
        Ok(Integrator {
            dt,
            half: (0..grid.len()).map(|i| decay(i, 0.5 * dt)).collect(),
            full: (0..grid.len()).map(|i| decay(i, dt)).collect(),
        })
    }

    fn rhs(&self, state: &FlowState, u: &SpectralField) -> Result<SpectralField> {
        let mut n = convective_term(u, state.dealias)?.scaled(Complex64::new(-1.0, 0.0));
        if let Some(f) = state.forcing.field() {
            n = n.add(f)?;
        }
        leray_project(&n)
    }

    pub fn cfl_number(&self, state: &FlowState) -> f64 {
        let grid = state.grid();
        self.dt * state.max_speed() * grid.resolution() as f64 / grid.period()
    }

    /// Advances one step without touching the clock beyond `time + dt`.
    pub fn advance(&self, state: &FlowState) -> Result<FlowState> {
        let cfl = self.cfl_number(state);
        if cfl.is_nan() || cfl >= 1.0 {
            return Err(Error::UnstableTimeStep(cfl));
        }
        let dt = self.dt;
        let u0 = &state.velocity;
        let mul = |f: &SpectralField, w: &[f64]| f.apply_multiplier(|i| w[i]);
        let c = |x: f64| Complex64::new(x, 0.0);
        let one = c(1.0);

        let a = self.rhs(state, u0)?;
        let u1 = mul(&u0.linear_combination(one, &a, c(0.5 * dt))?, &self.half);
        let b = self.rhs(state, &u1)?;
        let u2 = mul(u0, &self.half).linear_combination(one, &b, c(0.5 * dt))?;
        let cc = self.rhs(state, &u2)?;
        let u3 = mul(u0, &self.full).linear_combination(one, &mul(&cc, &self.half), c(dt))?;
        let d = self.rhs(state, &u3)?;

        let mid = mul(&b.add(&cc)?, &self.half);
        let incr = mul(&a, &self.full)
            .linear_combination(one, &mid, c(2.0))?
            .add(&d)?;
        let next = mul(u0, &self.full).linear_combination(one, &incr, c(dt / 6.0))?;
        if next
            .components()
            .iter()
            .flatten()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::non_finite("velocity after step"));
        }
        Ok(FlowState {
            velocity: next,
            time: state.time + dt,
            viscosity: state.viscosity,
            forcing: Arc::clone(&state.forcing),
            dealias: state.dealias,
        })
    }
}

/// One IF-RK4 step of size `dt`.
pub fn step(state: &FlowState, dt: f64) -> Result<FlowState> {
    Integrator::new(state.grid(), state.viscosity, dt)?.advance(state)
}

/// Taylor-Green vortex `(sin x cos y, -cos x sin y) exp(-2 nu t)` in units of
/// the grid's fundamental wavenumber `kappa = 2 pi / period`; the decay rate
/// is `2 nu kappa^2`.
pub fn taylor_green(grid: &Grid, viscosity: f64, t: f64) -> Result<FlowState> {
    let field = taylor_green_field(grid, viscosity, t)?;
    FlowState::new(field.to_spectral(), t, viscosity)
}

/// Physical Taylor-Green velocity at time `t`.
pub fn taylor_green_field(grid: &Grid, viscosity: f64, t: f64) -> Result<SampledField> {
    if grid.dims() != 2 {
        return Err(Error::InvalidDimension(grid.dims()));
    }
    let kappa = 2.0 * PI / grid.period();
    let amp = (-2.0 * viscosity * kappa * kappa * t).exp();
    SampledField::from_fn(grid.clone(), 2, |x, c| {
        let (sx, cx) = (kappa * x[0]).sin_cos();
        let (sy, cy) = (kappa * x[1]).sin_cos();
        amp * if c == 0 { sx * cy } else { -cx * sy }
    })
}

/// Integrates `config` and returns snapshots at step 0, every
/// `snapshot_every` steps, and the final step.
pub fn run(config: &SimConfig) -> Result<Vec<FlowState>> {
    config.validate()?;
    let initial = config.initial_state()?;
    let steps = config.step_count()?;
    let integrator = Integrator::new(initial.grid(), config.nu, config.dt)?;
    let mut snapshots = vec![initial.clone()];
    let mut state = initial;
    for i in 0..steps {
        let t = i as f64 * config.dt;
        let mut next = integrator.advance(&state).map_err(|e| e.at_time(t))?;
        next.time = (i + 1) as f64 * config.dt;
        state = next;
        let n = i + 1;
        if n % config.snapshot_every == 0 || n == steps {
            snapshots.push(state.clone());
        }
    }
    Ok(snapshots)
}
