//! Periodic grids, sampled and spectral fields, and the transforms between
//! them.
//!
//! The domain is the torus `[0, period)^dims` sampled on `resolution^dims`
//! uniform points. Fourier coefficients follow the convention
//! `f(x) = sum_k f_hat(k) exp(i k.x)`, so the forward transform carries the
//! `1 / N^dims` factor and the constant mode equals the field mean. Integrals
//! use the normalized measure `period^-dims dx`, which makes every `L^p` norm
//! a plain grid mean.
//!
//! Storage is row-major with axis 0 varying slowest. Spectral storage uses
//! FFT ordering: array index `i` holds integer wavenumber `i` for
//! `i < N/2` and `i - N` otherwise, so index `N/2` is the unpaired Nyquist
//! wavenumber `-N/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid with its integer wavenumber lattice.
#[derive(Clone)]
pub struct Grid {
    dims: usize,
    n: usize,
    period: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dims", &self.dims)
            .field("resolution", &self.n)
            .field("period", &self.period)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.n == other.n
            && self.period.to_bits() == other.period.to_bits()
    }
}

impl Grid {
    pub fn new(dims: usize, resolution: usize, period: f64) -> Result<Self> {
        if !(1..=3).contains(&dims) {
            return Err(Error::InvalidDimension(dims));
        }
        if resolution < 4 || !resolution.is_power_of_two() {
            return Err(Error::InvalidResolution(resolution));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::NonPositivePeriod(period));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(resolution),
            inverse: planner.plan_fft_inverse(resolution),
        };
        Ok(Grid {
            dims,
            n: resolution,
            period,
            plans: Arc::new(plans),
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of grid points, `resolution^dims`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical wavenumber per unit lattice index, `2 pi / period`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Integer wavenumbers along one axis, ascending: `-N/2 ..= N/2 - 1`.
    pub fn lattice(&self) -> Vec<i64> {
        let half = (self.n / 2) as i64;
        (-half..half).collect()
    }

    /// Integer wavenumber stored at FFT index `i` of one axis.
    #[inline]
    pub fn wavenumber_of(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index of integer wavenumber `m` (taken modulo N).
    #[inline]
    pub fn index_of(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis array indices of a flat index; unused axes are zero.
    #[inline]
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rest = flat;
        for axis in (0..self.dims).rev() {
            out[axis] = rest % self.n;
            rest /= self.n;
        }
        out
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.dims)
            .fold(0, |acc, &i| acc * self.n + i)
    }

    /// Integer wavevector at a flat spectral index; unused axes are zero.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let idx = self.multi_index(flat);
        let mut m = [0i64; 3];
        for axis in 0..self.dims {
            m[axis] = self.wavenumber_of(idx[axis]);
        }
        m
    }

    /// Flat index holding integer wavevector `m` (components modulo N).
    pub fn flat_of_wavevector(&self, m: &[i64]) -> usize {
        let mut idx = [0usize; 3];
        for (axis, slot) in idx.iter_mut().enumerate().take(self.dims) {
            *slot = self.index_of(m.get(axis).copied().unwrap_or(0));
        }
        self.flat_index(&idx)
    }

    /// Squared integer magnitude `|m|^2`.
    #[inline]
    pub fn lattice_norm_sq(&self, flat: usize) -> i64 {
        let m = self.wavevector(flat);
        m.iter().map(|v| v * v).sum()
    }

    /// Physical frequency magnitude `2 pi |m| / period`.
    #[inline]
    pub fn radius(&self, flat: usize) -> f64 {
        self.spacing() * (self.lattice_norm_sq(flat) as f64).sqrt()
    }

    /// Largest physical frequency magnitude on the lattice (the corner
    /// `(-N/2, ..., -N/2)`).
    pub fn max_radius(&self) -> f64 {
        let half = (self.n / 2) as f64;
        self.spacing() * (self.dims as f64 * half * half).sqrt()
    }

    /// Flat index of `-m`, the Hermitian partner of `m`.
    #[inline]
    pub fn conjugate_flat(&self, flat: usize) -> usize {
        let idx = self.multi_index(flat);
        let mut out = [0usize; 3];
        for axis in 0..self.dims {
            out[axis] = (self.n - idx[axis]) % self.n;
        }
        self.flat_index(&out)
    }

    /// Physical coordinates of a grid point.
    pub fn coordinates(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let h = self.period / self.n as f64;
        let mut x = [0.0; 3];
        for axis in 0..self.dims {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    pub(crate) fn forward_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.plans.forward);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    pub(crate) fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.plans.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let total = data.len();
        debug_assert_eq!(total, self.len());
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        let mut lines: Vec<Complex64> = Vec::new();
        for axis in 0..self.dims {
            let stride = n.pow((self.dims - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
                continue;
            }
            if lines.is_empty() {
                lines = vec![ZERO; total];
            }
            let blocks = total / (n * stride);
            let mut line = 0;
            for block in 0..blocks {
                for inner in 0..stride {
                    let base = block * n * stride + inner;
                    let dst = &mut lines[line * n..(line + 1) * n];
                    for (i, d) in dst.iter_mut().enumerate() {
                        *d = data[base + i * stride];
                    }
                    line += 1;
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            let mut line = 0;
            for block in 0..blocks {
                for inner in 0..stride {
                    let base = block * n * stride + inner;
                    let src = &lines[line * n..(line + 1) * n];
                    for (i, s) in src.iter().enumerate() {
                        data[base + i * stride] = *s;
                    }
                    line += 1;
                }
            }
        }
    }
}

fn check_components(grid: &Grid, count: usize) -> Result<()> {
    if count == 1 || count == grid.dims() {
        Ok(())
    } else {
        Err(Error::MismatchedComponents {
            expected: grid.dims(),
            actual: count,
        })
    }
}

/// Real-valued scalar or vector field sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl SampledField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        check_components(&grid, components.len())?;
        for (c, values) in components.iter().enumerate() {
            if values.len() != grid.len() {
                return Err(Error::InvalidParams(format!(
                    "component {c} has {} values, grid holds {}",
                    values.len(),
                    grid.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::non_finite(format!("component {c}")));
            }
        }
        Ok(SampledField { grid, components })
    }

    pub fn scalar(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, vec![values])
    }

    pub fn zeros(grid: Grid, components: usize) -> Result<Self> {
        let len = grid.len();
        Self::new(grid, vec![vec![0.0; len]; components])
    }

    /// Samples `f(x, component)` at every grid point.
    pub fn from_fn(
        grid: Grid,
        components: usize,
        f: impl Fn(&[f64; 3], usize) -> f64,
    ) -> Result<Self> {
        let comps = (0..components)
            .map(|c| {
                (0..grid.len())
                    .map(|i| f(&grid.coordinates(i), c))
                    .collect()
            })
            .collect();
        Self::new(grid, comps)
    }

    /// Builds a field from values with components interleaved last.
    pub fn from_interleaved(grid: Grid, components: usize, values: &[f64]) -> Result<Self> {
        if components == 0 || values.len() != grid.len() * components {
            return Err(Error::InvalidParams(format!(
                "{} values do not fill {} points x {} components",
                values.len(),
                grid.len(),
                components
            )));
        }
        let comps = (0..components)
            .map(|c| values.iter().skip(c).step_by(components).copied().collect())
            .collect();
        Self::new(grid, comps)
    }

    pub fn to_interleaved(&self) -> Vec<f64> {
        let nc = self.components.len();
        let mut out = vec![0.0; self.grid.len() * nc];
        for (c, values) in self.components.iter().enumerate() {
            for (i, v) in values.iter().enumerate() {
                out[i * nc + c] = *v;
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c]
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let comps = self
            .components
            .iter()
            .map(|v| v.iter().map(|x| x * factor).collect())
            .collect();
        Self::new(self.grid.clone(), comps)
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::MismatchedGrid);
        }
        if self.n_components() != other.n_components() {
            return Err(Error::MismatchedComponents {
                expected: self.n_components(),
                actual: other.n_components(),
            });
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
            .collect();
        Self::new(self.grid.clone(), comps)
    }

    /// Largest pointwise difference over all components.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max)
    }

    pub fn to_spectral(&self) -> SpectralField {
        let components = self
            .components
            .iter()
            .map(|values| {
                let mut data: Vec<Complex64> =
                    values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.grid.forward_in_place(&mut data);
                data
            })
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            components,
        }
    }
}

/// Fourier coefficients of a scalar or vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn new(grid: Grid, components: Vec<Vec<Complex64>>) -> Result<Self> {
        check_components(&grid, components.len())?;
        for (c, values) in components.iter().enumerate() {
            if values.len() != grid.len() {
                return Err(Error::InvalidParams(format!(
                    "component {c} has {} coefficients, grid holds {}",
                    values.len(),
                    grid.len()
                )));
            }
            if values
                .iter()
                .any(|v| !(v.re.is_finite() && v.im.is_finite()))
            {
                return Err(Error::non_finite(format!("spectral component {c}")));
            }
        }
        Ok(SpectralField { grid, components })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, components: Vec<Vec<Complex64>>) -> Self {
        SpectralField { grid, components }
    }

    pub fn zeros(grid: Grid, components: usize) -> Result<Self> {
        let len = grid.len();
        Self::new(grid, vec![vec![ZERO; len]; components])
    }

    /// Scalar field with one nonzero coefficient `amplitude` at wavevector
    /// `m`. The result is complex-valued unless `m` is self-conjugate.
    pub fn single_mode(grid: Grid, m: &[i64], amplitude: Complex64) -> Result<Self> {
        if m.len() != grid.dims() {
            return Err(Error::InvalidParams(format!(
                "wavevector has {} entries, grid has {} axes",
                m.len(),
                grid.dims()
            )));
        }
        let mut data = vec![ZERO; grid.len()];
        data[grid.flat_of_wavevector(m)] = amplitude;
        Self::new(grid, vec![data])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    pub fn coefficient(&self, component: usize, m: &[i64]) -> Complex64 {
        self.components[component][self.grid.flat_of_wavevector(m)]
    }

    /// Real part of the inverse transform.
    pub fn to_physical(&self) -> SampledField {
        let components = self
            .to_physical_complex()
            .into_iter()
            .map(|c| c.into_iter().map(|v| v.re).collect())
            .collect();
        SampledField {
            grid: self.grid.clone(),
            components,
        }
    }

    /// Full complex inverse transform, for fields that need not be real.
    pub fn to_physical_complex(&self) -> Vec<Vec<Complex64>> {
        self.components
            .iter()
            .map(|c| {
                let mut data = c.clone();
                self.grid.inverse_in_place(&mut data);
                data
            })
            .collect()
    }

    /// Whether `f_hat(-k) = conj(f_hat(k))` holds to absolute tolerance `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.components.iter().all(|c| {
            (0..c.len()).all(|i| (c[i] - c[self.grid.conjugate_flat(i)].conj()).norm() <= tol)
        })
    }

    /// Sum of `|f_hat(k)|^2` over lattice and components; the squared `L^2`
    /// norm by Parseval.
    pub fn energy(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter().map(|v| v.norm_sqr()))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Multiplies every coefficient by a real weight depending on the flat
    /// lattice index.
    pub fn apply_multiplier(&self, weight: impl Fn(usize) -> f64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, v)| v * weight(i)).collect())
            .collect();
        SpectralField::from_parts_unchecked(self.grid.clone(), components)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| c.iter().map(|v| v * factor).collect())
            .collect();
        SpectralField::from_parts_unchecked(self.grid.clone(), components)
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
            .collect();
        Ok(SpectralField::from_parts_unchecked(
            self.grid.clone(),
            components,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        self.linear_combination(one, other, one)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        self.linear_combination(one, other, -one)
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::MismatchedGrid);
        }
        if self.n_components() != other.n_components() {
            return Err(Error::MismatchedComponents {
                expected: self.n_components(),
                actual: other.n_components(),
            });
        }
        Ok(())
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.components
    }

    pub(crate) fn into_components(self) -> Vec<Vec<Complex64>> {
        self.components
    }
}

/// `D^order` along `axis`: multiplication by `(i k_axis)^order`. Odd orders
/// zero the unpaired Nyquist wavenumber so real fields stay real.
pub fn spectral_derivative(
    field: &SpectralField,
    axis: usize,
    order: u32,
) -> Result<SpectralField> {
    let grid = field.grid();
    if axis >= grid.dims() {
        return Err(Error::AxisOutOfRange {
            axis,
            dims: grid.dims(),
        });
    }
    if order == 0 {
        return Err(Error::InvalidParams("derivative order must be >= 1".into()));
    }
    let n = grid.resolution();
    let mut factors = vec![ZERO; n];
    for (i, f) in factors.iter_mut().enumerate() {
        if order % 2 == 1 && grid.is_nyquist(i) {
            continue;
        }
        let k = grid.spacing() * grid.wavenumber_of(i) as f64;
        *f = Complex64::new(0.0, k).powu(order);
    }
    let components = field
        .components()
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(flat, v)| v * factors[grid.multi_index(flat)[axis]])
                .collect()
        })
        .collect();
    Ok(SpectralField::from_parts_unchecked(
        grid.clone(),
        components,
    ))
}

/// Spectral gradient of a scalar field.
pub fn gradient(field: &SpectralField) -> Result<SpectralField> {
    if field.n_components() != 1 {
        return Err(Error::MismatchedComponents {
            expected: 1,
            actual: field.n_components(),
        });
    }
    let grid = field.grid().clone();
    let comps = (0..grid.dims())
        .map(|axis| spectral_derivative(field, axis, 1).map(|d| d.into_components().remove(0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralField::from_parts_unchecked(grid, comps))
}

/// Spectral divergence of a vector field.
pub fn divergence(field: &SpectralField) -> Result<SpectralField> {
    let grid = field.grid().clone();
    if field.n_components() != grid.dims() {
        return Err(Error::MismatchedComponents {
            expected: grid.dims(),
            actual: field.n_components(),
        });
    }
    let mut acc = vec![ZERO; grid.len()];
    for axis in 0..grid.dims() {
        let single =
            SpectralField::from_parts_unchecked(grid.clone(), vec![field.component(axis).to_vec()]);
        let d = spectral_derivative(&single, axis, 1)?;
        for (a, v) in acc.iter_mut().zip(d.component(0)) {
            *a += v;
        }
    }
    Ok(SpectralField::from_parts_unchecked(grid, vec![acc]))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `(mean |v|^p)^(1/p)` over pointwise magnitudes, or the max for `p = inf`.
/// Rescales by the max to keep large exponents finite.
pub(crate) fn lp_of_magnitudes(magnitudes: &[f64], p: f64) -> f64 {
    let max = magnitudes.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    let mean = if p == 2.0 {
        magnitudes
            .iter()
            .map(|m| (m / max) * (m / max))
            .sum::<f64>()
    } else {
        magnitudes.iter().map(|m| (m / max).powf(p)).sum::<f64>()
    } / magnitudes.len() as f64;
    max * mean.powf(1.0 / p)
}

pub(crate) fn pointwise_magnitudes_real(components: &[Vec<f64>]) -> Vec<f64> {
    if components.len() == 1 {
        return components[0].iter().map(|v| v.abs()).collect();
    }
    let len = components[0].len();
    (0..len)
        .map(|i| components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .collect()
}

pub(crate) fn pointwise_magnitudes_complex(components: &[Vec<Complex64>]) -> Vec<f64> {
    if components.len() == 1 {
        return components[0].iter().map(|v| v.norm()).collect();
    }
    let len = components[0].len();
    (0..len)
        .map(|i| {
            components
                .iter()
                .map(|c| c[i].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// `L^p` norm under the normalized measure; vector fields use the pointwise
/// Euclidean magnitude.
pub fn lp_norm(field: &SampledField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_of_magnitudes(
        &pointwise_magnitudes_real(field.components()),
        p,
    ))
}

/// `L^p` norm of a (possibly complex) spectral field evaluated in physical
/// space.
pub fn lp_norm_spectral(field: &SpectralField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_of_magnitudes(
        &pointwise_magnitudes_complex(&field.to_physical_complex()),
        p,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sin_field(n: usize, k: f64) -> SampledField {
        let g = Grid::new(1, n, 2.0 * PI).unwrap();
        SampledField::from_fn(g, 1, |x, _| (k * x[0]).sin()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            Grid::new(4, 8, 1.0),
            Err(Error::InvalidDimension(4))
        ));
        assert!(matches!(
            Grid::new(0, 8, 1.0),
            Err(Error::InvalidDimension(0))
        ));
        assert!(matches!(
            Grid::new(2, 12, 1.0),
            Err(Error::InvalidResolution(12))
        ));
        assert!(matches!(
            Grid::new(2, 2, 1.0),
            Err(Error::InvalidResolution(2))
        ));
        assert!(matches!(
            Grid::new(2, 8, 0.0),
            Err(Error::NonPositivePeriod(_))
        ));
        assert!(matches!(
            Grid::new(2, 8, -1.0),
            Err(Error::NonPositivePeriod(_))
        ));
    }

    #[test]
    fn lattice_examples() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        assert_eq!(g.lattice(), vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        assert_eq!(g.len(), 64 * 64);
        assert_eq!(g.lattice().first(), Some(&-32));
        assert_eq!(g.lattice().last(), Some(&31));
        assert_eq!(g.spacing(), 1.0);
        let g = Grid::new(3, 4, 1.0).unwrap();
        assert_relative_eq!(g.spacing(), 2.0 * PI);
        assert_eq!(g.wavenumber_of(2), -2);
    }

    #[test]
    fn sine_coefficients() {
        let f = sin_field(16, 1.0).to_spectral();
        let half_over_i = Complex64::new(0.0, -0.5);
        assert!((f.coefficient(0, &[1]) - half_over_i).norm() < 1e-15);
        assert!((f.coefficient(0, &[-1]) + half_over_i).norm() < 1e-15);
        for m in f.grid().lattice() {
            if m.abs() != 1 {
                assert!(f.coefficient(0, &[m]).norm() < 1e-15);
            }
        }
        assert!(f.is_hermitian(1e-15));
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let f = SampledField::from_fn(g, 1, |_, _| 2.5)
            .unwrap()
            .to_spectral();
        assert!((f.coefficient(0, &[0, 0]) - Complex64::new(2.5, 0.0)).norm() < 1e-15);
        let rest: f64 = f.component(0)[1..].iter().map(|v| v.norm()).sum();
        assert!(rest < 1e-14);
    }

    #[test]
    fn derivative_of_sine() {
        let f = sin_field(32, 1.0);
        let d = spectral_derivative(&f.to_spectral(), 0, 1)
            .unwrap()
            .to_physical();
        let g = f.grid().clone();
        let cos = SampledField::from_fn(g, 1, |x, _| x[0].cos()).unwrap();
        assert!(d.max_abs_diff(&cos) < 1e-12);
    }

    #[test]
    fn second_derivative_eigenfunction() {
        let g = Grid::new(1, 16, 2.0 * PI).unwrap();
        let e3 = SpectralField::single_mode(g, &[3], Complex64::new(1.0, 0.0)).unwrap();
        let d2 = spectral_derivative(&e3, 0, 2).unwrap();
        assert!((d2.coefficient(0, &[3]) - Complex64::new(-9.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_errors_and_constants() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let c = SampledField::from_fn(g, 1, |_, _| 4.0)
            .unwrap()
            .to_spectral();
        assert!(matches!(
            spectral_derivative(&c, 2, 1),
            Err(Error::AxisOutOfRange { axis: 2, dims: 2 })
        ));
        let d = spectral_derivative(&c, 1, 1).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn odd_derivative_kills_nyquist() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let f = SampledField::from_fn(g, 1, |x, _| (4.0 * x[0]).cos()).unwrap();
        let d1 = spectral_derivative(&f.to_spectral(), 0, 1).unwrap();
        assert_eq!(d1.max_abs(), 0.0);
        let d2 = spectral_derivative(&f.to_spectral(), 0, 2).unwrap();
        assert!(d2.max_abs() > 1.0);
    }

    #[test]
    fn lp_examples() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let c = SampledField::from_fn(g, 1, |_, _| -3.0).unwrap();
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_relative_eq!(lp_norm(&c, p).unwrap(), 3.0, max_relative = 1e-14);
        }
        let s = sin_field(64, 1.0);
        assert_relative_eq!(
            lp_norm(&s, 2.0).unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-14
        );
        assert!((lp_norm(&s, f64::INFINITY).unwrap() - 1.0).abs() <= 1e-3);
        assert!(matches!(lp_norm(&s, 0.5), Err(Error::InvalidExponent(_))));
        assert!(lp_norm(&s, f64::NAN).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(1, 4, 1.0).unwrap();
        assert!(matches!(
            SampledField::scalar(g, vec![0.0, f64::NAN, 1.0, 2.0]),
            Err(Error::NonFiniteValue(_))
        ));
    }

    #[test]
    fn finite_difference_agreement_is_second_order() {
        let err = |n: usize| {
            let f = sin_field(n, 3.0);
            let spec = spectral_derivative(&f.to_spectral(), 0, 1)
                .unwrap()
                .to_physical();
            let h = 2.0 * PI / n as f64;
            let v = f.component(0);
            (0..n)
                .map(|i| {
                    let fd = (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * h);
                    (fd - spec.component(0)[i]).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn three_dimensional_round_trip() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        let f = SampledField::from_fn(g, 3, |x, c| (x[0] + 2.0 * x[1] - x[2]).sin() + c as f64)
            .unwrap();
        let back = f.to_spectral().to_physical();
        assert!(f.max_abs_diff(&back) < 1e-13);
    }

    #[test]
    fn interleaving_round_trip() {
        let g = Grid::new(2, 4, 1.0).unwrap();
        let vals: Vec<f64> = (0..32).map(|v| v as f64).collect();
        let f = SampledField::from_interleaved(g, 2, &vals).unwrap();
        assert_eq!(f.component(1)[0], 1.0);
        assert_eq!(f.to_interleaved(), vals);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let phi = SampledField::from_fn(g, 1, |x, _| (2.0 * x[0]).sin() * x[1].cos())
            .unwrap()
            .to_spectral();
        let lap = divergence(&gradient(&phi).unwrap()).unwrap();
        let expected = phi.scaled(Complex64::new(-5.0, 0.0));
        assert!(lap.max_abs_diff(&expected) < 1e-14);
    }
}
