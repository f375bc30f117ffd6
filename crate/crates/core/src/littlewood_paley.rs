//! Dyadic partitions of unity on the frequency lattice and the band
//! projections `Delta_j f`.
//!
//! Two partitions are available. [`PartitionKind::Sharp`] uses annular
//! indicators: band `-1` holds `|xi| <= 1` and band `j >= 0` holds
//! `2^j < |xi| <= 2^(j+1)`. [`PartitionKind::Smooth`] telescopes the
//! raised-cosine cutoff `psi_j(r) = cos^2(pi/2 * clamp((r - 2^j) / 2^j, 0, 1))`:
//! `chi_-1 = psi_-1`, `chi_j = psi_j - psi_(j-1)`, and the top band takes the
//! remainder `1 - psi_(j_max - 1)`. Frequencies are physical,
//! `|xi| = 2 pi |m| / period`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid, SpectralField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    #[default]
    Sharp,
    Smooth,
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionKind::Sharp => "sharp",
            PartitionKind::Smooth => "smooth",
        })
    }
}

impl FromStr for PartitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(PartitionKind::Sharp),
            "smooth" => Ok(PartitionKind::Smooth),
            other => Err(Error::InvalidParams(format!(
                "unknown partition kind {other:?}"
            ))),
        }
    }
}

#[inline]
fn pow2(j: i32) -> f64 {
    2f64.powi(j)
}

/// Smallest `J >= 0` with `2^J >= r`.
fn ceil_log2(r: f64) -> i32 {
    let mut j = if r > 0.0 { r.log2().ceil() as i32 } else { 0 };
    while j > 0 && pow2(j - 1) >= r {
        j -= 1;
    }
    while pow2(j) < r {
        j += 1;
    }
    j.max(0)
}

/// Sharp band index of a frequency magnitude: `-1` for `r <= 1`, otherwise
/// the `j` with `2^j < r <= 2^(j+1)`.
pub fn sharp_band_of(r: f64) -> i32 {
    if r <= 1.0 {
        -1
    } else {
        ceil_log2(r) - 1
    }
}

/// Raised-cosine low-pass cutoff: 1 below `2^j`, 0 from `2^(j+1)` on.
fn smooth_cutoff(j: i32, r: f64) -> f64 {
    let lo = pow2(j);
    if r <= lo {
        1.0
    } else if r >= 2.0 * lo {
        0.0
    } else {
        let c = (FRAC_PI_2 * (r - lo) / lo).cos();
        c * c
    }
}

/// Family of band multipliers `chi_j`, `j = -1..=j_max`, summing to one on
/// the lattice.
#[derive(Clone)]
pub struct DyadicPartition {
    grid: Grid,
    kind: PartitionKind,
    j_max: i32,
    // weights[j + 1][flat]
    weights: Arc<Vec<Vec<f64>>>,
}

impl fmt::Debug for DyadicPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DyadicPartition")
            .field("grid", &self.grid)
            .field("kind", &self.kind)
            .field("j_max", &self.j_max)
            .finish()
    }
}

impl PartialEq for DyadicPartition {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.kind == other.kind
    }
}

impl DyadicPartition {
    pub fn new(grid: &Grid, kind: PartitionKind) -> Self {
        let j_max = ceil_log2(grid.max_radius());
        let radii: Vec<f64> = (0..grid.len()).map(|i| grid.radius(i)).collect();
        let n_bands = (j_max + 2) as usize;
        let mut weights = vec![vec![0.0; grid.len()]; n_bands];
        match kind {
            PartitionKind::Sharp => {
                for (i, &r) in radii.iter().enumerate() {
                    let j = sharp_band_of(r);
                    weights[(j + 1) as usize][i] = 1.0;
                }
            }
            PartitionKind::Smooth => {
                for (i, &r) in radii.iter().enumerate() {
                    let mut prev = 0.0;
                    for j in -1..j_max {
                        let psi = smooth_cutoff(j, r);
                        weights[(j + 1) as usize][i] = psi - prev;
                        prev = psi;
                    }
                    weights[(j_max + 1) as usize][i] = 1.0 - prev;
                }
            }
        }
        DyadicPartition {
            grid: grid.clone(),
            kind,
            j_max,
            weights: Arc::new(weights),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn j_min(&self) -> i32 {
        -1
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn band_count(&self) -> usize {
        (self.j_max + 2) as usize
    }

    pub fn bands(&self) -> impl Iterator<Item = i32> {
        -1..=self.j_max
    }

    pub fn check_band(&self, j: i32) -> Result<()> {
        if (-1..=self.j_max).contains(&j) {
            Ok(())
        } else {
            Err(Error::BandOutOfRange {
                band: j,
                j_max: self.j_max,
            })
        }
    }

    /// Multiplier `chi_j` over the flat lattice.
    pub fn multiplier(&self, j: i32) -> Result<&[f64]> {
        self.check_band(j)?;
        Ok(&self.weights[(j + 1) as usize])
    }

    pub fn weight(&self, j: i32, flat: usize) -> f64 {
        self.weights[(j + 1) as usize][flat]
    }

    /// Largest `|sum_j chi_j(k) - 1|` over the lattice.
    pub fn unity_deviation(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| (self.weights.iter().map(|w| w[i]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Coefficient-wise product `f_hat(k) * chi_j(k)`, applied per component.
pub fn project_band(
    field: &SpectralField,
    partition: &DyadicPartition,
    j: i32,
) -> Result<SpectralField> {
    if field.grid() != partition.grid() {
        return Err(Error::MismatchedGrid);
    }
    let w = partition.multiplier(j)?;
    Ok(field.apply_multiplier(|i| w[i]))
}

/// Band fields `Delta_j f` for `j = -1..=j_max` under one partition.
#[derive(Clone)]
pub struct DyadicDecomposition {
    partition: DyadicPartition,
    bands: Vec<SpectralField>,
    source_checksum: u64,
    physical: OnceLock<Vec<Vec<Vec<Complex64>>>>,
}

impl fmt::Debug for DyadicDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DyadicDecomposition")
            .field("partition", &self.partition)
            .field("bands", &self.bands.len())
            .field(
                "source_checksum",
                &format_args!("{:016x}", self.source_checksum),
            )
            .finish()
    }
}

impl DyadicDecomposition {
    /// Assembles a decomposition from precomputed band fields, one per
    /// `j = -1..=j_max`.
    pub fn from_bands(partition: &DyadicPartition, bands: Vec<SpectralField>) -> Result<Self> {
        if bands.len() != partition.band_count() {
            return Err(Error::InvalidParams(format!(
                "expected {} bands, got {}",
                partition.band_count(),
                bands.len()
            )));
        }
        for b in &bands {
            if b.grid() != partition.grid() {
                return Err(Error::MismatchedGrid);
            }
            b.check_compatible(&bands[0])?;
        }
        let source_checksum = checksum_bands(&bands);
        Ok(DyadicDecomposition {
            partition: partition.clone(),
            bands,
            source_checksum,
            physical: OnceLock::new(),
        })
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    pub fn bands(&self) -> &[SpectralField] {
        &self.bands
    }

    pub fn band(&self, j: i32) -> Result<&SpectralField> {
        self.partition.check_band(j)?;
        Ok(&self.bands[(j + 1) as usize])
    }

    /// `(j, Delta_j f)` pairs in ascending `j`.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &SpectralField)> {
        self.bands
            .iter()
            .enumerate()
            .map(|(i, b)| (i as i32 - 1, b))
    }

    pub fn source_checksum(&self) -> u64 {
        self.source_checksum
    }

    pub fn n_components(&self) -> usize {
        self.bands[0].n_components()
    }

    /// Complex physical values of every band, computed once.
    pub fn physical_bands(&self) -> &[Vec<Vec<Complex64>>] {
        self.physical.get_or_init(|| {
            self.bands
                .par_iter()
                .map(|b| b.to_physical_complex())
                .collect()
        })
    }
}

fn checksum_bands(bands: &[SpectralField]) -> u64 {
    // FNV-1a over the coefficient bits of the summed field.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let n_comp = bands[0].n_components();
    let len = bands[0].grid().len();
    for c in 0..n_comp {
        for i in 0..len {
            let v: Complex64 = bands.iter().map(|b| b.component(c)[i]).sum();
            for word in [v.re.to_bits(), v.im.to_bits()] {
                for byte in word.to_le_bytes() {
                    h ^= byte as u64;
                    h = h.wrapping_mul(0x0000_0100_0000_01b3);
                }
            }
        }
    }
    h
}

pub fn decompose(
    field: &SpectralField,
    partition: &DyadicPartition,
) -> Result<DyadicDecomposition> {
    if field.grid() != partition.grid() {
        return Err(Error::MismatchedGrid);
    }
    let bands = partition
        .bands()
        .map(|j| project_band(field, partition, j))
        .collect::<Result<Vec<_>>>()?;
    DyadicDecomposition::from_bands(partition, bands)
}

/// `sum_j Delta_j f`.
pub fn reconstruct(decomposition: &DyadicDecomposition) -> SpectralField {
    let first = &decomposition.bands[0];
    let mut comps: Vec<Vec<Complex64>> = first.components().to_vec();
    for band in &decomposition.bands[1..] {
        for (acc, c) in comps.iter_mut().zip(band.components()) {
            for (a, v) in acc.iter_mut().zip(c) {
                *a += v;
            }
        }
    }
    SpectralField::from_parts_unchecked(first.grid().clone(), comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(dims: usize, n: usize) -> Grid {
        Grid::new(dims, n, 2.0 * PI).unwrap()
    }

    #[test]
    fn sharp_band_boundaries() {
        assert_eq!(sharp_band_of(0.0), -1);
        assert_eq!(sharp_band_of(1.0), -1);
        assert_eq!(sharp_band_of(1.5), 0);
        assert_eq!(sharp_band_of(2.0), 0);
        assert_eq!(sharp_band_of(3.0), 1);
        assert_eq!(sharp_band_of(4.0), 1);
        assert_eq!(sharp_band_of(16.0), 3);
        assert_eq!(sharp_band_of(16.5), 4);
    }

    #[test]
    fn j_max_covers_lattice() {
        // 32 * sqrt(2) = 45.25
        let p = DyadicPartition::new(&grid(2, 64), PartitionKind::Sharp);
        assert_eq!(p.j_max(), 6);
        let p = DyadicPartition::new(&grid(1, 64), PartitionKind::Sharp);
        assert_eq!(p.j_max(), 5);
        let p = DyadicPartition::new(&grid(3, 16), PartitionKind::Smooth);
        // 8 * sqrt(3) = 13.86
        assert_eq!(p.j_max(), 4);
    }

    #[test]
    fn partitions_sum_to_one() {
        for kind in [PartitionKind::Sharp, PartitionKind::Smooth] {
            let p = DyadicPartition::new(&grid(2, 64), kind);
            let dev = p.unity_deviation();
            match kind {
                PartitionKind::Sharp => assert_eq!(dev, 0.0),
                PartitionKind::Smooth => assert!(dev <= 1e-12, "{dev}"),
            }
        }
    }

    #[test]
    fn weights_in_unit_interval_and_supports() {
        let p = DyadicPartition::new(&grid(2, 32), PartitionKind::Smooth);
        for j in p.bands() {
            for k in p.bands() {
                let a = p.multiplier(j).unwrap();
                let b = p.multiplier(k).unwrap();
                assert!(a.iter().all(|w| (0.0..=1.0).contains(w)));
                if (j - k).abs() >= 2 {
                    assert!(a.iter().zip(b).all(|(x, y)| x * y == 0.0), "{j} {k}");
                }
            }
        }
    }

    #[test]
    fn single_mode_lands_in_one_band() {
        let g = grid(1, 32);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let f = SpectralField::single_mode(g, &[3], Complex64::new(1.0, 0.0)).unwrap();
        let d = decompose(&f, &p).unwrap();
        for (j, b) in d.iter() {
            if j == 1 {
                assert_eq!(b, &f);
            } else {
                assert_eq!(b.max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn two_modes_split() {
        let g = grid(1, 64);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let a = SpectralField::single_mode(g.clone(), &[1], Complex64::new(1.0, 0.0)).unwrap();
        let b = SpectralField::single_mode(g, &[16], Complex64::new(0.5, 0.0)).unwrap();
        let d = decompose(&a.add(&b).unwrap(), &p).unwrap();
        let nonzero: Vec<i32> = d
            .iter()
            .filter(|(_, b)| b.max_abs() > 0.0)
            .map(|(j, _)| j)
            .collect();
        assert_eq!(nonzero, vec![-1, 3]);
    }

    #[test]
    fn sixteen_sits_at_top_of_band_three_and_seventeen_in_four() {
        let g = grid(1, 64);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let b = SpectralField::single_mode(g, &[17], Complex64::new(1.0, 0.0)).unwrap();
        let d = decompose(&b, &p).unwrap();
        assert!(d.band(4).unwrap().max_abs() > 0.0);
    }

    #[test]
    fn constant_only_in_low_band() {
        let g = grid(2, 16);
        let p = DyadicPartition::new(&g, PartitionKind::Smooth);
        let f = SpectralField::single_mode(g, &[0, 0], Complex64::new(2.0, 0.0)).unwrap();
        let d = decompose(&f, &p).unwrap();
        for (j, b) in d.iter() {
            assert_eq!(b.max_abs() > 0.0, j == -1);
        }
    }

    #[test]
    fn band_errors() {
        let g = grid(1, 16);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let f = SpectralField::zeros(g.clone(), 1).unwrap();
        assert!(matches!(
            project_band(&f, &p, -2),
            Err(Error::BandOutOfRange { .. })
        ));
        assert!(matches!(
            project_band(&f, &p, p.j_max() + 1),
            Err(Error::BandOutOfRange { .. })
        ));
        let other = SpectralField::zeros(grid(1, 32), 1).unwrap();
        assert!(matches!(
            project_band(&other, &p, 0),
            Err(Error::MismatchedGrid)
        ));
        assert!(matches!(decompose(&other, &p), Err(Error::MismatchedGrid)));
    }

    #[test]
    fn zero_field_reconstructs_to_zero() {
        let g = grid(2, 8);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let f = SpectralField::zeros(g, 2).unwrap();
        let d = decompose(&f, &p).unwrap();
        assert!(d.bands().iter().all(|b| b.max_abs() == 0.0));
        assert_eq!(reconstruct(&d).max_abs(), 0.0);
    }

    #[test]
    fn single_band_reconstruction_is_identity() {
        let g = grid(1, 16);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let band = SpectralField::single_mode(g.clone(), &[5], Complex64::new(0.0, 2.0)).unwrap();
        let mut bands = vec![SpectralField::zeros(g, 1).unwrap(); p.band_count()];
        bands[3] = band.clone();
        let d = DyadicDecomposition::from_bands(&p, bands).unwrap();
        assert_eq!(reconstruct(&d), band);
    }

    #[test]
    fn non_unit_period_uses_physical_frequency() {
        // period 1: |xi| = 2 pi |m|; m = 1 -> 6.28 -> band 2
        let g = Grid::new(1, 16, 1.0).unwrap();
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        assert_eq!(p.weight(2, g.flat_of_wavevector(&[1])), 1.0);
    }
}
