//! Band-energy diagnostics, the interaction term `I(u)`, the energy-transfer
//! functional, the regularity verdict and shell-averaged energy spectra.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::inequalities::{
    InequalityId, InequalityReport, RatioBounds, RatioRecord, RELATIVE_SLACK,
};
use crate::littlewood_paley::{decompose, DyadicDecomposition, DyadicPartition, PartitionKind};
use crate::norms::{band_l2_norms, besov_norm, hs_norm, tl_norm};
use crate::solver::{leray_project, nonlinear_term, FlowState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandEntry {
    pub j: i32,
    pub l2: f64,
}

/// `||Delta_j u||_{L^2}` for every band, vector components combined in
/// quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandProfile {
    pub partition: PartitionKind,
    pub j_max: i32,
    pub time: Option<f64>,
    pub entries: Vec<BandEntry>,
}

impl BandProfile {
    pub fn with_time(mut self, time: f64) -> Self {
        self.time = Some(time);
        self
    }

    /// `sum_j ||Delta_j u||^2`.
    pub fn total_energy(&self) -> f64 {
        self.entries.iter().map(|e| e.l2 * e.l2).sum()
    }

    pub fn get(&self, j: i32) -> Option<f64> {
        self.entries.iter().find(|e| e.j == j).map(|e| e.l2)
    }
}

pub fn band_energy_profile(decomposition: &DyadicDecomposition) -> BandProfile {
    let partition = decomposition.partition();
    let entries = partition
        .bands()
        .zip(band_l2_norms(decomposition))
        .map(|(j, l2)| BandEntry { j, l2 })
        .collect();
    BandProfile {
        partition: partition.kind(),
        j_max: partition.j_max(),
        time: None,
        entries,
    }
}

/// Least-squares line through `(x, y)` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Inclusive range of the abscissa that was fitted.
    pub lo: f64,
    pub hi: f64,
    /// Root-mean-square residual of the fitted line.
    pub residual: f64,
    pub points: usize,
}

fn least_squares(points: &[(f64, f64)], lo: f64, hi: f64) -> Option<SlopeFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Some(SlopeFit {
        slope,
        intercept,
        lo,
        hi,
        residual: (ss / n).sqrt(),
        points: points.len(),
    })
}

/// Slope of `log2 ||Delta_j u||` against `j` over bands `j_lo..=j_hi`,
/// skipping empty bands.
pub fn band_slope(profile: &BandProfile, j_lo: i32, j_hi: i32) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = profile
        .entries
        .iter()
        .filter(|e| e.j >= j_lo && e.j <= j_hi && e.l2 > 0.0)
        .map(|e| (e.j as f64, e.l2.log2()))
        .collect();
    least_squares(&points, j_lo as f64, j_hi as f64).ok_or(Error::EmptyFitRange {
        lo: j_lo.max(0) as usize,
        hi: j_hi.max(0) as usize,
    })
}

/// Bands whose annuli lie entirely inside the lattice: `1..=j_max - 2`.
pub fn resolved_bands(partition: &DyadicPartition) -> (i32, i32) {
    (1, (partition.j_max() - 2).max(1))
}

/// Checks `||Delta_j u||_{L^2} <= 2^{-js} ||u||_{F^s_{2,2}}` for every band.
pub fn check_band_decay(
    profile: &BandProfile,
    s: f64,
    decomposition: &DyadicDecomposition,
) -> Result<InequalityReport> {
    if profile.entries.len() != decomposition.bands().len() {
        return Err(Error::InvalidParams(format!(
            "profile holds {} bands, decomposition {}",
            profile.entries.len(),
            decomposition.bands().len()
        )));
    }
    let f = tl_norm(decomposition, s, 2.0, 2.0)?;
    let records = profile
        .entries
        .iter()
        .map(|e| RatioRecord::new(format!("j={}", e.j), e.l2, 2f64.powf(-e.j as f64 * s) * f))
        .collect();
    Ok(InequalityReport::new(
        InequalityId::BandDecay,
        format!("s={s}"),
        "single field",
        RELATIVE_SLACK,
        Some(RatioBounds::at_most(1.0)),
        records,
    ))
}

/// `I(u) = sum_j 2^{js} ||Delta_j u||^2_{L^2}`.
pub fn interaction_term(decomposition: &DyadicDecomposition, s: f64) -> f64 {
    decomposition
        .partition()
        .bands()
        .zip(band_l2_norms(decomposition))
        .map(|(j, l2)| 2f64.powf(j as f64 * s) * l2 * l2)
        .sum()
}

/// `I` applied to the convective term, with and without Leray projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyTransfer {
    /// `I((u . grad) u)` as written, unprojected.
    pub raw: f64,
    /// `I(P (u . grad) u)`.
    pub projected: f64,
}

pub fn energy_transfer(
    state: &FlowState,
    partition: &DyadicPartition,
    s: f64,
) -> Result<EnergyTransfer> {
    let n = nonlinear_term(state)?;
    let p = leray_project(&n)?;
    Ok(EnergyTransfer {
        raw: interaction_term(&decompose(&n, partition)?, s),
        projected: interaction_term(&decompose(&p, partition)?, s),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Regular,
    SingularRisk,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Regular => "regular",
            Verdict::SingularRisk => "singular-risk",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub verdict: Verdict,
    /// `threshold * tl_norm_sq - I`.
    pub margin: f64,
    pub threshold: f64,
}

/// Compares `I` with `safety * 2^s * ||u||^2_{F^s_{2,2}}`. Margins within
/// rounding of zero are reported as zero.
pub fn regularity_verdict(
    i_u: f64,
    tl_norm_sq: f64,
    s: f64,
    safety: f64,
) -> Result<CriterionOutcome> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidRegularity(s));
    }
    if !(safety >= 1.0 && safety.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "safety factor must be >= 1, got {safety}"
        )));
    }
    if !(i_u.is_finite() && tl_norm_sq.is_finite()) {
        return Err(Error::non_finite("criterion inputs"));
    }
    let threshold = safety * 2f64.powf(s);
    let bound = threshold * tl_norm_sq;
    let mut margin = bound - i_u;
    if margin.abs() <= RELATIVE_SLACK * bound.abs().max(i_u.abs()) {
        margin = 0.0;
    }
    let verdict = if margin >= 0.0 {
        Verdict::Regular
    } else {
        Verdict::SingularRisk
    };
    Ok(CriterionOutcome {
        verdict,
        margin,
        threshold,
    })
}

/// Checks `I(u) <= 2^s ||u||^2_{F^s_{2,2}}` on one decomposition.
pub fn check_criterion(decomposition: &DyadicDecomposition, s: f64) -> Result<InequalityReport> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidRegularity(s));
    }
    let i_u = interaction_term(decomposition, s);
    let f = tl_norm(decomposition, s, 2.0, 2.0)?;
    let record = RatioRecord::new(format!("s={s}"), i_u, 2f64.powf(s) * f * f);
    Ok(InequalityReport::new(
        InequalityId::Criterion,
        format!("s={s}"),
        "single field",
        RELATIVE_SLACK,
        Some(RatioBounds::at_most(1.0)),
        vec![record],
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellEnergy {
    pub k: usize,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySpectrum {
    pub shells: Vec<ShellEnergy>,
    pub fit: SlopeFit,
}

impl EnergySpectrum {
    pub fn total(&self) -> f64 {
        self.shells.iter().map(|s| s.energy).sum()
    }
}

/// Default fit range `[4, N/6]` in integer shells.
pub fn default_fit_range(resolution: usize) -> (usize, usize) {
    (4, resolution / 6)
}

/// `E(k) = 1/2 sum_{k <= |m| < k+1} |u_hat(m)|^2` over integer lattice
/// shells.
pub fn shell_energies(velocity: &SpectralField) -> Vec<ShellEnergy> {
    let grid = velocity.grid();
    let half = (grid.resolution() / 2) as f64;
    let shells = (grid.dims() as f64 * half * half).sqrt().floor() as usize + 1;
    let mut energy = vec![0.0; shells];
    for i in 0..grid.len() {
        let k = (grid.lattice_norm_sq(i) as f64).sqrt().floor() as usize;
        let e: f64 = velocity.components().iter().map(|c| c[i].norm_sqr()).sum();
        energy[k] += 0.5 * e;
    }
    energy
        .into_iter()
        .enumerate()
        .map(|(k, energy)| ShellEnergy { k, energy })
        .collect()
}

/// Shell spectrum with the log-log slope fitted over `fit` (inclusive,
/// default [`default_fit_range`]). Empty shells are skipped.
pub fn energy_spectrum(
    velocity: &SpectralField,
    fit: Option<(usize, usize)>,
) -> Result<EnergySpectrum> {
    let (lo, hi) = fit.unwrap_or_else(|| default_fit_range(velocity.grid().resolution()));
    let shells = shell_energies(velocity);
    // shells holding only transform round-off are treated as empty
    let floor = f64::EPSILON * f64::EPSILON * shells.iter().map(|s| s.energy).sum::<f64>();
    let points: Vec<(f64, f64)> = shells
        .iter()
        .filter(|s| s.k >= lo.max(1) && s.k <= hi && s.energy > floor)
        .map(|s| ((s.k as f64).ln(), s.energy.ln()))
        .collect();
    let mut fit =
        least_squares(&points, lo as f64, hi as f64).ok_or(Error::EmptyFitRange { lo, hi })?;
    fit.lo = lo as f64;
    fit.hi = hi as f64;
    Ok(EnergySpectrum { shells, fit })
}

/// Diagnostics of one snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub time: f64,
    pub s: f64,
    pub safety: f64,
    pub i_u: f64,
    pub e_transfer: EnergyTransfer,
    pub tl_norm_sq: f64,
    pub besov_norm: f64,
    pub hs_norm: f64,
    pub verdict: Verdict,
    pub margin: f64,
    pub threshold: f64,
    /// `None` when the default fit range holds fewer than two shells.
    pub spectrum_fit: Option<SlopeFit>,
    pub spectrum: Vec<ShellEnergy>,
    pub bands: BandProfile,
}

pub fn diagnose(
    state: &FlowState,
    partition: &DyadicPartition,
    s: f64,
    safety: f64,
) -> Result<DiagnosticReport> {
    let d = decompose(state.velocity(), partition)?;
    let i_u = interaction_term(&d, s);
    let tl = tl_norm(&d, s, 2.0, 2.0)?;
    let tl_norm_sq = tl * tl;
    let outcome = regularity_verdict(i_u, tl_norm_sq, s, safety)?;
    let spectrum_fit = match energy_spectrum(state.velocity(), None) {
        Ok(sp) => Some(sp.fit),
        Err(Error::EmptyFitRange { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(DiagnosticReport {
        time: state.time(),
        s,
        safety,
        i_u,
        e_transfer: energy_transfer(state, partition, s)?,
        tl_norm_sq,
        besov_norm: besov_norm(&d, s, 2.0, 2.0)?,
        hs_norm: hs_norm(state.velocity(), s)?,
        verdict: outcome.verdict,
        margin: outcome.margin,
        threshold: outcome.threshold,
        spectrum_fit,
        spectrum: shell_energies(state.velocity()),
        bands: band_energy_profile(&d).with_time(state.time()),
    })
}

/// One report per snapshot, in time order.
pub fn monitor_trajectory(
    snapshots: &[FlowState],
    partition: &DyadicPartition,
    s: f64,
    safety: f64,
) -> Result<Vec<DiagnosticReport>> {
    if snapshots.windows(2).any(|w| w[1].time() <= w[0].time()) {
        return Err(Error::InvalidParams("snapshot times must increase".into()));
    }
    snapshots
        .par_iter()
        .map(|st| diagnose(st, partition, s, safety).map_err(|e| e.at_time(st.time())))
        .collect()
}
