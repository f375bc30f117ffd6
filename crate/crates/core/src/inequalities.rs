//! Numerical checks of norm equivalences, embeddings and interpolation
//! inequalities, plus empirical embedding constants over field corpora.
//!
//! Every check produces an [`InequalityReport`]: one [`RatioRecord`] per
//! field (or band), ratio statistics and a violation count. Constant-one
//! inequalities are checked with relative slack [`RELATIVE_SLACK`]; the
//! `H^s`/`B^s_{2,2}` equivalence is checked against bounds derived from the
//! partition before any field is seen.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::littlewood_paley::{decompose, DyadicPartition};
use crate::norms::{besov_norm, hs_norm, tl_norm, wkp_norm, NormParams};

/// Relative slack for inequalities that hold with constant one.
pub const RELATIVE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    Equivalence,
    Interpolation,
    Embedding,
    SupEmbedding,
    BandDecay,
    Criterion,
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityId::Equivalence => "equivalence",
            InequalityId::Interpolation => "interpolation",
            InequalityId::Embedding => "embedding",
            InequalityId::SupEmbedding => "sup-embedding",
            InequalityId::BandDecay => "band-decay",
            InequalityId::Criterion => "criterion",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when `rhs` vanishes.
    pub ratio: Option<f64>,
    pub violated: bool,
}

impl RatioRecord {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 && rhs.is_finite() {
            Some(lhs / rhs)
        } else {
            None
        };
        RatioRecord {
            label: label.into(),
            lhs,
            rhs,
            ratio,
            violated: false,
        }
    }

    fn flag(mut self, bounds: Option<RatioBounds>, tol: f64) -> Self {
        if let Some(b) = bounds {
            self.violated = match self.ratio {
                Some(r) => !b.contains(r, tol),
                // 0 <= 0 holds; a positive lhs over a zero rhs does not
                None => self.lhs > 0.0,
            };
        }
        self
    }
}

/// Closed interval `[lower, upper]` a ratio must stay in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBounds {
    pub lower: f64,
    pub upper: f64,
}

impl RatioBounds {
    pub fn at_most(upper: f64) -> Self {
        RatioBounds { lower: 0.0, upper }
    }

    pub fn contains(&self, ratio: f64, tol: f64) -> bool {
        ratio >= self.lower * (1.0 - tol) && ratio <= self.upper * (1.0 + tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl RatioStats {
    fn from_ratios(ratios: impl Iterator<Item = f64>) -> Option<Self> {
        let mut count = 0;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for r in ratios {
            count += 1;
            min = min.min(r);
            max = max.max(r);
            sum += r;
        }
        (count > 0).then(|| RatioStats {
            count,
            min,
            max,
            mean: sum / count as f64,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality: InequalityId,
    /// Parameters and, for embeddings, the empirical constants.
    pub detail: String,
    pub corpus: String,
    pub tolerance: f64,
    pub bounds: Option<RatioBounds>,
    pub records: Vec<RatioRecord>,
    pub stats: Option<RatioStats>,
    pub violations: usize,
    /// Largest relative gap of an identity checked alongside the ratio
    /// (`B^s_{2,2}` against `F^s_{2,2}` for the equivalence check).
    pub identity_max_deviation: Option<f64>,
}

impl InequalityReport {
    pub fn new(
        inequality: InequalityId,
        detail: impl Into<String>,
        corpus: impl Into<String>,
        tolerance: f64,
        bounds: Option<RatioBounds>,
        records: Vec<RatioRecord>,
    ) -> Self {
        let records: Vec<RatioRecord> = records
            .into_iter()
            .map(|r| r.flag(bounds, tolerance))
            .collect();
        let mut report = InequalityReport {
            inequality,
            detail: detail.into(),
            corpus: corpus.into(),
            tolerance,
            bounds,
            records,
            stats: None,
            violations: 0,
            identity_max_deviation: None,
        };
        report.refresh();
        report
    }

    fn refresh(&mut self) {
        self.stats = RatioStats::from_ratios(self.records.iter().filter_map(|r| r.ratio));
        self.violations = self.records.iter().filter(|r| r.violated).count();
    }

    /// Concatenates reports of one check over several fields, in order.
    pub fn merge(reports: Vec<InequalityReport>, corpus: impl Into<String>) -> Result<Self> {
        let mut iter = reports.into_iter();
        let mut out = iter.next().ok_or(Error::EmptyCorpus)?;
        out.corpus = corpus.into();
        for r in iter {
            if r.inequality != out.inequality {
                return Err(Error::InvalidParams(format!(
                    "cannot merge {} into {}",
                    r.inequality, out.inequality
                )));
            }
            out.records.extend(r.records);
            out.identity_max_deviation =
                match (out.identity_max_deviation, r.identity_max_deviation) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                };
        }
        out.refresh();
        Ok(out)
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn check_grid(field: &SpectralField, partition: &DyadicPartition) -> Result<()> {
    if field.grid() != partition.grid() {
        Err(Error::MismatchedGrid)
    } else {
        Ok(())
    }
}

/// Extremal values over the lattice of
/// `sqrt((1 + |xi|^2)^s / sum_j 2^{2js} chi_j(xi)^2)`, which bracket
/// `||f||_{H^s} / ||f||_{B^s_{2,2}}` for every field.
pub fn equivalence_bounds(partition: &DyadicPartition, s: f64) -> RatioBounds {
    let grid = partition.grid();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..grid.len() {
        let r = grid.radius(i);
        let besov_weight: f64 = partition
            .bands()
            .map(|j| {
                let chi = partition.weight(j, i);
                2f64.powf(2.0 * j as f64 * s) * chi * chi
            })
            .sum();
        let m = (1.0 + r * r).powf(s) / besov_weight;
        lo = lo.min(m);
        hi = hi.max(m);
    }
    RatioBounds {
        lower: lo.sqrt(),
        upper: hi.sqrt(),
    }
}

/// `B^s_{2,2} = F^s_{2,2}` and `c1 <= ||f||_{H^s} / ||f||_{B^s_{2,2}} <= c2`.
pub fn verify_equivalence(
    field: &SpectralField,
    s: f64,
    partition: &DyadicPartition,
) -> Result<InequalityReport> {
    verify_equivalence_with_bounds(field, s, partition, equivalence_bounds(partition, s))
}

fn verify_equivalence_with_bounds(
    field: &SpectralField,
    s: f64,
    partition: &DyadicPartition,
    bounds: RatioBounds,
) -> Result<InequalityReport> {
    check_grid(field, partition)?;
    let d = decompose(field, partition)?;
    let besov = besov_norm(&d, s, 2.0, 2.0)?;
    let tl = tl_norm(&d, s, 2.0, 2.0)?;
    let hs = hs_norm(field, s)?;
    let scale = besov.max(tl);
    let deviation = if scale > 0.0 {
        (besov - tl).abs() / scale
    } else {
        0.0
    };
    let mut report = InequalityReport::new(
        InequalityId::Equivalence,
        format!("s={s} p=2 q=2 partition={}", partition.kind()),
        "single field",
        RELATIVE_SLACK,
        Some(bounds),
        vec![RatioRecord::new("H^s / B^s_{2,2}", hs, besov)],
    );
    if deviation > RELATIVE_SLACK {
        report.records[0].violated = true;
        report.refresh();
    }
    report.identity_max_deviation = Some(deviation);
    Ok(report)
}

/// [`verify_equivalence`] over a corpus with bounds computed once up front.
pub fn verify_equivalence_corpus(
    corpus: &[SpectralField],
    s: f64,
    partition: &DyadicPartition,
) -> Result<InequalityReport> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let bounds = equivalence_bounds(partition, s);
    let reports = corpus
        .par_iter()
        .map(|f| verify_equivalence_with_bounds(f, s, partition, bounds))
        .collect::<Result<Vec<_>>>()?;
    InequalityReport::merge(reports, format!("{} fields", corpus.len()))
}

/// `||f||_{H^{s_a}} <= ||f||_{H^{s0}}^{1-a} ||f||_{H^{s1}}^a` with
/// `s_a = (1-a) s0 + a s1`.
pub fn verify_interpolation(
    field: &SpectralField,
    s0: f64,
    s1: f64,
    alpha: f64,
) -> Result<InequalityReport> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if s0.is_nan() || s1.is_nan() || s0 > s1 {
        return Err(Error::InvalidParams(format!(
            "need s0 <= s1, got {s0} > {s1}"
        )));
    }
    let s_alpha = (1.0 - alpha) * s0 + alpha * s1;
    let lhs = hs_norm(field, s_alpha)?;
    let rhs = hs_norm(field, s0)?.powf(1.0 - alpha) * hs_norm(field, s1)?.powf(alpha);
    Ok(InequalityReport::new(
        InequalityId::Interpolation,
        format!("s0={s0} s1={s1} alpha={alpha}"),
        "single field",
        RELATIVE_SLACK,
        Some(RatioBounds::at_most(1.0)),
        vec![RatioRecord::new("H^{s_alpha} / interpolant", lhs, rhs)],
    ))
}

/// Source and target spaces of an embedding whose constant is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingPair {
    /// `W^{k,p} -> B^s_{p,q}`
    SobolevToBesov,
    /// `H^s -> B^s_{p,q}`
    BesselToBesov,
    /// `B^s_{p,q} -> H^s`
    BesovToBessel,
}

impl fmt::Display for EmbeddingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingPair::SobolevToBesov => "W^{k,p} -> B^s_{p,q}",
            EmbeddingPair::BesselToBesov => "H^s -> B^s_{p,q}",
            EmbeddingPair::BesovToBessel => "B^s_{p,q} -> H^s",
        })
    }
}

/// Empirical constant `C = max target/source` over a corpus. No direction is
/// asserted: the detail string carries both `C` and the reverse constant
/// `1 / min ratio`.
pub fn estimate_embedding_constant(
    corpus: &[SpectralField],
    pair: EmbeddingPair,
    params: &NormParams,
    partition: &DyadicPartition,
) -> Result<InequalityReport> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    params.validate()?;
    let records = corpus
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            check_grid(f, partition)?;
            let d = decompose(f, partition)?;
            let besov = besov_norm(&d, params.s, params.p, params.q)?;
            let (source, target) = match pair {
                EmbeddingPair::SobolevToBesov => {
                    (wkp_norm(&f.to_physical(), params.k, params.p)?, besov)
                }
                EmbeddingPair::BesselToBesov => (hs_norm(f, params.s)?, besov),
                EmbeddingPair::BesovToBessel => (besov, hs_norm(f, params.s)?),
            };
            Ok(RatioRecord::new(format!("field {i}"), target, source))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = InequalityReport::new(
        InequalityId::Embedding,
        String::new(),
        format!("{} fields", corpus.len()),
        0.0,
        None,
        records,
    );
    report.detail = match report.stats {
        Some(st) => format!(
            "{pair} s={} p={} q={} k={}: C={:.17e} reverse={:.17e}",
            params.s,
            params.p,
            params.q,
            params.k,
            st.max,
            1.0 / st.min
        ),
        None => format!("{pair}: all fields vanish"),
    };
    Ok(report)
}

/// Cauchy-Schwarz constant `(sum_k (1 + |xi|^2)^{-s})^{1/2}` of the lattice:
/// `sup |f| <= constant * ||f||_{H^s}` for every field on the grid.
pub fn sup_embedding_bound(grid: &crate::field::Grid, s: f64) -> f64 {
    (0..grid.len())
        .map(|i| {
            let r = grid.radius(i);
            (1.0 + r * r).powf(-s)
        })
        .sum::<f64>()
        .sqrt()
}

/// `sup |f| / ||f||_{H^s}` against the lattice Cauchy-Schwarz bound.
pub fn verify_sup_embedding(field: &SpectralField, s: f64) -> Result<InequalityReport> {
    let sup = crate::field::lp_norm_spectral(field, f64::INFINITY)?;
    let hs = hs_norm(field, s)?;
    let bound = sup_embedding_bound(field.grid(), s);
    let critical = field.grid().dims() as f64 / 2.0;
    Ok(InequalityReport::new(
        InequalityId::SupEmbedding,
        format!("s={s} (s {} dims/2)", if s > critical { ">" } else { "<=" }),
        "single field",
        RELATIVE_SLACK,
        Some(RatioBounds::at_most(bound)),
        vec![RatioRecord::new("sup|f| / H^s", sup, hs)],
    ))
}
