//! Lebesgue, Sobolev, Besov and Triebel-Lizorkin norms of periodic fields.
//!
//! Exponents are `f64` with `f64::INFINITY` standing for the sup norm.
//! Besov and Triebel-Lizorkin norms take a [`DyadicDecomposition`] so the
//! partition behind every value is explicit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    check_exponent, lp_norm, lp_of_magnitudes, pointwise_magnitudes_complex, spectral_derivative,
    SampledField, SpectralField,
};
use crate::littlewood_paley::DyadicDecomposition;

/// Regularity `s`, integrability `p`, summability `q` and Sobolev order `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub k: u32,
}

impl NormParams {
    pub fn new(s: f64, p: f64, q: f64, k: u32) -> Result<Self> {
        let params = NormParams { s, p, q, k };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::InvalidParams(format!("regularity index {}", self.s)));
        }
        check_exponent(self.p)?;
        check_exponent(self.q)
    }
}

impl Default for NormParams {
    fn default() -> Self {
        NormParams {
            s: 1.0,
            p: 2.0,
            q: 2.0,
            k: 1,
        }
    }
}

fn finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::non_finite(what.to_string()))
    }
}

/// `(sum_j t_j^q)^(1/q)`, or `max_j t_j` for `q = inf`.
pub(crate) fn lq_aggregate(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(0.0, f64::max);
    if q.is_infinite() || max == 0.0 {
        return max;
    }
    let sum: f64 = terms.iter().map(|t| (t / max).powf(q)).sum();
    max * sum.powf(1.0 / q)
}

/// Bessel-potential norm `(sum_k (1 + |xi|^2)^s |f_hat(k)|^2)^(1/2)`.
pub fn hs_norm(field: &SpectralField, s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::InvalidParams(format!("regularity index {s}")));
    }
    let grid = field.grid();
    let weights: Vec<f64> = (0..grid.len())
        .map(|i| {
            let r = grid.radius(i);
            (1.0 + r * r).powf(s)
        })
        .collect();
    let sum: f64 = field
        .components()
        .iter()
        .flat_map(|c| c.iter().zip(&weights).map(|(v, w)| w * v.norm_sqr()))
        .sum();
    finite(sum.sqrt(), "H^s norm")
}

/// Every multi-index over `dims` axes with total order at most `k`.
pub fn multi_indices(dims: usize, k: u32) -> Vec<Vec<u32>> {
    fn fill(prefix: &mut Vec<u32>, dims: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == dims {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=budget {
            prefix.push(a);
            fill(prefix, dims, budget - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(dims), dims, k, &mut out);
    out
}

/// `D^alpha f` computed spectrally.
pub fn weak_derivative(field: &SpectralField, alpha: &[u32]) -> Result<SpectralField> {
    let mut out = field.clone();
    for (axis, &order) in alpha.iter().enumerate() {
        if order > 0 {
            out = spectral_derivative(&out, axis, order)?;
        }
    }
    Ok(out)
}

/// `W^{k,p}` norm `(sum_{|alpha| <= k} ||D^alpha f||_p^p)^(1/p)`; the sup
/// over `alpha` when `p = inf`.
pub fn wkp_norm(field: &SampledField, k: u32, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if k == 0 {
        return lp_norm(field, p);
    }
    let spectral = field.to_spectral();
    let norms = multi_indices(field.grid().dims(), k)
        .iter()
        .map(|alpha| {
            let d = weak_derivative(&spectral, alpha)?.to_physical();
            lp_norm(&d, p)
        })
        .collect::<Result<Vec<_>>>()?;
    finite(lq_aggregate(norms.into_iter(), p), "W^{k,p} norm")
}

/// `L^p` norm of each band, in ascending `j`.
pub fn band_lp_norms(decomposition: &DyadicDecomposition, p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    Ok(decomposition
        .physical_bands()
        .iter()
        .map(|band| lp_of_magnitudes(&pointwise_magnitudes_complex(band), p))
        .collect())
}

/// `L^2` norm of each band through Parseval, in ascending `j`.
pub fn band_l2_norms(decomposition: &DyadicDecomposition) -> Vec<f64> {
    decomposition.bands().iter().map(|b| b.l2_norm()).collect()
}

/// `(sum_j 2^{jsq} ||Delta_j f||_p^q)^(1/q)`.
pub fn besov_norm(decomposition: &DyadicDecomposition, s: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent(q)?;
    let norms = band_lp_norms(decomposition, p)?;
    let terms = norms
        .iter()
        .enumerate()
        .map(|(i, n)| 2f64.powf((i as i32 - 1) as f64 * s) * n);
    finite(lq_aggregate(terms, q), "Besov norm")
}

/// `|| (sum_j 2^{jsq} |Delta_j f(x)|^q)^(1/q) ||_p` with the band sum taken
/// pointwise.
pub fn tl_norm(decomposition: &DyadicDecomposition, s: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    let bands = decomposition.physical_bands();
    let weights: Vec<f64> = (0..bands.len())
        .map(|i| 2f64.powf((i as i32 - 1) as f64 * s))
        .collect();
    let magnitudes: Vec<Vec<f64>> = bands
        .iter()
        .map(|b| pointwise_magnitudes_complex(b))
        .collect();
    let len = magnitudes[0].len();
    let pointwise: Vec<f64> = (0..len)
        .map(|x| lq_aggregate(magnitudes.iter().zip(&weights).map(|(m, w)| w * m[x]), q))
        .collect();
    finite(lp_of_magnitudes(&pointwise, p), "Triebel-Lizorkin norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::littlewood_paley::{decompose, DyadicPartition, PartitionKind};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> Grid {
        Grid::new(1, n, 2.0 * PI).unwrap()
    }

    #[test]
    fn hs_examples() {
        let g = grid1(16);
        let c = SpectralField::single_mode(g.clone(), &[0], Complex64::new(-2.0, 0.0)).unwrap();
        for s in [-1.0, 0.0, 0.5, 3.0] {
            assert_relative_eq!(hs_norm(&c, s).unwrap(), 2.0, max_relative = 1e-15);
        }
        let m = SpectralField::single_mode(g, &[3], Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(
            hs_norm(&m, 1.0).unwrap(),
            10f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn hs_zero_matches_l2() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let f = SampledField::from_fn(g, 1, |x, _| (x[0] + 0.3).sin() * (2.0 * x[1]).cos() + 0.4)
            .unwrap();
        let l2 = lp_norm(&f, 2.0).unwrap();
        assert_relative_eq!(
            hs_norm(&f.to_spectral(), 0.0).unwrap(),
            l2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(1, 3).len(), 4);
        assert_eq!(multi_indices(2, 1).len(), 3);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 2).len(), 10);
    }

    #[test]
    fn wkp_examples() {
        let g = grid1(64);
        let f = SampledField::from_fn(g, 1, |x, _| x[0].sin()).unwrap();
        assert_relative_eq!(wkp_norm(&f, 0, 3.0).unwrap(), lp_norm(&f, 3.0).unwrap());
        assert_relative_eq!(wkp_norm(&f, 1, 2.0).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(
            wkp_norm(&f, 1, 2.0).unwrap(),
            hs_norm(&f.to_spectral(), 1.0).unwrap(),
            max_relative = 1e-12
        );
        assert!(matches!(
            wkp_norm(&f, 1, 0.9),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn besov_single_mode() {
        let g = grid1(32);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let m = SpectralField::single_mode(g, &[3], Complex64::new(1.0, 0.0)).unwrap();
        let d = decompose(&m, &p).unwrap();
        assert_relative_eq!(
            besov_norm(&d, 1.5, 2.0, 2.0).unwrap(),
            2f64.powf(1.5),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            tl_norm(&d, 1.5, 2.0, 2.0).unwrap(),
            2f64.powf(1.5),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            tl_norm(&d, 0.7, 3.0, 1.5).unwrap(),
            besov_norm(&d, 0.7, 3.0, 1.5).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = Grid::new(2, 8, 2.0 * PI).unwrap();
        let p = DyadicPartition::new(&g, PartitionKind::Smooth);
        let d = decompose(&SpectralField::zeros(g, 1).unwrap(), &p).unwrap();
        assert_eq!(besov_norm(&d, 2.0, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(tl_norm(&d, 2.0, 4.0, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn q_monotone_on_two_bands() {
        let g = grid1(64);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let f = SampledField::from_fn(g, 1, |x, _| x[0].cos() + 0.3 * (12.0 * x[0]).sin()).unwrap();
        let d = decompose(&f.to_spectral(), &p).unwrap();
        let b1 = besov_norm(&d, 0.5, 2.0, 1.0).unwrap();
        let b2 = besov_norm(&d, 0.5, 2.0, 2.0).unwrap();
        let binf = besov_norm(&d, 0.5, 2.0, f64::INFINITY).unwrap();
        assert!(b1 >= b2 && b2 >= binf);
    }

    #[test]
    fn exponent_validation() {
        let g = grid1(8);
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        let d = decompose(&SpectralField::zeros(g, 1).unwrap(), &p).unwrap();
        assert!(besov_norm(&d, 1.0, 0.5, 2.0).is_err());
        assert!(besov_norm(&d, 1.0, 2.0, 0.0).is_err());
        assert!(tl_norm(&d, 1.0, 2.0, -1.0).is_err());
        assert!(NormParams::new(1.0, 2.0, 0.5, 0).is_err());
    }
}
