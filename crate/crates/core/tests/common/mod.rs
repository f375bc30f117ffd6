#![allow(dead_code)]

use num_complex::Complex64;
use spectral_regularity::field::{Grid, SpectralField};
use spectral_regularity::generate::{power_law_spectral, PowerLawSpec};
use spectral_regularity::solver::leray_project;

pub fn random_field(grid: &Grid, components: usize, exponent: f64, seed: u64) -> SpectralField {
    let spec = PowerLawSpec {
        exponent,
        k_min: 1.0,
        k_max: None,
        seed,
    };
    power_law_spectral(grid, components, &spec).unwrap()
}

/// Solenoidal random velocity with modes `|m| <= k_max` and unit `L^2` norm.
pub fn random_flow(grid: &Grid, k_max: f64, seed: u64) -> SpectralField {
    let spec = PowerLawSpec {
        exponent: 1.0,
        k_min: 1.0,
        k_max: Some(k_max),
        seed,
    };
    let p = leray_project(&power_law_spectral(grid, grid.dims(), &spec).unwrap()).unwrap();
    let norm = p.l2_norm();
    p.scaled(Complex64::new(1.0 / norm, 0.0))
}

fn kept(m: &[i64; 3], dims: usize, n: i64) -> bool {
    (0..dims).all(|a| 3 * m[a].abs() <= n && m[a] != -n / 2)
}

/// `(u . grad) u` by direct convolution over the 2/3-rule support, with the
/// result truncated to the same support.
pub fn oracle_convective(u: &SpectralField) -> SpectralField {
    let g = u.grid();
    let dims = g.dims();
    let n = g.resolution() as i64;
    let kappa = 2.0 * std::f64::consts::PI / g.period();
    let support: Vec<usize> = (0..g.len())
        .filter(|&i| kept(&g.wavevector(i), dims, n))
        .filter(|&i| (0..dims).any(|c| u.component(c)[i] != Complex64::new(0.0, 0.0)))
        .collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); g.len()]; dims];
    for &p in &support {
        let mp = g.wavevector(p);
        for &q in &support {
            let mq = g.wavevector(q);
            let mut mk = [0i64; 3];
            for a in 0..dims {
                mk[a] = mp[a] + mq[a];
            }
            if !kept(&mk, dims, n) {
                continue;
            }
            let k = g.flat_of_wavevector(&mk[..dims]);
            let advect: Complex64 = (0..dims)
                .map(|b| u.component(b)[p] * Complex64::new(0.0, kappa * mq[b] as f64))
                .sum();
            for (a, slot) in out.iter_mut().enumerate() {
                slot[k] += advect * u.component(a)[q];
            }
        }
    }
    SpectralField::new(g.clone(), out).unwrap()
}

/// Sharp band index by direct search: `-1` for `r <= 1`, else the `j` with
/// `2^j < r <= 2^{j+1}`.
pub fn oracle_band(r: f64) -> i32 {
    if r <= 1.0 {
        return -1;
    }
    let mut j = 0;
    while r > 2f64.powi(j + 1) {
        j += 1;
    }
    j
}

/// `sum_j 2^{js} ||Delta_j f||^2` by direct summation over coefficients.
pub fn oracle_interaction(f: &SpectralField, s: f64) -> f64 {
    let g = f.grid();
    (0..g.len())
        .map(|i| {
            let e: f64 = f.components().iter().map(|c| c[i].norm_sqr()).sum();
            2f64.powf(oracle_band(g.radius(i)) as f64 * s) * e
        })
        .sum()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
