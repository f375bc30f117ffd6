// Shell-averaged spectrum of a synthetic field built to decay like
// `k^(-5/3)`, and the band slope of a power-law field.

use spectral_regularity::diagnostics::{
    band_energy_profile, band_slope, energy_spectrum, resolved_bands,
};
use spectral_regularity::field::Grid;
use spectral_regularity::generate::{
    exponent_for_spectrum_slope, power_law_spectral, PowerLawSpec,
};
use spectral_regularity::littlewood_paley::{decompose, DyadicPartition, PartitionKind};
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let grid = Grid::new(2, 128, 2.0 * std::f64::consts::PI)?;
    let a = exponent_for_spectrum_slope(-5.0 / 3.0, 2);
    let velocity = power_law_spectral(
        &grid,
        2,
        &PowerLawSpec {
            exponent: a,
            k_min: 1.0,
            k_max: None,
            seed: 3,
        },
    )?;
    let spectrum = energy_spectrum(&velocity, Some((4, 20)))?;
    for s in spectrum.shells.iter().take(8) {
        println!("E({}) = {:.4e}", s.k, s.energy);
    }
    println!(
        "fitted slope {:.3} over shells 4..20 (residual {:.3})",
        spectrum.fit.slope, spectrum.fit.residual
    );

    let scalar = power_law_spectral(
        &grid,
        1,
        &PowerLawSpec {
            exponent: 2.5,
            k_min: 1.0,
            k_max: None,
            seed: 3,
        },
    )?;
    let partition = DyadicPartition::new(&grid, PartitionKind::Sharp);
    let profile = band_energy_profile(&decompose(&scalar, &partition)?);
    let (lo, hi) = resolved_bands(&partition);
    println!(
        "band slope {:.3} over j = {lo}..{hi}",
        band_slope(&profile, lo, hi)?.slope
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
