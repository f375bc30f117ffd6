// Lebesgue, Sobolev, Bessel-potential, Besov and Triebel-Lizorkin norms of
// one field.

use spectral_regularity::field::{lp_norm, Grid};
use spectral_regularity::generate::{power_law_spectral, PowerLawSpec};
use spectral_regularity::littlewood_paley::{decompose, DyadicPartition, PartitionKind};
use spectral_regularity::norms::{besov_norm, hs_norm, tl_norm, wkp_norm};
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let grid = Grid::new(2, 64, 2.0 * std::f64::consts::PI)?;
    let spec = PowerLawSpec {
        exponent: 2.0,
        k_min: 1.0,
        k_max: None,
        seed: 7,
    };
    let f = power_law_spectral(&grid, 1, &spec)?;
    let physical = f.to_physical();
    let d = decompose(&f, &DyadicPartition::new(&grid, PartitionKind::Smooth))?;

    println!("||f||_L2        = {:.6}", lp_norm(&physical, 2.0)?);
    println!("||f||_W1,3      = {:.6}", wkp_norm(&physical, 1, 3.0)?);
    for s in [0.0, 0.5, 1.0] {
        println!("s = {s}");
        println!("  H^s           = {:.6}", hs_norm(&f, s)?);
        println!("  B^s_(2,2)     = {:.6}", besov_norm(&d, s, 2.0, 2.0)?);
        println!("  F^s_(2,2)     = {:.6}", tl_norm(&d, s, 2.0, 2.0)?);
        println!(
            "  B^s_(4,inf)   = {:.6}",
            besov_norm(&d, s, 4.0, f64::INFINITY)?
        );
        println!("  F^s_(4,1)     = {:.6}", tl_norm(&d, s, 4.0, 1.0)?);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
