// Splitting a field into dyadic frequency bands with sharp and smooth
// partitions and putting it back together.

use spectral_regularity::diagnostics::band_energy_profile;
use spectral_regularity::field::{Grid, SampledField};
use spectral_regularity::littlewood_paley::{
    decompose, reconstruct, DyadicPartition, PartitionKind,
};
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let grid = Grid::new(2, 64, 2.0 * std::f64::consts::PI)?;
    let f = SampledField::from_fn(grid.clone(), 1, |x, _| {
        x[0].cos() + 0.5 * (6.0 * x[1]).sin() + 0.1 * (20.0 * x[0]).cos()
    })?
    .to_spectral();
    for kind in [PartitionKind::Sharp, PartitionKind::Smooth] {
        let partition = DyadicPartition::new(&grid, kind);
        let d = decompose(&f, &partition)?;
        println!(
            "{kind} partition, bands -1..={}, unity deviation {:.1e}",
            partition.j_max(),
            partition.unity_deviation()
        );
        for e in band_energy_profile(&d).entries {
            println!("  j = {:>2}: ||Delta_j f|| = {:.6}", e.j, e.l2);
        }
        println!(
            "  reconstruction error {:.1e}",
            reconstruct(&d).max_abs_diff(&f)
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
