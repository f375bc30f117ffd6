// Checking norm equivalence, interpolation and embeddings over a seeded
// corpus.

use spectral_regularity::field::Grid;
use spectral_regularity::generate::{power_law_spectral, PowerLawSpec};
use spectral_regularity::inequalities::{
    equivalence_bounds, estimate_embedding_constant, verify_equivalence_corpus,
    verify_interpolation, verify_sup_embedding, EmbeddingPair,
};
use spectral_regularity::littlewood_paley::{DyadicPartition, PartitionKind};
use spectral_regularity::norms::NormParams;
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let grid = Grid::new(2, 32, 2.0 * std::f64::consts::PI)?;
    let corpus = (0..12)
        .map(|seed| {
            power_law_spectral(
                &grid,
                1,
                &PowerLawSpec {
                    exponent: 1.5,
                    k_min: 1.0,
                    k_max: None,
                    seed,
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let partition = DyadicPartition::new(&grid, PartitionKind::Smooth);

    let bounds = equivalence_bounds(&partition, 1.0);
    let eq = verify_equivalence_corpus(&corpus, 1.0, &partition)?;
    println!(
        "equivalence: H/B in [{:.4}, {:.4}], observed {:?}, violations {}",
        bounds.lower,
        bounds.upper,
        eq.stats.map(|s| (s.min, s.max)),
        eq.violations
    );

    let interp = verify_interpolation(&corpus[0], 0.0, 2.0, 0.25)?;
    println!(
        "interpolation ratio {:.6}, passed {}",
        interp.records[0].ratio.unwrap_or(0.0),
        interp.passed()
    );

    let params = NormParams::new(1.0, 2.0, 2.0, 1)?;
    let emb =
        estimate_embedding_constant(&corpus, EmbeddingPair::BesselToBesov, &params, &partition)?;
    println!("embedding: {}", emb.detail);

    let sup = verify_sup_embedding(&corpus[0], 1.5)?;
    println!(
        "sup embedding ratio {:.4} against bound {:.4}",
        sup.records[0].ratio.unwrap_or(0.0),
        sup.bounds.map_or(0.0, |b| b.upper)
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
