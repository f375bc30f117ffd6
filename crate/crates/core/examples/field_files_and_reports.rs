// Saving and loading binary field files and emitting diagnostic reports as
// JSON and CSV.

use spectral_regularity::diagnostics::diagnose;
use spectral_regularity::field::Grid;
use spectral_regularity::field_file::{load_field, save_field};
use spectral_regularity::generate::{generate_field, GeneratorKind, GeneratorSpec};
use spectral_regularity::littlewood_paley::{DyadicPartition, PartitionKind};
use spectral_regularity::report::{emit_report, ReportFormat};
use spectral_regularity::solver::taylor_green;
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let mut spec = GeneratorSpec::new(GeneratorKind::WhiteNoise, 2, 32);
    spec.seed = Some(11);
    let field = generate_field(&spec)?.into_field();
    let path = dir.path().join("noise.lpf");
    save_field(&field, &path)?;
    let back = load_field(&path)?;
    println!(
        "{} bytes written, round trip exact: {}",
        std::fs::metadata(&path)?.len(),
        back == field
    );

    let grid = Grid::new(2, 32, 2.0 * std::f64::consts::PI)?;
    let report = diagnose(
        &taylor_green(&grid, 0.1, 0.0)?,
        &DyadicPartition::new(&grid, PartitionKind::Sharp),
        1.0,
        1.0,
    )?;
    let json = dir.path().join("diag.json");
    emit_report(std::slice::from_ref(&report), ReportFormat::Json, &json)?;
    println!("{}", std::fs::read_to_string(&json)?.trim_end());
    for file in emit_report(&[report], ReportFormat::Csv, &dir.path().join("diag.csv"))? {
        println!(
            "wrote {}",
            file.file_name().unwrap_or_default().to_string_lossy()
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
