//! The `lpspec` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 a verify suite found a
//! violation, 3 runtime or numeric failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    band_energy_profile, check_band_decay, check_criterion, energy_spectrum, BandEntry,
    DiagnosticReport, ShellEnergy,
};
use crate::error::{Error, Result};
use crate::field::{lp_norm, Grid, SpectralField};
use crate::field_file::{load_field, save_field, write_atomic};
use crate::generate::{
    generate_field, power_law_spectral, GeneratorKind, GeneratorSpec, PowerLawSpec,
};
use crate::inequalities::{
    estimate_embedding_constant, verify_equivalence_corpus, verify_interpolation,
    verify_sup_embedding, EmbeddingPair, InequalityReport,
};
use crate::littlewood_paley::{decompose, reconstruct, DyadicPartition, PartitionKind};
use crate::norms::{besov_norm, hs_norm, tl_norm, wkp_norm, NormParams};
use crate::report::{
    band_table_csv, diagnostics_json, emit_report, format_f64, to_json, ReportFormat,
};
use crate::solver::{convective_term, run as run_simulation, FlowState, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

pub const MANIFEST_NAME: &str = "trajectory.json";

#[derive(Debug, Parser)]
#[command(
    name = "lpspec",
    version,
    about = "Littlewood-Paley analysis of periodic fields"
)]
pub struct Cli {
    /// Frequency partition used by band-based quantities.
    #[arg(long, global = true, default_value = "sharp")]
    pub partition: PartitionKind,
    /// Seed for random generators and corpora.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (directory for `sim`); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "json")]
    pub format: ReportFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a field file.
    Gen(GenArgs),
    /// Lebesgue, Sobolev, Besov and Triebel-Lizorkin norms of a field file.
    Norm(NormArgs),
    /// Band profile of a field file, optionally writing every band.
    Decompose(DecomposeArgs),
    /// Run an inequality suite over field files or a seeded corpus.
    Verify(VerifyArgs),
    /// Integrate Navier-Stokes from a TOML or JSON config.
    Sim(SimArgs),
    /// Diagnostics of a trajectory manifest or a single velocity file.
    Diag(DiagArgs),
    /// Shell-averaged energy spectrum of a velocity file.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: GeneratorKind,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub period: f64,
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mode: Option<Vec<i64>>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub exponent: Option<f64>,
    #[arg(long)]
    pub viscosity: Option<f64>,
    #[arg(long)]
    pub time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    pub field: PathBuf,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub field: PathBuf,
    /// Directory receiving `band_<j>.lpf` for every band.
    #[arg(long)]
    pub bands_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Equivalence,
    Interpolation,
    Embedding,
    Decay,
    Criterion,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: Suite,
    /// Field files; a seeded power-law corpus is generated when empty.
    pub fields: Vec<PathBuf>,
    /// Regularity index; the criterion suite defaults to 0.5, 1, 1.5 and 2.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Random `(s0, s1, alpha)` triples per field for the interpolation suite.
    #[arg(long, default_value_t = 10)]
    pub triples: usize,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    #[arg(long, default_value_t = 1.5)]
    pub exponent: f64,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    /// `trajectory.json` written by `sim`, or a velocity field file.
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub safety: f64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub field: PathBuf,
    #[arg(long)]
    pub fit_lo: Option<usize>,
    #[arg(long)]
    pub fit_hi: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub time: f64,
    pub file: String,
    pub kinetic_energy: f64,
    pub max_divergence: f64,
}

/// Written by `sim` next to the snapshot files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub config: SimConfig,
    pub snapshots: Vec<SnapshotEntry>,
}

impl TrajectoryManifest {
    pub fn load(path: &Path) -> Result<(Self, Vec<FlowState>)> {
        let manifest: TrajectoryManifest = serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| Error::Config(e.to_string()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let states = manifest
            .snapshots
            .iter()
            .map(|s| {
                let v = load_field(dir.join(&s.file))?.to_spectral();
                Ok(FlowState::new(v, s.time, manifest.config.nu)?
                    .with_dealiasing(manifest.config.dealias))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((manifest, states))
    }
}

#[derive(Serialize)]
struct NormOutput {
    partition: PartitionKind,
    params: NormParams,
    lp: f64,
    wkp: f64,
    hs: f64,
    besov: f64,
    tl: f64,
}

#[derive(Serialize)]
struct DecomposeOutput {
    partition: PartitionKind,
    j_max: i32,
    unity_deviation: f64,
    reconstruction_error: f64,
    bands: Vec<BandEntry>,
}

#[derive(Serialize)]
struct SpectrumOutput {
    shells: Vec<ShellEnergy>,
    slope: f64,
    intercept: f64,
    fit_lo: f64,
    fit_hi: f64,
    residual: f64,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidParams(_)
        | Error::MissingSeed
        | Error::InvalidExponent(_)
        | Error::InvalidAlpha(_)
        | Error::InvalidRegularity(_)
        | Error::Config(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Writes to `--out` atomically, or to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn csv_rows(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn cmd_gen(cli: &Cli, a: &GenArgs) -> Result<()> {
    let out = cli.out.as_deref().ok_or_else(|| usage("gen needs --out"))?;
    let spec = GeneratorSpec {
        kind: a.kind,
        dims: a.dims,
        resolution: a.resolution,
        period: a.period,
        components: if a.kind == GeneratorKind::TaylorGreen {
            a.dims
        } else {
            a.components
        },
        mode: a.mode.clone(),
        amplitude: a.amplitude,
        exponent: a.exponent,
        seed: cli.seed,
        viscosity: a.viscosity,
        time: a.time,
    };
    save_field(&generate_field(&spec)?.into_field(), out)
}

fn cmd_norm(cli: &Cli, a: &NormArgs) -> Result<()> {
    let params = NormParams::new(a.s, a.p, a.q, a.k)?;
    let field = load_field(&a.field)?;
    let spectral = field.to_spectral();
    let partition = DyadicPartition::new(field.grid(), cli.partition);
    let d = decompose(&spectral, &partition)?;
    let o = NormOutput {
        partition: cli.partition,
        params,
        lp: lp_norm(&field, a.p)?,
        wkp: wkp_norm(&field, a.k, a.p)?,
        hs: hs_norm(&spectral, a.s)?,
        besov: besov_norm(&d, a.s, a.p, a.q)?,
        tl: tl_norm(&d, a.s, a.p, a.q)?,
    };
    let text = match cli.format {
        ReportFormat::Json => to_json(&o)?,
        ReportFormat::Csv => csv_rows(
            "norm,value",
            [
                ("lp", o.lp),
                ("wkp", o.wkp),
                ("hs", o.hs),
                ("besov", o.besov),
                ("tl", o.tl),
            ]
            .into_iter()
            .map(|(n, v)| format!("{n},{}", format_f64(v))),
        ),
    };
    emit(cli.out.as_deref(), &text)
}

fn cmd_decompose(cli: &Cli, a: &DecomposeArgs) -> Result<()> {
    let field = load_field(&a.field)?;
    let spectral = field.to_spectral();
    let partition = DyadicPartition::new(field.grid(), cli.partition);
    let d = decompose(&spectral, &partition)?;
    let back = reconstruct(&d);
    let scale = spectral.max_abs();
    let reconstruction_error = if scale > 0.0 {
        back.max_abs_diff(&spectral) / scale
    } else {
        back.max_abs()
    };
    if let Some(dir) = &a.bands_dir {
        fs::create_dir_all(dir)?;
        for (j, band) in d.iter() {
            save_field(&band.to_physical(), dir.join(format!("band_{j}.lpf")))?;
        }
    }
    let o = DecomposeOutput {
        partition: cli.partition,
        j_max: partition.j_max(),
        unity_deviation: partition.unity_deviation(),
        reconstruction_error,
        bands: band_energy_profile(&d).entries,
    };
    let text = match cli.format {
        ReportFormat::Json => to_json(&o)?,
        ReportFormat::Csv => csv_rows(
            "j,l2",
            o.bands
                .iter()
                .map(|b| format!("{},{}", b.j, format_f64(b.l2))),
        ),
    };
    emit(cli.out.as_deref(), &text)
}

fn corpus(cli: &Cli, a: &VerifyArgs) -> Result<Vec<SpectralField>> {
    if !a.fields.is_empty() {
        return a
            .fields
            .iter()
            .map(|p| Ok(load_field(p)?.to_spectral()))
            .collect();
    }
    let seed = cli.seed.ok_or(Error::MissingSeed)?;
    if a.count == 0 {
        return Err(Error::EmptyCorpus);
    }
    let grid = Grid::new(a.dims, a.resolution, std::f64::consts::TAU)?;
    (0..a.count as u64)
        .map(|i| {
            let spec = PowerLawSpec {
                exponent: a.exponent,
                k_min: 1.0,
                k_max: None,
                seed: seed.wrapping_add(i),
            };
            power_law_spectral(&grid, a.components, &spec)
        })
        .collect()
}

fn grid_of(fields: &[SpectralField]) -> Result<Grid> {
    let grid = fields.first().ok_or(Error::EmptyCorpus)?.grid().clone();
    if fields.iter().any(|f| f.grid() != &grid) {
        return Err(Error::MismatchedGrid);
    }
    Ok(grid)
}

pub fn run_suite(cli: &Cli, a: &VerifyArgs) -> Result<Vec<InequalityReport>> {
    let fields = corpus(cli, a)?;
    let grid = grid_of(&fields)?;
    let partition = DyadicPartition::new(&grid, cli.partition);
    let label = format!("{} fields", fields.len());
    let s = a.s.unwrap_or(1.0);
    match a.suite {
        Suite::Equivalence => Ok(vec![verify_equivalence_corpus(&fields, s, &partition)?]),
        Suite::Interpolation => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(0));
            let mut reports = Vec::with_capacity(fields.len() * a.triples);
            for f in &fields {
                for _ in 0..a.triples {
                    let s0 = rng.random_range(-1.0..2.0);
                    let s1 = s0 + rng.random_range(0.0..2.0);
                    let alpha = rng.random_range(0.0..=1.0);
                    reports.push(verify_interpolation(f, s0, s1, alpha)?);
                }
            }
            Ok(vec![InequalityReport::merge(reports, label)?])
        }
        Suite::Embedding => {
            let params = NormParams::new(s, 2.0, 2.0, s.ceil().max(0.0) as u32)?;
            let mut out = [
                EmbeddingPair::SobolevToBesov,
                EmbeddingPair::BesselToBesov,
                EmbeddingPair::BesovToBessel,
            ]
            .into_iter()
            .map(|pair| estimate_embedding_constant(&fields, pair, &params, &partition))
            .collect::<Result<Vec<_>>>()?;
            let sup = fields
                .iter()
                .map(|f| verify_sup_embedding(f, s))
                .collect::<Result<Vec<_>>>()?;
            out.push(InequalityReport::merge(sup, label)?);
            Ok(out)
        }
        Suite::Decay => {
            let mut reports = Vec::new();
            for f in &fields {
                let mut targets = vec![f.clone()];
                if f.n_components() == grid.dims() && grid.dims() >= 2 {
                    targets.push(convective_term(f, true)?);
                }
                for t in &targets {
                    let d = decompose(t, &partition)?;
                    reports.push(check_band_decay(&band_energy_profile(&d), s, &d)?);
                }
            }
            Ok(vec![InequalityReport::merge(
                reports,
                format!("{label} with convective terms"),
            )?])
        }
        Suite::Criterion => {
            let svals = a.s.map_or_else(|| vec![0.5, 1.0, 1.5, 2.0], |s| vec![s]);
            let decomps = fields
                .iter()
                .map(|f| decompose(f, &partition))
                .collect::<Result<Vec<_>>>()?;
            svals
                .into_iter()
                .map(|s| {
                    let reports = decomps
                        .iter()
                        .map(|d| check_criterion(d, s))
                        .collect::<Result<Vec<_>>>()?;
                    InequalityReport::merge(reports, label.clone())
                })
                .collect()
        }
    }
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<bool> {
    let reports = run_suite(cli, a)?;
    let text = match cli.format {
        ReportFormat::Json => to_json(&reports)?,
        ReportFormat::Csv => csv_rows(
            "inequality,label,lhs,rhs,ratio,violated",
            reports.iter().flat_map(|r| {
                r.records.iter().map(move |rec| {
                    format!(
                        "{},{},{},{},{},{}",
                        r.inequality,
                        rec.label.replace(',', ";"),
                        format_f64(rec.lhs),
                        format_f64(rec.rhs),
                        rec.ratio.map(format_f64).unwrap_or_default(),
                        rec.violated
                    )
                })
            }),
        ),
    };
    emit(cli.out.as_deref(), &text)?;
    Ok(reports.iter().all(InequalityReport::passed))
}

fn cmd_sim(cli: &Cli, a: &SimArgs) -> Result<()> {
    let dir = cli
        .out
        .as_deref()
        .ok_or_else(|| usage("sim needs --out <directory>"))?;
    let mut config = SimConfig::from_path(&a.config)?;
    if let Some(seed) = cli.seed {
        config.init.params.seed.get_or_insert(seed);
        config.forcing.seed.get_or_insert(seed);
    }
    let states = run_simulation(&config)?;
    fs::create_dir_all(dir)?;
    let mut snapshots = Vec::with_capacity(states.len());
    for (index, st) in states.iter().enumerate() {
        let file = format!("snapshot_{index:05}.lpf");
        save_field(&st.velocity().to_physical(), dir.join(&file))?;
        snapshots.push(SnapshotEntry {
            index,
            time: st.time(),
            file,
            kinetic_energy: st.kinetic_energy(),
            max_divergence: st.max_divergence(),
        });
    }
    let manifest = TrajectoryManifest { config, snapshots };
    write_atomic(dir.join(MANIFEST_NAME), to_json(&manifest)?.as_bytes())
}

fn load_states(input: &Path) -> Result<Vec<FlowState>> {
    if input.extension().and_then(|e| e.to_str()) == Some("json") {
        return TrajectoryManifest::load(input).map(|(_, s)| s);
    }
    let v: SpectralField = load_field(input)?.to_spectral();
    Ok(vec![FlowState::new(v, 0.0, 0.0)?])
}

fn diagnostics_for(cli: &Cli, a: &DiagArgs) -> Result<Vec<DiagnosticReport>> {
    let states = load_states(&a.input)?;
    let grid = states.first().ok_or(Error::EmptyCorpus)?.grid().clone();
    let partition = DyadicPartition::new(&grid, cli.partition);
    crate::diagnostics::monitor_trajectory(&states, &partition, a.s, a.safety)
}

fn cmd_diag(cli: &Cli, a: &DiagArgs) -> Result<()> {
    let reports = diagnostics_for(cli, a)?;
    match (cli.out.as_deref(), cli.format) {
        (Some(path), format) => emit_report(&reports, format, path).map(|_| ()),
        (None, ReportFormat::Json) => emit(None, &diagnostics_json(&reports)?),
        (None, ReportFormat::Csv) => emit(None, &band_table_csv(&reports)?),
    }
}

fn cmd_spectrum(cli: &Cli, a: &SpectrumArgs) -> Result<()> {
    let field = load_field(&a.field)?;
    let n = field.grid().resolution();
    let (lo, hi) = crate::diagnostics::default_fit_range(n);
    let range = (a.fit_lo.unwrap_or(lo), a.fit_hi.unwrap_or(hi));
    let sp = energy_spectrum(&field.to_spectral(), Some(range))?;
    let text = match cli.format {
        ReportFormat::Json => to_json(&SpectrumOutput {
            slope: sp.fit.slope,
            intercept: sp.fit.intercept,
            fit_lo: sp.fit.lo,
            fit_hi: sp.fit.hi,
            residual: sp.fit.residual,
            shells: sp.shells,
        })?,
        ReportFormat::Csv => csv_rows(
            "k,energy",
            sp.shells
                .iter()
                .map(|s| format!("{},{}", s.k, format_f64(s.energy))),
        ),
    };
    emit(cli.out.as_deref(), &text)
}

/// Executes a parsed command line, returning the exit code.
pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli, a)?,
        Command::Norm(a) => cmd_norm(cli, a)?,
        Command::Decompose(a) => cmd_decompose(cli, a)?,
        Command::Verify(a) => {
            if !cmd_verify(cli, a)? {
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::Sim(a) => cmd_sim(cli, a)?,
        Command::Diag(a) => cmd_diag(cli, a)?,
        Command::Spectrum(a) => cmd_spectrum(cli, a)?,
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs them.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lpspec: {e}");
            exit_code_for(&e)
        }
    }
}
