//! JSON and CSV serialization of diagnostics. Floats are written with 17
//! significant digits so values survive a text round trip exactly.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::{BandEntry, DiagnosticReport, Verdict};
use crate::error::{Error, Result};
use crate::field_file::write_atomic;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidParams(format!("unknown format {other:?}"))),
        }
    }
}

/// Exponent form with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct ExactFloats;

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidParams(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[derive(Serialize)]
struct SnapshotJson<'a> {
    time: f64,
    i_u: f64,
    e_transfer: f64,
    tl_norm_sq: f64,
    verdict: Verdict,
    margin: f64,
    slope: Option<f64>,
    bands: &'a [BandEntry],
}

/// Trajectory JSON: one object per snapshot with keys `time`, `i_u`,
/// `e_transfer` (unprojected), `tl_norm_sq`, `verdict`, `margin`, `slope`
/// and `bands`.
pub fn diagnostics_json(reports: &[DiagnosticReport]) -> Result<String> {
    let rows: Vec<SnapshotJson> = reports
        .iter()
        .map(|r| SnapshotJson {
            time: r.time,
            i_u: r.i_u,
            e_transfer: r.e_transfer.raw,
            tl_norm_sq: r.tl_norm_sq,
            verdict: r.verdict,
            margin: r.margin,
            slope: r.spectrum_fit.map(|f| f.slope),
            bands: &r.bands.entries,
        })
        .collect();
    to_json(&rows)
}

fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::InvalidParams(format!("csv: {e}"));
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::IoFailure(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

/// `time,j,l2`: one row per band and snapshot.
pub fn band_table_csv(reports: &[DiagnosticReport]) -> Result<String> {
    csv_table(
        &["time", "j", "l2"],
        reports.iter().flat_map(|r| {
            r.bands
                .entries
                .iter()
                .map(move |e| vec![format_f64(r.time), e.j.to_string(), format_f64(e.l2)])
        }),
    )
}

/// `time,k,energy`: one row per shell and snapshot.
pub fn spectrum_table_csv(reports: &[DiagnosticReport]) -> Result<String> {
    csv_table(
        &["time", "k", "energy"],
        reports.iter().flat_map(|r| {
            r.spectrum
                .iter()
                .map(move |s| vec![format_f64(r.time), s.k.to_string(), format_f64(s.energy)])
        }),
    )
}

/// One row of scalar diagnostics per snapshot, both transfer variants
/// included.
pub fn summary_csv(reports: &[DiagnosticReport]) -> Result<String> {
    let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
    csv_table(
        &[
            "time",
            "i_u",
            "e_transfer",
            "e_transfer_projected",
            "tl_norm_sq",
            "besov_norm",
            "hs_norm",
            "verdict",
            "margin",
            "slope",
        ],
        reports.iter().map(|r| {
            vec![
                format_f64(r.time),
                format_f64(r.i_u),
                format_f64(r.e_transfer.raw),
                format_f64(r.e_transfer.projected),
                format_f64(r.tl_norm_sq),
                format_f64(r.besov_norm),
                format_f64(r.hs_norm),
                r.verdict.to_string(),
                format_f64(r.margin),
                opt(r.spectrum_fit.map(|f| f.slope)),
            ]
        }),
    )
}

/// `dir/stem.suffix.csv` beside `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("report");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Writes `reports` to `path`. CSV output puts the band table at `path`
/// and the spectrum and summary tables in `<stem>.spectrum.csv` and
/// `<stem>.summary.csv` beside it. Returns every file written.
pub fn emit_report(
    reports: &[DiagnosticReport],
    format: ReportFormat,
    path: &Path,
) -> Result<Vec<PathBuf>> {
    match format {
        ReportFormat::Json => {
            write_atomic(path, diagnostics_json(reports)?.as_bytes())?;
            Ok(vec![path.to_path_buf()])
        }
        ReportFormat::Csv => {
            let spectrum = sibling(path, "spectrum");
            let summary = sibling(path, "summary");
            write_atomic(path, band_table_csv(reports)?.as_bytes())?;
            write_atomic(&spectrum, spectrum_table_csv(reports)?.as_bytes())?;
            write_atomic(&summary, summary_csv(reports)?.as_bytes())?;
            Ok(vec![path.to_path_buf(), spectrum, summary])
        }
    }
}
