//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{oracle_convective, oracle_interaction, random_field, random_flow, rel_diff};
use spectral_regularity::diagnostics::{
    band_energy_profile, band_slope, check_band_decay, check_criterion, energy_spectrum,
    energy_transfer, interaction_term, monitor_trajectory, resolved_bands, Verdict,
};
use spectral_regularity::field::{Grid, SpectralField};
use spectral_regularity::generate::exponent_for_spectrum_slope;
use spectral_regularity::inequalities::{
    verify_equivalence_corpus, verify_interpolation, InequalityReport,
};
use spectral_regularity::littlewood_paley::{
    decompose, reconstruct, DyadicPartition, PartitionKind,
};
use spectral_regularity::norms::besov_norm;
use spectral_regularity::solver::{
    convective_term, dealias, run, taylor_green, taylor_green_field, FlowState, Integrator,
    SimConfig,
};
use std::f64::consts::PI;

const KINDS: [PartitionKind; 2] = [PartitionKind::Sharp, PartitionKind::Smooth];
const S_VALUES: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn corpus() -> Vec<SpectralField> {
    let g2 = Grid::new(2, 32, 2.0 * PI).unwrap();
    let g3 = Grid::new(3, 16, 2.0 * PI).unwrap();
    let mut fields: Vec<SpectralField> = (0..70)
        .map(|i| random_field(&g2, 1 + (i % 2) as usize, 0.25 + 0.05 * i as f64, 1000 + i))
        .collect();
    fields.extend((0..30).map(|i| {
        random_field(
            &g3,
            1 + 2 * (i % 2) as usize,
            0.5 + 0.1 * i as f64,
            2000 + i,
        )
    }));
    fields
}

fn forced_run() -> Vec<FlowState> {
    let cfg = SimConfig::from_toml(
        r#"
nu = 0.02
dt = 0.005
t_end = 0.5
snapshot_every = 20
[grid]
dims = 2
resolution = 64
[init]
kind = "random"
params = { seed = 17, exponent = 1.0, amplitude = 1.0 }
[forcing]
kind = "random-band"
seed = 18
params = { band = 2, amplitude = 0.5 }
"#,
    )
    .unwrap();
    run(&cfg).unwrap()
}

fn c1_partition() -> Outcome {
    let start = Instant::now();
    let (mut unity, mut recon) = (0.0f64, 0.0f64);
    for (dims, n) in [(2, 256), (3, 32)] {
        let g = Grid::new(dims, n, 2.0 * PI).unwrap();
        for kind in KINDS {
            let p = DyadicPartition::new(&g, kind);
            unity = unity.max(p.unity_deviation());
            for seed in 0..20 {
                let f = random_field(&g, 1, 1.0, seed);
                let back = reconstruct(&decompose(&f, &p).unwrap());
                recon = recon.max(back.max_abs_diff(&f) / f.max_abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        unity <= 1e-12 && recon <= 1e-12 && secs < 10.0,
        format!("unity deviation {unity:.2e} <= 1e-12, reconstruction {recon:.2e} <= 1e-12, {secs:.2}s < 10s"),
    )
}

fn c2_equivalence(fields: &[SpectralField]) -> Outcome {
    let mut identity = 0.0f64;
    let mut violations = 0;
    let mut count = 0;
    for kind in KINDS {
        for s in [-0.5, 0.5, 1.0, 2.0] {
            for dims in [2, 3] {
                let group: Vec<SpectralField> = fields
                    .iter()
                    .filter(|f| f.grid().dims() == dims)
                    .cloned()
                    .collect();
                let p = DyadicPartition::new(group[0].grid(), kind);
                let r = verify_equivalence_corpus(&group, s, &p).unwrap();
                identity = identity.max(r.identity_max_deviation.unwrap());
                violations += r.violations;
                count += r.records.len();
            }
        }
    }
    outcome(
        identity <= 1e-12 && violations == 0,
        format!("{count} checks, |B-F|/F max {identity:.2e} <= 1e-12, H/B outside [c1,c2]: {violations}"),
    )
}

fn c3_interpolation(fields: &[SpectralField]) -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut reports = Vec::new();
    for i in 0..1000 {
        let f = &fields[i % fields.len()];
        let s0 = rng.random_range(-2.0..3.0);
        let s1 = s0 + rng.random_range(0.0..3.0);
        let alpha = rng.random_range(0.0..=1.0);
        reports.push(verify_interpolation(f, s0, s1, alpha).unwrap());
    }
    let r = InequalityReport::merge(reports, "1000 triples").unwrap();
    outcome(
        r.violations == 0 && r.records.len() == 1000,
        format!(
            "{} triples, violations {} at slack 1e-12",
            r.records.len(),
            r.violations
        ),
    )
}

fn c4_band_decay(fields: &[SpectralField], snapshots: &[FlowState]) -> Outcome {
    let mut targets: Vec<SpectralField> = fields.to_vec();
    for f in fields
        .iter()
        .filter(|f| f.n_components() == f.grid().dims())
    {
        targets.push(convective_term(f, true).unwrap());
    }
    for st in snapshots {
        targets.push(convective_term(st.velocity(), true).unwrap());
    }
    let (mut checks, mut violations) = (0, 0);
    for f in &targets {
        for kind in KINDS {
            let d = decompose(f, &DyadicPartition::new(f.grid(), kind)).unwrap();
            let prof = band_energy_profile(&d);
            for s in S_VALUES {
                let r = check_band_decay(&prof, s, &d).unwrap();
                checks += r.records.len();
                violations += r.violations;
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} fields incl. convective terms, {checks} band checks, violations {violations}",
            targets.len()
        ),
    )
}

fn c5_identity(fields: &[SpectralField], snapshots: &[FlowState]) -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    let all = fields.iter().chain(snapshots.iter().map(|s| s.velocity()));
    for f in all {
        for kind in KINDS {
            let d = decompose(f, &DyadicPartition::new(f.grid(), kind)).unwrap();
            for s in [-1.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
                let b = besov_norm(&d, s / 2.0, 2.0, 2.0).unwrap();
                worst = worst.max(rel_diff(interaction_term(&d, s), b * b));
                n += 1;
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{n} evaluations, max relative gap {worst:.2e} <= 1e-12"),
    )
}

fn c6_criterion(fields: &[SpectralField], snapshots: &[FlowState]) -> Outcome {
    let mut violations = 0;
    let mut checks = 0;
    for f in fields {
        for kind in KINDS {
            let d = decompose(f, &DyadicPartition::new(f.grid(), kind)).unwrap();
            for s in S_VALUES {
                violations += check_criterion(&d, s).unwrap().violations;
                checks += 1;
            }
        }
    }
    let mut min_margin = f64::INFINITY;
    let mut risky = 0;
    for kind in KINDS {
        let p = DyadicPartition::new(snapshots[0].grid(), kind);
        for s in S_VALUES {
            for r in monitor_trajectory(snapshots, &p, s, 1.0).unwrap() {
                min_margin = min_margin.min(r.margin);
                risky += (r.verdict != Verdict::Regular) as usize;
            }
        }
    }
    outcome(
        violations == 0 && min_margin >= 0.0 && risky == 0,
        format!("{checks} field checks, violations {violations}; snapshot margins min {min_margin:.3e} >= 0"),
    )
}

fn c7_taylor_green() -> Outcome {
    let start = Instant::now();
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    let (nu, dt) = (0.1, 1e-3);
    let integ = Integrator::new(&g, nu, dt).unwrap();
    let mut state = taylor_green(&g, nu, 0.0).unwrap();
    let e0 = state.kinetic_energy();
    let (mut vel_err, mut energy_err, mut div) = (0.0f64, 0.0f64, state.max_divergence());
    for i in 1..=1000 {
        state = integ.advance(&state).unwrap();
        let t = i as f64 * dt;
        div = div.max(state.max_divergence());
        energy_err = energy_err.max(rel_diff(state.kinetic_energy(), e0 * (-4.0 * nu * t).exp()));
        if i % 10 == 0 {
            let exact = taylor_green_field(&g, nu, t).unwrap();
            vel_err = vel_err.max(state.velocity().to_physical().max_abs_diff(&exact));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        vel_err <= 1e-8 && energy_err <= 1e-8 && div <= 1e-10 && secs < 60.0,
        format!(
            "max |u-u_exact| {vel_err:.2e} <= 1e-8, energy law {energy_err:.2e} <= 1e-8, div {div:.2e} <= 1e-10, {secs:.2}s < 60s"
        ),
    )
}

fn c8_oracle() -> Outcome {
    let (mut conv, mut transfer) = (0.0f64, 0.0f64);
    for (dims, seed) in [(2, 1), (2, 2), (2, 3), (3, 4)] {
        let g = Grid::new(dims, 16, 2.0 * PI).unwrap();
        let u = random_flow(&g, 8.0, seed);
        let fast = convective_term(&u, true).unwrap();
        let slow = oracle_convective(&dealias(&u));
        conv = conv.max(fast.max_abs_diff(&slow) / slow.max_abs());
        let state = FlowState::new(u, 0.0, 0.0).unwrap();
        let p = DyadicPartition::new(&g, PartitionKind::Sharp);
        for s in S_VALUES {
            let e = energy_transfer(&state, &p, s).unwrap();
            transfer = transfer.max(rel_diff(e.raw, oracle_interaction(&slow, s)));
        }
    }
    outcome(
        conv <= 1e-10 && transfer <= 1e-10,
        format!("convective term {conv:.2e} <= 1e-10, E_transfer {transfer:.2e} <= 1e-10"),
    )
}

fn c9_slopes() -> Outcome {
    let g = Grid::new(2, 256, 2.0 * PI).unwrap();
    let p = DyadicPartition::new(&g, PartitionKind::Sharp);
    let prof = band_energy_profile(&decompose(&random_field(&g, 1, 2.5, 42), &p).unwrap());
    let (lo, hi) = resolved_bands(&p);
    let band = band_slope(&prof, lo, hi).unwrap().slope;
    let a = exponent_for_spectrum_slope(-5.0 / 3.0, 2);
    let spectrum = energy_spectrum(&random_field(&g, 2, a, 42), Some((4, 20)))
        .unwrap()
        .fit
        .slope;
    outcome(
        (band + 1.5).abs() <= 0.1 && (spectrum + 5.0 / 3.0).abs() <= 0.1,
        format!("band slope {band:.4} (target -1.5 +/- 0.1, j={lo}..{hi}), spectrum slope {spectrum:.4} (target -1.667 +/- 0.1, shells 4..20)"),
    )
}

fn pipeline(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let bin = env!("CARGO_BIN_EXE_lpspec");
    let exec = |args: &[&str]| {
        let st = Command::new(bin).args(args).status().unwrap();
        st.code().unwrap()
    };
    let p = |x: &Path| x.to_str().unwrap().to_string();
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        "nu = 0.05\ndt = 0.01\nt_end = 0.2\nsnapshot_every = 10\n[grid]\ndims = 2\nresolution = 32\n\
         [init]\nkind = \"random\"\n[forcing]\nkind = \"random-band\"\nparams = { band = 2, amplitude = 0.5 }\n",
    )
    .unwrap();
    let mut codes = Vec::new();
    for suite in [
        "equivalence",
        "interpolation",
        "embedding",
        "decay",
        "criterion",
    ] {
        let out = p(&dir.join(format!("verify_{suite}.json")));
        codes.push(exec(&[
            "--seed",
            "7",
            "--out",
            &out,
            "verify",
            suite,
            "--count",
            "6",
            "--components",
            "2",
        ]));
    }
    codes.push(exec(&[
        "--seed",
        "7",
        "--out",
        &p(&dir.join("sim")),
        "sim",
        &p(&cfg),
    ]));
    let manifest = p(&dir.join("sim").join("trajectory.json"));
    codes.push(exec(&[
        "--out",
        &p(&dir.join("diag.json")),
        "diag",
        &manifest,
    ]));
    codes.push(exec(&[
        "--format",
        "csv",
        "--out",
        &p(&dir.join("diag.csv")),
        "diag",
        &manifest,
    ]));
    assert!(
        codes.iter().all(|&c| c == 0),
        "pipeline exit codes {codes:?}"
    );

    let mut files = Vec::new();
    for entry in walk(dir) {
        let rel = entry
            .strip_prefix(dir)
            .unwrap()
            .to_string_lossy()
            .into_owned();
        files.push((rel, fs::read(&entry).unwrap()));
    }
    files.sort();
    files
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}

fn c10_determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (fa, fb) = (pipeline(a.path()), pipeline(b.path()));
    let same = fa == fb;
    let bytes: usize = fa.iter().map(|f| f.1.len()).sum();
    outcome(
        same && fa.len() >= 10,
        format!(
            "{} files ({bytes} bytes) from verify+sim+diag, identical across two runs: {same}",
            fa.len()
        ),
    )
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let start = Instant::now();
    let fields = corpus();
    let snapshots = forced_run();
    let criteria: Vec<(&str, Check<'_>)> = vec![
        ("partition and reconstruction", Box::new(c1_partition)),
        (
            "Besov/Triebel-Lizorkin/Bessel equivalence",
            Box::new(|| c2_equivalence(&fields)),
        ),
        (
            "Sobolev interpolation",
            Box::new(|| c3_interpolation(&fields)),
        ),
        (
            "band decay",
            Box::new(|| c4_band_decay(&fields, &snapshots)),
        ),
        (
            "interaction-term identity",
            Box::new(|| c5_identity(&fields, &snapshots)),
        ),
        (
            "criterion bound",
            Box::new(|| c6_criterion(&fields, &snapshots)),
        ),
        ("Taylor-Green validation", Box::new(c7_taylor_green)),
        ("nonlinear-term oracle", Box::new(c8_oracle)),
        ("slope recovery", Box::new(c9_slopes)),
        ("determinism", Box::new(c10_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += (!o.pass) as usize;
        println!(
            "criterion {:>2} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let secs = start.elapsed().as_secs_f64();
    println!(
        "acceptance: {} of {} passed in {secs:.1}s (target < 300s)",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 || secs >= 300.0 {
        std::process::exit(1);
    }
}
