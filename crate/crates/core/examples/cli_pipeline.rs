// Driving the `lpspec` command line in-process: generate, verify, simulate
// and diagnose.

use spectral_regularity::cli;
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let config = path("run.toml");
    std::fs::write(
        &config,
        "nu = 0.05\ndt = 0.01\nt_end = 0.1\nsnapshot_every = 5\n[grid]\ndims = 2\nresolution = 32\n",
    )?;
    let steps: [Vec<String>; 4] = [
        vec![
            "--seed".into(),
            "1".into(),
            "--out".into(),
            path("field.lpf"),
            "gen".into(),
            "power-law".into(),
            "--exponent".into(),
            "2".into(),
        ],
        vec![
            "--seed".into(),
            "1".into(),
            "--out".into(),
            path("criterion.json"),
            "verify".into(),
            "criterion".into(),
        ],
        vec!["--out".into(), path("sim"), "sim".into(), config.clone()],
        vec![
            "--format".into(),
            "csv".into(),
            "diag".into(),
            path("sim/trajectory.json"),
        ],
    ];
    for args in steps {
        let code = cli::run(std::iter::once("lpspec".to_string()).chain(args.iter().cloned()));
        println!("lpspec {} -> exit {code}", args.join(" "));
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
