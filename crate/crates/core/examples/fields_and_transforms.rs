// Sampling a field on the torus, moving to Fourier space and taking
// spectral derivatives.

use spectral_regularity::field::{gradient, lp_norm, spectral_derivative, Grid, SampledField};
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let grid = Grid::new(2, 32, 2.0 * std::f64::consts::PI)?;
    let f = SampledField::from_fn(grid.clone(), 1, |x, _| (3.0 * x[0]).sin() * x[1].cos())?;
    let spectral = f.to_spectral();
    println!(
        "coefficient at (3, 1): {:.6}",
        spectral.coefficient(0, &[3, 1])
    );
    println!(
        "L2 = {:.6}, L4 = {:.6}, Linf = {:.6}",
        lp_norm(&f, 2.0)?,
        lp_norm(&f, 4.0)?,
        lp_norm(&f, f64::INFINITY)?
    );

    let dx = spectral_derivative(&spectral, 0, 1)?.to_physical();
    let exact = SampledField::from_fn(grid, 1, |x, _| 3.0 * (3.0 * x[0]).cos() * x[1].cos())?;
    println!("max error of d/dx: {:.2e}", dx.max_abs_diff(&exact));

    let grad = gradient(&spectral)?;
    println!(
        "gradient has {} components, L2 = {:.6}",
        grad.n_components(),
        grad.l2_norm()
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
