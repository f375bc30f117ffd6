// Integrating the Taylor-Green vortex and comparing with the closed form.

use spectral_regularity::field::Grid;
use spectral_regularity::solver::{taylor_green, taylor_green_field, Integrator};
use spectral_regularity::Result;

pub fn run_example() -> Result<()> {
    let grid = Grid::new(2, 32, 2.0 * std::f64::consts::PI)?;
    let (nu, dt) = (0.1, 1e-2);
    let integrator = Integrator::new(&grid, nu, dt)?;
    let mut state = taylor_green(&grid, nu, 0.0)?;
    let e0 = state.kinetic_energy();
    for step in 1..=100 {
        state = integrator.advance(&state)?;
        if step % 25 == 0 {
            let t = step as f64 * dt;
            let exact = taylor_green_field(&grid, nu, t)?;
            println!(
                "t = {t:.2}: |u - exact| = {:.1e}, E/E0 = {:.8} (exact {:.8}), div = {:.1e}",
                state.velocity().to_physical().max_abs_diff(&exact),
                state.kinetic_energy() / e0,
                (-4.0 * nu * t).exp(),
                state.max_divergence()
            );
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
