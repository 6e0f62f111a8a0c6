//! T0 = -log|t|^2 [z1 = 0]: in C^2 the normalized mass grows like -log r,
//! while splitting off t as a direction gives a finite limit.

use lelong_lab::currents::catalog;
use lelong_lab::forms::C64;
use lelong_lab::lelong::{nu_limit, nu_profile};
use lelong_lab::quadrature::geometric_grid;
use lelong_lab::weights::{DirectionalBall, Weight};

fn main() -> lelong_lab::Result<()> {
    let grid = geometric_grid(0.16, 0.25, 8);
    let full = nu_profile(&catalog("T0")?, &Weight::euclid(2), &DirectionalBall::point(), &grid, 1e-7, 1)?;
    let dir = nu_profile(
        &catalog("T0d")?,
        &Weight::euclid(1),
        &DirectionalBall::disc(C64::new(0.0, 0.0), 0.5)?,
        &grid,
        1e-7,
        1,
    )?;
    println!("{:>12} {:>14} {:>14} {:>14}", "r", "full", "1 - log r", "directional");
    for ((r, f), d) in grid.iter().zip(&full.nu).zip(&dir.nu) {
        println!("{r:>12.3e} {:>14.8} {:>14.8} {:>14.8}", f.value, 1.0 - r.ln(), d.value);
    }
    println!("full:        {}", nu_limit(&full)?.label());
    println!("directional: {}", nu_limit(&dir)?.label());
    Ok(())
}
