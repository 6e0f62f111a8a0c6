//! Condition (C) on four currents, then the g-certificate where it holds.

use lelong_lab::currents::catalog;
use lelong_lab::forms::C64;
use lelong_lab::lelong::{condition_c, g_profile};
use lelong_lab::quadrature::{geometric_grid, QuadOptions};
use lelong_lab::weights::{DirectionalBall, Weight};

fn main() -> lelong_lab::Result<()> {
    let grid = geometric_grid(0.25, 0.5, 8);
    let phi = Weight::euclid(2);
    for (name, rho) in [("T2", 1.0), ("T3", 0.5), ("T4", 0.5), ("TS", 1.0)] {
        let t = catalog(name)?;
        let ball = DirectionalBall::disc(C64::new(0.0, 0.0), rho)?;
        let rep = condition_c(&t, &phi, &ball, &grid, 1e-6, 1)?;
        println!(
            "{name}: {} (exponent {:?}, fit residual {:?})",
            rep.verdict.label(),
            rep.alpha.map(|a| (a * 1e3).round() / 1e3),
            rep.residual.map(|r| (r * 1e3).round() / 1e3)
        );
        match g_profile(&t, &phi, &ball, &grid, &QuadOptions::new(1e-6, 1)) {
            Ok((_, g)) => {
                let vals: Vec<String> = g.iter().map(|e| format!("{:.5}", e.value)).collect();
                println!("   g(r) on the grid: {}", vals.join(" "));
            }
            Err(e) => println!("   g: {e}"),
        }
    }
    Ok(())
}
