//! Comparing weights: ν(T3, ψ, B) / ν(T3, φ, B) against ℓ^{n-k}.

use lelong_lab::currents::catalog;
use lelong_lab::forms::C64;
use lelong_lab::lelong::comparison_check;
use lelong_lab::quadrature::geometric_grid;
use lelong_lab::weights::{power_weight, DirectionalBall, Weight};

fn main() -> lelong_lab::Result<()> {
    let t3 = catalog("T3")?;
    let phi = Weight::euclid(2);
    let ball = DirectionalBall::disc(C64::new(0.0, 0.0), 0.5)?;
    let grid = geometric_grid(0.25, 0.5, 8);
    for (label, psi, ell) in [("|z|^4", power_weight(&phi, 2.0)?, 2.0), ("3|z|^2", Weight::scaled(2, 3.0)?, 1.0)] {
        let rep = comparison_check(&t3, &phi, &psi, ell, &ball, &grid, 1e-6, 1)?;
        println!(
            "ψ = {label:<7} ℓ = {ell}: ratio {:?}, bound {}, Condition (C) for ψ {}",
            rep.ratio, rep.bound, rep.condition_c_psi
        );
    }
    Ok(())
}
