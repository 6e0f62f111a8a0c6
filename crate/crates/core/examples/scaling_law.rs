//! ν(T, |z|^{2p}, B) against the φ-mass: the naive factor p^{n-k} is wrong
//! unless the dd^cT correction is included.

use lelong_lab::currents::catalog;
use lelong_lab::forms::C64;
use lelong_lab::lelong::scaling_check;
use lelong_lab::quadrature::geometric_grid;
use lelong_lab::weights::{DirectionalBall, Weight};

fn main() -> lelong_lab::Result<()> {
    let grid = geometric_grid(0.25, 0.5, 8);
    for (name, p, rho) in [("T2", 2.0, 1.0), ("T3", 2.0, 0.5), ("T4", 3.0, 0.5)] {
        let ball = DirectionalBall::disc(C64::new(0.0, 0.0), rho)?;
        let rep = scaling_check(&catalog(name)?, &Weight::euclid(2), &ball, p, &grid, 1e-6, 1)?;
        println!("{name}, p = {p}: worst |residual| / error = {:.3}", rep.max_error_ratio);
        println!("   ν(T, φ^p)      {}", rep.lhs_limit.label());
        println!("   formula        {:?}", rep.formula_limit);
        println!("   p^(n-k) ν(φ)   {:?}", rep.naive_limit);
    }
    Ok(())
}
