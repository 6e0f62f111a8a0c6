//! Bidegree (0,0): the limit is the integral over the slice z = 0. And
//! ν is additive over disjoint t-balls.

use lelong_lab::currents::catalog;
use lelong_lab::forms::C64;
use lelong_lab::lelong::{additivity_check, k0_identity};
use lelong_lab::quadrature::geometric_grid;
use lelong_lab::weights::DirectionalBall;

fn main() -> lelong_lab::Result<()> {
    let d = |x: f64, rho: f64| DirectionalBall::disc(C64::new(x, 0.0), rho);
    let k0 = k0_identity(&catalog("H0")?, &d(0.0, 0.5)?, &geometric_grid(0.5, 0.5, 10), 1e-7, 1)?;
    println!("H0: limit {}, direct {:.10}, difference {:?}", k0.limit.label(), k0.direct.value, k0.difference());

    let grid = geometric_grid(0.25, 0.5, 8);
    for (name, b1, b2) in [("T2", d(0.0, 0.5)?, d(0.7, 0.2)?), ("T3", d(-0.25, 0.24)?, d(0.25, 0.24)?)] {
        let rep = additivity_check(&catalog(name)?, &b1, &b2, &grid, 1e-6, 1)?;
        println!(
            "{name}: ν(B1) {}, ν(B2) {}, ν(B1 ∪ B2) {}; defect {:.1e} within {:.1e}: {}",
            rep.nu_first.label(),
            rep.nu_second.label(),
            rep.nu_union.label(),
            rep.difference,
            rep.uncertainty,
            rep.holds()
        );
    }
    Ok(())
}
