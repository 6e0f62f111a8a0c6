//! T1 = -log(|z1|^2 + |t|^2) [z2 = 0] on D(0, 1/2), next to the two
//! one-dimensional reductions shipped as oracles. The quadrature tracks the
//! `t1-corrected` one; `t1-printed` is smaller by exactly a factor of two.

use lelong_lab::currents::catalog;
use lelong_lab::forms::C64;
use lelong_lab::lelong::oracles::oracle;
use lelong_lab::lelong::{nu_limit, nu_profile};
use lelong_lab::weights::{DirectionalBall, Weight};

fn main() -> lelong_lab::Result<()> {
    let t1 = catalog("T1")?;
    let ball = DirectionalBall::disc(C64::new(0.0, 0.0), 0.5)?;
    let grid: Vec<f64> = (0..8).map(|j| (0.4 * 0.5f64.powi(j)).powi(2)).collect();
    let p = nu_profile(&t1, &Weight::euclid(2), &ball, &grid, 1e-6, 1)?;
    println!("{:>8} {:>12} {:>12} {:>12}", "r_e", "ν", "corrected", "printed");
    for (r, e) in grid.iter().zip(&p.nu) {
        println!(
            "{:>8.4} {:>12.8} {:>12.8} {:>12.8}",
            r.sqrt(),
            e.value,
            oracle("t1-corrected", *r)?,
            oracle("t1-printed", *r)?
        );
    }
    println!("limit: {}  (log 2 / 2 + 1/4 = {:.8})", nu_limit(&p)?.label(), 0.5 * 2f64.ln() + 0.25);
    Ok(())
}
