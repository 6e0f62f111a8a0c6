//! ν(T2, |z|^2, D(0,1), r) and the mass of dd^c T2 = -[z=0].

use lelong_lab::currents::{catalog, ddc};
use lelong_lab::forms::C64;
use lelong_lab::lelong::{nu_at, nu_limit, nu_profile};
use lelong_lab::quadrature::geometric_grid;
use lelong_lab::weights::{DirectionalBall, Weight};

fn main() -> lelong_lab::Result<()> {
    let t2 = catalog("T2")?;
    let phi = Weight::euclid(2);
    let ball = DirectionalBall::disc(C64::new(0.0, 0.0), 1.0)?;
    for r in [0.5, 0.25, 0.1, 0.05] {
        let e = nu_at(&t2, &phi, &ball, r, 1e-6, 1)?;
        let d = nu_at(&ddc(&t2)?, &phi, &ball, r, 1e-8, 1)?;
        println!("r = {r:<5} ν(T2) = {:.12} ± {:.1e} [{} evals]   ν(dd^cT2) = {:+.12}", e.value, e.error, e.evaluations, d.value);
    }
    let profile = nu_profile(&t2, &phi, &ball, &geometric_grid(0.5, 0.5, 8), 1e-6, 1)?;
    println!("limit: {}", nu_limit(&profile)?.label());
    Ok(())
}
