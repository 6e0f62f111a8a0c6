//! Lelong–Jensen residuals between two levels for smooth and singular
//! currents.

use lelong_lab::currents::catalog;
use lelong_lab::forms::C64;
use lelong_lab::lelong::lelong_jensen_residual;
use lelong_lab::weights::{DirectionalBall, Weight};

fn main() -> lelong_lab::Result<()> {
    let ball = DirectionalBall::disc(C64::new(0.0, 0.0), 1.0)?;
    let cases = [("TS", 1, 0), ("TS4", 1, 0), ("TS4", 2, 0), ("TS4", 2, 1), ("T2", 1, 0)];
    for (name, p, q) in cases {
        let t = catalog(name)?;
        let phi = Weight::euclid(t.split.n);
        let v = Weight::euclid(t.split.m);
        let rep = lelong_jensen_residual(&t, &phi, &v, &ball, 0.04, 0.25, p, q, 1e-6, 1)?;
        println!(
            "{name:<4} p={p} q={q}: lhs {:+.10}  annulus {:+.10}  dd^c {:+.10}  residual {:+.2e} (error {:.1e})",
            rep.lhs.value, rep.annulus.value, rep.ddc_terms.value, rep.residual.value, rep.residual.error
        );
    }
    Ok(())
}
