//! Integrals with known values, used to check that the quadrature layer's
//! reported errors are honest: the true error must stay within three times
//! the reported one.

use std::f64::consts::LN_2;
use std::sync::Arc;

use crate::currents::{catalog, ddc, ModelCurrent};
use crate::error::Result;
use crate::fields::Field;
use crate::forms::{CMat, ScalarField, Split, C64};
use crate::lelong::nu_at_with;
use crate::quadrature::{Estimate, QuadOptions};
use crate::weights::{DirectionalBall, Weight};

#[derive(Debug, Clone)]
pub struct CalibrationCase {
    pub name: &'static str,
    pub exact: f64,
    pub estimate: Estimate,
}

impl CalibrationCase {
    pub fn true_error(&self) -> f64 {
        (self.estimate.value - self.exact).abs()
    }

    /// Honest when the true error is within three reported errors; a small
    /// roundoff floor covers estimates that claim (near) zero error.
    pub fn honest(&self) -> bool {
        let floor = 64.0 * f64::EPSILON * self.exact.abs().max(1.0);
        self.true_error() <= 3.0 * self.estimate.error + floor
    }
}

/// `|z|^2 + |z_2|^4` on C^2: not homogeneous, so masses go through the
/// sampling path.
#[derive(Debug)]
struct QuarticBump;

impl ScalarField for QuarticBump {
    fn value(&self, x: &[C64]) -> f64 {
        let b = x[1].norm_sqr();
        x[0].norm_sqr() + b + b * b
    }

    fn gradient(&self, x: &[C64]) -> Option<Vec<C64>> {
        let b = x[1].norm_sqr();
        Some(vec![x[0].conj(), x[1].conj() * (1.0 + 2.0 * b)])
    }

    fn hessian(&self, x: &[C64]) -> Option<CMat> {
        Some(CMat::diag(&[1.0, 1.0 + 4.0 * x[1].norm_sqr()]))
    }
}

pub fn quartic_bump_weight() -> Result<Weight> {
    // φ ≥ |z|^2, so sublevels below 1/2 sit inside |z| < 1/√2
    Weight::from_field("euclid+quartic", Field::Custom(Arc::new(QuarticBump)), 2, None, 0.5, Some(0.5f64.sqrt() + 1e-9))
}

struct Setup {
    name: &'static str,
    current: ModelCurrent,
    phi: Weight,
    ball: DirectionalBall,
    r: f64,
    exact: f64,
}

fn disc(rho: f64) -> Result<DirectionalBall> {
    DirectionalBall::disc(C64::new(0.0, 0.0), rho)
}

fn setups() -> Result<Vec<Setup>> {
    let e2 = Weight::euclid(2);
    let point_mass = ModelCurrent::slice("[z=0]", Split::new(2, 1)?, &[0, 1], Field::constant(1.0))?;
    let x0 = |r: f64| 0.5 * ((1.0 + 4.0 * r).sqrt() - 1.0);
    let bump_r = 0.2;
    Ok(vec![
        Setup { name: "disc-mass", current: point_mass, phi: e2.clone(), ball: disc(0.6)?, r: 0.5, exact: 0.36 },
        Setup { name: "T2", current: catalog("T2")?, phi: e2.clone(), ball: disc(1.0)?, r: 0.3, exact: 1.0 },
        Setup { name: "ddcT2", current: ddc(&catalog("T2")?)?, phi: e2.clone(), ball: disc(1.0)?, r: 0.3, exact: -1.0 },
        Setup { name: "T3", current: catalog("T3")?, phi: e2.clone(), ball: disc(0.5)?, r: 0.2, exact: 7.0 / 32.0 },
        Setup {
            name: "T0d",
            current: catalog("T0d")?,
            phi: Weight::euclid(1),
            ball: disc(0.5)?,
            r: 0.1,
            exact: 0.5 * LN_2 + 0.25,
        },
        Setup {
            name: "T0",
            current: catalog("T0")?,
            phi: e2.clone(),
            ball: DirectionalBall::point(),
            r: 0.04,
            exact: 1.0 - 0.04f64.ln(),
        },
        Setup { name: "T4", current: catalog("T4")?, phi: e2.clone(), ball: disc(0.5)?, r: 0.25, exact: 0.0625 },
        Setup { name: "TS", current: catalog("TS")?, phi: e2.clone(), ball: disc(1.0)?, r: 0.3, exact: 0.39 },
        Setup { name: "H0", current: catalog("H0")?, phi: e2, ball: disc(0.5)?, r: 0.3, exact: 7.0 / 32.0 - 0.05 },
        Setup {
            name: "T3-nonhomogeneous",
            current: catalog("T3")?,
            phi: quartic_bump_weight()?,
            ball: disc(0.5)?,
            r: bump_r,
            exact: x0(bump_r) * (1.0 + 2.0 * x0(bump_r)) / bump_r * 7.0 / 32.0,
        },
    ])
}

pub fn calibration_names() -> Vec<&'static str> {
    vec!["disc-mass", "T2", "ddcT2", "T3", "T0d", "T0", "T4", "TS", "H0", "T3-nonhomogeneous"]
}

/// Runs every calibration integral at relative tolerance `tol`.
pub fn run_calibration(opts: &QuadOptions) -> Result<Vec<CalibrationCase>> {
    setups()?
        .into_iter()
        .map(|s| {
            let estimate = nu_at_with(&s.current, &s.phi, &s.ball, s.r, opts)?;
            Ok(CalibrationCase { name: s.name, exact: s.exact, estimate })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_match_setups() {
        let names: Vec<_> = setups().unwrap().iter().map(|s| s.name).collect();
        assert_eq!(names, calibration_names());
    }

    #[test]
    fn quartic_bump_derivatives_match_finite_differences() {
        let x = [C64::new(0.3, -0.1), C64::new(0.2, 0.4)];
        let h = QuarticBump.hessian(&x).unwrap();
        let fd = crate::forms::fd_hessian(&QuarticBump, &x);
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[(i, j)] - fd[(i, j)]).norm() < 1e-6);
            }
        }
    }
}
