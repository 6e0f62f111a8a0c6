//! Normalized sublevel masses `ν(T, φ, B, r)`, their limits, Condition (C),
//! the g-certificate and the identity checks built on them.

pub mod condition;
pub mod identities;
pub mod limit;
pub mod oracles;

use crate::currents::ModelCurrent;
use crate::error::{LelongError, Result};
use crate::quadrature::{mass, profile_of, validate_grid, Estimate, MassQuery, QuadOptions};
use crate::weights::{sublevel_bound, DirectionalBall, Weight};

pub use crate::quadrature::RadialProfile;
pub use condition::{condition_c, g_function, g_profile, CVerdict, ConditionCReport};
pub use identities::{
    additivity_check, comparison_check, k0_identity, lelong_jensen_residual, scaling_check, AdditivityReport,
    ComparisonReport, K0Report, LjReport, ScalingReport,
};
pub use limit::{limit_of, nu_limit, NuVerdict, Rate, VerdictKind};

/// The normalizing exponent `n - k` of a current on the split `(n, m)`.
pub fn exponent(t: &ModelCurrent) -> Result<usize> {
    t.split.n.checked_sub(t.bidegree).ok_or_else(|| {
        LelongError::Contract(format!("bidegree {} of {} exceeds n = {}", t.bidegree, t.name, t.split.n))
    })
}

/// Rejects levels outside `(0, R(φ))` or whose sublevel set leaves the
/// current's domain of definition.
pub fn check_level(t: &ModelCurrent, phi: &Weight, r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(LelongError::Contract(format!("level must be positive, got {r}")));
    }
    if !(r < phi.validity_radius()) {
        return Err(LelongError::Range { r, limit: phi.validity_radius() });
    }
    let reach = sublevel_bound(phi, r)?;
    if reach > t.validity_radius {
        // largest admissible level: reach scales like r^{1/(2γ)}
        let limit = match phi.homogeneity() {
            Some(g) => r * (t.validity_radius / reach).powf(2.0 * g),
            None => 0.0,
        };
        return Err(LelongError::Range { r, limit });
    }
    Ok(())
}

fn query<'a>(t: &'a ModelCurrent, phi: &'a Weight, v: &'a Weight, ball: &'a DirectionalBall) -> MassQuery<'a> {
    MassQuery { current: t, phi, v, ball, alpha_power: 0, level_weight: None }
}

/// `ν(T, φ, B, r)` with `v = |t|^2`.
pub fn nu_at(t: &ModelCurrent, phi: &Weight, ball: &DirectionalBall, r: f64, tol: f64, seed: u64) -> Result<Estimate> {
    nu_at_with(t, phi, ball, r, &QuadOptions::new(tol, seed))
}

pub fn nu_at_with(t: &ModelCurrent, phi: &Weight, ball: &DirectionalBall, r: f64, opts: &QuadOptions) -> Result<Estimate> {
    check_level(t, phi, r)?;
    let e = exponent(t)? as i32;
    let v = Weight::euclid(t.split.m);
    let norm = r.powi(e);
    let m = mass(&query(t, phi, &v, ball), (0.0, r), &opts.with_tol(opts.tol * norm))?;
    Ok(m.scale(1.0 / norm))
}

/// The profile `r_j ↦ ν(T, φ, B, r_j)` over a decreasing grid.
pub fn nu_profile(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    grid: &[f64],
    tol: f64,
    seed: u64,
) -> Result<RadialProfile> {
    nu_profile_with(t, phi, ball, grid, &QuadOptions::new(tol, seed))
}

pub fn nu_profile_with(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    grid: &[f64],
    opts: &QuadOptions,
) -> Result<RadialProfile> {
    validate_grid(grid)?;
    check_level(t, phi, grid[0])?;
    exponent(t)?;
    let v = Weight::euclid(t.split.m);
    profile_of(&query(t, phi, &v, ball), grid, opts)
}

/// True when `values` (on a decreasing grid) never increase by more than
/// the combined error of neighbouring points as `r` decreases, i.e. the
/// function of `r` is nondecreasing.
pub fn nondecreasing_in_r(values: &[f64], errors: &[f64]) -> bool {
    values
        .windows(2)
        .zip(errors.windows(2))
        .all(|(v, e)| v[1] <= v[0] + e[0] + e[1])
}

/// True when every value is `≤ 0` within its error.
pub fn nonpositive(values: &[f64], errors: &[f64]) -> bool {
    values.iter().zip(errors).all(|(v, e)| *v <= *e)
}
