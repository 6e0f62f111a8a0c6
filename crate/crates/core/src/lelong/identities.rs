//! Numerical checks of the integral identities: Lelong–Jensen, the scaling
//! law for `φ^p`, the comparison theorem, the `k = 0` formula and
//! additivity in the ball.

use std::sync::Arc;

use serde::Serialize;

use crate::currents::{ddc, CurrentKind, MonotonicityClass, ModelCurrent};
use crate::error::{LelongError, Result};
use crate::quadrature::{mass, Estimate, LevelWeight, MassQuery, QuadOptions};
use crate::weights::{power_weight, DirectionalBall, Weight};

use super::condition::condition_c_with;
use super::{check_level, exponent, nu_at_with, nu_limit, nu_profile_with, NuVerdict, RadialProfile};

fn converged(v: &NuVerdict) -> Option<(f64, f64)> {
    v.converged()
}

#[derive(Debug, Clone, Serialize)]
pub struct LjReport {
    pub lhs: Estimate,
    /// Annular `α^p` term.
    pub annulus: Estimate,
    /// Both `dd^cT` terms together.
    pub ddc_terms: Estimate,
    pub residual: Estimate,
}

impl LjReport {
    /// `|residual| ≤ factor × combined error`.
    pub fn within(&self, factor: f64) -> bool {
        self.residual.value.abs() <= factor * self.residual.error
    }
}

/// `W(ρ) = ∫_ρ^{r2} w(s) ds` with `w(s) = s^{-(q+1)} - r2^{-(q+1)}` on
/// `[r1, r2)` and the constant `r1^{-(q+1)} - r2^{-(q+1)}` below `r1`.
fn lj_level_weight(r1: f64, r2: f64, q: usize) -> LevelWeight {
    let qf = q as f64;
    let upper = move |rho: f64| -> f64 {
        let tail = (r2 - rho) / r2.powf(qf + 1.0);
        if q == 0 {
            (r2 / rho).ln() - tail
        } else {
            (rho.powf(-qf) - r2.powf(-qf)) / qf - tail
        }
    };
    let at_r1 = upper(r1);
    let c1 = r1.powf(-(qf + 1.0)) - r2.powf(-(qf + 1.0));
    let f = move |rho: f64| -> f64 {
        if rho >= r2 {
            0.0
        } else if rho >= r1 {
            upper(rho)
        } else {
            at_r1 + c1 * (r1 - rho)
        }
    };
    LevelWeight { f: Arc::new(f), singular_at_zero: false, breakpoints: vec![r1] }
}

#[allow(clippy::too_many_arguments)]
pub fn lelong_jensen_residual(
    t: &ModelCurrent,
    phi: &Weight,
    v: &Weight,
    ball: &DirectionalBall,
    r1: f64,
    r2: f64,
    p: usize,
    q: usize,
    tol: f64,
    seed: u64,
) -> Result<LjReport> {
    let e = exponent(t)?;
    if !(r1 > 0.0 && r1 < r2) {
        return Err(LelongError::Contract(format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
    }
    check_level(t, phi, r2)?;
    if p < 1 || p > e {
        return Err(LelongError::Contract(format!("need 1 <= p <= n-k = {e}, got p = {p}")));
    }
    if q >= p {
        return Err(LelongError::Contract(format!("need q < p, got p = {p}, q = {q}")));
    }
    if !t.smooth && q + 1 != p {
        return Err(LelongError::Contract(format!(
            "{} is not smooth: the identity only holds for q = p-1, got p = {p}, q = {q}",
            t.name
        )));
    }
    let opts = QuadOptions::new(tol, seed);
    let quarter = 0.25 * tol;
    let a = p - q - 1;
    let qe = (q + 1) as i32;
    let query = |current, alpha_power, level_weight| MassQuery { current, phi, v, ball, alpha_power, level_weight };

    // A(r2)/r2^{q+1} - A(r1)/r1^{q+1} = Ann/r2^{q+1} + A(r1)(r2^{-(q+1)} - r1^{-(q+1)})
    let k1 = r2.powi(-qe) - r1.powi(-qe);
    let inner = mass(&query(t, a, None), (0.0, r1), &opts.with_tol(quarter / k1.abs()))?;
    let ring = mass(&query(t, a, None), (r1, r2), &opts.with_tol(quarter * r2.powi(qe)))?;
    let lhs = ring.scale(r2.powi(-qe)).add_scaled(k1, &inner);

    let annulus = mass(&query(t, p, None), (r1, r2), &opts.with_tol(quarter))?;
    let ddc_terms = match ddc(t) {
        Ok(d) => mass(&query(&d, a, Some(lj_level_weight(r1, r2, q))), (0.0, r2), &opts.with_tol(quarter))?,
        Err(_) if t.is_zero() => Estimate::zero(),
        Err(err) => return Err(err),
    };
    let residual = lhs.minus(&annulus).minus(&ddc_terms);
    Ok(LjReport { lhs, annulus, ddc_terms, residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub p: f64,
    pub grid: Vec<f64>,
    /// `ν(T, φ^p, B, r^p)`.
    pub lhs: Vec<Estimate>,
    /// `p^{n-k} (ν(T, φ, B, r) + ∫_0^r ...)`.
    pub rhs: Vec<Estimate>,
    pub max_residual: f64,
    /// Largest `|LHS - RHS| / combined error` over the grid.
    pub max_error_ratio: f64,
    pub lhs_limit: NuVerdict,
    pub phi_limit: NuVerdict,
    pub ddc_limit: Option<NuVerdict>,
    /// `p^{n-k} (ν + (p-1)/(p(n-k)) ν(dd^cT))` when both limits exist.
    pub formula_limit: Option<f64>,
    /// The naive `p^{n-k} ν(T, φ, B)`.
    pub naive_limit: Option<f64>,
}

impl ScalingReport {
    pub fn residuals(&self) -> Vec<(f64, f64)> {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(l, r)| (l.value - r.value, l.error + r.error))
            .collect()
    }
}

/// `W(ρ) = ∫_ρ^r (r^{-e} - s^{e(p-1)} r^{-ep}) ds`.
fn scaling_level_weight(r: f64, e: usize, p: f64) -> LevelWeight {
    let ef = e as f64;
    let k = ef * (p - 1.0) + 1.0;
    let f = move |rho: f64| -> f64 {
        if rho >= r {
            return 0.0;
        }
        (r - rho) / r.powf(ef) - (r.powf(k) - rho.powf(k)) / (k * r.powf(ef * p))
    };
    LevelWeight { f: Arc::new(f), singular_at_zero: false, breakpoints: Vec::new() }
}

pub fn scaling_check(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    p: f64,
    grid: &[f64],
    tol: f64,
    seed: u64,
) -> Result<ScalingReport> {
    if !matches!(t.class, MonotonicityClass::Psh | MonotonicityClass::Prh | MonotonicityClass::Closed) {
        return Err(LelongError::Hypothesis(format!("{} is declared neither psh nor prh", t.name)));
    }
    let e = exponent(t)?;
    if e == 0 {
        return Err(LelongError::UnsupportedOperation { current: t.name.clone(), op: "scaling law with n = k" });
    }
    let psi = power_weight(phi, p)?;
    let opts = QuadOptions::new(tol, seed);
    let pe = p.powi(e as i32);
    let grid_p: Vec<f64> = grid.iter().map(|r| r.powf(p)).collect();
    let lhs_profile = nu_profile_with(t, &psi, ball, &grid_p, &opts.with_tol(0.5 * tol))?;
    let quarter = opts.with_tol(0.25 * tol / pe);
    let phi_profile = nu_profile_with(t, phi, ball, grid, &quarter)?;

    let d = if t.is_zero() { None } else { Some(ddc(t)?) };
    let v = Weight::euclid(t.split.m);
    let mut rhs = Vec::with_capacity(grid.len());
    for (i, &r) in grid.iter().enumerate() {
        let corr = match &d {
            Some(d) => {
                let query = MassQuery {
                    current: d,
                    phi,
                    v: &v,
                    ball,
                    alpha_power: 0,
                    level_weight: Some(scaling_level_weight(r, e, p)),
                };
                let mut o = quarter.clone();
                o.seed = seed.wrapping_add(31 * i as u64);
                mass(&query, (0.0, r), &o)?
            }
            None => Estimate::zero(),
        };
        rhs.push(phi_profile.nu[i].plus(&corr).scale(pe));
    }
    let (mut max_residual, mut max_error_ratio) = (0.0f64, 0.0f64);
    for (l, r) in lhs_profile.nu.iter().zip(&rhs) {
        let res = (l.value - r.value).abs();
        max_residual = max_residual.max(res);
        let comb = l.error + r.error;
        max_error_ratio = max_error_ratio.max(if res == 0.0 { 0.0 } else { res / comb });
    }

    let lhs_limit = nu_limit(&rebased(&lhs_profile, grid))?;
    let phi_limit = nu_limit(&phi_profile)?;
    let ddc_limit = match &d {
        Some(d) => Some(nu_limit(&nu_profile_with(d, phi, ball, grid, &quarter)?)?),
        None => None,
    };
    let nu = converged(&phi_limit).map(|c| c.0);
    let nu_ddc = match &ddc_limit {
        Some(v) => converged(v).map(|c| c.0),
        None => Some(0.0),
    };
    let formula_limit = match (nu, nu_ddc) {
        (Some(a), Some(b)) => Some(pe * (a + (p - 1.0) / (p * e as f64) * b)),
        _ => None,
    };
    Ok(ScalingReport {
        p,
        grid: grid.to_vec(),
        lhs: lhs_profile.nu,
        rhs,
        max_residual,
        max_error_ratio,
        lhs_limit,
        phi_limit,
        ddc_limit,
        formula_limit,
        naive_limit: nu.map(|a| pe * a),
    })
}

/// The same profile indexed by the φ-level `r` instead of `r^p`; the limit
/// fits are then comparable across weights.
fn rebased(profile: &RadialProfile, grid: &[f64]) -> RadialProfile {
    RadialProfile { grid: grid.to_vec(), ..profile.clone() }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub ell: f64,
    pub condition_c_psi: &'static str,
    pub nu_phi: NuVerdict,
    pub nu_psi: NuVerdict,
    /// `ν(T, ψ, B) / ν(T, φ, B)` with its uncertainty.
    pub ratio: Option<(f64, f64)>,
    /// `ℓ^{n-k}`.
    pub bound: f64,
}

impl ComparisonReport {
    /// `ratio ≥ ℓ^{n-k} (1 - rel)`.
    pub fn satisfies_bound(&self, rel: f64) -> bool {
        self.ratio.is_some_and(|(r, _)| r >= self.bound * (1.0 - rel))
    }

    /// `|ratio - ℓ^{n-k}| ≤ abs`.
    pub fn equality_within(&self, abs: f64) -> bool {
        self.ratio.is_some_and(|(r, _)| (r - self.bound).abs() <= abs)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn comparison_check(
    t: &ModelCurrent,
    phi: &Weight,
    psi: &Weight,
    ell: f64,
    ball: &DirectionalBall,
    grid: &[f64],
    tol: f64,
    seed: u64,
) -> Result<ComparisonReport> {
    let e = exponent(t)?;
    if !(ell > 0.0) {
        return Err(LelongError::Contract(format!("ℓ must be positive, got {ell}")));
    }
    let opts = QuadOptions::new(tol, seed);
    let report = condition_c_with(t, psi, ball, grid, &opts)?;
    if !report.verdict.satisfied() {
        return Err(LelongError::Hypothesis(format!(
            "Condition (C) for ({}, {}, B) is {}",
            t.name,
            psi.name(),
            report.verdict.label()
        )));
    }
    let nu_phi = nu_limit(&nu_profile_with(t, phi, ball, grid, &opts)?)?;
    let nu_psi = nu_limit(&nu_profile_with(t, psi, ball, grid, &opts.with_tol(tol))?)?;
    let ratio = match (converged(&nu_phi), converged(&nu_psi)) {
        (Some((a, ua)), Some((b, ub))) if a != 0.0 => {
            let r = b / a;
            Some((r, r.abs() * (ua / a.abs() + ub / b.abs().max(f64::MIN_POSITIVE))))
        }
        _ => None,
    };
    Ok(ComparisonReport {
        ell,
        condition_c_psi: report.verdict.label(),
        nu_phi,
        nu_psi,
        ratio,
        bound: ell.powi(e as i32),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct K0Report {
    pub profile: RadialProfile,
    pub limit: NuVerdict,
    /// `∫_B h(0, t) ω_t^m`.
    pub direct: Estimate,
}

impl K0Report {
    pub fn difference(&self) -> Option<f64> {
        self.limit.converged().map(|(v, _)| v - self.direct.value)
    }
}

/// For a function current `h` (bidegree 0): the limit of its profile in the
/// euclidean weight and the direct integral of `h(0, ·)` over `B`.
pub fn k0_identity(h: &ModelCurrent, ball: &DirectionalBall, grid: &[f64], tol: f64, seed: u64) -> Result<K0Report> {
    let CurrentKind::Slice { vanishing, weight } = &h.kind else {
        return Err(LelongError::Contract(format!("{} is not a function current", h.name)));
    };
    if !vanishing.is_empty() || h.bidegree != 0 {
        return Err(LelongError::Contract(format!("{} has bidegree {}, need 0", h.name, h.bidegree)));
    }
    let n = h.split.n;
    let phi = Weight::euclid(n);
    let opts = QuadOptions::new(tol, seed);
    let profile = nu_profile_with(h, &phi, ball, grid, &opts)?;
    let limit = nu_limit(&profile)?;
    let all: Vec<usize> = (0..n).collect();
    let restricted = ModelCurrent::slice(&format!("{}(0,t)", h.name), h.split, &all, weight.clone())?
        .with_validity_radius(h.validity_radius);
    let direct = nu_at_with(&restricted, &phi, ball, grid[0], &opts)?;
    Ok(K0Report { profile, limit, direct })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    pub nu_first: NuVerdict,
    pub nu_second: NuVerdict,
    pub nu_union: NuVerdict,
    /// `ν(B₁ ⊔ B₂) - ν(B₁) - ν(B₂)` and the combined uncertainty.
    pub difference: f64,
    pub uncertainty: f64,
}

impl AdditivityReport {
    pub fn holds(&self) -> bool {
        self.difference.abs() <= self.uncertainty
    }
}

pub fn additivity_check(
    t: &ModelCurrent,
    first: &DirectionalBall,
    second: &DirectionalBall,
    grid: &[f64],
    tol: f64,
    seed: u64,
) -> Result<AdditivityReport> {
    let union = first.union(second)?;
    let phi = Weight::euclid(t.split.n);
    let opts = QuadOptions::new(tol, seed);
    let mut verdicts = Vec::with_capacity(3);
    for (i, b) in [first, second, &union].into_iter().enumerate() {
        let mut o = opts.clone();
        o.seed = seed.wrapping_add(100_003 * i as u64);
        verdicts.push(nu_limit(&nu_profile_with(t, &phi, b, grid, &o)?)?);
    }
    let vals: Vec<(f64, f64)> = verdicts
        .iter()
        .map(|v| {
            v.converged()
                .ok_or_else(|| LelongError::Hypothesis(format!("ν({}, B) does not converge: {}", t.name, v.label())))
        })
        .collect::<Result<_>>()?;
    let nu_union = verdicts.pop().expect("three verdicts");
    let nu_second = verdicts.pop().expect("three verdicts");
    let nu_first = verdicts.pop().expect("three verdicts");
    Ok(AdditivityReport {
        nu_first,
        nu_second,
        nu_union,
        difference: vals[2].0 - vals[0].0 - vals[1].0,
        uncertainty: vals[0].1 + vals[1].1 + vals[2].1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let n = 400_000;
        let h = (b - a) / n as f64;
        (0..n).map(|i| f(a + (i as f64 + 0.5) * h) * h).sum()
    }

    #[test]
    fn lj_weight_is_the_antiderivative() {
        let (r1, r2) = (0.04, 0.25);
        for q in [0usize, 1, 2] {
            let w = lj_level_weight(r1, r2, q);
            let rate = |s: f64| {
                if s >= r1 {
                    s.powi(-(q as i32 + 1)) - r2.powi(-(q as i32 + 1))
                } else {
                    r1.powi(-(q as i32 + 1)) - r2.powi(-(q as i32 + 1))
                }
            };
            for rho in [0.0, 0.01, 0.04, 0.1, 0.2] {
                let direct = midpoint(rate, rho, r2);
                assert!(((w.f)(rho) - direct).abs() < 1e-5 * direct.abs().max(1.0), "q={q} rho={rho}");
            }
        }
    }

    #[test]
    fn scaling_weight_is_the_antiderivative() {
        let r = 0.3;
        for (e, p) in [(1usize, 2.0), (2, 3.0)] {
            let w = scaling_level_weight(r, e, p);
            let ef = e as f64;
            let rate = |s: f64| r.powf(-ef) - s.powf(ef * (p - 1.0)) * r.powf(-ef * p);
            for rho in [0.0, 0.1, 0.29] {
                let direct = midpoint(rate, rho, r);
                assert!(((w.f)(rho) - direct).abs() < 1e-8, "e={e} rho={rho}");
            }
        }
    }
}
