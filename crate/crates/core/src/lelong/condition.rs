//! Condition (C): integrability of `s ↦ s^{-1} ν(dd^cT, φ, B, s)` near 0,
//! decided from a power-law fit of the dd^c profile, and the function
//! `g(r) = ν(T,r) + ∫_0^r ((s/r)^{n-k} - 1) ν(dd^cT, s) ds / s`.

use std::sync::Arc;

use serde::Serialize;

use crate::currents::{ddc, ModelCurrent};
use crate::error::{LelongError, Result};
use crate::quadrature::{mass, profile_of, validate_grid, Estimate, LevelWeight, MassQuery, QuadOptions};
use crate::weights::{DirectionalBall, Weight};

use super::{check_level, exponent, nu_at_with, RadialProfile};

/// Exponent thresholds for the power-law fit `ν(dd^cT, s) ≈ c s^α`.
pub const ALPHA_HOLDS: f64 = 0.2;
pub const ALPHA_FAILS: f64 = 0.05;
pub const FIT_RESIDUAL_MAX: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CVerdict {
    Holds,
    Fails,
    TriviallyHolds,
    Inconclusive,
}

impl CVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            CVerdict::Holds => "holds",
            CVerdict::Fails => "fails",
            CVerdict::TriviallyHolds => "trivially-holds",
            CVerdict::Inconclusive => "inconclusive",
        }
    }

    pub fn satisfied(&self) -> bool {
        matches!(self, CVerdict::Holds | CVerdict::TriviallyHolds)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionCReport {
    pub verdict: CVerdict,
    /// Fitted exponent α (absent when the mass vanishes or changes sign).
    pub alpha: Option<f64>,
    pub coefficient: Option<f64>,
    /// RMS relative deviation of the data from the fitted power law.
    pub residual: Option<f64>,
    /// Estimate of `∫_0^{s_max} s^{-1} ν(dd^cT, s) ds`: model tail below the
    /// grid plus the trapezoid rule in `log s` on it. Infinite on failure.
    pub tail_integral: f64,
    /// `∫_{s_j}^{s_0} s^{-1} ν(dd^cT, s) ds` for each grid point.
    pub partial_sums: Vec<f64>,
    pub profile: RadialProfile,
}

/// Least-squares fit of `log|y| = log|c| + α log s`.
fn power_fit(s: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let sign = y[0].signum();
    if y.iter().any(|v| *v == 0.0 || v.signum() != sign) {
        return None;
    }
    let lx: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = s.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let alpha = sxy / sxx;
    let logc = my - alpha * mx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| ((y - logc - alpha * x).exp() - 1.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Some((alpha, sign * logc.exp(), rms))
}

/// Trapezoid sums of `∫ y d(log s)` from the first grid point inward.
fn partial_sums(s: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; s.len()];
    for j in 1..s.len() {
        out[j] = out[j - 1] + 0.5 * (y[j - 1] + y[j]) * (s[j - 1] / s[j]).ln();
    }
    out
}

pub fn condition_c(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    grid: &[f64],
    tol: f64,
    seed: u64,
) -> Result<ConditionCReport> {
    condition_c_with(t, phi, ball, grid, &QuadOptions::new(tol, seed))
}

pub fn condition_c_with(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    grid: &[f64],
    opts: &QuadOptions,
) -> Result<ConditionCReport> {
    validate_grid(grid)?;
    check_level(t, phi, grid[0])?;
    if exponent(t)? == 0 {
        return Err(LelongError::UnsupportedOperation { current: t.name.clone(), op: "Condition (C) with n = k" });
    }
    let d = ddc(t)?;
    let v = Weight::euclid(t.split.m);
    let query = MassQuery { current: &d, phi, v: &v, ball, alpha_power: 0, level_weight: None };
    let profile = profile_of(&query, grid, opts)?;
    let (y, err) = (profile.values(), profile.errors());
    let sums = partial_sums(grid, &y);
    let report = |verdict, fit: Option<(f64, f64, f64)>, tail_integral| ConditionCReport {
        verdict,
        alpha: fit.map(|f| f.0),
        coefficient: fit.map(|f| f.1),
        residual: fit.map(|f| f.2),
        tail_integral,
        partial_sums: sums.clone(),
        profile: profile.clone(),
    };

    if y.iter().zip(&err).all(|(v, e)| v.abs() <= 3.0 * e + 1e-14) {
        return Ok(report(CVerdict::TriviallyHolds, None, 0.0));
    }
    let Some(fit) = power_fit(grid, &y) else {
        return Ok(report(CVerdict::Inconclusive, None, f64::NAN));
    };
    let (alpha, c, rms) = fit;
    let bounded_away = y.iter().zip(&err).all(|(v, e)| v.abs() > 3.0 * e);
    let s_min = *grid.last().expect("validated grid");
    let verdict = if alpha >= ALPHA_HOLDS && rms < FIT_RESIDUAL_MAX {
        CVerdict::Holds
    } else if alpha < ALPHA_FAILS && bounded_away && rms < FIT_RESIDUAL_MAX {
        CVerdict::Fails
    } else {
        CVerdict::Inconclusive
    };
    let tail = match verdict {
        CVerdict::Holds => c * s_min.powf(alpha) / alpha + sums.last().copied().unwrap_or(0.0),
        CVerdict::Fails => f64::INFINITY * c.signum(),
        _ => f64::NAN,
    };
    Ok(report(verdict, Some(fit), tail))
}

/// `W(ρ) = ∫_ρ^r (r^{-e} - s^{-e}) ds`, the weight that turns the
/// `ds`-integral of g into a single integral against `dd^cT`.
pub(crate) fn g_level_weight(r: f64, e: usize) -> LevelWeight {
    let ef = e as f64;
    let f = move |rho: f64| -> f64 {
        if rho >= r {
            return 0.0;
        }
        let inner = if e == 1 { (r / rho).ln() } else { (rho.powf(1.0 - ef) - r.powf(1.0 - ef)) / (ef - 1.0) };
        (r - rho) * r.powf(-ef) - inner
    };
    LevelWeight { f: Arc::new(f), singular_at_zero: true, breakpoints: Vec::new() }
}

fn require_c(report: &ConditionCReport) -> Result<()> {
    match report.verdict {
        CVerdict::Holds | CVerdict::TriviallyHolds => Ok(()),
        CVerdict::Fails => Err(LelongError::ConditionCFails(format!(
            "s^-1 nu(dd^cT, s) is not integrable near 0 (fitted exponent {:.3}, partial sums {:.3?})",
            report.alpha.unwrap_or(f64::NAN),
            report.partial_sums
        ))),
        CVerdict::Inconclusive => Err(LelongError::ConditionCFails(
            "integrability of s^-1 nu(dd^cT, s) could not be established".into(),
        )),
    }
}

/// g at one level, given a Condition (C) report already in hand.
fn g_at(t: &ModelCurrent, phi: &Weight, ball: &DirectionalBall, r: f64, opts: &QuadOptions) -> Result<Estimate> {
    let e = exponent(t)?;
    let half = opts.with_tol(0.5 * opts.tol);
    let nu = nu_at_with(t, phi, ball, r, &half)?;
    let d = ddc(t)?;
    let v = Weight::euclid(t.split.m);
    let query = MassQuery { current: &d, phi, v: &v, ball, alpha_power: 0, level_weight: Some(g_level_weight(r, e)) };
    let corr = mass(&query, (0.0, r), &half)?;
    Ok(nu.plus(&corr))
}

/// `g(r)`; Condition (C) is measured on `grid_below_r` first and g is only
/// formed when it holds.
pub fn g_function(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    r: f64,
    grid_below_r: &[f64],
    tol: f64,
    seed: u64,
) -> Result<Estimate> {
    let opts = QuadOptions::new(tol, seed);
    if grid_below_r.first().is_some_and(|s| *s > r) {
        return Err(LelongError::Contract(format!("grid must start at or below r = {r}")));
    }
    let report = condition_c_with(t, phi, ball, grid_below_r, &opts)?;
    require_c(&report)?;
    g_at(t, phi, ball, r, &opts)
}

/// g over the whole grid after a single Condition (C) decision.
pub fn g_profile(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    grid: &[f64],
    opts: &QuadOptions,
) -> Result<(ConditionCReport, Vec<Estimate>)> {
    let report = condition_c_with(t, phi, ball, grid, opts)?;
    require_c(&report)?;
    let mut out = Vec::with_capacity(grid.len());
    for (i, &r) in grid.iter().enumerate() {
        let mut o = opts.clone();
        o.seed = opts.seed.wrapping_add(7919 * i as u64);
        out.push(g_at(t, phi, ball, r, &o)?);
    }
    Ok((report, out))
}
