//! Limit `r → 0` of a sampled profile by model selection among a constant,
//! a vanishing power correction, a logarithmic divergence and a power
//! divergence.

use serde::Serialize;

use crate::error::{LelongError, Result};
use crate::quadrature::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Rate {
    Log,
    Power { beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
    Converged { value: f64, uncertainty: f64 },
    Diverges { rate: Rate },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Constant,
    PowerCorrection,
    LogDivergence,
    PowerDivergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub model: Model,
    pub a: f64,
    pub b: f64,
    pub exponent: Option<f64>,
    pub chi2: f64,
    pub aic: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuVerdict {
    pub kind: VerdictKind,
    /// Selected model, `None` when every value agrees with the mean.
    pub fit: Option<Fit>,
    pub candidates: Vec<Fit>,
}

impl NuVerdict {
    pub fn converged(&self) -> Option<(f64, f64)> {
        match self.kind {
            VerdictKind::Converged { value, uncertainty } => Some((value, uncertainty)),
            _ => None,
        }
    }

    pub fn diverges(&self) -> bool {
        matches!(self.kind, VerdictKind::Diverges { .. })
    }

    pub fn label(&self) -> String {
        match &self.kind {
            VerdictKind::Converged { value, uncertainty } => format!("converged({value:.6} ± {uncertainty:.2e})"),
            VerdictKind::Diverges { rate: Rate::Log } => "diverges(log)".into(),
            VerdictKind::Diverges { rate: Rate::Power { beta } } => format!("diverges(power {beta:.3})"),
            VerdictKind::Inconclusive { reason } => format!("inconclusive({reason})"),
        }
    }
}

const EXP_MIN: f64 = 0.1;
const EXP_MAX: f64 = 4.0;

/// Weighted least squares for `y = a + b f`.
fn linear_fit(f: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let (mut s, mut sf, mut sff, mut sy, mut sfy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..y.len() {
        s += w[i];
        sf += w[i] * f[i];
        sff += w[i] * f[i] * f[i];
        sy += w[i] * y[i];
        sfy += w[i] * f[i] * y[i];
    }
    let det = s * sff - sf * sf;
    let (a, b) = if det.abs() <= 1e-300 || !det.is_finite() {
        (sy / s, 0.0)
    } else {
        ((sff * sy - sf * sfy) / det, (s * sfy - sf * sy) / det)
    };
    let chi2 = (0..y.len()).map(|i| w[i] * (y[i] - a - b * f[i]).powi(2)).sum();
    (a, b, chi2)
}

fn rms(f: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    (y.iter().zip(f).map(|(y, f)| (y - a - b * f).powi(2)).sum::<f64>() / y.len() as f64).sqrt()
}

fn exponent_fit(x: &[f64], y: &[f64], w: &[f64], sign: f64) -> (f64, f64, f64, f64) {
    let x0 = x[0];
    let eval = |e: f64| {
        let f: Vec<f64> = x.iter().map(|r| (r / x0).powf(sign * e)).collect();
        let (a, b, c) = linear_fit(&f, y, w);
        (a, b, c, f)
    };
    let mut best = (f64::INFINITY, EXP_MIN);
    let steps = 390;
    for i in 0..=steps {
        let e = EXP_MIN + (EXP_MAX - EXP_MIN) * i as f64 / steps as f64;
        let c = eval(e).2;
        if c < best.0 {
            best = (c, e);
        }
    }
    // golden-section refinement on the bracketing cell
    let h = (EXP_MAX - EXP_MIN) / steps as f64;
    let (mut lo, mut hi) = ((best.1 - h).max(EXP_MIN), (best.1 + h).min(EXP_MAX));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if eval(m1).2 <= eval(m2).2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let e = 0.5 * (lo + hi);
    let e = if eval(e).2 <= best.0 { e } else { best.1 };
    let (a, b, chi2, _) = eval(e);
    // report b in unnormalized units: b (r/x0)^{±e} = (b x0^{∓e}) r^{±e}
    (a, b * x0.powf(-sign * e), chi2, e)
}

fn fits(x: &[f64], y: &[f64], w: &[f64]) -> Vec<Fit> {
    let mut out = Vec::new();
    let ones = vec![0.0; y.len()];
    let (a, _, chi2) = linear_fit(&ones, y, w);
    out.push(Fit { model: Model::Constant, a, b: 0.0, exponent: None, chi2, aic: chi2 + 2.0, rms: rms(&ones, y, a, 0.0) });

    let (a, b, chi2, e) = exponent_fit(x, y, w, 1.0);
    let f: Vec<f64> = x.iter().map(|r| r.powf(e)).collect();
    out.push(Fit { model: Model::PowerCorrection, a, b, exponent: Some(e), chi2, aic: chi2 + 6.0, rms: rms(&f, y, a, b) });

    let f: Vec<f64> = x.iter().map(|r| (1.0 / r).ln()).collect();
    let (a, b, chi2) = linear_fit(&f, y, w);
    out.push(Fit { model: Model::LogDivergence, a, b, exponent: None, chi2, aic: chi2 + 4.0, rms: rms(&f, y, a, b) });

    let (a, b, chi2, e) = exponent_fit(x, y, w, -1.0);
    let f: Vec<f64> = x.iter().map(|r| r.powf(-e)).collect();
    out.push(Fit { model: Model::PowerDivergence, a, b, exponent: Some(e), chi2, aic: chi2 + 6.0, rms: rms(&f, y, a, b) });
    out
}

fn model_value(fit: &Fit, r: f64) -> f64 {
    match fit.model {
        Model::Constant => fit.a,
        Model::PowerCorrection => fit.a + fit.b * r.powf(fit.exponent.unwrap_or(1.0)),
        Model::LogDivergence => fit.a + fit.b * (1.0 / r).ln(),
        Model::PowerDivergence => fit.a + fit.b * r.powf(-fit.exponent.unwrap_or(1.0)),
    }
}

/// Minimum number of grid points for a limit decision.
pub const MIN_POINTS: usize = 6;

pub fn nu_limit(profile: &RadialProfile) -> Result<NuVerdict> {
    limit_of(&profile.grid, &profile.values(), &profile.errors())
}

/// Limit decision for values `y` with quadrature errors `err` on a
/// decreasing grid `x`.
pub fn limit_of(x: &[f64], y: &[f64], err: &[f64]) -> Result<NuVerdict> {
    let n = y.len();
    if n < MIN_POINTS || x.len() != n || err.len() != n {
        return Err(LelongError::Contract(format!("limit needs at least {MIN_POINTS} grid points, got {n}")));
    }
    let ymax = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ymin = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = ymax - ymin;
    let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let floor = |e: f64| e.max(1e-12 * scale).max(1e-300);

    let wmean = {
        let smallest = err.iter().map(|e| floor(*e)).fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = err.iter().map(|e| (smallest / floor(*e)).powi(2)).collect();
        y.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / w.iter().sum::<f64>()
    };
    if y.iter().zip(err).all(|(y, e)| (y - wmean).abs() <= 3.0 * floor(*e)) {
        let max_err = err.iter().cloned().fold(0.0, f64::max);
        let spread = y.iter().map(|v| (v - wmean).abs()).fold(0.0, f64::max);
        return Ok(NuVerdict {
            kind: VerdictKind::Converged { value: wmean, uncertainty: max_err + spread },
            fit: None,
            candidates: Vec::new(),
        });
    }

    let sigma: Vec<f64> = err.iter().map(|e| e.max(1e-4 * range).max(floor(*e))).collect();
    let w: Vec<f64> = sigma.iter().map(|s| s.powi(-2)).collect();
    let candidates = fits(x, y, &w);
    let best = candidates
        .iter()
        .min_by(|a, b| a.aic.total_cmp(&b.aic))
        .cloned()
        .expect("four candidate models");
    let inconclusive = |reason: &str| NuVerdict {
        kind: VerdictKind::Inconclusive { reason: reason.into() },
        fit: Some(best.clone()),
        candidates: candidates.clone(),
    };
    if best.rms > 0.1 * range {
        return Ok(inconclusive("no model fits within 10% of the range"));
    }
    let at_lower = |e: Option<f64>| e.is_some_and(|e| e <= EXP_MIN + 1e-6);
    let at_upper = |e: Option<f64>| e.is_some_and(|e| e >= EXP_MAX - 1e-6);
    match best.model {
        Model::Constant | Model::PowerCorrection => {
            if best.model == Model::PowerCorrection && at_lower(best.exponent) {
                return Ok(inconclusive("correction exponent at its lower bound"));
            }
            let tail_a = if n > MIN_POINTS {
                let wt = &w[1..];
                let refit = fits(&x[1..], &y[1..], wt);
                refit.iter().find(|f| f.model == best.model).map(|f| f.a).unwrap_or(best.a)
            } else {
                best.a
            };
            let uncertainty = err[n - 1] + 3.0 * best.rms + (best.a - tail_a).abs();
            Ok(NuVerdict {
                kind: VerdictKind::Converged { value: best.a, uncertainty },
                fit: Some(best.clone()),
                candidates,
            })
        }
        Model::LogDivergence | Model::PowerDivergence => {
            if best.model == Model::PowerDivergence && (at_lower(best.exponent) || at_upper(best.exponent)) {
                return Ok(inconclusive("divergence exponent at a bound"));
            }
            let change = (model_value(&best, x[n - 1]) - model_value(&best, x[0])).abs();
            if change <= 3.0 * (sigma[0] + sigma[n - 1]) {
                return Ok(inconclusive("divergent term not significant"));
            }
            let dir = best.b.signum();
            let tail = &y[n - 5..];
            let monotone = tail.windows(2).all(|v| dir * (v[1] - v[0]) > 0.0);
            if !monotone {
                return Ok(inconclusive("growth is not monotone over the last 5 points"));
            }
            let rate = match best.model {
                Model::LogDivergence => Rate::Log,
                _ => Rate::Power { beta: best.exponent.unwrap_or(0.0) },
            };
            Ok(NuVerdict { kind: VerdictKind::Diverges { rate }, fit: Some(best.clone()), candidates })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (0..10).map(|j| 0.25 * 0.5f64.powi(j)).collect()
    }

    #[test]
    fn constant_profile_short_circuits() {
        let x = grid();
        let y: Vec<f64> = x.iter().map(|_| 1.0).collect();
        let v = limit_of(&x, &y, &vec![1e-4; 10]).unwrap();
        let (a, u) = v.converged().unwrap();
        assert!((a - 1.0).abs() < 1e-12 && u < 1e-3);
    }

    #[test]
    fn log_divergence_is_detected() {
        let x = grid();
        let y: Vec<f64> = x.iter().map(|r| 1.0 - r.ln()).collect();
        let v = limit_of(&x, &y, &vec![1e-5; 10]).unwrap();
        assert_eq!(v.kind, VerdictKind::Diverges { rate: Rate::Log });
    }

    #[test]
    fn power_correction_converges() {
        let x = grid();
        let y: Vec<f64> = x.iter().map(|r| 0.6 - 0.8 * r.powf(1.5)).collect();
        let v = limit_of(&x, &y, &vec![1e-6; 10]).unwrap();
        let (a, u) = v.converged().unwrap();
        assert!((a - 0.6).abs() < 1e-4, "{a}");
        assert!(u < 1e-3);
    }

    #[test]
    fn power_divergence_is_detected() {
        let x = grid();
        let y: Vec<f64> = x.iter().map(|r| 0.2 + 0.05 * r.powf(-0.7)).collect();
        let v = limit_of(&x, &y, &vec![1e-6; 10]).unwrap();
        match v.kind {
            VerdictKind::Diverges { rate: Rate::Power { beta } } => assert!((beta - 0.7).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_points() {
        assert!(limit_of(&[0.5, 0.25], &[1.0, 1.0], &[0.0, 0.0]).is_err());
    }
}
