//! Closed-form and one-dimensional reference profiles, in φ-units
//! (`r = r_euclid^2` for `φ = |z|^2`).

use crate::error::{LelongError, Result};
use crate::quadrature::rules::Gk15;

pub const ORACLE_NAMES: &[&str] = &["t0-full", "t1-printed", "t1-corrected"];

/// Adaptive Gauss–Kronrod on `[a, b]` by recursive bisection.
pub fn gk_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let gk = Gk15::new();
    let rule = |a: f64, b: f64| {
        let (x, wk, wg) = gk.mapped(a, b);
        let (mut k, mut g) = (0.0, 0.0);
        for i in 0..15 {
            let v = f(x[i]);
            k += wk[i] * v;
            g += wg[i] * v;
        }
        (k, (k - g).abs())
    };
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    while let Some((a, b, t, depth)) = stack.pop() {
        let (k, err) = rule(a, b);
        if err <= t || depth >= 60 {
            total += k;
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, 0.5 * t, depth + 1));
            stack.push((a, m, 0.5 * t, depth + 1));
        }
    }
    total
}

/// `-∫_0^r t log(t^2 + s^2) dt` after the angular integral, as a function
/// of the disc radius variable `s`, times `s` (the polar measure on B).
fn t1_inner(re: f64, s: f64) -> f64 {
    let r2 = re * re;
    let s2 = s * s;
    let log_s2 = if s2 > 0.0 { s2.ln() } else { 0.0 };
    (-0.5 * r2 * (r2 + s2).ln() + 0.5 * r2 - 0.5 * s2 * ((r2 + s2).ln() - log_s2)) * s
}

/// The one-dimensional reduction of the T1 profile on `B = D(0, 1/2)` with
/// a caller-chosen prefactor `c / r_e^2`.
pub fn t1_reduction(prefactor: f64, r: f64) -> f64 {
    let re = r.sqrt();
    prefactor / (re * re) * gk_adaptive(&|s| t1_inner(re, s), 0.0, 0.5, 1e-15)
}

/// Evaluates a named reference profile at level `r` (φ-units).
pub fn oracle(name: &str, r: f64) -> Result<f64> {
    match name {
        "t0-full" => Ok(1.0 - r.ln()),
        "t1-printed" => Ok(t1_reduction(2.0, r)),
        "t1-corrected" => Ok(t1_reduction(4.0, r)),
        other => Err(LelongError::Lookup { name: other.into(), available: ORACLE_NAMES.join(", ") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_rule_on_log() {
        let v = gk_adaptive(&|x| x.ln(), 0.0, 1.0, 1e-13);
        assert!((v + 1.0).abs() < 1e-11);
    }

    #[test]
    fn corrected_t1_tends_to_the_slice_value() {
        // as r → 0 the profile tends to -∫_{|t|<1/2} log|t|^2 = log 2 / 2 + 1/4
        let v = oracle("t1-corrected", 1e-10).unwrap();
        assert!((v - (0.5 * 2f64.ln() + 0.25)).abs() < 1e-6, "{v}");
        let p = oracle("t1-printed", 0.01).unwrap();
        assert!((2.0 * p - oracle("t1-corrected", 0.01).unwrap()).abs() < 1e-14);
    }
}
