//! Acceptance criteria 1–10. Each test prints one `criterion N: PASS|FAIL`
//! line to the process stdout (visible in the test log even when the test
//! passes) and then asserts.
//!
//! Criterion 3 cannot pass: the printed one-dimensional reduction of the T1
//! profile is half of what the integral evaluates to, and the profile
//! converges. Its test prints FAIL and asserts exactly that failure mode, so
//! any change in the analysis breaks the build.

mod common;

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use common::{log_antiderivative2, random_psd, say, symbolic_wedge, tanh_sinh, tanh_sinh_2d};
use lelong_lab::calibration::run_calibration;
use lelong_lab::currents::{catalog, ddc};
use lelong_lab::forms::{mixed_wedge_coeff, C64};
use lelong_lab::lelong::oracles::oracle;
use lelong_lab::lelong::{
    additivity_check, comparison_check, condition_c, g_profile, k0_identity, lelong_jensen_residual, nondecreasing_in_r,
    nu_at, nu_limit, nu_profile, scaling_check, CVerdict,
};
use lelong_lab::quadrature::{geometric_grid, QuadOptions};
use lelong_lab::weights::{power_weight, DirectionalBall, Weight};
use rand::SeedableRng;

const TOL: f64 = 1e-6;
const SEED: u64 = 1;

fn disc(rho: f64) -> DirectionalBall {
    DirectionalBall::disc(C64::new(0.0, 0.0), rho).unwrap()
}

fn verdict(n: u32, title: &str, pass: bool, detail: &str, elapsed: Duration) {
    say(&format!(
        "criterion {n:>2} [{title}]: {} ({:.1}s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    ));
}

#[test]
fn criterion_01_t2_constancy() {
    let start = Instant::now();
    let t2 = catalog("T2").unwrap();
    let phi = Weight::euclid(2);
    let mut worst: f64 = 0.0;
    let mut product_rule = true;
    for r in [0.5, 0.25, 0.1, 0.05] {
        let e = nu_at(&t2, &phi, &disc(1.0), r, TOL, SEED).unwrap();
        worst = worst.max((e.value - 1.0).abs());
        product_rule &= e.strategy.starts_with("polar");
    }
    let elapsed = start.elapsed();
    // 1e-3 (the product-rule requirement) subsumes the 1e-2 bound
    let pass = worst <= 1e-3 && product_rule && elapsed <= Duration::from_secs(120);
    verdict(1, "T2 constancy", pass, &format!("max |ν - 1| = {worst:.2e}"), elapsed);
    assert!(pass);
}

#[test]
fn criterion_02_ddc_t2_mass() {
    let start = Instant::now();
    let d = ddc(&catalog("T2").unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for r in [0.5, 0.25, 0.1, 0.05] {
        let e = nu_at(&d, &Weight::euclid(2), &disc(1.0), r, 1e-8, SEED).unwrap();
        worst = worst.max((e.value + 1.0).abs());
    }
    let pass = worst <= 1e-6;
    verdict(2, "ddc T2 mass", pass, &format!("max |ν + 1| = {worst:.2e}"), start.elapsed());
    assert!(pass);
}

/// `(c / r) ∫_0^r ∫_0^{1/4} -log(x + y) dy dx`: the T1 profile on D(0, 1/2)
/// after integrating out the angles (x = |z1|^2, y = |t|^2).
fn t1_closed_form(r: f64) -> f64 {
    let f = log_antiderivative2;
    -(f(r + 0.25) - f(r) - f(0.25)) / r
}

#[test]
fn criterion_03_t1_divergence() {
    let start = Instant::now();
    let t1 = catalog("T1").unwrap();
    let phi = Weight::euclid(2);
    let ball = disc(0.5);
    let re = [0.4, 0.2, 0.1, 0.05];
    let mut worst_rel: f64 = 0.0;
    let mut ratios = Vec::new();
    for &x in &re {
        let r = x * x;
        let e = nu_at(&t1, &phi, &ball, r, TOL, SEED).unwrap();
        // the printed reduction, evaluated independently of the library
        let printed = 2.0 / (x * x)
            * tanh_sinh(
                &|s| {
                    let (r2, s2) = (x * x, s * s);
                    (-0.5 * r2 * (r2 + s2).ln() + 0.5 * r2 - 0.5 * s2 * ((r2 + s2).ln() - s2.ln())) * s
                },
                0.0,
                0.5,
                1e-14,
            );
        assert!((printed - oracle("t1-printed", r).unwrap()).abs() < 1e-10 * printed);
        worst_rel = worst_rel.max((e.value - printed).abs() / printed);
        ratios.push((e.value / printed, e.value, t1_closed_form(r)));
    }
    let grid: Vec<f64> = (0..8).map(|j| (0.4 * 0.5f64.powi(j)).powi(2)).collect();
    let limit = nu_limit(&nu_profile(&t1, &phi, &ball, &grid, TOL, SEED).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let pass = worst_rel <= 1e-2 && limit.diverges() && elapsed <= Duration::from_secs(300);
    verdict(
        3,
        "T1 divergence",
        pass,
        &format!(
            "max rel. deviation from printed reduction {worst_rel:.3} (ν / printed = {:.4}); limit {}",
            ratios[0].0,
            limit.label()
        ),
        elapsed,
    );

    // The recorded failure mode: the quadrature agrees with the directly
    // derived profile, which is exactly twice the printed expression, and
    // converges to -∫_{|t|<1/2} log|t|^2 = log 2 / 2 + 1/4.
    assert!(!pass);
    for (ratio, value, exact) in ratios {
        assert!((ratio - 2.0).abs() < 1e-4, "ν / printed = {ratio}");
        assert!((value - exact).abs() < 1e-5 * exact, "{value} vs {exact}");
    }
    let (v, u) = limit.converged().expect("the T1 profile converges");
    assert!((v - (0.5 * LN_2 + 0.25)).abs() <= u.max(2e-3), "{v} ± {u}");
}

#[test]
fn criterion_04_t0_dichotomy() {
    let start = Instant::now();
    let grid = geometric_grid(0.16, 0.25, 8);
    let t0 = catalog("T0").unwrap();
    let full = nu_profile(&t0, &Weight::euclid(2), &DirectionalBall::point(), &grid, 1e-7, SEED).unwrap();
    let mut worst: f64 = 0.0;
    for (&r, e) in grid.iter().zip(&full.nu) {
        let re = r.sqrt();
        worst = worst.max((e.value - (1.0 - 2.0 * re.ln())).abs());
    }
    let full_limit = nu_limit(&full).unwrap();

    let t0d = catalog("T0d").unwrap();
    let dir = nu_profile(&t0d, &Weight::euclid(1), &disc(0.5), &grid, 1e-7, SEED).unwrap();
    let dir_limit = nu_limit(&dir).unwrap();
    // -∫_{|t|<1/2} log|t|^2 dd^c|t|^2 = -∫_0^{1/4} log y dy
    let want = -tanh_sinh(&|y| y.ln(), 0.0, 0.25, 1e-14);
    assert!((want - (0.5 * LN_2 + 0.25)).abs() < 1e-12);
    let dir_ok = dir_limit.converged().is_some_and(|(v, _)| (v - want).abs() <= 2e-3);

    let pass = worst <= 1e-3 && full_limit.diverges() && dir_ok;
    verdict(
        4,
        "T0 dichotomy",
        pass,
        &format!(
            "full: max |ν - (1 - 2 log r_e)| = {worst:.2e}, {}; directional: {}",
            full_limit.label(),
            dir_limit.label()
        ),
        start.elapsed(),
    );
    assert!(pass);
}

#[test]
fn criterion_05_scaling_law() {
    let start = Instant::now();
    let grid = geometric_grid(0.25, 0.5, 8);
    let phi = Weight::euclid(2);
    let mut ok = true;
    let mut details = Vec::new();
    for (name, p, rho) in [("T2", 2.0, 1.0), ("T3", 2.0, 0.5), ("T4", 3.0, 0.5)] {
        let t = catalog(name).unwrap();
        let rep = scaling_check(&t, &phi, &disc(rho), p, &grid, TOL, SEED).unwrap();
        let within = rep.residuals().iter().all(|(res, err)| res.abs() <= 3.0 * err);
        ok &= within;
        details.push(format!("{name} p={p}: max |res|/err {:.2}", rep.max_error_ratio));
        if name == "T2" {
            let lhs = rep.lhs_limit.converged().map(|c| c.0).unwrap_or(f64::NAN);
            let naive = rep.naive_limit.unwrap_or(f64::NAN);
            ok &= (lhs - 1.0).abs() <= 2e-2 && (naive - 2.0).abs() <= 2e-2;
            details.push(format!("ν(T2,|z|^4) = {lhs:.6}, 2·ν(T2,|z|^2) = {naive:.6}"));
        }
    }
    // independent view of the sharpness claim: the quartic weight directly
    let t2 = catalog("T2").unwrap();
    let direct = nu_at(&t2, &power_weight(&phi, 2.0).unwrap(), &disc(1.0), 0.01, TOL, SEED).unwrap();
    ok &= (direct.value - 1.0).abs() <= 2e-2;
    let elapsed = start.elapsed();
    let pass = ok && elapsed <= Duration::from_secs(600);
    verdict(5, "scaling law", pass, &details.join("; "), elapsed);
    assert!(pass);
}

#[test]
fn criterion_06_lelong_jensen() {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for (name, pq) in [("TS", vec![(1, 0)]), ("TS4", vec![(1, 0), (2, 0), (2, 1)]), ("T2", vec![(1, 0)])] {
        let t = catalog(name).unwrap();
        let phi = Weight::euclid(t.split.n);
        let v = Weight::euclid(t.split.m);
        for (p, q) in pq {
            let rep = lelong_jensen_residual(&t, &phi, &v, &disc(1.0), 0.04, 0.25, p, q, TOL, SEED).unwrap();
            ok &= rep.within(3.0);
            details.push(format!("{name}({p},{q}) {:.1e}/{:.1e}", rep.residual.value.abs(), rep.residual.error));
        }
    }
    let elapsed = start.elapsed();
    let pass = ok && elapsed <= Duration::from_secs(300);
    verdict(6, "Lelong-Jensen", pass, &format!("|residual|/error: {}", details.join(", ")), elapsed);
    assert!(pass);
}

#[test]
fn criterion_07_condition_c() {
    let start = Instant::now();
    let grid = geometric_grid(0.25, 0.5, 8);
    let phi = Weight::euclid(2);
    let verdict_of = |name: &str, rho: f64| condition_c(&catalog(name).unwrap(), &phi, &disc(rho), &grid, TOL, SEED).unwrap();
    let (t2, t3, t4) = (verdict_of("T2", 1.0), verdict_of("T3", 0.5), verdict_of("T4", 0.5));
    let mut ok = t2.verdict == CVerdict::Fails && t3.verdict == CVerdict::TriviallyHolds && t4.verdict == CVerdict::Holds;
    let opts = QuadOptions::new(TOL, SEED);
    for (name, rho) in [("T3", 0.5), ("TS", 1.0)] {
        let (_, g) = g_profile(&catalog(name).unwrap(), &phi, &disc(rho), &grid, &opts).unwrap();
        let v: Vec<f64> = g.iter().map(|e| e.value).collect();
        let e: Vec<f64> = g.iter().map(|e| e.error).collect();
        ok &= nondecreasing_in_r(&v, &e);
    }
    let t3_limit = nu_limit(&nu_profile(&catalog("T3").unwrap(), &phi, &disc(0.5), &grid, TOL, SEED).unwrap()).unwrap();
    // ∫_0^{1/4} (1 - y) dy
    let want = tanh_sinh(&|y| 1.0 - y, 0.0, 0.25, 1e-14);
    ok &= t3_limit.converged().is_some_and(|(v, _)| (v - want).abs() <= 2e-3);
    verdict(
        7,
        "Condition (C)",
        ok,
        &format!(
            "T2 {}, T3 {}, T4 {}; ν(T3) {}",
            t2.verdict.label(),
            t3.verdict.label(),
            t4.verdict.label(),
            t3_limit.label()
        ),
        start.elapsed(),
    );
    assert!(ok);
}

#[test]
fn criterion_08_comparison() {
    let start = Instant::now();
    let grid = geometric_grid(0.25, 0.5, 8);
    let t3 = catalog("T3").unwrap();
    let phi = Weight::euclid(2);
    let quartic = power_weight(&phi, 2.0).unwrap();
    let scaled = Weight::scaled(2, 3.0).unwrap();
    let a = comparison_check(&t3, &phi, &quartic, 2.0, &disc(0.5), &grid, TOL, SEED).unwrap();
    let b = comparison_check(&t3, &phi, &scaled, 1.0, &disc(0.5), &grid, TOL, SEED).unwrap();
    let ra = a.ratio.map(|r| r.0).unwrap_or(f64::NAN);
    let rb = b.ratio.map(|r| r.0).unwrap_or(f64::NAN);
    let pass = (ra - 2.0).abs() <= 2e-2 && (rb - 1.0).abs() <= 2e-2;
    verdict(8, "comparison", pass, &format!("ψ=|z|^4: {ra:.6}; ψ=3|z|^2: {rb:.6}"), start.elapsed());
    assert!(pass);
}

#[test]
fn criterion_09_k0_and_additivity() {
    let start = Instant::now();
    let h0 = catalog("H0").unwrap();
    let k0 = k0_identity(&h0, &disc(0.5), &geometric_grid(0.5, 0.5, 10), 1e-7, SEED).unwrap();
    let diff = k0.difference().unwrap_or(f64::NAN);
    // the direct value: ∫_{|t|<1/2} (1 - |t|^2) on the slice z = 0
    let direct = tanh_sinh_2d(&|_, y| 1.0 - y, (0.0, 1.0), (0.0, 0.25), 1e-14);
    let mut ok = diff.abs() <= 2e-3 && (k0.direct.value - direct).abs() <= 2e-3;

    let grid = geometric_grid(0.25, 0.5, 8);
    let c = |x: f64| C64::new(x, 0.0);
    let t2 = additivity_check(
        &catalog("T2").unwrap(),
        &DirectionalBall::disc(c(0.0), 0.5).unwrap(),
        &DirectionalBall::disc(c(0.7), 0.2).unwrap(),
        &grid,
        TOL,
        SEED,
    )
    .unwrap();
    let t3 = additivity_check(
        &catalog("T3").unwrap(),
        &DirectionalBall::disc(c(-0.25), 0.24).unwrap(),
        &DirectionalBall::disc(c(0.25), 0.24).unwrap(),
        &grid,
        TOL,
        SEED,
    )
    .unwrap();
    ok &= t2.holds() && t3.holds();
    verdict(
        9,
        "k=0 and additivity",
        ok,
        &format!(
            "k0 |limit - direct| = {:.1e}; additivity T2 {:.1e} (±{:.1e}), T3 {:.1e} (±{:.1e})",
            diff.abs(),
            t2.difference.abs(),
            t2.uncertainty,
            t3.difference.abs(),
            t3.uncertainty
        ),
        start.elapsed(),
    );
    assert!(ok);
}

#[test]
fn criterion_10_kernel_oracles() {
    let start = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = 1 + i % 3;
        let forms: Vec<_> = (0..n).map(|_| random_psd(&mut rng, n)).collect();
        let fast = mixed_wedge_coeff(&forms).unwrap();
        let slow = symbolic_wedge(&forms);
        worst = worst.max((fast - slow).abs() / slow.abs().max(1.0));
    }
    let cases = run_calibration(&QuadOptions::new(TOL, SEED)).unwrap();
    let dishonest: Vec<_> = cases.iter().filter(|c| !c.honest()).map(|c| c.name).collect();
    let pass = worst <= 1e-10 && cases.len() == 10 && dishonest.is_empty();
    verdict(
        10,
        "kernel oracles",
        pass,
        &format!(
            "wedge max rel. diff {worst:.1e} on 100 instances; {}/{} calibration integrals honest",
            cases.len() - dishonest.len(),
            cases.len()
        ),
        start.elapsed(),
    );
    assert!(pass);
}
