//! Scenario configs, the check runner and report writers.
//!
//! A config is a TOML file. An optional `[defaults]` table supplies values
//! for every scenario; each other top-level table is one scenario, run and
//! reported in file order:
//!
//! ```toml
//! [defaults]
//! tol = 1e-5
//! seed = 1
//!
//! [t2]
//! current = "T2"                       # catalog name, or "ddc(T2)"
//! weight = "euclid"                    # euclid | power | aniso | scaled
//! ball = [{ center = [0.0, 0.0], radius = 1.0 }]
//! r_max = 0.25                         # grid r_max * ratio^j, j < count
//! ratio = 0.5
//! count = 8
//! checks = ["profile", "limit"]
//! expect_limit = 1.0
//! ```
//!
//! The accepted keys are the fields of `RawScenario`; unknown keys are
//! rejected. The README documents each one.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::currents::{catalog, ddc, ModelCurrent, MonotonicityClass, CATALOG_NAMES};
use crate::error::{LelongError, Result};
use crate::calibration::run_calibration;
use crate::forms::{mixed_wedge_coeff, wedge_by_permutations, CMat, HermitianForm, C64};
use crate::lelong::condition::condition_c_with;
use crate::lelong::oracles::{oracle, ORACLE_NAMES};
use crate::lelong::{
    additivity_check, check_level, comparison_check, g_profile, k0_identity, lelong_jensen_residual, nondecreasing_in_r,
    nu_limit, nu_profile_with, scaling_check, CVerdict, NuVerdict, RadialProfile, VerdictKind,
};
use crate::lelong::limit::MIN_POINTS as MIN_LIMIT_POINTS;
use crate::quadrature::QuadOptions;
use crate::weights::{DirectionalBall, TBall, Weight, WeightParams, WEIGHT_NAMES};

pub const CHECK_NAMES: &[&str] = &[
    "profile",
    "limit",
    "condition_c",
    "g_monotone",
    "lelong_jensen",
    "scaling",
    "comparison",
    "k0",
    "additivity",
    "calibration",
    "wedge_oracle",
];

/// Checks that do not look at the scenario's current, weight or ball.
const SELF_CONTAINED: &[&str] = &["calibration", "wedge_oracle"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBall {
    /// `[re, im]` per t-coordinate, flattened.
    center: Vec<f64>,
    radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLj {
    p: usize,
    q: usize,
    r1: f64,
    r2: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    current: Option<String>,
    weight: Option<String>,
    weight_p: Option<f64>,
    weight_c: Option<f64>,
    weight_lambdas: Option<Vec<f64>>,
    ball: Option<Vec<RawBall>>,
    points: Option<Vec<f64>>,
    r_max: Option<f64>,
    ratio: Option<f64>,
    count: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
    checks: Option<Vec<String>>,
    oracle: Option<String>,
    profile_value: Option<f64>,
    profile_rel: Option<f64>,
    profile_abs: Option<f64>,
    expect_limit: Option<f64>,
    limit_tol: Option<f64>,
    expect_diverges: Option<bool>,
    expect_c: Option<String>,
    lj: Option<Vec<RawLj>>,
    scaling_p: Option<Vec<f64>>,
    expect_scaling_limit: Option<f64>,
    psi: Option<String>,
    psi_p: Option<f64>,
    psi_c: Option<f64>,
    psi_lambdas: Option<Vec<f64>>,
    ell: Option<f64>,
    equivalence: Option<bool>,
    ratio_tol: Option<f64>,
    k0_tol: Option<f64>,
    wedge_trials: Option<usize>,
    wedge_tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LjSpec {
    pub p: usize,
    pub q: usize,
    pub r1: f64,
    pub r2: f64,
}

/// What the profile is compared against, point by point.
#[derive(Debug, Clone)]
pub enum ProfileTarget {
    Constant(f64),
    Named(String),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub current: ModelCurrent,
    pub phi: Weight,
    pub ball: DirectionalBall,
    pub grid: Vec<f64>,
    pub tol: f64,
    pub seed: u64,
    pub checks: Vec<String>,
    pub profile_target: Option<ProfileTarget>,
    pub profile_rel: f64,
    pub profile_abs: Option<f64>,
    pub expect_limit: Option<f64>,
    pub limit_tol: f64,
    pub expect_diverges: Option<bool>,
    pub expect_c: Option<CVerdict>,
    pub lj: Vec<LjSpec>,
    pub scaling_p: Vec<f64>,
    pub expect_scaling_limit: Option<f64>,
    pub psi: Option<Weight>,
    pub ell: Option<f64>,
    pub equivalence: bool,
    pub ratio_tol: f64,
    pub k0_tol: f64,
    pub wedge_trials: usize,
    pub wedge_tol: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

fn cfg_err(id: &str, msg: impl std::fmt::Display) -> LelongError {
    LelongError::Config(format!("[{id}] {msg}"))
}

/// Resolves `NAME` or `ddc(NAME)`.
pub fn resolve_current(name: &str) -> Result<ModelCurrent> {
    match name.strip_prefix("ddc(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) => ddc(&resolve_current(inner)?),
        None => catalog(name),
    }
}

fn resolve_weight(name: &str, dim: usize, p: Option<f64>, c: Option<f64>, lambdas: Option<Vec<f64>>) -> Result<Weight> {
    Weight::catalog(name, dim, &WeightParams { p, lambdas, c })
}

fn resolve_ball(raw: &Option<Vec<RawBall>>, m: usize) -> Result<DirectionalBall> {
    if m == 0 {
        return Ok(DirectionalBall::point());
    }
    let Some(raw) = raw else {
        return DirectionalBall::ball(vec![C64::new(0.0, 0.0); m], 1.0);
    };
    let mut balls = Vec::new();
    for b in raw {
        if b.center.len() != 2 * m {
            return Err(LelongError::Contract(format!(
                "ball center needs {} numbers ([re, im] per t-coordinate), got {}",
                2 * m,
                b.center.len()
            )));
        }
        let center = b.center.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        balls.push(TBall { center, radius: b.radius });
    }
    DirectionalBall::new(m, balls)
}

fn build(id: &str, raw: RawScenario, ov: &Overrides) -> Result<Scenario> {
    let e = |m: &dyn std::fmt::Display| cfg_err(id, m);
    let checks = raw.checks.unwrap_or_else(|| vec!["profile".into()]);
    if checks.is_empty() {
        return Err(e(&"empty `checks`"));
    }
    for c in &checks {
        if !CHECK_NAMES.contains(&c.as_str()) {
            return Err(e(&format!("unknown check `{c}`; available: {}", CHECK_NAMES.join(", "))));
        }
    }
    let self_contained = checks.iter().all(|c| SELF_CONTAINED.contains(&c.as_str()));
    let current_name = match raw.current {
        Some(c) => c,
        None if self_contained => "Zero".into(),
        None => return Err(e(&"missing `current`")),
    };
    let current = resolve_current(&current_name).map_err(|x| e(&x))?;
    let (n, m) = (current.split.n, current.split.m);
    let phi = resolve_weight(raw.weight.as_deref().unwrap_or("euclid"), n, raw.weight_p, raw.weight_c, raw.weight_lambdas)
        .map_err(|x| e(&x))?;
    let ball = resolve_ball(&raw.ball, m).map_err(|x| e(&x))?;
    let grid = match raw.points {
        Some(p) => p,
        None => {
            let r_max = raw.r_max.unwrap_or(0.25);
            let q = raw.ratio.unwrap_or(0.5);
            if !(q > 0.0 && q < 1.0) {
                return Err(e(&format!("ratio must lie in (0, 1), got {q}")));
            }
            (0..raw.count.unwrap_or(8)).map(|j| r_max * q.powi(j as i32)).collect()
        }
    };
    crate::quadrature::validate_grid(&grid).map_err(|x| e(&x))?;
    check_level(&current, &phi, grid[0]).map_err(|x| e(&format!("r_max: {x}")))?;
    let tol = ov.tol.or(raw.tol).unwrap_or(1e-5);
    if !(tol > 0.0) {
        return Err(e(&format!("tol must be positive, got {tol}")));
    }
    let needs_limit = checks.iter().any(|c| matches!(c.as_str(), "limit" | "comparison" | "k0" | "additivity"));
    if needs_limit && grid.len() < MIN_LIMIT_POINTS {
        return Err(e(&format!("limit checks need at least {MIN_LIMIT_POINTS} grid points, got {}", grid.len())));
    }
    let profile_target = match (raw.oracle, raw.profile_value) {
        (Some(_), Some(_)) => return Err(e(&"give either `oracle` or `profile_value`, not both")),
        (Some(name), None) => {
            if !ORACLE_NAMES.contains(&name.as_str()) {
                return Err(e(&format!("unknown oracle `{name}`; available: {}", ORACLE_NAMES.join(", "))));
            }
            Some(ProfileTarget::Named(name))
        }
        (None, Some(v)) => Some(ProfileTarget::Constant(v)),
        (None, None) => None,
    };
    let expect_c = match raw.expect_c.as_deref() {
        None => None,
        Some("holds") => Some(CVerdict::Holds),
        Some("fails") => Some(CVerdict::Fails),
        Some("trivially-holds") => Some(CVerdict::TriviallyHolds),
        Some(other) => return Err(e(&format!("expect_c must be holds, fails or trivially-holds, got `{other}`"))),
    };
    let lj: Vec<LjSpec> =
        raw.lj.unwrap_or_default().into_iter().map(|l| LjSpec { p: l.p, q: l.q, r1: l.r1, r2: l.r2 }).collect();
    if checks.iter().any(|c| c == "lelong_jensen") {
        if lj.is_empty() {
            return Err(e(&"lelong_jensen needs an `lj` list of {p, q, r1, r2}"));
        }
        for l in &lj {
            check_level(&current, &phi, l.r2).map_err(|x| e(&format!("lj r2: {x}")))?;
            if !(l.r1 > 0.0 && l.r1 < l.r2) {
                return Err(e(&format!("lj needs 0 < r1 < r2, got {} and {}", l.r1, l.r2)));
            }
        }
    }
    let scaling_p = raw.scaling_p.unwrap_or_else(|| vec![2.0]);
    let psi = match raw.psi {
        Some(name) => Some(resolve_weight(&name, n, raw.psi_p, raw.psi_c, raw.psi_lambdas).map_err(|x| e(&x))?),
        None => None,
    };
    if checks.iter().any(|c| c == "comparison") {
        let Some(psi) = &psi else {
            return Err(e(&"comparison needs `psi`"));
        };
        if raw.ell.is_none() {
            return Err(e(&"comparison needs `ell`"));
        }
        check_level(&current, psi, grid[0]).map_err(|x| e(&format!("psi: {x}")))?;
    }
    if checks.iter().any(|c| c == "additivity") && ball.components().len() != 2 {
        return Err(e(&"additivity needs a `ball` list with exactly two disjoint components"));
    }
    Ok(Scenario {
        id: id.to_string(),
        current,
        phi,
        ball,
        grid,
        tol,
        seed: ov.seed.or(raw.seed).unwrap_or(1),
        checks,
        profile_target,
        profile_rel: raw.profile_rel.unwrap_or(1e-2),
        profile_abs: raw.profile_abs,
        expect_limit: raw.expect_limit,
        limit_tol: raw.limit_tol.unwrap_or(2e-2),
        expect_diverges: raw.expect_diverges,
        expect_c,
        lj,
        scaling_p,
        expect_scaling_limit: raw.expect_scaling_limit,
        psi,
        ell: raw.ell,
        equivalence: raw.equivalence.unwrap_or(false),
        ratio_tol: raw.ratio_tol.unwrap_or(2e-2),
        k0_tol: raw.k0_tol.unwrap_or(2e-3),
        wedge_trials: raw.wedge_trials.unwrap_or(100),
        wedge_tol: raw.wedge_tol.unwrap_or(1e-10),
    })
}

/// Parses and validates a config. Every error here is a config error.
pub fn parse_config(text: &str, ov: &Overrides) -> Result<Vec<Scenario>> {
    let table: toml::Table = toml::from_str(text).map_err(|e| LelongError::Config(e.to_string()))?;
    let defaults = match table.get("defaults") {
        Some(toml::Value::Table(t)) => t.clone(),
        Some(_) => return Err(LelongError::Config("`defaults` must be a table".into())),
        None => toml::Table::new(),
    };
    let mut out = Vec::new();
    for (id, value) in &table {
        if id == "defaults" {
            continue;
        }
        let toml::Value::Table(t) = value else {
            return Err(LelongError::Config(format!("top-level key `{id}` must be a scenario table")));
        };
        let mut merged = defaults.clone();
        for (k, v) in t {
            merged.insert(k.clone(), v.clone());
        }
        let raw: RawScenario = toml::Value::Table(merged).try_into().map_err(|e| cfg_err(id, e))?;
        out.push(build(id, raw, ov)?);
    }
    if out.is_empty() {
        return Err(LelongError::Config("config defines no scenarios".into()));
    }
    Ok(out)
}

pub fn load_config(path: &Path, ov: &Overrides) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|e| LelongError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, ov)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub scenario: String,
    pub check: String,
    pub r: Option<f64>,
    pub value: f64,
    pub error: f64,
    /// `pass`, `fail: …`, `inconclusive: …` or `error: …`.
    pub verdict: String,
    pub evals: u64,
    pub ms: u64,
}

impl ReportRow {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSummary {
    pub verdict: String,
    pub value: Option<f64>,
    pub uncertainty: Option<f64>,
}

impl LimitSummary {
    fn of(v: &NuVerdict) -> Self {
        let c = v.converged();
        LimitSummary { verdict: v.label(), value: c.map(|c| c.0), uncertainty: c.map(|c| c.1) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub current: String,
    pub weight: String,
    pub ball: String,
    pub grid: Vec<f64>,
    /// The same grid as euclidean radii, for `φ = |z|^2`-type weights.
    pub grid_euclid: Vec<f64>,
    pub limits: BTreeMap<String, LimitSummary>,
    pub notes: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub rows: Vec<ReportRow>,
    pub summary: ScenarioSummary,
    pub budget_exhausted: bool,
}

fn fmt_bound(kind: &str, got: f64, bound: f64) -> String {
    format!("fail: {kind} {got:.3e} exceeds bound {bound:.3e}")
}

struct Runner<'a> {
    sc: &'a Scenario,
    rows: Vec<ReportRow>,
    limits: BTreeMap<String, LimitSummary>,
    notes: Vec<String>,
    budget_exhausted: bool,
    profile: Option<RadialProfile>,
}

impl Runner<'_> {
    fn opts(&self) -> QuadOptions {
        QuadOptions::new(self.sc.tol, self.sc.seed)
    }

    fn row(&mut self, check: &str, r: Option<f64>, value: f64, error: f64, verdict: String, evals: u64, ms: u64) {
        self.rows.push(ReportRow {
            scenario: self.sc.id.clone(),
            check: check.into(),
            r,
            value,
            error,
            verdict,
            evals,
            ms,
        });
    }

    fn error_row(&mut self, check: &str, err: &LelongError, ms: u64) {
        let (value, error, evals) = match err {
            LelongError::BudgetExceeded { best, .. } => {
                self.budget_exhausted = true;
                (best.value, best.error, best.evaluations)
            }
            _ => (f64::NAN, f64::NAN, 0),
        };
        self.row(check, None, value, error, format!("error: {err}"), evals, ms);
    }

    fn profile(&mut self) -> Result<RadialProfile> {
        if let Some(p) = &self.profile {
            return Ok(p.clone());
        }
        let p = nu_profile_with(&self.sc.current, &self.sc.phi, &self.sc.ball, &self.sc.grid, &self.opts())?;
        self.profile = Some(p.clone());
        Ok(p)
    }

    fn run_check(&mut self, check: &str) {
        let start = Instant::now();
        let res = match check {
            "profile" => self.check_profile(start),
            "limit" => self.check_limit(start),
            "condition_c" => self.check_condition_c(start),
            "g_monotone" => self.check_g(start),
            "lelong_jensen" => self.check_lj(start),
            "scaling" => self.check_scaling(start),
            "comparison" => self.check_comparison(start),
            "k0" => self.check_k0(start),
            "additivity" => self.check_additivity(start),
            "calibration" => self.check_calibration(start),
            "wedge_oracle" => self.check_wedge_oracle(start),
            other => Err(LelongError::Config(format!("unknown check `{other}`"))),
        };
        if let Err(err) = res {
            let ms = start.elapsed().as_millis() as u64;
            self.error_row(check, &err, ms);
        }
    }

    fn check_profile(&mut self, start: Instant) -> Result<()> {
        let p = self.profile()?;
        let ms = start.elapsed().as_millis() as u64;
        let psh = self.sc.current.class == MonotonicityClass::Psh;
        for (j, (&r, est)) in p.grid.iter().zip(&p.nu).enumerate() {
            let mut verdict = "pass".to_string();
            if let Some(target) = &self.sc.profile_target {
                let want = match target {
                    ProfileTarget::Constant(v) => *v,
                    ProfileTarget::Named(name) => oracle(name, r)?,
                };
                let bound = self.sc.profile_abs.unwrap_or(self.sc.profile_rel * want.abs());
                let dev = (est.value - want).abs();
                if !(dev <= bound) {
                    verdict = format!("fail: |ν - {want:.6}| = {dev:.3e} exceeds bound {bound:.3e}");
                }
            }
            if psh && j > 0 {
                let prev = &p.nu[j - 1];
                if est.value > prev.value + est.error + prev.error {
                    verdict = format!("fail: psh profile decreases in r ({:.6} < {:.6})", prev.value, est.value);
                }
            }
            self.row("profile", Some(r), est.value, est.error, verdict, est.evaluations, ms);
        }
        Ok(())
    }

    fn limit_verdict(&self, v: &NuVerdict) -> String {
        match &v.kind {
            VerdictKind::Inconclusive { reason } => format!("inconclusive: {reason}"),
            VerdictKind::Diverges { .. } => match self.sc.expect_diverges {
                Some(true) | None if self.sc.expect_limit.is_none() => "pass".into(),
                _ => format!("fail: expected convergence, got {}", v.label()),
            },
            VerdictKind::Converged { value, .. } => {
                if self.sc.expect_diverges == Some(true) {
                    return format!("fail: expected divergence, got {}", v.label());
                }
                match self.sc.expect_limit {
                    Some(want) if (value - want).abs() > self.sc.limit_tol => {
                        fmt_bound(&format!("|limit - {want}|"), (value - want).abs(), self.sc.limit_tol)
                    }
                    _ => "pass".into(),
                }
            }
        }
    }

    fn check_limit(&mut self, start: Instant) -> Result<()> {
        let p = self.profile()?;
        let v = nu_limit(&p)?;
        let ms = start.elapsed().as_millis() as u64;
        let (value, error) = v.converged().unwrap_or((f64::NAN, f64::NAN));
        let evals = p.nu.iter().map(|e| e.evaluations).sum();
        let verdict = self.limit_verdict(&v);
        self.limits.insert("nu".into(), LimitSummary::of(&v));
        self.row("limit", None, value, error, verdict, evals, ms);
        Ok(())
    }

    fn check_condition_c(&mut self, start: Instant) -> Result<()> {
        let sc = self.sc;
        let rep = condition_c_with(&sc.current, &sc.phi, &sc.ball, &sc.grid, &self.opts())?;
        let ms = start.elapsed().as_millis() as u64;
        // sign of ν(dd^cT) against the declared class
        let sign: f64 = match sc.current.class {
            MonotonicityClass::Prh => -1.0,
            MonotonicityClass::Psh => 1.0,
            _ => 0.0,
        };
        for (&s, est) in rep.profile.grid.iter().zip(&rep.profile.nu) {
            let verdict = if sign != 0.0 && sign * est.value < -est.error {
                format!("fail: ν(dd^cT) has the wrong sign for a {} current", sc.current.class.label())
            } else {
                "pass".into()
            };
            self.row("condition_c:ddc_nu", Some(s), est.value, est.error, verdict, est.evaluations, ms);
        }
        let verdict = match sc.expect_c {
            Some(want) if want != rep.verdict => {
                format!("fail: expected {}, got {}", want.label(), rep.verdict.label())
            }
            None if rep.verdict == CVerdict::Inconclusive => "inconclusive: exponent fit".into(),
            _ => "pass".into(),
        };
        self.notes.push(format!("condition_c: {}", rep.verdict.label()));
        let evals = rep.profile.nu.iter().map(|e| e.evaluations).sum();
        self.row(
            &format!("condition_c:{}", rep.verdict.label()),
            None,
            rep.alpha.unwrap_or(f64::NAN),
            rep.residual.unwrap_or(f64::NAN),
            verdict,
            evals,
            ms,
        );
        Ok(())
    }

    fn check_g(&mut self, start: Instant) -> Result<()> {
        let sc = self.sc;
        let (_, g) = g_profile(&sc.current, &sc.phi, &sc.ball, &sc.grid, &self.opts())?;
        let ms = start.elapsed().as_millis() as u64;
        let values: Vec<f64> = g.iter().map(|e| e.value).collect();
        let errors: Vec<f64> = g.iter().map(|e| e.error).collect();
        for (j, (&r, est)) in sc.grid.iter().zip(&g).enumerate() {
            let ok = j == 0 || nondecreasing_in_r(&values[j - 1..=j], &errors[j - 1..=j]);
            let verdict = if ok {
                "pass".into()
            } else {
                format!("fail: g({r}) = {:.6} exceeds g at the next larger r ({:.6})", est.value, values[j - 1])
            };
            self.row("g_monotone", Some(r), est.value, est.error, verdict, est.evaluations, ms);
        }
        Ok(())
    }

    fn check_lj(&mut self, start: Instant) -> Result<()> {
        let sc = self.sc;
        let v = Weight::euclid(sc.current.split.m);
        for (i, l) in sc.lj.iter().enumerate() {
            let t0 = Instant::now();
            let name = format!("lelong_jensen(p={},q={},r1={})", l.p, l.q, l.r1);
            let seed = sc.seed.wrapping_add(17 * i as u64);
            match lelong_jensen_residual(&sc.current, &sc.phi, &v, &sc.ball, l.r1, l.r2, l.p, l.q, sc.tol, seed) {
                Ok(rep) => {
                    let verdict = if rep.within(3.0) {
                        "pass".into()
                    } else {
                        fmt_bound("|residual|", rep.residual.value.abs(), 3.0 * rep.residual.error)
                    };
                    let ms = t0.elapsed().as_millis() as u64;
                    self.row(&name, Some(l.r2), rep.residual.value, rep.residual.error, verdict, rep.residual.evaluations, ms);
                }
                Err(err) => self.error_row(&name, &err, t0.elapsed().as_millis() as u64),
            }
        }
        let _ = start;
        Ok(())
    }

    fn check_scaling(&mut self, start: Instant) -> Result<()> {
        let sc = self.sc;
        for &p in &sc.scaling_p {
            let t0 = Instant::now();
            let name = format!("scaling(p={p})");
            let rep = match scaling_check(&sc.current, &sc.phi, &sc.ball, p, &sc.grid, sc.tol, sc.seed) {
                Ok(r) => r,
                Err(err) => {
                    self.error_row(&name, &err, t0.elapsed().as_millis() as u64);
                    continue;
                }
            };
            let ms = t0.elapsed().as_millis() as u64;
            for ((&r, l), rhs) in rep.grid.iter().zip(&rep.lhs).zip(&rep.rhs) {
                let res = l.value - rhs.value;
                let comb = l.error + rhs.error;
                let verdict = if res.abs() <= 3.0 * comb { "pass".into() } else { fmt_bound("|residual|", res.abs(), 3.0 * comb) };
                self.row(&name, Some(r), res, comb, verdict, l.evaluations + rhs.evaluations, ms);
            }
            let lhs = rep.lhs_limit.converged();
            let mut verdict = "pass".to_string();
            match (lhs, rep.formula_limit) {
                (Some((a, _)), Some(f)) if (a - f).abs() > sc.limit_tol => {
                    verdict = fmt_bound("|ν(φ^p) - formula|", (a - f).abs(), sc.limit_tol);
                }
                (None, _) => verdict = format!("inconclusive: ν(T, φ^p, B) {}", rep.lhs_limit.label()),
                _ => {}
            }
            if let (Some(want), Some((a, _))) = (sc.expect_scaling_limit, lhs) {
                if (a - want).abs() > sc.limit_tol {
                    verdict = fmt_bound(&format!("|ν(φ^p) - {want}|"), (a - want).abs(), sc.limit_tol);
                }
            }
            self.limits.insert(format!("nu_phi^{p}"), LimitSummary::of(&rep.lhs_limit));
            self.notes.push(format!(
                "scaling p={p}: ν(φ^p) {}, formula {:?}, naive p^(n-k)ν {:?}",
                rep.lhs_limit.label(),
                rep.formula_limit,
                rep.naive_limit
            ));
            let (v, e) = lhs.unwrap_or((f64::NAN, f64::NAN));
            self.row(&format!("scaling_limit(p={p})"), None, v, e, verdict, 0, ms);
        }
        let _ = start;
        Ok(())
    }

    fn check_comparison(&mut self, start: Instant) -> Result<()> {
        let sc = self.sc;
        let psi = sc.psi.as_ref().expect("validated");
        let ell = sc.ell.expect("validated");
        let rep = comparison_check(&sc.current, &sc.phi, psi, ell, &sc.ball, &sc.grid, sc.tol, sc.seed)?;
        let ms = start.elapsed().as_millis() as u64;
        let (ratio, unc) = rep.ratio.unwrap_or((f64::NAN, f64::NAN));
        let verdict = if rep.ratio.is_none() {
            "inconclusive: a limit does not converge".into()
        } else if ratio < rep.bound - sc.ratio_tol {
            format!("fail: ratio {ratio:.6} below ℓ^(n-k) = {} by more than {}", rep.bound, sc.ratio_tol)
        } else if sc.equivalence && (ratio - rep.bound).abs() > sc.ratio_tol {
            fmt_bound(&format!("|ratio - {}|", rep.bound), (ratio - rep.bound).abs(), sc.ratio_tol)
        } else {
            "pass".into()
        };
        self.limits.insert("nu_phi".into(), LimitSummary::of(&rep.nu_phi));
        self.limits.insert("nu_psi".into(), LimitSummary::of(&rep.nu_psi));
        self.row("comparison", None, ratio, unc, verdict, 0, ms);
        Ok(())
    }

    fn check_k0(&mut self, start: Instant) -> Result<()> {
        let sc = self.sc;
        let rep = k0_identity(&sc.current, &sc.ball, &sc.grid, sc.tol, sc.seed)?;
        let ms = start.elapsed().as_millis() as u64;
        let unc = rep.limit.converged().map(|c| c.1).unwrap_or(f64::NAN) + rep.direct.error;
        let verdict = match rep.difference() {
            None => format!("inconclusive: {}", rep.limit.label()),
            Some(d) if d.abs() > sc.k0_tol => fmt_bound("|limit - direct|", d.abs(), sc.k0_tol),
            Some(_) => "pass".into(),
        };
        self.limits.insert("nu".into(), LimitSummary::of(&rep.limit));
        self.notes.push(format!("k0 direct integral {:.8}", rep.direct.value));
        self.row("k0", None, rep.difference().unwrap_or(f64::NAN), unc, verdict, rep.direct.evaluations, ms);
        Ok(())
    }

    fn check_additivity(&mut self, start: Instant) -> Result<()> {
        let sc = self.sc;
        let comps = sc.ball.components();
        let b1 = DirectionalBall::new(sc.ball.dim(), vec![comps[0].clone()])?;
        let b2 = DirectionalBall::new(sc.ball.dim(), vec![comps[1].clone()])?;
        let rep = additivity_check(&sc.current, &b1, &b2, &sc.grid, sc.tol, sc.seed)?;
        let ms = start.elapsed().as_millis() as u64;
        let verdict = if rep.holds() {
            "pass".into()
        } else {
            fmt_bound("|ν(B1∪B2) - ν(B1) - ν(B2)|", rep.difference.abs(), rep.uncertainty)
        };
        self.limits.insert("nu_B1".into(), LimitSummary::of(&rep.nu_first));
        self.limits.insert("nu_B2".into(), LimitSummary::of(&rep.nu_second));
        self.limits.insert("nu_union".into(), LimitSummary::of(&rep.nu_union));
        self.row("additivity", None, rep.difference, rep.uncertainty, verdict, 0, ms);
        Ok(())
    }
}

impl Runner<'_> {
    fn check_calibration(&mut self, start: Instant) -> Result<()> {
        let cases = run_calibration(&self.opts())?;
        let ms = start.elapsed().as_millis() as u64;
        let dishonest: Vec<&str> = cases.iter().filter(|c| !c.honest()).map(|c| c.name).collect();
        for c in &cases {
            let verdict = if c.honest() {
                "pass".to_string()
            } else {
                fmt_bound("true error", c.true_error(), 3.0 * c.estimate.error)
            };
            self.row(&format!("calibration:{}", c.name), None, c.estimate.value, c.estimate.error, verdict, c.estimate.evaluations, 0);
        }
        let verdict = if dishonest.is_empty() {
            "pass".to_string()
        } else {
            format!("fail: error estimate not honest for {}", dishonest.join(", "))
        };
        let evals = cases.iter().map(|c| c.estimate.evaluations).sum();
        self.row("calibration", None, (cases.len() - dishonest.len()) as f64, 0.0, verdict, evals, ms);
        Ok(())
    }

    fn check_wedge_oracle(&mut self, start: Instant) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.sc.seed);
        let mut worst = 0.0f64;
        for _ in 0..self.sc.wedge_trials {
            let n = rng.gen_range(1..=3);
            let forms: Vec<HermitianForm> = (0..n).map(|_| random_psd(&mut rng, n)).collect();
            let fast = mixed_wedge_coeff(&forms)?;
            let slow = wedge_by_permutations(&forms)?;
            worst = worst.max((fast - slow).abs() / slow.abs().max(1.0));
        }
        let ms = start.elapsed().as_millis() as u64;
        let verdict =
            if worst <= self.sc.wedge_tol { "pass".into() } else { fmt_bound("relative difference", worst, self.sc.wedge_tol) };
        self.row("wedge_oracle", None, worst, 0.0, verdict, self.sc.wedge_trials as u64, ms);
        Ok(())
    }
}

/// `G G^*` with entries of `G` uniform in the unit square.
fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> HermitianForm {
    let g: Vec<Vec<C64>> =
        (0..n).map(|_| (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    let rows: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| g[i][k] * g[j][k].conj()).sum()).collect())
        .collect();
    HermitianForm::new(CMat::from_rows(&rows))
}

pub fn run_scenario(sc: &Scenario) -> ScenarioOutcome {
    let mut runner = Runner {
        sc,
        rows: Vec::new(),
        limits: BTreeMap::new(),
        notes: Vec::new(),
        budget_exhausted: false,
        profile: None,
    };
    for c in &sc.checks {
        runner.run_check(c);
    }
    let passed = runner.rows.iter().all(|r| r.passed());
    let grid_euclid = match sc.phi.homogeneity() {
        Some(g) => sc.grid.iter().map(|r| (r / sc.phi.sphere_min()).powf(1.0 / (2.0 * g))).collect(),
        None => Vec::new(),
    };
    ScenarioOutcome {
        summary: ScenarioSummary {
            id: sc.id.clone(),
            current: sc.current.name.clone(),
            weight: format!("{} = {}", sc.phi.name(), sc.phi.describe()),
            ball: sc.ball.describe(),
            grid: sc.grid.clone(),
            grid_euclid,
            limits: runner.limits,
            notes: runner.notes,
            passed,
        },
        rows: runner.rows,
        budget_exhausted: runner.budget_exhausted,
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub config: String,
    pub generated_at: u64,
    pub exit_code: i32,
    pub scenarios: Vec<ScenarioSummary>,
}

#[derive(Debug)]
pub struct RunResult {
    pub exit_code: i32,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    pub rows: Vec<ReportRow>,
    pub summary: RunSummary,
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.12e}")
    }
}

pub fn write_csv(path: &Path, rows: &[ReportRow], generated_at: u64) -> Result<()> {
    let mut buf = format!("# generated_at={generated_at}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let io = |e: csv::Error| LelongError::Io(e.to_string());
        w.write_record(["scenario", "check", "r", "value", "error", "verdict", "evals", "ms"]).map_err(io)?;
        for r in rows {
            w.write_record([
                r.scenario.clone(),
                r.check.clone(),
                r.r.map(fmt_num).unwrap_or_default(),
                fmt_num(r.value),
                fmt_num(r.error),
                r.verdict.clone(),
                r.evals.to_string(),
                r.ms.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
    }
    std::fs::write(path, buf)?;
    Ok(())
}

/// Runs all scenarios of a validated config with at most `jobs` threads
/// and writes `<stem>.csv` and `<stem>.json` into `out`.
pub fn run(config: &Path, scenarios: &[Scenario], jobs: usize, out: &Path) -> Result<RunResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| LelongError::Io(e.to_string()))?;
    let outcomes: Vec<ScenarioOutcome> = pool.install(|| scenarios.par_iter().map(run_scenario).collect());
    let rows: Vec<ReportRow> = outcomes.iter().flat_map(|o| o.rows.clone()).collect();
    let exit_code = if outcomes.iter().any(|o| o.budget_exhausted) {
        EXIT_BUDGET
    } else if rows.iter().all(|r| r.passed()) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    let generated_at = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    std::fs::create_dir_all(out)?;
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let csv_path = out.join(format!("{stem}.csv"));
    let json_path = out.join(format!("{stem}.json"));
    write_csv(&csv_path, &rows, generated_at)?;
    let summary = RunSummary {
        config: config.display().to_string(),
        generated_at,
        exit_code,
        scenarios: outcomes.into_iter().map(|o| o.summary).collect(),
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| LelongError::Io(e.to_string()))?;
    std::fs::write(&json_path, json + "\n")?;
    Ok(RunResult { exit_code, csv_path, json_path, rows, summary })
}

/// Human-readable catalog of currents and weights.
pub fn list_catalog() -> String {
    let mut s = String::from("currents:\n");
    for name in CATALOG_NAMES {
        let t = catalog(name).expect("catalog names resolve");
        let radius = if t.validity_radius.is_finite() {
            format!("validity radius {}", t.validity_radius)
        } else {
            "validity radius inf".into()
        };
        s.push_str(&format!(
            "  {:<5} split (n={}, m={})  bidegree ({k},{k})  {:<6} ddc = {}  {radius}\n      {}\n",
            name,
            t.split.n,
            t.split.m,
            t.class.label(),
            t.ddc_label.as_deref().unwrap_or("n/a"),
            t.describe(),
            k = t.bidegree,
        ));
    }
    s.push_str("weights (on C^n, shown for n = 2):\n");
    for name in WEIGHT_NAMES {
        let w = Weight::catalog(name, 2, &WeightParams::default()).expect("catalog weights resolve");
        let hom = w.homogeneity().map(|g| format!("homogeneity {g}")).unwrap_or_else(|| "not homogeneous".into());
        let params = match *name {
            "power" => "  params: weight_p (default 2)",
            "aniso" => "  params: weight_lambdas",
            "scaled" => "  params: weight_c",
            _ => "",
        };
        s.push_str(&format!("  {name} {} {hom}  R = {}{params}\n", w.describe(), w.validity_radius()));
    }
    s.push_str(&format!("checks: {}\n", CHECK_NAMES.join(", ")));
    s.push_str(&format!("profile oracles: {}\n", ORACLE_NAMES.join(", ")));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_merge_and_order() {
        let cfg = r#"
[defaults]
tol = 1e-4
count = 6

[b]
current = "T3"
ball = [{ center = [0.0, 0.0], radius = 0.5 }]

[a]
current = "ddc(T2)"
tol = 1e-6
"#;
        let s = parse_config(cfg, &Overrides::default()).unwrap();
        assert_eq!(s[0].id, "b");
        assert_eq!(s[1].id, "a");
        assert_eq!(s[0].tol, 1e-4);
        assert_eq!(s[1].tol, 1e-6);
        assert_eq!(s[0].grid.len(), 6);
        assert_eq!(s[1].current.bidegree, 2);
    }

    #[test]
    fn config_errors() {
        let ov = Overrides::default();
        assert!(parse_config("[x]\ncurrent = \"T9\"", &ov).is_err());
        assert!(parse_config("[x]\ncurrent = \"T2\"\nr_max = 1.5", &ov).is_err());
        assert!(parse_config("[x]\ncurrent = \"T2\"\nbogus = 1", &ov).is_err());
        assert!(parse_config("[x]\ncurrent = \"T2\"\nchecks = [\"limit\"]\ncount = 4", &ov).is_err());
        assert!(parse_config("", &ov).is_err());
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides { seed: Some(9), tol: Some(1e-3) };
        let s = parse_config("[x]\ncurrent = \"T2\"\nseed = 2\ntol = 1e-7", &ov).unwrap();
        assert_eq!((s[0].seed, s[0].tol), (9, 1e-3));
    }

    #[test]
    fn catalog_listing() {
        let s = list_catalog();
        assert!(s.lines().any(|l| l.contains("T2") && l.contains("bidegree (1,1)") && l.contains("prh") && l.contains("ddc = -[z=0]")));
        assert!(s.contains("euclid |z|^2 homogeneity 1"));
        assert!(s.lines().any(|l| l.contains("T1") && l.contains("validity radius 0.8")));
    }
}
