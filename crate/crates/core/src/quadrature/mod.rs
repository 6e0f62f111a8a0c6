//! Integration of current densities over `{lo ≤ φ < hi} × B`.
//!
//! Homogeneous weights go through a product rule in weight-adapted polar
//! coordinates (adaptive Gauss–Kronrod over the radial variables, nested
//! tensor rules over directions); other weights fall back to randomized
//! quasi-Monte Carlo over an enclosing ball.

mod adaptive;
pub mod polar;
mod qmc;
pub mod rules;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::currents::{Kernel, ModelCurrent, SingularityAnnotation};
use crate::error::{LelongError, Result};
use crate::forms::{fd_gradient, fd_hessian, CMat, ScalarField, Split, C64, MAX_DIM};
use crate::weights::{DirectionalBall, TBall, Weight};

use adaptive::{Adaptive, Axis};
use polar::{block_kinds, DensityFn, InnerGrid, PolarKernel};
use qmc::QmcProblem;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Evaluation budget: `LELONG_BUDGET` if set and valid, else 10^7.
pub fn default_budget() -> u64 {
    std::env::var("LELONG_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|b| *b >= 1.0)
        .map(|b| b as u64)
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub strategy: String,
}

impl Estimate {
    pub fn exact(value: f64, strategy: &str) -> Self {
        Estimate { value, error: 0.0, evaluations: 0, strategy: strategy.into() }
    }

    pub fn zero() -> Self {
        Self::exact(0.0, "zero")
    }

    pub fn scale(&self, s: f64) -> Self {
        Estimate { value: self.value * s, error: self.error * s.abs(), ..self.clone() }
    }

    /// `self + c · other`, errors added in absolute value.
    pub fn add_scaled(&self, c: f64, other: &Estimate) -> Self {
        Estimate {
            value: self.value + c * other.value,
            error: self.error + c.abs() * other.error,
            evaluations: self.evaluations + other.evaluations,
            strategy: merge_strategy(&self.strategy, &other.strategy),
        }
    }

    pub fn plus(&self, other: &Estimate) -> Self {
        self.add_scaled(1.0, other)
    }

    pub fn minus(&self, other: &Estimate) -> Self {
        self.add_scaled(-1.0, other)
    }
}

fn merge_strategy(a: &str, b: &str) -> String {
    if a == b || b == "zero" || b == "exact" {
        a.to_string()
    } else if a == "zero" || a == "exact" {
        b.to_string()
    } else {
        let mut parts: Vec<&str> = a.split('+').chain(b.split('+')).collect();
        parts.sort_unstable();
        parts.dedup();
        parts.join("+")
    }
}

/// Compensated (Neumaier) summation in iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub tol: f64,
    pub seed: u64,
    pub budget: u64,
}

impl QuadOptions {
    pub fn new(tol: f64, seed: u64) -> Self {
        QuadOptions { tol, seed, budget: default_budget() }
    }

    pub fn with_tol(&self, tol: f64) -> Self {
        QuadOptions { tol, ..self.clone() }
    }
}

/// `{lo ≤ φ(z) < hi} × B`, intersected with the support of the integrand.
#[derive(Debug, Clone)]
pub struct Region {
    pub weight: Weight,
    pub levels: (f64, f64),
    pub ball: DirectionalBall,
}

impl Region {
    pub fn sublevel(weight: &Weight, r: f64, ball: &DirectionalBall) -> Self {
        Region { weight: weight.clone(), levels: (0.0, r), ball: ball.clone() }
    }
}

/// A density against Lebesgue measure on the slice `{x_j = 0, j ∈ vanishing}`
/// of C^N. The callable receives full coordinates and the level `φ(z)`.
pub struct Integrand<'a> {
    pub split: Split,
    pub vanishing: Vec<usize>,
    pub annotations: Vec<SingularityAnnotation>,
    /// Non-smooth in the level at `φ = 0` (e.g. `dd^c log φ` factors).
    pub singular_at_level_zero: bool,
    pub level_breakpoints: Vec<f64>,
    pub density: Box<DensityFn<'a>>,
}

fn check_integrability(f: &Integrand) -> Result<()> {
    for s in &f.annotations {
        if let Kernel::Power(a) = s.kernel {
            let codim = 2 * s.locus.iter().filter(|i| !f.vanishing.contains(i)).count();
            if !(a < codim as f64) {
                return Err(LelongError::NonIntegrable { locus: s.locus.clone(), kernel: s.kernel_label(), codim });
            }
        }
    }
    Ok(())
}

/// Integrates `f` over `region` to absolute tolerance `opts.tol`.
///
/// Results are bit-identical for identical inputs: all reductions run in a
/// fixed order regardless of the thread pool.
pub fn integrate(region: &Region, f: &Integrand, opts: &QuadOptions) -> Result<Estimate> {
    let (n, m) = (f.split.n, f.split.m);
    if region.weight.dim() != n {
        return Err(LelongError::Contract(format!(
            "weight lives on C^{} but the z-block is C^{n}",
            region.weight.dim()
        )));
    }
    if region.ball.dim() != m {
        return Err(LelongError::Contract(format!(
            "ball lives in C^{} but the t-block is C^{m}",
            region.ball.dim()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(LelongError::Contract(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let (lo, hi) = region.levels;
    let limit = region.weight.validity_radius();
    if !(hi < limit) {
        return Err(LelongError::Range { r: hi, limit });
    }
    if !(lo >= 0.0 && lo < hi) {
        return Err(LelongError::Contract(format!("level interval [{lo}, {hi}) is empty or negative")));
    }
    if lo == 0.0 {
        check_integrability(f)?;
    }
    let comps = region.ball.components();
    let piece = opts.with_tol(opts.tol / comps.len() as f64);
    let mut total = Estimate::zero();
    for (i, b) in comps.iter().enumerate() {
        let mut o = piece.clone();
        o.seed = opts.seed.wrapping_add(i as u64);
        total = total.plus(&integrate_component(region, b, f, &o)?);
    }
    Ok(total)
}

fn integrate_component(region: &Region, ball: &TBall, f: &Integrand, opts: &QuadOptions) -> Result<Estimate> {
    let (n, m) = (f.split.n, f.split.m);
    let n_full = n + m;
    let z_positions: Vec<usize> = (0..n).filter(|i| !f.vanishing.contains(i)).collect();
    let d = z_positions.len();
    let (lo, hi) = region.levels;
    if d == 0 && lo > 0.0 {
        return Ok(Estimate::zero());
    }
    let phi = &region.weight;
    let Some(gamma) = phi.homogeneity() else {
        let radius = phi.bounding_radius().expect("non-homogeneous weights carry a bounding radius");
        let level_of = |c: &[C64]| phi.value(&c[..n]);
        let problem = QmcProblem {
            d,
            m,
            z_positions,
            t_offset: n,
            n_full,
            z_radius: radius,
            center: ball.center.clone(),
            t_radius: ball.radius,
            levels: region.levels,
            level_of: &level_of,
            density: &*f.density,
        };
        return problem.run(opts.tol, opts.seed, opts.budget);
    };

    let z_sing = f.singular_at_level_zero
        || f.annotations.iter().any(|s| z_positions.iter().all(|p| s.locus.contains(p)));
    let t_sing = m > 0
        && ball.center.iter().all(|c| *c == C64::new(0.0, 0.0))
        && f.annotations.iter().any(|s| (n..n_full).all(|p| s.locus.contains(&p)));
    let mut axes = Vec::new();
    if d > 0 {
        let inv = 1.0 / gamma;
        axes.push(Axis {
            a: lo.powf(inv),
            b: hi.powf(inv),
            singular_at_a: lo == 0.0 && z_sing,
            breakpoints: f.level_breakpoints.iter().map(|x| x.powf(inv)).collect(),
        });
    }
    if m > 0 {
        axes.push(Axis { a: 0.0, b: ball.radius * ball.radius, singular_at_a: t_sing, breakpoints: Vec::new() });
    }
    let mut kinds = block_kinds(d);
    kinds.extend(block_kinds(m));

    let zscale = |u: &[C64]| -> Result<f64> {
        let mut z = [C64::new(0.0, 0.0); MAX_DIM];
        for (j, &p) in z_positions.iter().enumerate() {
            z[p] = u[j];
        }
        let v = phi.value(&z[..n]);
        if !(v > 0.0) || !v.is_finite() {
            return Err(LelongError::Domain(format!("weight {} vanishes on a unit direction", phi.name())));
        }
        Ok(v.powf(-1.0 / gamma))
    };
    let make = |levels: &[u32]| -> Result<PolarKernel> {
        Ok(PolarKernel {
            grid: InnerGrid::new(d, m, levels, &zscale)?,
            z_positions: z_positions.clone(),
            t_offset: n,
            n_full,
            center: ball.center.clone(),
            gamma,
            density: &*f.density,
        })
    };
    let strategy = if axes.is_empty() { "point" } else { "polar-gk15" };
    Adaptive { axes, kinds, make: &make, tol: opts.tol, budget: opts.budget, strategy }.run()
}

/// Weight `W(φ)` applied to the integrand, used to fold `ds`-integrals of
/// sublevel masses into a single integral.
#[derive(Clone)]
pub struct LevelWeight {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub singular_at_zero: bool,
    pub breakpoints: Vec<f64>,
}

/// The mass `∫ W(φ) T ∧ α_φ^a ∧ β_φ^{n-k-a} ∧ β_v^m` over a level band.
pub struct MassQuery<'a> {
    pub current: &'a ModelCurrent,
    pub phi: &'a Weight,
    pub v: &'a Weight,
    pub ball: &'a DirectionalBall,
    pub alpha_power: usize,
    pub level_weight: Option<LevelWeight>,
}

fn weight_hessian(w: &Weight, x: &[C64]) -> CMat {
    w.hessian(x).unwrap_or_else(|| fd_hessian(w, x))
}

pub fn mass(query: &MassQuery, levels: (f64, f64), opts: &QuadOptions) -> Result<Estimate> {
    let t = query.current;
    let (n, m) = (t.split.n, t.split.m);
    let nn = n + m;
    if t.bidegree > n {
        return Err(LelongError::Contract(format!("bidegree {} exceeds n = {n}", t.bidegree)));
    }
    let e = n - t.bidegree;
    if query.alpha_power > e {
        return Err(LelongError::Contract(format!("α-power {} exceeds n-k = {e}", query.alpha_power)));
    }
    if query.v.dim() != m {
        return Err(LelongError::Contract(format!("t-weight lives on C^{}, t-block is C^{m}", query.v.dim())));
    }
    let leaves = t.leaves();
    if leaves.is_empty() {
        return Ok(Estimate::zero());
    }
    let (a, b) = (query.alpha_power, e - query.alpha_power);
    let region = Region { weight: query.phi.clone(), levels, ball: query.ball.clone() };
    let mut total = Estimate::zero();
    for (c, leaf) in &leaves {
        if *c == 0.0 {
            continue;
        }
        let phi = query.phi;
        let v = query.v;
        let lw = query.level_weight.clone();
        let leaf = *leaf;
        let density = move |coords: &[C64], level: f64| -> f64 {
            let w = match &lw {
                Some(lw) => (lw.f)(level),
                None => 1.0,
            };
            if w == 0.0 {
                return 0.0;
            }
            let z = &coords[..n];
            let mut tests = [CMat::zeros(0); MAX_DIM];
            let mut count = 0;
            if a > 0 {
                let val = phi.value(z);
                let g = phi.gradient(z).unwrap_or_else(|| fd_gradient(phi, z));
                let h = weight_hessian(phi, z).scale(1.0 / val) + CMat::outer(&g).scale(-1.0 / (val * val));
                let al = h.embed(nn, 0);
                for _ in 0..a {
                    tests[count] = al;
                    count += 1;
                }
            }
            if b > 0 {
                let be = weight_hessian(phi, z).embed(nn, 0);
                for _ in 0..b {
                    tests[count] = be;
                    count += 1;
                }
            }
            if m > 0 {
                let bv = weight_hessian(v, &coords[n..]).embed(nn, n);
                for _ in 0..m {
                    tests[count] = bv;
                    count += 1;
                }
            }
            let dens = leaf.leaf_density(coords, &tests[..count]);
            if dens == 0.0 {
                0.0
            } else {
                w * dens
            }
        };
        let integrand = Integrand {
            split: t.split,
            vanishing: leaf.vanishing().to_vec(),
            annotations: leaf.singularities.clone(),
            singular_at_level_zero: a > 0 || query.level_weight.as_ref().is_some_and(|l| l.singular_at_zero),
            level_breakpoints: query.level_weight.as_ref().map(|l| l.breakpoints.clone()).unwrap_or_default(),
            density: Box::new(density),
        };
        let piece = opts.with_tol(opts.tol / (c.abs() * leaves.len() as f64));
        let est = integrate(&region, &integrand, &piece)?;
        total = total.add_scaled(*c, &est);
    }
    Ok(total)
}

/// Sampled `r ↦ ν(T, φ, B, r)` on a decreasing grid.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub nu: Vec<Estimate>,
    /// The normalizing exponent `n - k`.
    pub exponent: usize,
}

impl RadialProfile {
    pub fn values(&self) -> Vec<f64> {
        self.nu.iter().map(|e| e.value).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.nu.iter().map(|e| e.error).collect()
    }
}

/// Checks that `grid` is strictly decreasing and positive.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(LelongError::Contract("empty r-grid".into()));
    }
    if grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LelongError::Contract("r-grid must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// Geometric grid `r_max q^j`, `j = 0..count`.
pub fn geometric_grid(r_max: f64, q: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| r_max * q.powi(j as i32)).collect()
}

/// Masses of the annuli `[r_{j+1}, r_j)` and of the innermost sublevel set,
/// each computed once and accumulated from the inside out. Tolerances are
/// apportioned as `tol (r_j^e - r_{j+1}^e)` so every normalized value meets
/// `tol`.
pub fn profile_of(query: &MassQuery, grid: &[f64], opts: &QuadOptions) -> Result<RadialProfile> {
    validate_grid(grid)?;
    let t = query.current;
    let e = t.split.n.saturating_sub(t.bidegree);
    let j = grid.len();
    let pieces: Vec<((f64, f64), f64)> = (0..j)
        .map(|i| {
            let lo = if i + 1 < j { grid[i + 1] } else { 0.0 };
            let share = if e == 0 {
                opts.tol / j as f64
            } else {
                opts.tol * (grid[i].powi(e as i32) - lo.powi(e as i32))
            };
            ((lo, grid[i]), share)
        })
        .collect();
    let masses: Vec<Estimate> = pieces
        .par_iter()
        .enumerate()
        .map(|(i, &(band, share))| {
            let mut o = opts.with_tol(share);
            o.seed = opts.seed.wrapping_add(1000 * i as u64);
            mass(query, band, &o)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut nu = vec![Estimate::zero(); j];
    let mut acc = Estimate::zero();
    for i in (0..j).rev() {
        acc = acc.plus(&masses[i]);
        nu[i] = acc.scale(grid[i].powi(-(e as i32)));
    }
    Ok(RadialProfile { grid: grid.to_vec(), nu, exponent: e })
}

/// `ν(T, φ, B, r_j)` over the grid, with `v = |t|^2`.
pub fn radial_profile(
    t: &ModelCurrent,
    phi: &Weight,
    ball: &DirectionalBall,
    grid: &[f64],
    tol: f64,
    seed: u64,
) -> Result<RadialProfile> {
    let v = Weight::euclid(t.split.m);
    let query = MassQuery { current: t, phi, v: &v, ball, alpha_power: 0, level_weight: None };
    profile_of(&query, grid, &QuadOptions::new(tol, seed))
}
