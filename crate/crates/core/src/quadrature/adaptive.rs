//! Adaptive subdivision over the (at most two) radial variables, with the
//! inner variables handled by nested tensor rules whose levels are chosen
//! by a probe and raised if the final inner error is too large.

use rayon::prelude::*;

use crate::error::{LelongError, Result};

use super::polar::{DimKind, RadialKernel};
use super::rules::Gk15;
use super::{neumaier_sum, Estimate};

/// Radial axis: interval, singular at its lower end, interior breakpoints.
#[derive(Debug, Clone)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub singular_at_a: bool,
    pub breakpoints: Vec<f64>,
}

#[derive(Debug, Clone)]
struct CellResult {
    value: f64,
    rad_err: [f64; 2],
    lo: Vec<f64>,
    abs: f64,
}

#[derive(Debug, Clone)]
struct Cell {
    lo: [f64; 2],
    hi: [f64; 2],
    res: CellResult,
}

const DYADIC_DEPTH: i32 = 14;

fn axis_segments(ax: &Axis) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = ax.breakpoints.iter().cloned().filter(|&x| x > ax.a && x < ax.b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut pts = vec![ax.a];
    pts.extend(cuts);
    pts.push(ax.b);
    let mut segs = Vec::new();
    for (i, w) in pts.windows(2).enumerate() {
        if i == 0 && ax.singular_at_a {
            // dyadic cells shrinking toward the singular endpoint
            let (a, b) = (w[0], w[1]);
            let h = b - a;
            let mut right = b;
            for j in 1..=DYADIC_DEPTH {
                let left = a + h * 0.5f64.powi(j);
                segs.push((left, right));
                right = left;
            }
            segs.push((a, right));
        } else {
            segs.push((w[0], w[1]));
        }
    }
    segs.sort_by(|x, y| x.0.total_cmp(&y.0));
    segs
}

fn eval_cell<K: RadialKernel>(k: &K, gk: &Gk15, lo: [f64; 2], hi: [f64; 2], r: usize) -> Result<CellResult> {
    let dims = k.inner_dims();
    let mut res = CellResult { value: 0.0, rad_err: [0.0; 2], lo: vec![0.0; dims], abs: 0.0 };
    match r {
        0 => {
            let s = k.eval(&[])?;
            res.value = s.hi;
            res.lo = s.lo;
            res.abs = s.abs;
        }
        1 => {
            let (x, wk, wg) = gk.mapped(lo[0], hi[0]);
            let mut g = 0.0;
            for i in 0..15 {
                let s = k.eval(&[x[i]])?;
                res.value += wk[i] * s.hi;
                g += wg[i] * s.hi;
                res.abs += wk[i] * s.abs;
                for (l, v) in res.lo.iter_mut().zip(&s.lo) {
                    *l += wk[i] * v;
                }
            }
            res.rad_err[0] = (res.value - g).abs();
        }
        _ => {
            let (x, wkx, wgx) = gk.mapped(lo[0], hi[0]);
            let (y, wky, wgy) = gk.mapped(lo[1], hi[1]);
            let (mut g0, mut g1) = (0.0, 0.0);
            for i in 0..15 {
                for j in 0..15 {
                    let s = k.eval(&[x[i], y[j]])?;
                    let w = wkx[i] * wky[j];
                    res.value += w * s.hi;
                    g0 += wgx[i] * wky[j] * s.hi;
                    g1 += wkx[i] * wgy[j] * s.hi;
                    res.abs += w * s.abs;
                    for (l, v) in res.lo.iter_mut().zip(&s.lo) {
                        *l += w * v;
                    }
                }
            }
            res.rad_err = [(res.value - g0).abs(), (res.value - g1).abs()];
        }
    }
    Ok(res)
}

fn cell_points(r: usize) -> u64 {
    15u64.pow(r as u32)
}

pub struct Adaptive<'a, K: RadialKernel> {
    pub axes: Vec<Axis>,
    pub kinds: Vec<DimKind>,
    pub make: &'a (dyn Fn(&[u32]) -> Result<K> + Sync),
    pub tol: f64,
    pub budget: u64,
    pub strategy: &'static str,
}

impl<K: RadialKernel> Adaptive<'_, K> {
    fn over_budget(&self, value: f64, error: f64, evals: u64) -> LelongError {
        LelongError::BudgetExceeded {
            budget: self.budget,
            best: Estimate { value, error, evaluations: evals, strategy: self.strategy.to_string() },
        }
    }

    pub fn run(&self) -> Result<Estimate> {
        let r = self.axes.len();
        assert!(r <= 2, "at most two radial variables");
        let gk = Gk15::new();
        let segs: Vec<Vec<(f64, f64)>> = self.axes.iter().map(axis_segments).collect();
        let mut boxes: Vec<([f64; 2], [f64; 2])> = Vec::new();
        match r {
            0 => boxes.push(([0.0; 2], [0.0; 2])),
            1 => boxes.extend(segs[0].iter().map(|s| ([s.0, 0.0], [s.1, 0.0]))),
            _ => {
                for s in &segs[0] {
                    for t in &segs[1] {
                        boxes.push(([s.0, t.0], [s.1, t.1]));
                    }
                }
            }
        }

        let dims = self.kinds.len();
        let tol_rad = 0.5 * self.tol;
        let tol_inner = 0.5 * self.tol;
        let mut evals = 0u64;
        let mut levels = vec![1u32; dims];
        if dims > 0 {
            levels = self.probe(&boxes, &mut evals)?;
        }

        loop {
            let kernel = (self.make)(&levels)?;
            let per_cell = cell_points(r) * kernel.nodes() as u64;
            let mut cells: Vec<Cell> = boxes
                .par_iter()
                .map(|&(lo, hi)| eval_cell(&kernel, &gk, lo, hi, r).map(|res| Cell { lo, hi, res }))
                .collect::<Result<Vec<_>>>()?;
            evals += per_cell * cells.len() as u64;
            if evals > self.budget {
                let value = neumaier_sum(cells.iter().map(|c| c.res.value));
                let rad: f64 = cells.iter().map(|c| c.res.rad_err[0] + c.res.rad_err[1]).sum();
                return Err(self.over_budget(value, rad, evals));
            }

            loop {
                let rad: f64 = cells.iter().map(|c| c.res.rad_err[0] + c.res.rad_err[1]).sum();
                let abs: f64 = cells.iter().map(|c| c.res.abs).sum();
                let round = 64.0 * f64::EPSILON * abs;
                if rad + round <= tol_rad || r == 0 {
                    break;
                }
                let worst = cells.iter().map(|c| c.res.rad_err[0] + c.res.rad_err[1]).fold(0.0, f64::max);
                let mut pick: Vec<usize> = (0..cells.len())
                    .filter(|&i| {
                        let c = &cells[i];
                        let e = c.res.rad_err[0] + c.res.rad_err[1];
                        e >= 0.25 * worst && splittable(c, r)
                    })
                    .collect();
                pick.sort_by(|&a, &b| {
                    let ea = cells[a].res.rad_err[0] + cells[a].res.rad_err[1];
                    let eb = cells[b].res.rad_err[0] + cells[b].res.rad_err[1];
                    eb.total_cmp(&ea).then(a.cmp(&b))
                });
                pick.truncate(64);
                pick.sort_unstable();
                if pick.is_empty() {
                    break;
                }
                let value = neumaier_sum(cells.iter().map(|c| c.res.value));
                if evals + 2 * per_cell * pick.len() as u64 > self.budget {
                    return Err(self.over_budget(value, rad + round, evals));
                }
                let halves: Vec<([f64; 2], [f64; 2])> = pick
                    .iter()
                    .flat_map(|&i| {
                        let c = &cells[i];
                        let ax = if r == 2
                            && (c.res.rad_err[1] > c.res.rad_err[0] || !axis_splittable(c, 0))
                            && axis_splittable(c, 1)
                        {
                            1
                        } else {
                            0
                        };
                        let mid = 0.5 * (c.lo[ax] + c.hi[ax]);
                        let mut left_hi = c.hi;
                        left_hi[ax] = mid;
                        let mut right_lo = c.lo;
                        right_lo[ax] = mid;
                        [(c.lo, left_hi), (right_lo, c.hi)]
                    })
                    .collect();
                let children: Vec<Cell> = halves
                    .par_iter()
                    .map(|&(lo, hi)| eval_cell(&kernel, &gk, lo, hi, r).map(|res| Cell { lo, hi, res }))
                    .collect::<Result<Vec<_>>>()?;
                evals += per_cell * children.len() as u64;
                let mut children = children.into_iter();
                for &i in &pick {
                    cells[i] = children.next().expect("left child");
                    cells.push(children.next().expect("right child"));
                }
            }

            let value = neumaier_sum(cells.iter().map(|c| c.res.value));
            let rad: f64 = cells.iter().map(|c| c.res.rad_err[0] + c.res.rad_err[1]).sum();
            let abs: f64 = cells.iter().map(|c| c.res.abs).sum();
            let round = 64.0 * f64::EPSILON * abs;
            let per_dim: Vec<f64> = (0..dims)
                .map(|d| neumaier_sum(cells.iter().map(|c| c.res.value - c.res.lo[d])).abs())
                .collect();
            let inner: f64 = per_dim.iter().sum();
            if inner > tol_inner {
                let raise = (0..dims)
                    .filter(|&d| levels[d] < self.kinds[d].max_level())
                    .max_by(|&a, &b| per_dim[a].total_cmp(&per_dim[b]).then(b.cmp(&a)));
                if let Some(d) = raise {
                    if evals > self.budget {
                        return Err(self.over_budget(value, rad + inner + round, evals));
                    }
                    levels[d] += 1;
                    boxes = cells.iter().map(|c| (c.lo, c.hi)).collect();
                    continue;
                }
            }
            return Ok(Estimate {
                value,
                error: rad + inner + round,
                evaluations: evals,
                strategy: self.strategy.to_string(),
            });
        }
    }

    /// Chooses inner levels. Each dimension is first tested for invariance
    /// (level 1 against level 3); otherwise its level is raised until two
    /// consecutive levels agree within its share of the inner tolerance.
    fn probe(&self, boxes: &[([f64; 2], [f64; 2])], evals: &mut u64) -> Result<Vec<u32>> {
        let r = self.axes.len();
        let dims = self.kinds.len();
        let share = 0.5 * self.tol / dims as f64;
        let points: Vec<(Vec<f64>, f64)> = boxes
            .iter()
            .map(|(lo, hi)| {
                let mid: Vec<f64> = (0..r).map(|a| 0.5 * (lo[a] + hi[a])).collect();
                let vol: f64 = (0..r).map(|a| hi[a] - lo[a]).product();
                (mid, vol)
            })
            .collect();
        let quad = |levels: &[u32], evals: &mut u64| -> Result<f64> {
            let k = (self.make)(levels)?;
            *evals += (k.nodes() * points.len()) as u64;
            let vals: Vec<f64> = points
                .par_iter()
                .map(|(x, vol)| k.eval(x).map(|s| s.hi * vol))
                .collect::<Result<Vec<_>>>()?;
            Ok(neumaier_sum(vals))
        };
        let mut levels = vec![1u32; dims];
        for d in 0..dims {
            let base = quad(&levels, evals)?;
            let mut trial = levels.clone();
            trial[d] = 3;
            let fine = quad(&trial, evals)?;
            if (fine - base).abs() <= 0.1 * share {
                continue;
            }
            let mut prev = base;
            let mut l = 2;
            loop {
                trial[d] = l;
                let q = if l == 3 { fine } else { quad(&trial, evals)? };
                if (q - prev).abs() <= share || l >= self.kinds[d].max_level() {
                    break;
                }
                if *evals > self.budget {
                    return Err(self.over_budget(q, (q - prev).abs(), *evals));
                }
                prev = q;
                l += 1;
            }
            levels[d] = l;
        }
        Ok(levels)
    }
}

fn axis_splittable(c: &Cell, a: usize) -> bool {
    let w = c.hi[a] - c.lo[a];
    w > 1e-13 * (c.hi[a].abs() + c.lo[a].abs()) && w > 1e-290
}

fn splittable(c: &Cell, r: usize) -> bool {
    (0..r).any(|a| axis_splittable(c, a))
}
