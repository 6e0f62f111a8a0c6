//! Polar coordinates on C^d: `x_j = sqrt(σ w_j) e^{iθ_j}` with `σ = |x|^2`,
//! `w` on the standard simplex (stick-breaking) and `θ` on the torus, so
//! that `dλ = 2^{-d} σ^{d-1} dσ dw dθ`.
//!
//! For a weight homogeneous of degree γ the radial variable of the z-block
//! is `τ = φ^{1/γ}`: with `c(u) = φ(u)^{-1/γ}` one has `σ = τ c(u)` and
//! `dλ = 2^{-d} c(u)^d τ^{d-1} dτ dw dθ`, so sublevel sets become boxes.

use crate::error::{LelongError, Result};
use crate::forms::C64;

use super::rules::{fejer2, trapezoid, NestedRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimKind {
    Simplex,
    Angle,
}

impl DimKind {
    pub fn max_level(&self) -> u32 {
        match self {
            DimKind::Simplex => 6,
            DimKind::Angle => 8,
        }
    }

    fn rule(&self, level: u32) -> NestedRule {
        match self {
            DimKind::Simplex => fejer2(level),
            DimKind::Angle => trapezoid(level),
        }
    }
}

/// Inner dimension kinds of a block of complex dimension `d`: `d-1`
/// simplex coordinates followed by `d` angles.
pub fn block_kinds(d: usize) -> Vec<DimKind> {
    if d == 0 {
        return Vec::new();
    }
    let mut v = vec![DimKind::Simplex; d - 1];
    v.extend(std::iter::repeat(DimKind::Angle).take(d));
    v
}

/// Tensor grid over the inner (non-radial) variables of one block.
#[derive(Debug, Clone)]
struct BlockGrid {
    /// Unit directions scaled by `sqrt(c(u))`, `nodes × d`.
    dirs: Vec<C64>,
    /// Weight including the stick-breaking Jacobian and `c(u)^d`.
    w: Vec<f64>,
    /// `lo/hi` weight ratio per inner dimension, `nodes × dims`.
    ratio: Vec<f64>,
    dims: usize,
}

fn block_grid(d: usize, levels: &[u32], scale: &dyn Fn(&[C64]) -> Result<f64>) -> Result<BlockGrid> {
    if d == 0 {
        return Ok(BlockGrid { dirs: Vec::new(), w: vec![1.0], ratio: Vec::new(), dims: 0 });
    }
    let kinds = block_kinds(d);
    debug_assert_eq!(kinds.len(), levels.len());
    let rules: Vec<NestedRule> = kinds.iter().zip(levels).map(|(k, &l)| k.rule(l)).collect();
    let sizes: Vec<usize> = rules.iter().map(|r| r.nodes.len()).collect();
    let total: usize = sizes.iter().product();
    let dims = kinds.len();
    let mut grid = BlockGrid {
        dirs: Vec::with_capacity(total * d),
        w: Vec::with_capacity(total),
        ratio: Vec::with_capacity(total * dims),
        dims,
    };
    let mut idx = vec![0usize; dims];
    let mut u = vec![C64::new(0.0, 0.0); d];
    let mut simplex = vec![0.0; d];
    for _ in 0..total {
        // stick-breaking: w_1 = s_1, w_2 = (1-s_1) s_2, ..., w_d = Π(1-s_i)
        let mut rest = 1.0;
        let mut jac = 1.0;
        for i in 0..d - 1 {
            let s = rules[i].nodes[idx[i]];
            simplex[i] = rest * s;
            jac *= (1.0 - s).powi((d - 2 - i) as i32);
            rest *= 1.0 - s;
        }
        simplex[d - 1] = rest;
        let mut w = jac;
        for (i, r) in rules.iter().enumerate() {
            w *= r.hi[idx[i]];
        }
        for j in 0..d {
            let th = rules[d - 1 + j].nodes[idx[d - 1 + j]];
            u[j] = C64::from_polar(simplex[j].sqrt(), th);
        }
        let c = scale(&u)?;
        let sc = c.sqrt();
        grid.dirs.extend(u.iter().map(|x| x * sc));
        grid.w.push(w * c.powi(d as i32));
        for (i, r) in rules.iter().enumerate() {
            grid.ratio.push(r.lo[idx[i]] / r.hi[idx[i]]);
        }
        for i in (0..dims).rev() {
            idx[i] += 1;
            if idx[i] < sizes[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(grid)
}

/// Combined inner grid of the z-block (complex dim `d`) and t-block (`m`).
#[derive(Debug, Clone)]
pub struct InnerGrid {
    pub d: usize,
    pub m: usize,
    pub dims: usize,
    zdirs: Vec<C64>,
    tdirs: Vec<C64>,
    w: Vec<f64>,
    ratio: Vec<f64>,
}

impl InnerGrid {
    /// `levels` lists the z-block dimensions first, then the t-block ones.
    /// `zscale(u)` returns `c(u)` for a unit z-direction.
    pub fn new(d: usize, m: usize, levels: &[u32], zscale: &dyn Fn(&[C64]) -> Result<f64>) -> Result<Self> {
        let dz = block_kinds(d).len();
        let z = block_grid(d, &levels[..dz], zscale)?;
        let t = block_grid(m, &levels[dz..], &|_| Ok(1.0))?;
        let dims = z.dims + t.dims;
        let (nz, nt) = (z.w.len(), t.w.len());
        let mut g = InnerGrid {
            d,
            m,
            dims,
            zdirs: Vec::with_capacity(nz * nt * d),
            tdirs: Vec::with_capacity(nz * nt * m),
            w: Vec::with_capacity(nz * nt),
            ratio: Vec::with_capacity(nz * nt * dims),
        };
        for a in 0..nz {
            for b in 0..nt {
                g.zdirs.extend_from_slice(&z.dirs[a * d..(a + 1) * d]);
                g.tdirs.extend_from_slice(&t.dirs[b * m..(b + 1) * m]);
                g.w.push(z.w[a] * t.w[b]);
                g.ratio.extend_from_slice(&z.ratio[a * z.dims..(a + 1) * z.dims]);
                g.ratio.extend_from_slice(&t.ratio[b * t.dims..(b + 1) * t.dims]);
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Weighted inner sums at one radial point: the fine rule, the rule with
/// inner dimension δ coarsened (for each δ), and the absolute sum.
#[derive(Debug, Clone, Default)]
pub struct InnerSums {
    pub hi: f64,
    pub lo: Vec<f64>,
    pub abs: f64,
}

/// Evaluates the integrand over the inner grid at a radial point.
pub trait RadialKernel: Sync {
    fn inner_dims(&self) -> usize;
    fn nodes(&self) -> usize;
    fn eval(&self, radial: &[f64]) -> Result<InnerSums>;
}

pub type DensityFn<'a> = dyn Fn(&[C64], f64) -> f64 + Sync + 'a;

/// Integrand over `{τ ∈ cell} × B(center, ρ)` in polar coordinates.
pub struct PolarKernel<'a> {
    pub grid: InnerGrid,
    /// Full-coordinate positions of the effective z-block.
    pub z_positions: Vec<usize>,
    pub t_offset: usize,
    pub n_full: usize,
    pub center: Vec<C64>,
    pub gamma: f64,
    pub density: &'a DensityFn<'a>,
}

impl RadialKernel for PolarKernel<'_> {
    fn inner_dims(&self) -> usize {
        self.grid.dims
    }

    fn nodes(&self) -> usize {
        self.grid.len()
    }

    fn eval(&self, radial: &[f64]) -> Result<InnerSums> {
        let (d, m) = (self.grid.d, self.grid.m);
        let mut it = radial.iter();
        let tau = if d > 0 { *it.next().expect("radial z variable") } else { 0.0 };
        let sig = if m > 0 { *it.next().expect("radial t variable") } else { 0.0 };
        let mut rw = 1.0;
        if d > 0 {
            rw *= 0.5f64.powi(d as i32) * tau.powi(d as i32 - 1);
        }
        if m > 0 {
            rw *= 0.5f64.powi(m as i32) * sig.powi(m as i32 - 1);
        }
        let level = if d > 0 { tau.powf(self.gamma) } else { 0.0 };
        let (st, ss) = (tau.sqrt(), sig.sqrt());
        let mut coords = vec![C64::new(0.0, 0.0); self.n_full];
        let dims = self.grid.dims;
        let mut out = InnerSums { hi: 0.0, lo: vec![0.0; dims], abs: 0.0 };
        for i in 0..self.grid.len() {
            for (j, &pos) in self.z_positions.iter().enumerate() {
                coords[pos] = self.grid.zdirs[i * d + j] * st;
            }
            for j in 0..m {
                coords[self.t_offset + j] = self.center[j] + self.grid.tdirs[i * m + j] * ss;
            }
            let f = (self.density)(&coords, level);
            if !f.is_finite() {
                let coordinate = coords.iter().position(|c| c.norm_sqr() == 0.0).unwrap_or(0);
                return Err(LelongError::Evaluation { coordinate, what: "integrand" });
            }
            let v = rw * self.grid.w[i] * f;
            out.hi += v;
            out.abs += v.abs();
            for (l, r) in out.lo.iter_mut().zip(&self.grid.ratio[i * dims..(i + 1) * dims]) {
                *l += v * r;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_sphere_area_from_grid() {
        // ∫ dw dθ over simplex × torus for d = 3 is (2π)^3 / 2!
        let g = InnerGrid::new(3, 0, &[2, 2, 1, 1, 1], &|_| Ok(1.0)).unwrap();
        let s: f64 = g.w.iter().sum();
        assert!((s - (2.0 * PI).powi(3) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn directions_are_unit_vectors() {
        let g = InnerGrid::new(2, 1, &[2, 2, 2, 1], &|_| Ok(1.0)).unwrap();
        for i in 0..g.len() {
            let n: f64 = g.zdirs[i * 2..i * 2 + 2].iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-14);
            assert!((g.tdirs[i].norm() - 1.0).abs() < 1e-14);
        }
    }
}
