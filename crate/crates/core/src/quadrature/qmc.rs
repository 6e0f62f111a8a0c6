//! Randomized quasi-Monte Carlo fallback for weights without homogeneity:
//! Halton points with Cranley–Patterson shifts drawn from a seeded ChaCha
//! stream, over a euclidean ball enclosing the sublevel set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{LelongError, Result};
use crate::forms::C64;

use super::polar::DensityFn;
use super::{neumaier_sum, Estimate};

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const SHIFTS: usize = 8;

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    x
}

pub struct QmcProblem<'a> {
    pub d: usize,
    pub m: usize,
    pub z_positions: Vec<usize>,
    pub t_offset: usize,
    pub n_full: usize,
    pub z_radius: f64,
    pub center: Vec<C64>,
    pub t_radius: f64,
    pub levels: (f64, f64),
    pub level_of: &'a (dyn Fn(&[C64]) -> f64 + Sync),
    pub density: &'a DensityFn<'a>,
}

/// Maps `u ∈ [0,1)^{2d}` to a point of the ball of radius `radius` in C^d;
/// returns the Lebesgue Jacobian.
fn ball_map(u: &[f64], radius: f64, out: &mut [C64]) -> f64 {
    let d = out.len();
    if d == 0 {
        return 1.0;
    }
    let sigma = radius * radius * u[0];
    let mut jac = 0.5f64.powi(d as i32) * sigma.powi(d as i32 - 1) * radius * radius;
    let mut rest = 1.0;
    let mut w = vec![0.0; d];
    for i in 0..d - 1 {
        let s = u[1 + i];
        w[i] = rest * s;
        jac *= (1.0 - s).powi((d - 2 - i) as i32);
        rest *= 1.0 - s;
    }
    w[d - 1] = rest;
    for j in 0..d {
        let th = std::f64::consts::TAU * u[d + j];
        out[j] = C64::from_polar((sigma * w[j]).sqrt(), th);
        jac *= std::f64::consts::TAU;
    }
    jac
}

impl QmcProblem<'_> {
    fn dims(&self) -> usize {
        2 * self.d + 2 * self.m
    }

    fn eval(&self, u: &[f64], z: &mut [C64], t: &mut [C64], coords: &mut [C64]) -> f64 {
        let jz = ball_map(&u[..2 * self.d], self.z_radius, z);
        let jt = ball_map(&u[2 * self.d..], self.t_radius, t);
        coords.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        for (j, &p) in self.z_positions.iter().enumerate() {
            coords[p] = z[j];
        }
        for j in 0..self.m {
            coords[self.t_offset + j] = self.center[j] + t[j];
        }
        let level = (self.level_of)(coords);
        if level < self.levels.0 || level >= self.levels.1 {
            return 0.0;
        }
        jz * jt * (self.density)(coords, level)
    }

    pub fn run(&self, tol: f64, seed: u64, budget: u64) -> Result<Estimate> {
        let dims = self.dims();
        if dims > PRIMES.len() {
            return Err(LelongError::Contract(format!("quasi-random fallback supports at most {} real dimensions", PRIMES.len())));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let shifts: Vec<Vec<f64>> = (0..SHIFTS).map(|_| (0..dims).map(|_| rng.gen::<f64>()).collect()).collect();
        let mut sums = vec![Vec::<f64>::new(); SHIFTS];
        let mut next = 0u64;
        let mut points = 1024u64;
        let mut z = vec![C64::new(0.0, 0.0); self.d];
        let mut t = vec![C64::new(0.0, 0.0); self.m];
        let mut coords = vec![C64::new(0.0, 0.0); self.n_full];
        let mut u = vec![0.0; dims];
        loop {
            for i in next..points {
                let base: Vec<f64> = (0..dims).map(|k| radical_inverse(i + 1, PRIMES[k])).collect();
                for (s, shift) in shifts.iter().enumerate() {
                    for k in 0..dims {
                        u[k] = (base[k] + shift[k]).fract();
                    }
                    let f = self.eval(&u, &mut z, &mut t, &mut coords);
                    if !f.is_finite() {
                        return Err(LelongError::Evaluation { coordinate: 0, what: "integrand" });
                    }
                    sums[s].push(f);
                }
            }
            next = points;
            let means: Vec<f64> = sums.iter().map(|v| neumaier_sum(v.iter().cloned()) / v.len() as f64).collect();
            let mean = neumaier_sum(means.iter().cloned()) / SHIFTS as f64;
            let var = means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (SHIFTS - 1) as f64;
            let error = 3.0 * (var / SHIFTS as f64).sqrt();
            let evals = points * SHIFTS as u64;
            let est = Estimate { value: mean, error, evaluations: evals, strategy: "qmc-halton".into() };
            if error <= tol {
                return Ok(est);
            }
            if 2 * evals > budget {
                return Err(LelongError::BudgetExceeded { budget, best: est });
            }
            points *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_first_points() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn ball_volume_in_c2() {
        let mut out = vec![C64::new(0.0, 0.0); 2];
        // mean Jacobian over the cube equals the volume π^2 r^4 / 2
        let n = 20_000u64;
        let mut s = 0.0;
        for i in 1..=n {
            let u: Vec<f64> = (0..4).map(|k| radical_inverse(i, PRIMES[k])).collect();
            s += ball_map(&u, 0.5, &mut out);
        }
        let vol = std::f64::consts::PI.powi(2) * 0.0625 / 2.0;
        assert!((s / n as f64 - vol).abs() < 1e-3 * vol);
    }
}
