#![allow(dead_code)]

use std::collections::HashMap;
use std::io::Write;

use lelong_lab::forms::{HermitianForm, C64};
use num_complex::Complex64;

/// Double-exponential (tanh-sinh) quadrature on `[a, b]`. Endpoint
/// singularities such as `log x` or `x^{-1/2}` are harmless. Halves the step
/// until two successive levels agree to `tol` (relative).
pub fn tanh_sinh(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let t_max = 4.0;
    // x = mid + half·tanh(π/2·sinh t); the complement 1 - |tanh| is kept
    // separately so that points near the ends are not rounded onto them.
    let node = |t: f64| -> Option<f64> {
        let s = std::f64::consts::FRAC_PI_2 * t.sinh();
        let c = std::f64::consts::FRAC_PI_2 * t.cosh();
        let e = (-2.0 * s.abs()).exp();
        let comp = 2.0 * e / (1.0 + e);
        if comp <= 0.0 {
            return None;
        }
        let w = c * 4.0 * e / ((1.0 + e) * (1.0 + e));
        let x = if s >= 0.0 { b - half * comp } else { a + half * comp };
        if x <= a || x >= b {
            return None;
        }
        Some(half * w * f(x))
    };
    let mut h = 0.5;
    let mut sum = node(0.0).unwrap_or(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += node(t).unwrap_or(0.0) + node(-t).unwrap_or(0.0);
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += node(t).unwrap_or(0.0) + node(-t).unwrap_or(0.0);
            k += 2;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Iterated tanh-sinh over `[a0, b0] × [a1, b1]`.
pub fn tanh_sinh_2d(f: &dyn Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64), tol: f64) -> f64 {
    tanh_sinh(&|u| tanh_sinh(&|v| f(u, v), y.0, y.1, tol), x.0, x.1, tol)
}

/// Element of the exterior algebra on `dz_1, dz̄_1, …, dz_N, dz̄_N`
/// (generator `2j` is `dz_j`, `2j + 1` is `dz̄_j`), stored as
/// monomial bitmask → coefficient.
#[derive(Debug, Clone, Default)]
pub struct Exterior(pub HashMap<u32, Complex64>);

impl Exterior {
    pub fn one() -> Self {
        Exterior(HashMap::from([(0, Complex64::new(1.0, 0.0))]))
    }

    /// `Σ_{j,k} A_jk dz_j ∧ dz̄_k` (the `i/2π` factor is left out).
    pub fn from_form(a: &HermitianForm) -> Self {
        let n = a.dim();
        let mut m = HashMap::new();
        for j in 0..n {
            for k in 0..n {
                let (g1, g2) = (2 * j, 2 * k + 1);
                let coeff = a.matrix()[(j, k)];
                let (mask, sign) = wedge_monomials(1 << g1, 1 << g2).expect("distinct generators");
                *m.entry(mask).or_insert(Complex64::new(0.0, 0.0)) += coeff * sign;
            }
        }
        Exterior(m)
    }

    pub fn wedge(&self, other: &Exterior) -> Exterior {
        let mut out: HashMap<u32, Complex64> = HashMap::new();
        for (&a, &x) in &self.0 {
            for (&b, &y) in &other.0 {
                if let Some((mask, sign)) = wedge_monomials(a, b) {
                    *out.entry(mask).or_insert(Complex64::new(0.0, 0.0)) += x * y * sign;
                }
            }
        }
        Exterior(out)
    }

    pub fn coefficient(&self, mask: u32) -> Complex64 {
        self.0.get(&mask).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// Product of two sorted monomials: `None` if they share a generator,
/// otherwise the merged mask and the sign of the sorting permutation.
fn wedge_monomials(a: u32, b: u32) -> Option<(u32, f64)> {
    if a & b != 0 {
        return None;
    }
    // one transposition per pair (i in a, j in b) with i > j
    let mut inversions = 0;
    for j in 0..32 {
        if b & (1 << j) != 0 {
            inversions += (a >> (j + 1)).count_ones();
        }
    }
    Some((a | b, if inversions % 2 == 0 { 1.0 } else { -1.0 }))
}

/// Coefficient of `dz_1∧dz̄_1∧…∧dz_N∧dz̄_N` in `γ_1 ∧ … ∧ γ_N`, by
/// expanding the wedge product symbolically.
pub fn symbolic_wedge(forms: &[HermitianForm]) -> f64 {
    let n = forms.len();
    let prod = forms.iter().fold(Exterior::one(), |acc, f| acc.wedge(&Exterior::from_form(f)));
    let top = if n == 0 { 0 } else { (1u32 << (2 * n)) - 1 };
    prod.coefficient(top).re
}

/// Random `G G^*` with entries of `G` uniform in the unit square.
pub fn random_psd(rng: &mut impl rand::Rng, n: usize) -> HermitianForm {
    use lelong_lab::forms::CMat;
    let g: Vec<Vec<C64>> =
        (0..n).map(|_| (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    let rows: Vec<Vec<C64>> =
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| g[i][k] * g[j][k].conj()).sum()).collect()).collect();
    HermitianForm::new(CMat::from_rows(&rows))
}

/// `u^2 log(u) / 2 - 3 u^2 / 4`, a second antiderivative of `log u`.
pub fn log_antiderivative2(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * u.ln() - 0.75 * u * u
    }
}

/// Writes straight to the process stdout, bypassing the test harness's
/// output capture, so the line shows up in the test log.
pub fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}
