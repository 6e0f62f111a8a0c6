//! One-dimensional rule families: the Gauss–Kronrod 7/15 pair for radial
//! variables, and nested periodic-trapezoid and Fejér (second kind) rules
//! for the angular and simplex variables.

use std::f64::consts::{PI, TAU};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// The 15 Kronrod nodes on [-1, 1] in increasing order, with Kronrod
/// weights and the embedded 7-point Gauss weights (zero off the Gauss nodes).
#[derive(Debug, Clone)]
pub struct Gk15 {
    pub nodes: [f64; 15],
    pub kronrod: [f64; 15],
    pub gauss: [f64; 15],
}

impl Gk15 {
    pub fn new() -> Self {
        let mut nodes = [0.0; 15];
        let mut kronrod = [0.0; 15];
        let mut gauss = [0.0; 15];
        for i in 0..8 {
            nodes[i] = -XGK[i];
            nodes[14 - i] = XGK[i];
            kronrod[i] = WGK[i];
            kronrod[14 - i] = WGK[i];
            if i % 2 == 1 {
                gauss[i] = WG[i / 2];
                gauss[14 - i] = WG[i / 2];
            }
        }
        Gk15 { nodes, kronrod, gauss }
    }

    /// Nodes and both weight sets mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> ([f64; 15], [f64; 15], [f64; 15]) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut x = [0.0; 15];
        let mut wk = [0.0; 15];
        let mut wg = [0.0; 15];
        for i in 0..15 {
            x[i] = c + h * self.nodes[i];
            wk[i] = h * self.kronrod[i];
            wg[i] = h * self.gauss[i];
        }
        (x, wk, wg)
    }
}

impl Default for Gk15 {
    fn default() -> Self {
        Self::new()
    }
}

/// A nested 1-D rule at a given level: the nodes of level `L`, its weights,
/// and the weights of level `L-1` expressed on the same nodes (zero where the
/// coarser rule has no node).
#[derive(Debug, Clone, PartialEq)]
pub struct NestedRule {
    pub nodes: Vec<f64>,
    pub hi: Vec<f64>,
    pub lo: Vec<f64>,
}

/// Periodic trapezoid rule on [0, 2π) with `2^level` points.
pub fn trapezoid(level: u32) -> NestedRule {
    let m = 1usize << level;
    let nodes: Vec<f64> = (0..m).map(|j| TAU * j as f64 / m as f64).collect();
    let hi = vec![TAU / m as f64; m];
    let lo = if level == 0 {
        hi.clone()
    } else {
        (0..m).map(|j| if j % 2 == 0 { TAU / (m / 2) as f64 } else { 0.0 }).collect()
    };
    NestedRule { nodes, hi, lo }
}

/// Fejér's second rule on [0, 1] with `2^{level+1} - 1` interior nodes.
pub fn fejer2(level: u32) -> NestedRule {
    let (nodes, hi) = fejer2_raw((1usize << (level + 1)) - 1);
    let lo = if level == 0 {
        hi.clone()
    } else {
        let (_, coarse) = fejer2_raw((1usize << level) - 1);
        // coarse node k sits at fine index 2k+1
        (0..nodes.len()).map(|i| if i % 2 == 1 { coarse[i / 2] } else { 0.0 }).collect()
    };
    NestedRule { nodes, hi, lo }
}

fn fejer2_raw(n: usize) -> (Vec<f64>, Vec<f64>) {
    let np1 = (n + 1) as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 1..=n {
        let th = k as f64 * PI / np1;
        let mut s = 0.0;
        for j in 1..=(n + 1) / 2 {
            let jj = (2 * j - 1) as f64;
            s += (jj * th).sin() / jj;
        }
        // map cos θ ∈ (-1, 1) to (0, 1), ascending in k
        nodes.push(0.5 * (1.0 - th.cos()));
        weights.push(0.5 * 4.0 / np1 * th.sin() * s);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_degree_22_and_gauss_degree_13() {
        let g = Gk15::new();
        let (x, wk, wg) = g.mapped(0.0, 1.0);
        let k: f64 = x.iter().zip(&wk).map(|(x, w)| w * x.powi(22)).sum();
        let gg: f64 = x.iter().zip(&wg).map(|(x, w)| w * x.powi(13)).sum();
        assert!((k - 1.0 / 23.0).abs() < 1e-14);
        assert!((gg - 1.0 / 14.0).abs() < 1e-14);
        assert!((wg.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fejer_is_nested_and_exact_on_polynomials() {
        for level in 0..6 {
            let r = fejer2(level);
            let n = r.nodes.len();
            let exact_deg = n - 1;
            let q: f64 = r.nodes.iter().zip(&r.hi).map(|(x, w)| w * x.powi(exact_deg as i32)).sum();
            assert!((q - 1.0 / (exact_deg + 1) as f64).abs() < 1e-13, "level {level}");
            let lo_sum: f64 = r.lo.iter().sum();
            assert!((lo_sum - 1.0).abs() < 1e-13);
            if level > 0 {
                let coarse = fejer2(level - 1);
                for (k, x) in coarse.nodes.iter().enumerate() {
                    assert!((r.nodes[2 * k + 1] - x).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn trapezoid_exact_on_low_harmonics() {
        let r = trapezoid(3);
        let q: f64 = r.nodes.iter().zip(&r.hi).map(|(t, w)| w * (3.0 * t).cos().powi(2)).sum();
        assert!((q - PI).abs() < 1e-13);
        let lo: f64 = r.lo.iter().sum();
        assert!((lo - TAU).abs() < 1e-14);
    }
}
