//! Closed-form scalar fields on C^N with analytic derivatives.
//!
//! Every weight and potential in the catalog is either a diagonal quadratic
//! `c0 + Σ c_i |x_i|^2` or a multiple of the logarithm of one; anything else
//! goes through [`Field::Custom`] and the finite-difference fallback.

use std::fmt;
use std::sync::Arc;

use crate::forms::{CMat, ScalarField, C64};

#[derive(Clone)]
pub enum Field {
    /// `constant + Σ coeffs[i] |x_i|^2`; missing trailing coefficients are 0.
    Quadratic { constant: f64, coeffs: Vec<f64> },
    /// `scale · ln(inner)`.
    Log { scale: f64, inner: Box<Field> },
    Custom(Arc<dyn ScalarField>),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl Field {
    pub fn constant(c: f64) -> Self {
        Field::Quadratic { constant: c, coeffs: Vec::new() }
    }

    pub fn quadratic(constant: f64, coeffs: &[f64]) -> Self {
        Field::Quadratic { constant, coeffs: coeffs.to_vec() }
    }

    /// `Σ_{i ∈ idx} |x_i|^2` on C^dim.
    pub fn norm_sqr_of(dim: usize, idx: &[usize]) -> Self {
        let mut coeffs = vec![0.0; dim];
        for &i in idx {
            coeffs[i] = 1.0;
        }
        Field::Quadratic { constant: 0.0, coeffs }
    }

    pub fn log(scale: f64, inner: Field) -> Self {
        Field::Log { scale, inner: Box::new(inner) }
    }

    pub fn describe(&self) -> String {
        match self {
            Field::Quadratic { constant, coeffs } => {
                let mut parts = Vec::new();
                if *constant != 0.0 || coeffs.iter().all(|&c| c == 0.0) {
                    parts.push(format!("{constant}"));
                }
                for (i, &c) in coeffs.iter().enumerate() {
                    if c == 1.0 {
                        parts.push(format!("|x{}|^2", i + 1));
                    } else if c == -1.0 {
                        parts.push(format!("-|x{}|^2", i + 1));
                    } else if c != 0.0 {
                        parts.push(format!("{c}|x{}|^2", i + 1));
                    }
                }
                parts.join(" + ").replace("+ -", "- ")
            }
            Field::Log { scale, inner } => {
                let s = if *scale == 1.0 {
                    String::new()
                } else if *scale == -1.0 {
                    "-".into()
                } else {
                    format!("{scale}*")
                };
                format!("{s}log({})", inner.describe())
            }
            Field::Custom(u) => format!("{u:?}"),
        }
    }

    fn coeff(coeffs: &[f64], i: usize) -> f64 {
        coeffs.get(i).copied().unwrap_or(0.0)
    }
}

impl ScalarField for Field {
    fn value(&self, x: &[C64]) -> f64 {
        match self {
            Field::Quadratic { constant, coeffs } => {
                constant + coeffs.iter().zip(x).map(|(c, v)| c * v.norm_sqr()).sum::<f64>()
            }
            Field::Log { scale, inner } => scale * inner.value(x).ln(),
            Field::Custom(u) => u.value(x),
        }
    }

    fn gradient(&self, x: &[C64]) -> Option<Vec<C64>> {
        match self {
            Field::Quadratic { coeffs, .. } => {
                Some(x.iter().enumerate().map(|(i, v)| v.conj() * Self::coeff(coeffs, i)).collect())
            }
            Field::Log { scale, inner } => {
                let q = inner.value(x);
                let g = inner.gradient(x)?;
                Some(g.into_iter().map(|v| v * (scale / q)).collect())
            }
            Field::Custom(u) => u.gradient(x),
        }
    }

    fn hessian(&self, x: &[C64]) -> Option<CMat> {
        match self {
            Field::Quadratic { coeffs, .. } => {
                let d: Vec<f64> = (0..x.len()).map(|i| Self::coeff(coeffs, i)).collect();
                Some(CMat::diag(&d))
            }
            Field::Log { scale, inner } => {
                let q = inner.value(x);
                let g = inner.gradient(x)?;
                let h = inner.hessian(x)?;
                Some(h.scale(scale / q) + CMat::outer(&g).scale(-scale / (q * q)))
            }
            Field::Custom(u) => u.hessian(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::fd_hessian;

    #[test]
    fn log_field_matches_finite_differences() {
        let f = Field::log(-1.0, Field::norm_sqr_of(3, &[0, 2]));
        let x = [C64::new(0.3, -0.2), C64::new(0.1, 0.4), C64::new(-0.5, 0.25)];
        let a = f.hessian(&x).unwrap();
        let b = fd_hessian(&f, &x);
        for j in 0..3 {
            for k in 0..3 {
                assert!((a[(j, k)] - b[(j, k)]).norm() < 1e-6, "{j}{k}");
            }
        }
    }

    #[test]
    fn describe_is_readable() {
        assert_eq!(Field::quadratic(1.0, &[0.0, -1.0]).describe(), "1 - |x2|^2");
        assert_eq!(Field::log(-1.0, Field::norm_sqr_of(2, &[1])).describe(), "-log(|x2|^2)");
    }
}
