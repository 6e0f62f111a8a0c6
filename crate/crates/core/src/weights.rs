//! Weights φ on the z-block (and v on the t-block), their `dd^c` and
//! `dd^c log` forms, powers, and sublevel geometry.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LelongError, Result};
use crate::fields::Field;
use crate::forms::{CMat, CPoint, HermitianForm, ScalarField, C64};

#[derive(Clone)]
pub enum WeightKind {
    /// `Σ λ_j |z_j|^2`.
    Quadratic(Vec<f64>),
    /// `base^p`.
    Power(Arc<Weight>, f64),
    /// Arbitrary field on C^dim.
    Field(Field),
}

#[derive(Clone)]
pub struct Weight {
    name: String,
    kind: WeightKind,
    dim: usize,
    homogeneity: Option<f64>,
    validity_radius: f64,
    /// Euclidean radius containing every sublevel set below the validity
    /// radius; required for weights without homogeneity.
    bounding_radius: Option<f64>,
    sphere_min: Arc<OnceLock<f64>>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("homogeneity", &self.homogeneity)
            .field("validity_radius", &self.validity_radius)
            .finish()
    }
}

pub const WEIGHT_NAMES: &[&str] = &["euclid", "power", "aniso", "scaled"];

impl Weight {
    /// `|z|^2` on C^dim, valid below 1.
    pub fn euclid(dim: usize) -> Self {
        Self::quadratic("euclid", vec![1.0; dim], 1.0)
    }

    /// `Σ λ_j |z_j|^2`, valid below `min λ` so that sublevels stay in the unit ball.
    pub fn aniso(lambdas: &[f64]) -> Result<Self> {
        if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(LelongError::Contract("anisotropic weight needs positive λ_j".into()));
        }
        let r = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(Self::quadratic("aniso", lambdas.to_vec(), r))
    }

    /// `c |z|^2`, valid below `c`.
    pub fn scaled(dim: usize, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(LelongError::Contract(format!("scaled weight needs c > 0, got {c}")));
        }
        Ok(Self::quadratic("scaled", vec![c; dim], c))
    }

    fn quadratic(name: &str, lambdas: Vec<f64>, validity_radius: f64) -> Self {
        let dim = lambdas.len();
        Weight {
            name: name.to_string(),
            kind: WeightKind::Quadratic(lambdas),
            dim,
            homogeneity: Some(1.0),
            validity_radius,
            bounding_radius: None,
            sphere_min: Arc::new(OnceLock::new()),
        }
    }

    /// A general weight given by a field on C^dim. Non-homogeneous weights
    /// must supply a euclidean bounding radius for their sublevel sets.
    pub fn from_field(
        name: &str,
        field: Field,
        dim: usize,
        homogeneity: Option<f64>,
        validity_radius: f64,
        bounding_radius: Option<f64>,
    ) -> Result<Self> {
        if homogeneity.is_none() && bounding_radius.is_none() {
            return Err(LelongError::Contract(format!(
                "weight `{name}` has no homogeneity and no bounding radius"
            )));
        }
        Ok(Weight {
            name: name.to_string(),
            kind: WeightKind::Field(field),
            dim,
            homogeneity,
            validity_radius,
            bounding_radius,
            sphere_min: Arc::new(OnceLock::new()),
        })
    }

    /// Resolves a catalog weight by name on C^dim.
    pub fn catalog(name: &str, dim: usize, params: &WeightParams) -> Result<Self> {
        match name {
            "euclid" => Ok(Self::euclid(dim)),
            "power" => power_weight(&Self::euclid(dim), params.p.unwrap_or(2.0)),
            "aniso" => {
                let l = params.lambdas.clone().unwrap_or_else(|| vec![1.0; dim]);
                if l.len() != dim {
                    return Err(LelongError::Contract(format!(
                        "aniso weight needs {dim} coefficients, got {}",
                        l.len()
                    )));
                }
                Self::aniso(&l)
            }
            "scaled" => Self::scaled(dim, params.c.unwrap_or(1.0)),
            other => Err(LelongError::Lookup {
                name: other.to_string(),
                available: WEIGHT_NAMES.join(", "),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn homogeneity(&self) -> Option<f64> {
        self.homogeneity
    }

    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn bounding_radius(&self) -> Option<f64> {
        self.bounding_radius
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            WeightKind::Quadratic(l) if l.iter().all(|&x| x == 1.0) => "|z|^2".into(),
            WeightKind::Quadratic(l) if l.iter().all(|&x| x == l[0]) => format!("{}|z|^2", l[0]),
            WeightKind::Quadratic(l) => {
                let terms: Vec<String> =
                    l.iter().enumerate().map(|(j, x)| format!("{x}|z{}|^2", j + 1)).collect();
                terms.join(" + ")
            }
            WeightKind::Power(b, p) => format!("({})^{p}", b.describe()),
            WeightKind::Field(f) => f.describe(),
        }
    }

    /// Minimum of the weight on the unit sphere of C^dim (homogeneous weights).
    pub fn sphere_min(&self) -> f64 {
        *self.sphere_min.get_or_init(|| match &self.kind {
            WeightKind::Quadratic(l) => l.iter().cloned().fold(f64::INFINITY, f64::min),
            WeightKind::Power(b, p) => b.sphere_min().powf(*p),
            WeightKind::Field(_) => sampled_sphere_min(self),
        })
    }

    fn check_level(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || r >= self.validity_radius {
            return Err(LelongError::Range { r, limit: self.validity_radius });
        }
        Ok(())
    }
}

/// Parameters for catalog weights.
#[derive(Debug, Clone, Default)]
pub struct WeightParams {
    pub p: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub c: Option<f64>,
}

impl ScalarField for Weight {
    fn value(&self, x: &[C64]) -> f64 {
        match &self.kind {
            WeightKind::Quadratic(l) => l.iter().zip(x).map(|(a, v)| a * v.norm_sqr()).sum(),
            WeightKind::Power(b, p) => b.value(x).powf(*p),
            WeightKind::Field(f) => f.value(x),
        }
    }

    fn gradient(&self, x: &[C64]) -> Option<Vec<C64>> {
        match &self.kind {
            WeightKind::Quadratic(l) => Some(l.iter().zip(x).map(|(a, v)| v.conj() * *a).collect()),
            WeightKind::Power(b, p) => {
                let bv = b.value(x);
                let s = p * bv.powf(p - 1.0);
                Some(b.gradient(x)?.into_iter().map(|g| g * s).collect())
            }
            WeightKind::Field(f) => f.gradient(x),
        }
    }

    fn hessian(&self, x: &[C64]) -> Option<CMat> {
        match &self.kind {
            WeightKind::Quadratic(l) => Some(CMat::diag(l)),
            WeightKind::Power(b, p) => {
                let bv = b.value(x);
                let g = b.gradient(x)?;
                let h = b.hessian(x)?;
                Some(h.scale(p * bv.powf(p - 1.0)) + CMat::outer(&g).scale(p * (p - 1.0) * bv.powf(p - 2.0)))
            }
            WeightKind::Field(f) => f.hessian(x),
        }
    }
}

fn block<'a>(w: &Weight, p: &'a CPoint, offset: usize) -> Result<&'a [C64]> {
    if offset + w.dim > p.coords.len() {
        return Err(LelongError::Contract(format!(
            "weight `{}` on C^{} does not fit the point of dimension {}",
            w.name,
            w.dim,
            p.coords.len()
        )));
    }
    Ok(&p.coords[offset..offset + w.dim])
}

fn hessian_of(w: &Weight, x: &[C64]) -> CMat {
    w.hessian(x).unwrap_or_else(|| crate::forms::fd_hessian(w, x))
}

fn gradient_of(w: &Weight, x: &[C64]) -> Vec<C64> {
    w.gradient(x).unwrap_or_else(|| crate::forms::fd_gradient(w, x))
}

/// `dd^c φ` at `p`, embedded in the N×N matrix with zero t-block.
pub fn beta(phi: &Weight, p: &CPoint) -> Result<HermitianForm> {
    let z = block(phi, p, 0)?;
    Ok(HermitianForm::new(hessian_of(phi, z)).embed(p.coords.len(), 0))
}

/// `dd^c v` for a t-block weight, embedded after the z-block.
pub fn beta_t(v: &Weight, p: &CPoint) -> Result<HermitianForm> {
    let t = block(v, p, p.split.n)?;
    Ok(HermitianForm::new(hessian_of(v, t)).embed(p.coords.len(), p.split.n))
}

/// `dd^c log φ = Hess φ / φ − g g* / φ^2` at `p`, embedded like [`beta`].
pub fn alpha(phi: &Weight, p: &CPoint) -> Result<HermitianForm> {
    let z = block(phi, p, 0)?;
    let v = phi.value(z);
    if !(v > 0.0) {
        return Err(LelongError::Domain(format!("log of {} needs φ > 0, got {v}", phi.name)));
    }
    let h = hessian_of(phi, z).scale(1.0 / v) + CMat::outer(&gradient_of(phi, z)).scale(-1.0 / (v * v));
    Ok(HermitianForm::new(h).embed(p.coords.len(), 0))
}

/// `φ^p` for `p ≥ 2`, with chain-rule derivatives, homogeneity `pγ` and
/// validity radius `R^p`.
pub fn power_weight(phi: &Weight, p: f64) -> Result<Weight> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(LelongError::Contract(format!("power weight needs p >= 2, got {p}")));
    }
    Ok(Weight {
        name: if phi.name == "euclid" { "power".into() } else { format!("{}^{p}", phi.name) },
        kind: WeightKind::Power(Arc::new(phi.clone()), p),
        dim: phi.dim,
        homogeneity: phi.homogeneity.map(|g| g * p),
        validity_radius: phi.validity_radius.powf(p),
        bounding_radius: phi.bounding_radius,
        sphere_min: Arc::new(OnceLock::new()),
    })
}

pub fn sublevel_contains(phi: &Weight, r: f64, p: &CPoint) -> Result<bool> {
    phi.check_level(r)?;
    Ok(phi.value(block(phi, p, 0)?) < r)
}

/// Euclidean radius of a ball containing `{φ < r}`.
pub fn sublevel_bound(phi: &Weight, r: f64) -> Result<f64> {
    phi.check_level(r)?;
    match phi.homogeneity {
        Some(g) => {
            let exact = (r / phi.sphere_min()).powf(1.0 / (2.0 * g));
            Ok(match phi.kind {
                WeightKind::Field(_) => exact * (1.0 + 1e-9),
                _ => exact,
            })
        }
        None => Ok(phi.bounding_radius.expect("checked at construction")),
    }
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= n);
    v
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Dense random sampling of the sphere followed by a shrinking local search
/// around the best sample.
fn sampled_sphere_min(w: &Weight) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_5e1);
    let mut best = unit_direction(&mut rng, w.dim);
    let mut best_val = w.value(&best);
    for _ in 0..20_000 {
        let u = unit_direction(&mut rng, w.dim);
        let v = w.value(&u);
        if v < best_val {
            best_val = v;
            best = u;
        }
    }
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for _ in 0..64 {
            let d = unit_direction(&mut rng, w.dim);
            let mut u: Vec<C64> = best.iter().zip(&d).map(|(a, b)| a + b * step).collect();
            let n = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            u.iter_mut().for_each(|c| *c /= n);
            let v = w.value(&u);
            if v < best_val {
                best_val = v;
                best = u;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best_val
}

/// One euclidean ball in the t-block.
#[derive(Debug, Clone, PartialEq)]
pub struct TBall {
    pub center: Vec<C64>,
    pub radius: f64,
}

/// A ball, or a disjoint union of balls, in C^m. For `m = 0` the ball is
/// the single point of C^0 and carries unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalBall {
    dim: usize,
    balls: Vec<TBall>,
}

impl DirectionalBall {
    pub fn new(dim: usize, balls: Vec<TBall>) -> Result<Self> {
        if dim == 0 {
            return Ok(Self::point());
        }
        if balls.is_empty() {
            return Err(LelongError::Contract("directional ball needs at least one component".into()));
        }
        for b in &balls {
            if b.center.len() != dim || !(b.radius > 0.0) || !b.radius.is_finite() {
                return Err(LelongError::Contract(format!(
                    "ball component must have a center in C^{dim} and positive radius"
                )));
            }
        }
        for (i, a) in balls.iter().enumerate() {
            for b in &balls[i + 1..] {
                let d: f64 = a.center.iter().zip(&b.center).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                if d < a.radius + b.radius {
                    return Err(LelongError::Contract(format!(
                        "ball components overlap (centers {d:.4} apart, radii {} and {})",
                        a.radius, b.radius
                    )));
                }
            }
        }
        Ok(DirectionalBall { dim, balls })
    }

    /// The disc `D(center, radius)` in C.
    pub fn disc(center: C64, radius: f64) -> Result<Self> {
        Self::new(1, vec![TBall { center: vec![center], radius }])
    }

    pub fn ball(center: Vec<C64>, radius: f64) -> Result<Self> {
        let m = center.len();
        Self::new(m, vec![TBall { center, radius }])
    }

    pub fn point() -> Self {
        DirectionalBall { dim: 0, balls: vec![TBall { center: Vec::new(), radius: 0.0 }] }
    }

    /// Disjoint union of two directional balls of the same dimension.
    pub fn union(&self, other: &DirectionalBall) -> Result<Self> {
        if self.dim != other.dim || self.dim == 0 {
            return Err(LelongError::Contract("union needs two balls in the same C^m, m >= 1".into()));
        }
        let mut balls = self.balls.clone();
        balls.extend(other.balls.iter().cloned());
        Self::new(self.dim, balls)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[TBall] {
        &self.balls
    }

    /// `∫_B ω_t^m`, equal to `Σ ρ^{2m}` under the fixed normalization.
    pub fn unit_mass(&self) -> f64 {
        if self.dim == 0 {
            return 1.0;
        }
        self.balls.iter().map(|b| b.radius.powi(2 * self.dim as i32)).sum()
    }

    pub fn describe(&self) -> String {
        if self.dim == 0 {
            return "point".into();
        }
        let parts: Vec<String> = self
            .balls
            .iter()
            .map(|b| {
                let c: Vec<String> = b.center.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect();
                format!("D(({}),{})", c.join(","), b.radius)
            })
            .collect();
        parts.join(" ∪ ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Split;

    fn pt(z: &[C64], m: usize) -> CPoint {
        let mut c = z.to_vec();
        c.extend(std::iter::repeat(C64::new(0.0, 0.0)).take(m));
        CPoint::new(c, Split::new(z.len(), m).unwrap()).unwrap()
    }

    #[test]
    fn euclid_beta_is_identity_on_z_block() {
        let p = pt(&[C64::new(0.2, 0.1), C64::new(-0.3, 0.0)], 1);
        let b = beta(&Weight::euclid(2), &p).unwrap();
        assert_eq!(b, HermitianForm::diag(&[1.0, 1.0, 0.0]));
    }

    #[test]
    fn alpha_of_euclid_in_one_variable_vanishes() {
        let p = pt(&[C64::new(0.4, -0.7)], 0);
        let a = alpha(&Weight::euclid(1), &p).unwrap();
        assert!(a.matrix().max_abs() < 1e-14);
    }

    #[test]
    fn alpha_at_origin_is_a_domain_error() {
        let p = pt(&[C64::new(0.0, 0.0)], 0);
        assert!(matches!(alpha(&Weight::euclid(1), &p), Err(LelongError::Domain(_))));
    }

    #[test]
    fn power_weight_bookkeeping() {
        let w = power_weight(&Weight::euclid(2), 2.0).unwrap();
        assert_eq!(w.homogeneity(), Some(2.0));
        assert_eq!(w.validity_radius(), 1.0);
        assert!((sublevel_bound(&w, 0.0625).unwrap() - 0.5).abs() < 1e-15);
        assert!(power_weight(&Weight::euclid(2), 1.5).is_err());
    }

    #[test]
    fn bounds_for_quadratic_weights() {
        assert!((sublevel_bound(&Weight::euclid(3), 0.25).unwrap() - 0.5).abs() < 1e-15);
        let a = Weight::aniso(&[2.0, 0.5]).unwrap();
        assert!((sublevel_bound(&a, 0.125).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(sublevel_bound(&a, 0.5), Err(LelongError::Range { .. })));
    }

    #[test]
    fn sampled_sphere_minimum_for_field_weight() {
        let f = Field::quadratic(0.0, &[3.0, 1.5]);
        let w = Weight::from_field("custom", f, 2, Some(1.0), 1.0, None).unwrap();
        assert!((w.sphere_min() - 1.5).abs() < 1e-6);
        assert!(sublevel_bound(&w, 0.375).unwrap() >= 0.5);
    }

    #[test]
    fn overlapping_balls_are_rejected() {
        let a = DirectionalBall::disc(C64::new(0.0, 0.0), 0.5).unwrap();
        let b = DirectionalBall::disc(C64::new(0.6, 0.0), 0.2).unwrap();
        assert!(a.union(&b).is_err());
        let c = DirectionalBall::disc(C64::new(0.7, 0.0), 0.2).unwrap();
        assert!((a.union(&c).unwrap().unit_mass() - 0.29).abs() < 1e-15);
    }
}
