//! Model positive currents: integration currents on coordinate slices with a
//! weight, factored currents `c · γ_1 ∧ … ∧ γ_k`, and real combinations.
//! Each catalog entry carries its `dd^c` analytically.

use std::f64::consts::PI;

use crate::error::{LelongError, Result};
use crate::fields::Field;
use crate::forms::{fd_gradient, fd_hessian, mixed_discriminant, CMat, CPoint, HermitianForm, ScalarField, Split, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    NegativeOfPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityClass {
    Psh,
    Prh,
    Closed,
    None,
}

impl MonotonicityClass {
    pub fn label(&self) -> &'static str {
        match self {
            MonotonicityClass::Psh => "psh",
            MonotonicityClass::Prh => "prh",
            MonotonicityClass::Closed => "closed",
            MonotonicityClass::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Log,
    /// `|x|^{-α}` transversally to the locus.
    Power(f64),
}

/// The integrand blows up like `kernel` near `{x_i = 0, i ∈ locus}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityAnnotation {
    pub locus: Vec<usize>,
    pub kernel: Kernel,
}

impl SingularityAnnotation {
    pub fn log(locus: &[usize]) -> Self {
        SingularityAnnotation { locus: locus.to_vec(), kernel: Kernel::Log }
    }

    pub fn power(locus: &[usize], alpha: f64) -> Self {
        SingularityAnnotation { locus: locus.to_vec(), kernel: Kernel::Power(alpha) }
    }

    pub fn kernel_label(&self) -> String {
        match self.kernel {
            Kernel::Log => "log".into(),
            Kernel::Power(a) => format!("power({a})"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Factor {
    /// `du ∧ d^c u`
    Gradient(Field),
    /// `dd^c u`
    Hessian(Field),
}

impl Factor {
    fn matrix(&self, x: &[C64]) -> CMat {
        match self {
            Factor::Gradient(u) => CMat::outer(&u.gradient(x).unwrap_or_else(|| fd_gradient(u, x))),
            Factor::Hessian(u) => u.hessian(x).unwrap_or_else(|| fd_hessian(u, x)),
        }
    }

    fn describe(&self) -> String {
        match self {
            Factor::Gradient(u) => format!("d({0})^d^c({0})", u.describe()),
            Factor::Hessian(u) => format!("dd^c({})", u.describe()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum CurrentKind {
    Zero,
    /// `f · [z_J = 0]`
    Slice { vanishing: Vec<usize>, weight: Field },
    /// `c · γ_1 ∧ … ∧ γ_r ∧ [z_J = 0]` (J may be empty).
    Factored { support: Vec<usize>, weight: Field, factors: Vec<Factor> },
    ScaledSum(Vec<(f64, ModelCurrent)>),
}

#[derive(Debug, Clone)]
pub struct ModelCurrent {
    pub name: String,
    pub kind: CurrentKind,
    /// `k` in bidegree `(k,k)`.
    pub bidegree: usize,
    pub split: Split,
    pub positivity: Positivity,
    pub class: MonotonicityClass,
    pub ddc: Option<Box<ModelCurrent>>,
    pub singularities: Vec<SingularityAnnotation>,
    /// Euclidean radius of the z-ball on which the current is modelled.
    pub validity_radius: f64,
    pub smooth: bool,
    pub ddc_label: Option<String>,
}

pub const CATALOG_NAMES: &[&str] = &["T0", "T0d", "T1", "T2", "T3", "T4", "TS", "TS4", "H0", "Zero"];

impl ModelCurrent {
    pub fn zero(bidegree: usize, split: Split) -> Self {
        ModelCurrent {
            name: "Zero".into(),
            kind: CurrentKind::Zero,
            bidegree,
            split,
            positivity: Positivity::Positive,
            class: MonotonicityClass::Closed,
            ddc: None,
            singularities: Vec::new(),
            validity_radius: f64::INFINITY,
            smooth: true,
            ddc_label: Some("0".into()),
        }
    }

    /// `f · [z_J = 0]`.
    pub fn slice(name: &str, split: Split, vanishing: &[usize], weight: Field) -> Result<Self> {
        check_z_indices(split, vanishing)?;
        Ok(ModelCurrent {
            name: name.into(),
            kind: CurrentKind::Slice { vanishing: vanishing.to_vec(), weight },
            bidegree: vanishing.len(),
            split,
            positivity: Positivity::Positive,
            class: MonotonicityClass::None,
            ddc: None,
            singularities: Vec::new(),
            validity_radius: f64::INFINITY,
            smooth: false,
            ddc_label: None,
        })
    }

    pub fn factored(name: &str, split: Split, support: &[usize], weight: Field, factors: Vec<Factor>) -> Result<Self> {
        check_z_indices(split, support)?;
        let k = support.len() + factors.len();
        if k > split.n {
            return Err(LelongError::Contract(format!("bidegree {k} exceeds n = {}", split.n)));
        }
        Ok(ModelCurrent {
            name: name.into(),
            kind: CurrentKind::Factored { support: support.to_vec(), weight, factors },
            bidegree: k,
            split,
            positivity: Positivity::Positive,
            class: MonotonicityClass::None,
            ddc: None,
            singularities: Vec::new(),
            validity_radius: f64::INFINITY,
            smooth: support.is_empty(),
            ddc_label: None,
        })
    }

    pub fn scaled_sum(name: &str, terms: Vec<(f64, ModelCurrent)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| LelongError::Contract("scaled sum needs at least one term".into()))?;
        let (k, split) = (first.1.bidegree, first.1.split);
        if terms.iter().any(|(_, t)| t.bidegree != k || t.split != split) {
            return Err(LelongError::Contract("scaled sum terms must share bidegree and split".into()));
        }
        let positivity = if terms.iter().all(|(c, t)| *c <= 0.0 && t.positivity == Positivity::Positive) {
            Positivity::NegativeOfPositive
        } else {
            Positivity::Positive
        };
        let singularities = terms.iter().flat_map(|(_, t)| t.singularities.clone()).collect();
        let smooth = terms.iter().all(|(_, t)| t.smooth);
        let validity_radius = terms.iter().map(|(_, t)| t.validity_radius).fold(f64::INFINITY, f64::min);
        Ok(ModelCurrent {
            name: name.into(),
            kind: CurrentKind::ScaledSum(terms),
            bidegree: k,
            split,
            positivity,
            class: MonotonicityClass::None,
            ddc: None,
            singularities,
            validity_radius,
            smooth,
            ddc_label: None,
        })
    }

    /// `c · T` as a one-term scaled sum.
    pub fn times(self, c: f64) -> Result<Self> {
        let name = if c == -1.0 { format!("-{}", self.name) } else { format!("{c}*{}", self.name) };
        let class = self.class;
        Ok(Self::scaled_sum(&name, vec![(c, self)])?.with_class(class))
    }

    pub fn with_class(mut self, class: MonotonicityClass) -> Self {
        self.class = class;
        self
    }

    pub fn with_ddc(mut self, ddc: ModelCurrent, label: &str) -> Self {
        self.ddc = Some(Box::new(ddc));
        self.ddc_label = Some(label.into());
        self
    }

    pub fn with_singularity(mut self, s: SingularityAnnotation) -> Self {
        self.singularities.push(s);
        self
    }

    pub fn with_validity_radius(mut self, r: f64) -> Self {
        self.validity_radius = r;
        self
    }

    pub fn with_smooth(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            CurrentKind::Zero => true,
            CurrentKind::ScaledSum(t) => t.iter().all(|(c, t)| *c == 0.0 || t.is_zero()),
            _ => false,
        }
    }

    /// Flattens nested sums into `(coefficient, leaf)` pairs; zero leaves are dropped.
    pub fn leaves(&self) -> Vec<(f64, &ModelCurrent)> {
        let mut out = Vec::new();
        self.collect_leaves(1.0, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, scale: f64, out: &mut Vec<(f64, &'a ModelCurrent)>) {
        match &self.kind {
            CurrentKind::Zero => {}
            CurrentKind::ScaledSum(terms) => {
                for (c, t) in terms {
                    t.collect_leaves(scale * c, out);
                }
            }
            _ => out.push((scale, self)),
        }
    }

    /// Coordinates set to zero by the support of a leaf.
    pub fn vanishing(&self) -> &[usize] {
        match &self.kind {
            CurrentKind::Slice { vanishing, .. } => vanishing,
            CurrentKind::Factored { support, .. } => support,
            _ => &[],
        }
    }

    /// Rejects annotations whose kernel is not locally integrable on the
    /// support: `|x|^{-α}` needs `α` below the real codimension of the locus.
    pub fn check_integrable(&self) -> Result<()> {
        for (_, leaf) in self.leaves() {
            let j = leaf.vanishing();
            for s in &leaf.singularities {
                if let Kernel::Power(a) = s.kernel {
                    let codim = 2 * s.locus.iter().filter(|i| !j.contains(i)).count();
                    if !(a < codim as f64) {
                        return Err(LelongError::NonIntegrable {
                            locus: s.locus.clone(),
                            kernel: s.kernel_label(),
                            codim,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Density of a leaf against Lebesgue measure on its support, for
    /// already-computed full test matrices. No validation; used by the
    /// quadrature inner loop.
    pub(crate) fn leaf_density(&self, coords: &[C64], tests: &[CMat]) -> f64 {
        let (vanishing, weight, factors): (&[usize], &Field, &[Factor]) = match &self.kind {
            CurrentKind::Slice { vanishing, weight } => (vanishing, weight, &[]),
            CurrentKind::Factored { support, weight, factors } => (support, weight, factors),
            CurrentKind::Zero => return 0.0,
            CurrentKind::ScaledSum(_) => {
                return self.leaves().iter().map(|(c, l)| c * l.leaf_density(coords, tests)).sum()
            }
        };
        let c = weight.value(coords);
        if c == 0.0 {
            return 0.0;
        }
        let n_full = coords.len();
        let dim = n_full - vanishing.len();
        let mut mats: [CMat; crate::forms::MAX_DIM] = [CMat::zeros(0); crate::forms::MAX_DIM];
        let mut count = 0;
        if vanishing.is_empty() {
            for f in factors {
                mats[count] = f.matrix(coords);
                count += 1;
            }
            for t in tests {
                mats[count] = *t;
                count += 1;
            }
        } else {
            let keep: Vec<usize> = (0..n_full).filter(|i| !vanishing.contains(i)).collect();
            for f in factors {
                mats[count] = f.matrix(coords).principal(&keep);
                count += 1;
            }
            for t in tests {
                mats[count] = t.principal(&keep);
                count += 1;
            }
        }
        debug_assert_eq!(count, dim);
        let refs: Vec<&CMat> = mats[..count].iter().collect();
        c * mixed_discriminant(&refs).re * PI.powi(-(dim as i32))
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            CurrentKind::Zero => "0".into(),
            CurrentKind::Slice { vanishing, weight } => {
                format!("({})[{}]", weight.describe(), slice_label(vanishing))
            }
            CurrentKind::Factored { support, weight, factors } => {
                let w = weight.describe();
                let mut parts = if w == "1" { Vec::new() } else { vec![format!("({w})")] };
                parts.extend(factors.iter().map(|f| f.describe()));
                let mut s = parts.join(" * ");
                if !support.is_empty() {
                    s.push_str(&format!(" on [{}]", slice_label(support)));
                }
                s
            }
            CurrentKind::ScaledSum(terms) => {
                let parts: Vec<String> = terms.iter().map(|(c, t)| format!("{c}*({})", t.describe())).collect();
                parts.join(" + ")
            }
        }
    }
}

fn slice_label(idx: &[usize]) -> String {
    let v: Vec<String> = idx.iter().map(|i| format!("x{}=0", i + 1)).collect();
    v.join(",")
}

fn check_z_indices(split: Split, idx: &[usize]) -> Result<()> {
    for (a, &i) in idx.iter().enumerate() {
        if i >= split.n || idx[..a].contains(&i) {
            return Err(LelongError::Contract(format!(
                "slice index {i} must be a distinct z-coordinate (n = {})",
                split.n
            )));
        }
    }
    Ok(())
}

/// Pointwise density of `T ∧ tests` against Lebesgue measure on the support
/// of `T` (the slice for slice currents, C^N for factored ones).
pub fn density_at(t: &ModelCurrent, p: &CPoint, tests: &[HermitianForm]) -> Result<f64> {
    if p.split != t.split {
        return Err(LelongError::Contract(format!(
            "point split ({},{}) does not match current split ({},{})",
            p.split.n, p.split.m, t.split.n, t.split.m
        )));
    }
    let nn = t.split.total();
    if tests.len() != nn - t.bidegree {
        return Err(LelongError::Contract(format!(
            "{} has bidegree {} on C^{nn}; expected {} test forms, got {}",
            t.name,
            t.bidegree,
            nn - t.bidegree,
            tests.len()
        )));
    }
    if let Some(f) = tests.iter().find(|f| f.dim() != nn) {
        return Err(LelongError::Contract(format!("test form has dimension {}, expected {nn}", f.dim())));
    }
    for (_, leaf) in t.leaves() {
        for s in &leaf.singularities {
            if s.locus.iter().all(|&i| p.coords[i] == C64::new(0.0, 0.0)) {
                return Err(LelongError::SingularEvaluation { current: t.name.clone(), locus: s.locus.clone() });
            }
        }
    }
    let mats: Vec<CMat> = tests.iter().map(|f| *f.matrix()).collect();
    Ok(t.leaves().iter().map(|(c, l)| c * l.leaf_density(&p.coords, &mats)).sum())
}

/// The attached analytic `dd^c T`.
pub fn ddc(t: &ModelCurrent) -> Result<ModelCurrent> {
    if let CurrentKind::Zero = t.kind {
        let k = (t.bidegree + 1).min(t.split.n);
        return Ok(ModelCurrent::zero(k, t.split));
    }
    t.ddc
        .as_deref()
        .cloned()
        .ok_or_else(|| LelongError::UnsupportedOperation { current: t.name.clone(), op: "ddc" })
}

fn split(n: usize, m: usize) -> Split {
    Split::new(n, m).expect("catalog splits are valid")
}

/// Resolves a catalog current by name.
pub fn catalog(name: &str) -> Result<ModelCurrent> {
    let c = match name {
        "T0" => {
            let s = split(2, 0);
            let ddc = ModelCurrent::slice("[z=0]", s, &[0, 1], Field::constant(1.0))?
                .with_class(MonotonicityClass::Closed)
                .times(-1.0)?;
            ModelCurrent::slice("T0", s, &[0], Field::log(-1.0, Field::norm_sqr_of(2, &[1])))?
                .with_class(MonotonicityClass::Prh)
                .with_singularity(SingularityAnnotation::log(&[1]))
                .with_validity_radius(1.0)
                .with_ddc(ddc, "-[z=0]")
        }
        "T0d" => {
            let s = split(1, 1);
            ModelCurrent::slice("T0d", s, &[0], Field::log(-1.0, Field::norm_sqr_of(2, &[1])))?
                .with_class(MonotonicityClass::Prh)
                .with_singularity(SingularityAnnotation::log(&[1]))
                .with_validity_radius(1.0)
        }
        "T1" => {
            let s = split(2, 1);
            let inner = Field::norm_sqr_of(3, &[0, 2]);
            let ddc = ModelCurrent::factored("ddcT1", s, &[1], Field::constant(1.0), vec![Factor::Hessian(Field::log(1.0, inner.clone()))])?
                .with_class(MonotonicityClass::Closed)
                .with_singularity(SingularityAnnotation::power(&[0, 2], 2.0))
                .times(-1.0)?;
            ModelCurrent::slice("T1", s, &[1], Field::log(-1.0, inner))?
                .with_class(MonotonicityClass::Prh)
                .with_singularity(SingularityAnnotation::log(&[0, 2]))
                .with_validity_radius(0.8)
                .with_ddc(ddc, "-dd^c log(|z1|^2+|t|^2)^[z2=0]")
        }
        "T2" => {
            let s = split(2, 1);
            let ddc = ModelCurrent::slice("[z=0]", s, &[0, 1], Field::constant(1.0))?
                .with_class(MonotonicityClass::Closed)
                .times(-1.0)?;
            let u = Field::log(1.0, Field::norm_sqr_of(3, &[0, 1]));
            ModelCurrent::factored("T2", s, &[], Field::constant(1.0), vec![Factor::Gradient(u)])?
                .with_class(MonotonicityClass::Prh)
                .with_singularity(SingularityAnnotation::power(&[0, 1], 2.0))
                .with_smooth(false)
                .with_validity_radius(1.0)
                .with_ddc(ddc, "-[z=0]")
        }
        "T3" => {
            let s = split(2, 1);
            let ddc = ModelCurrent::factored("ddcT3", s, &[0], Field::constant(1.0), vec![Factor::Hessian(Field::norm_sqr_of(3, &[2]))])?
                .with_class(MonotonicityClass::Closed)
                .times(-1.0)?;
            ModelCurrent::slice("T3", s, &[0], Field::quadratic(1.0, &[0.0, 0.0, -1.0]))?
                .with_class(MonotonicityClass::Prh)
                .with_validity_radius(1.0)
                .with_ddc(ddc, "-dd^c|t|^2^[z1=0]")
        }
        "T4" => {
            let s = split(2, 1);
            let w = Field::norm_sqr_of(3, &[1, 2]);
            let ddc = ModelCurrent::factored("ddcT4", s, &[0], Field::constant(1.0), vec![Factor::Hessian(w.clone())])?
                .with_class(MonotonicityClass::Closed);
            ModelCurrent::slice("T4", s, &[0], w)?
                .with_class(MonotonicityClass::Psh)
                .with_validity_radius(1.0)
                .with_ddc(ddc, "dd^c(|z2|^2+|t|^2)^[z1=0]")
        }
        "TS" | "TS4" => {
            let n = if name == "TS" { 2 } else { 3 };
            let s = split(n, 1);
            let all: Vec<usize> = (0..=n).collect();
            let z: Vec<usize> = (0..n).collect();
            let c = vec![-1.0; n + 1];
            let omega_z = Factor::Hessian(Field::norm_sqr_of(n + 1, &z));
            let ddc = ModelCurrent::factored(
                &format!("ddc{name}"),
                s,
                &[],
                Field::constant(1.0),
                vec![Factor::Hessian(Field::norm_sqr_of(n + 1, &all)), omega_z.clone()],
            )?
            .with_class(MonotonicityClass::Closed)
            .times(-1.0)?;
            ModelCurrent::factored(name, s, &[], Field::quadratic(2.0, &c), vec![omega_z])?
                .with_class(MonotonicityClass::Prh)
                .with_validity_radius(1.0)
                .with_ddc(ddc, "-omega^omega_z")
        }
        "H0" => {
            let s = split(2, 1);
            let ddc = ModelCurrent::factored("ddcH0", s, &[], Field::constant(1.0), vec![Factor::Hessian(Field::norm_sqr_of(3, &[0, 1, 2]))])?
                .with_class(MonotonicityClass::Closed)
                .times(-1.0)?;
            ModelCurrent::slice("H0", s, &[], Field::quadratic(1.0, &[-1.0, -1.0, -1.0]))?
                .with_class(MonotonicityClass::Prh)
                .with_smooth(true)
                .with_validity_radius(0.8)
                .with_ddc(ddc, "-omega")
        }
        "Zero" => ModelCurrent::zero(1, split(2, 1)),
        other => {
            return Err(LelongError::Lookup { name: other.into(), available: CATALOG_NAMES.join(", ") })
        }
    };
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn id_tests(n: usize, m: usize, count_z: usize) -> Vec<HermitianForm> {
        let z = HermitianForm::identity(n).embed(n + m, 0);
        let t = HermitianForm::identity(m).embed(n + m, n);
        let mut v = vec![z; count_z];
        v.extend(std::iter::repeat(t).take(m));
        v
    }

    #[test]
    fn t2_density_is_inverse_square() {
        let t2 = catalog("T2").unwrap();
        let p = CPoint::new(vec![c(0.3, 0.1), c(-0.2, 0.4), c(0.5, 0.0)], split(2, 1)).unwrap();
        let d = density_at(&t2, &p, &id_tests(2, 1, 1)).unwrap();
        let z2 = 0.09 + 0.01 + 0.04 + 0.16;
        assert!((d - PI.powi(-3) / z2).abs() < 1e-12 * d);
    }

    #[test]
    fn t3_density_on_slice() {
        let t3 = catalog("T3").unwrap();
        let p = CPoint::new(vec![c(0.0, 0.0), c(0.2, 0.3), c(0.4, -0.1)], split(2, 1)).unwrap();
        let d = density_at(&t3, &p, &id_tests(2, 1, 1)).unwrap();
        assert!((d - (1.0 - 0.17) / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn t3_ddc_pairing_with_omega_t_vanishes() {
        let d = ddc(&catalog("T3").unwrap()).unwrap();
        assert_eq!(d.bidegree, 2);
        let p = CPoint::new(vec![c(0.0, 0.0), c(0.2, 0.3), c(0.4, -0.1)], split(2, 1)).unwrap();
        let v = density_at(&d, &p, &id_tests(2, 1, 0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn singular_points_are_refused() {
        let t2 = catalog("T2").unwrap();
        let p = CPoint::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)], split(2, 1)).unwrap();
        assert!(matches!(
            density_at(&t2, &p, &id_tests(2, 1, 1)),
            Err(LelongError::SingularEvaluation { .. })
        ));
    }

    #[test]
    fn wrong_test_count_is_a_contract_error() {
        let t2 = catalog("T2").unwrap();
        let p = CPoint::new(vec![c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)], split(2, 1)).unwrap();
        assert!(matches!(density_at(&t2, &p, &id_tests(2, 1, 2)), Err(LelongError::Contract(_))));
    }

    #[test]
    fn catalog_lookup_and_ddc_metadata() {
        for name in CATALOG_NAMES {
            let t = catalog(name).unwrap();
            t.check_integrable().unwrap();
            if let Ok(d) = ddc(&t) {
                assert_eq!(d.split, t.split);
                if !t.is_zero() {
                    assert_eq!(d.bidegree, t.bidegree + 1, "{name}");
                }
                match t.class {
                    MonotonicityClass::Prh => assert_eq!(d.positivity, Positivity::NegativeOfPositive, "{name}"),
                    MonotonicityClass::Psh => assert_eq!(d.positivity, Positivity::Positive),
                    _ => {}
                }
            }
        }
        assert!(matches!(catalog("T9"), Err(LelongError::Lookup { .. })));
        assert!(matches!(ddc(&catalog("T0d").unwrap()), Err(LelongError::UnsupportedOperation { .. })));
    }

    #[test]
    fn non_integrable_power_is_rejected() {
        let s = split(2, 1);
        let t = ModelCurrent::slice("bad", s, &[0], Field::constant(1.0))
            .unwrap()
            .with_singularity(SingularityAnnotation::power(&[1], 2.0));
        assert!(matches!(t.check_integrable(), Err(LelongError::NonIntegrable { codim: 2, .. })));
    }
}
