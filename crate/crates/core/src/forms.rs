//! Pointwise algebra of real (1,1)-forms on C^N.
//!
//! A (1,1)-form is stored as its Hermitian coefficient matrix `H` in the
//! normalization `dd^c = (i/2π) ∂∂̄`, i.e. the form is
//! `Σ H[j][k] (i/2π) dz_j ∧ dz̄_k`. With this convention `dd^c|z|^2` has
//! identity matrix, the unit disc has `dd^c|t|^2`-mass 1, and
//! `(dd^c|z|^2)^N` restricted to the ball of radius `r` has mass `r^{2N}`.
//!
//! The wedge of `N` such forms on C^N is `c · (i/2π)^N dz_1∧dz̄_1∧…`, whose
//! density against Lebesgue measure is `c · π^{-N}`; `c` is the mixed
//! discriminant computed by [`mixed_wedge_coeff`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{LelongError, Result};

pub type C64 = Complex64;

/// Largest supported ambient complex dimension.
pub const MAX_DIM: usize = 6;

/// Dense complex matrix of dimension at most [`MAX_DIM`], stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct CMat {
    dim: usize,
    data: [C64; MAX_DIM * MAX_DIM],
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        CMat { dim, data: [C64::new(0.0, 0.0); MAX_DIM * MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m[(j, j)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (j, &d) in entries.iter().enumerate() {
            m[(j, j)] = C64::new(d, 0.0);
        }
        m
    }

    /// Rank-one matrix `g g*`, i.e. entries `g_j conj(g_k)`.
    pub fn outer(g: &[C64]) -> Self {
        let mut m = Self::zeros(g.len());
        for j in 0..g.len() {
            for k in 0..g.len() {
                m[(j, k)] = g[j] * g[k].conj();
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (j, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "matrix must be square");
            for (k, &v) in row.iter().enumerate() {
                m[(j, k)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for j in 0..self.dim {
            for k in 0..self.dim {
                m[(j, k)] = self[(k, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for v in m.data.iter_mut() {
            *v *= s;
        }
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.dim {
            for k in 0..self.dim {
                best = best.max(self[(j, k)].norm());
            }
        }
        best
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|j| self[(j, j)]).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.dim;
        let mut a = *self;
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .unwrap_or(col);
            if a[(pivot, col)].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != col {
                for k in 0..n {
                    let tmp = a[(col, k)];
                    a[(col, k)] = a[(pivot, k)];
                    a[(pivot, k)] = tmp;
                }
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for row in col + 1..n {
                let f = a[(row, col)] / p;
                for k in col..n {
                    let v = a[(col, k)];
                    a[(row, k)] -= f * v;
                }
            }
        }
        det
    }

    /// Principal submatrix keeping the listed indices, in order.
    pub fn principal(&self, keep: &[usize]) -> Self {
        let mut m = Self::zeros(keep.len());
        for (a, &j) in keep.iter().enumerate() {
            for (b, &k) in keep.iter().enumerate() {
                m[(a, b)] = self[(j, k)];
            }
        }
        m
    }

    /// Embeds this matrix as the diagonal block starting at `offset` of a
    /// `dim`-dimensional zero matrix.
    pub fn embed(&self, dim: usize, offset: usize) -> Self {
        assert!(offset + self.dim <= dim);
        let mut m = Self::zeros(dim);
        for j in 0..self.dim {
            for k in 0..self.dim {
                m[(offset + j, offset + k)] = self[(j, k)];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (j, k): (usize, usize)) -> &C64 {
        debug_assert!(j < self.dim && k < self.dim);
        &self.data[j * MAX_DIM + k]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut C64 {
        debug_assert!(j < self.dim && k < self.dim);
        &mut self.data[j * MAX_DIM + k]
    }
}

impl Add for CMat {
    type Output = CMat;
    fn add(self, rhs: CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        let mut m = self;
        for (a, b) in m.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        m
    }
}

impl Mul<f64> for CMat {
    type Output = CMat;
    fn mul(self, s: f64) -> CMat {
        self.scale(s)
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<C64>> =
            (0..self.dim).map(|j| (0..self.dim).map(|k| self[(j, k)]).collect()).collect();
        f.debug_struct("CMat").field("dim", &self.dim).field("rows", &rows).finish()
    }
}

/// Split of C^N into a z-block C^n and a t-block C^m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Split {
    pub n: usize,
    pub m: usize,
}

impl Split {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n + m == 0 || n + m > MAX_DIM {
            return Err(LelongError::Contract(format!(
                "split ({n},{m}) must have 1 <= n+m <= {MAX_DIM}"
            )));
        }
        Ok(Split { n, m })
    }

    pub fn total(&self) -> usize {
        self.n + self.m
    }
}

/// A point `(z, t)` of C^N.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoint {
    pub coords: Vec<C64>,
    pub split: Split,
}

impl CPoint {
    pub fn new(coords: Vec<C64>, split: Split) -> Result<Self> {
        if coords.len() != split.total() {
            return Err(LelongError::Contract(format!(
                "point has {} coordinates, split expects {}",
                coords.len(),
                split.total()
            )));
        }
        Ok(CPoint { coords, split })
    }

    pub fn origin(split: Split) -> Self {
        CPoint { coords: vec![C64::new(0.0, 0.0); split.total()], split }
    }

    pub fn z(&self) -> &[C64] {
        &self.coords[..self.split.n]
    }

    pub fn t(&self) -> &[C64] {
        &self.coords[self.split.n..]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Coefficient matrix of a real (1,1)-form at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianForm {
    matrix: CMat,
}

impl HermitianForm {
    /// Wraps `m` after replacing it by `(m + m*)/2`.
    pub fn new(m: CMat) -> Self {
        HermitianForm { matrix: (m + m.adjoint()).scale(0.5) }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianForm { matrix: CMat::identity(dim) }
    }

    pub fn zero(dim: usize) -> Self {
        HermitianForm { matrix: CMat::zeros(dim) }
    }

    pub fn diag(entries: &[f64]) -> Self {
        HermitianForm { matrix: CMat::diag(entries) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianForm { matrix: self.matrix.scale(s) }
    }

    pub fn add(&self, other: &HermitianForm) -> Self {
        HermitianForm { matrix: self.matrix + other.matrix }
    }

    /// Block-embeds a form living on coordinates `offset..offset+dim`.
    pub fn embed(&self, dim: usize, offset: usize) -> Self {
        HermitianForm { matrix: self.matrix.embed(dim, offset) }
    }

    /// Relative Hermitian defect `‖H - H*‖ / ‖H‖`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.matrix.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                worst = worst.max((self.matrix[(j, k)] - self.matrix[(k, j)].conj()).norm());
            }
        }
        worst / scale
    }
}

/// A real scalar field on C^d with optional analytic derivatives.
///
/// `gradient` returns `∂u/∂x_j`; `hessian` returns `∂²u/∂x_j∂x̄_k`. When
/// either is absent, [`complex_hessian`] and [`gradient_form`] fall back to
/// central finite differences of `value`.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn value(&self, x: &[C64]) -> f64;

    fn gradient(&self, _x: &[C64]) -> Option<Vec<C64>> {
        None
    }

    fn hessian(&self, _x: &[C64]) -> Option<CMat> {
        None
    }
}

/// Finite-difference step for a point of euclidean norm `norm`.
pub fn fd_step(norm: f64) -> f64 {
    1e-4 * norm.max(1.0)
}

fn shifted(x: &[C64], moves: &[(usize, bool, f64)]) -> Vec<C64> {
    let mut y = x.to_vec();
    for &(j, imag, h) in moves {
        if imag {
            y[j].im += h;
        } else {
            y[j].re += h;
        }
    }
    y
}

/// Real second derivative `∂²u/∂a∂b` along real directions `a`, `b`
/// (each `(coordinate, is_imaginary_part)`) by central differences.
fn fd_second(u: &dyn ScalarField, x: &[C64], a: (usize, bool), b: (usize, bool), h: f64) -> f64 {
    if a == b {
        let f0 = u.value(x);
        let fp = u.value(&shifted(x, &[(a.0, a.1, h)]));
        let fm = u.value(&shifted(x, &[(a.0, a.1, -h)]));
        (fp - 2.0 * f0 + fm) / (h * h)
    } else {
        let fpp = u.value(&shifted(x, &[(a.0, a.1, h), (b.0, b.1, h)]));
        let fpm = u.value(&shifted(x, &[(a.0, a.1, h), (b.0, b.1, -h)]));
        let fmp = u.value(&shifted(x, &[(a.0, a.1, -h), (b.0, b.1, h)]));
        let fmm = u.value(&shifted(x, &[(a.0, a.1, -h), (b.0, b.1, -h)]));
        (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    }
}

/// `∂u/∂x_j = (u_{x_j} - i u_{y_j}) / 2` by central differences.
pub fn fd_gradient(u: &dyn ScalarField, x: &[C64]) -> Vec<C64> {
    let h = fd_step(x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
    (0..x.len())
        .map(|j| {
            let dx = (u.value(&shifted(x, &[(j, false, h)])) - u.value(&shifted(x, &[(j, false, -h)])))
                / (2.0 * h);
            let dy = (u.value(&shifted(x, &[(j, true, h)])) - u.value(&shifted(x, &[(j, true, -h)])))
                / (2.0 * h);
            C64::new(0.5 * dx, -0.5 * dy)
        })
        .collect()
}

/// `∂²u/∂x_j∂x̄_k = (u_{x_j x_k} + u_{y_j y_k} + i(u_{x_j y_k} - u_{y_j x_k})) / 4`.
pub fn fd_hessian(u: &dyn ScalarField, x: &[C64]) -> CMat {
    let d = x.len();
    let h = fd_step(x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
    let mut m = CMat::zeros(d);
    for j in 0..d {
        for k in 0..d {
            let xx = fd_second(u, x, (j, false), (k, false), h);
            let yy = fd_second(u, x, (j, true), (k, true), h);
            let xy = fd_second(u, x, (j, false), (k, true), h);
            let yx = fd_second(u, x, (j, true), (k, false), h);
            m[(j, k)] = C64::new(0.25 * (xx + yy), 0.25 * (xy - yx));
        }
    }
    m
}

fn check_finite_matrix(m: &CMat, what: &'static str) -> Result<()> {
    for j in 0..m.dim() {
        for k in 0..m.dim() {
            let v = m[(j, k)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(LelongError::Evaluation { coordinate: j, what });
            }
        }
    }
    Ok(())
}

/// Complex Hessian `H[j][k] = ∂²u/∂z_j∂z̄_k` at `p`: the matrix of `dd^c u`.
pub fn complex_hessian(u: &dyn ScalarField, p: &CPoint) -> Result<HermitianForm> {
    let m = match u.hessian(&p.coords) {
        Some(m) => m,
        None => fd_hessian(u, &p.coords),
    };
    check_finite_matrix(&m, "complex Hessian")?;
    Ok(HermitianForm::new(m))
}

/// Matrix `g g*` of `du ∧ d^c u`, with `g_j = ∂u/∂z_j`.
pub fn gradient_form(u: &dyn ScalarField, p: &CPoint) -> Result<HermitianForm> {
    let g = match u.gradient(&p.coords) {
        Some(g) => g,
        None => fd_gradient(u, &p.coords),
    };
    if let Some(j) = g.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(LelongError::Evaluation { coordinate: j, what: "gradient" });
    }
    Ok(HermitianForm::new(CMat::outer(&g)))
}

/// Mixed discriminant of `mats`: `Σ_{ρ,κ ∈ S_N} sgn(ρ) sgn(κ) Π_l A_l[ρ_l][κ_l]`.
///
/// Dynamic programming over (used rows, used columns) bitmasks; matrix `l`
/// is placed when exactly `l` rows are in use.
pub(crate) fn mixed_discriminant(mats: &[&CMat]) -> C64 {
    let n = mats.len();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let size = 1usize << n;
    let mut dp = vec![C64::new(0.0, 0.0); size * size];
    dp[0] = C64::new(1.0, 0.0);
    for rows in 0..size {
        let l = rows.count_ones() as usize;
        if l == n {
            continue;
        }
        let a = mats[l];
        for cols in 0..size {
            if cols.count_ones() as usize != l {
                continue;
            }
            let v = dp[rows * size + cols];
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            for r in 0..n {
                if rows & (1 << r) != 0 {
                    continue;
                }
                let row_flips = (rows >> (r + 1)).count_ones();
                for c in 0..n {
                    if cols & (1 << c) != 0 {
                        continue;
                    }
                    let entry = a[(r, c)];
                    if entry.re == 0.0 && entry.im == 0.0 {
                        continue;
                    }
                    let flips = row_flips + (cols >> (c + 1)).count_ones();
                    let term = v * entry;
                    let slot = &mut dp[(rows | 1 << r) * size + (cols | 1 << c)];
                    if flips % 2 == 0 {
                        *slot += term;
                    } else {
                        *slot -= term;
                    }
                }
            }
        }
    }
    dp[size * size - 1]
}

/// Coefficient `c` with `γ_1 ∧ … ∧ γ_N = c · (i/2π)^N dz_1∧dz̄_1∧…∧dz_N∧dz̄_N`.
///
/// Symmetric and multilinear in its arguments; `c(A, …, A) = N! det A`.
pub fn mixed_wedge_coeff(forms: &[HermitianForm]) -> Result<f64> {
    let n = forms.len();
    if n > MAX_DIM {
        return Err(LelongError::Contract(format!("{n} forms exceed dimension cap {MAX_DIM}")));
    }
    if let Some(f) = forms.iter().find(|f| f.dim() != n) {
        return Err(LelongError::Contract(format!(
            "wedge of {n} forms needs {n}x{n} matrices, got {}x{}",
            f.dim(),
            f.dim()
        )));
    }
    let mats: Vec<&CMat> = forms.iter().map(|f| f.matrix()).collect();
    Ok(mixed_discriminant(&mats).re)
}

/// The same coefficient by direct expansion over all pairs of permutations
/// (`(N!)^2` terms); a slow cross-check for [`mixed_wedge_coeff`].
pub fn wedge_by_permutations(forms: &[HermitianForm]) -> Result<f64> {
    let n = forms.len();
    if forms.iter().any(|f| f.dim() != n) {
        return Err(LelongError::Contract(format!("wedge of {n} forms needs {n}x{n} matrices")));
    }
    let perms = permutations(n);
    let mut total = C64::new(0.0, 0.0);
    for (rho, s1) in &perms {
        for (kappa, s2) in &perms {
            let mut term = C64::new(s1 * s2, 0.0);
            for (l, f) in forms.iter().enumerate() {
                term *= f.matrix()[(rho[l], kappa[l])];
            }
            total += term;
        }
    }
    Ok(total.re)
}

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // insert n-1 at position i: moves it past (n-1-i) elements
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            let sign = if (n - 1 - i) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Pullback of `h` to the coordinate slice `{x_j = 0, j ∈ vanishing}`:
/// the principal submatrix with those rows and columns removed.
pub fn restrict_form(h: &HermitianForm, vanishing: &[usize]) -> HermitianForm {
    if vanishing.is_empty() {
        return *h;
    }
    let keep: Vec<usize> = (0..h.dim()).filter(|j| !vanishing.contains(j)).collect();
    HermitianForm { matrix: h.matrix.principal(&keep) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Quartic;
    impl ScalarField for Quartic {
        fn value(&self, x: &[C64]) -> f64 {
            x[0].norm_sqr().powi(2)
        }
    }

    #[derive(Debug)]
    struct LogNorm;
    impl ScalarField for LogNorm {
        fn value(&self, x: &[C64]) -> f64 {
            x.iter().map(|c| c.norm_sqr()).sum::<f64>().ln()
        }
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn quartic_hessian_by_finite_differences() {
        let p = CPoint::new(vec![c(0.5)], Split::new(1, 0).unwrap()).unwrap();
        let h = complex_hessian(&Quartic, &p).unwrap();
        assert!((h.matrix()[(0, 0)].re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn log_norm_hessian_at_axis_point() {
        let p = CPoint::new(vec![c(1.0), c(0.0)], Split::new(2, 0).unwrap()).unwrap();
        let h = complex_hessian(&LogNorm, &p).unwrap();
        let m = h.matrix();
        assert!(m[(0, 0)].norm() < 1e-6);
        assert!((m[(1, 1)].re - 1.0).abs() < 1e-6);
        assert!(m[(0, 1)].norm() < 1e-6);
        let g = gradient_form(&LogNorm, &p).unwrap();
        assert!((g.matrix()[(0, 0)].re - 1.0).abs() < 1e-6);
        assert!(g.matrix()[(1, 1)].norm() < 1e-6);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let p = CPoint::origin(Split::new(2, 0).unwrap());
        assert!(matches!(complex_hessian(&LogNorm, &p), Err(LelongError::Evaluation { .. })));
    }

    #[test]
    fn wedge_small_cases() {
        let i2 = HermitianForm::identity(2);
        assert!((mixed_wedge_coeff(&[i2, i2]).unwrap() - 2.0).abs() < 1e-15);
        let a = HermitianForm::diag(&[2.0, 3.0]);
        let b = HermitianForm::diag(&[5.0, 7.0]);
        assert!((mixed_wedge_coeff(&[a, b]).unwrap() - (2.0 * 7.0 + 3.0 * 5.0)).abs() < 1e-12);
        let g = [C64::new(0.3, -0.4), C64::new(1.2, 0.5)];
        let gg = HermitianForm::new(CMat::outer(&g));
        let expect = g[0].norm_sqr() + g[1].norm_sqr();
        assert!((mixed_wedge_coeff(&[gg, i2]).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn wedge_rejects_dimension_mismatch() {
        let err = mixed_wedge_coeff(&[HermitianForm::identity(3), HermitianForm::identity(3)]);
        assert!(matches!(err, Err(LelongError::Contract(_))));
    }

    #[test]
    fn restriction_drops_rows_and_columns() {
        let r = restrict_form(&HermitianForm::identity(3), &[0]);
        assert_eq!(r, HermitianForm::identity(2));
        let z = restrict_form(&HermitianForm::zero(4), &[1, 2]);
        assert_eq!(z, HermitianForm::zero(2));
    }

    #[test]
    fn determinant_of_known_matrix() {
        let m = CMat::from_rows(&[vec![c(2.0), c(1.0)], vec![c(1.0), c(3.0)]]);
        assert!((m.det() - c(5.0)).norm() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Hermitian `n x n` matrix from `n^2` reals: diagonal, then the
        /// real and imaginary parts of the upper triangle.
        fn hermitian(n: usize, v: &[f64]) -> HermitianForm {
            let mut m = CMat::zeros(n);
            let mut it = v.iter();
            for i in 0..n {
                m[(i, i)] = C64::new(*it.next().unwrap(), 0.0);
            }
            for i in 0..n {
                for j in i + 1..n {
                    let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            HermitianForm::new(m)
        }

        fn forms(max_n: usize) -> impl Strategy<Value = (usize, Vec<HermitianForm>)> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, n * n), n + 1)
                    .prop_map(move |vs| (n, vs.iter().map(|v| hermitian(n, v)).collect()))
            })
        }

        /// `|x0|^2 |x1|^2 + Re(x0^3)` with exact derivatives.
        #[derive(Debug)]
        struct Mixed;
        impl ScalarField for Mixed {
            fn value(&self, x: &[C64]) -> f64 {
                x[0].norm_sqr() * x[1].norm_sqr() + (x[0] * x[0] * x[0]).re
            }
            fn hessian(&self, x: &[C64]) -> Option<CMat> {
                Some(CMat::from_rows(&[
                    vec![C64::new(x[1].norm_sqr(), 0.0), x[0].conj() * x[1]],
                    vec![x[0] * x[1].conj(), C64::new(x[0].norm_sqr(), 0.0)],
                ]))
            }
        }

        proptest! {
            #[test]
            fn wedge_is_symmetric((n, fs) in forms(4), k in 0usize..16) {
                let a = mixed_wedge_coeff(&fs[..n]).unwrap();
                let mut sw = fs[..n].to_vec();
                sw.swap(0, k % n);
                sw.reverse();
                let b = mixed_wedge_coeff(&sw).unwrap();
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            }

            #[test]
            fn wedge_is_multilinear((n, fs) in forms(4), s in -3.0f64..3.0) {
                let mut mixed = fs[..n].to_vec();
                mixed[0] = fs[0].scale(s).add(&fs[n]);
                let mut other = fs[..n].to_vec();
                other[0] = fs[n].clone();
                let lhs = mixed_wedge_coeff(&mixed).unwrap();
                let rhs = s * mixed_wedge_coeff(&fs[..n]).unwrap() + mixed_wedge_coeff(&other).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs() + rhs.abs()));
            }

            #[test]
            fn diagonal_wedge_is_factorial_det((n, fs) in forms(5)) {
                let a = &fs[0];
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                let c = mixed_wedge_coeff(&vec![a.clone(); n]).unwrap();
                let d = fact * a.matrix().det().re;
                prop_assert!((c - d).abs() <= 1e-9 * (1.0 + d.abs()));
            }

            #[test]
            fn wedge_matches_permutation_expansion((n, fs) in forms(4)) {
                let a = mixed_wedge_coeff(&fs[..n]).unwrap();
                let b = wedge_by_permutations(&fs[..n]).unwrap();
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
            }

            #[test]
            fn analytic_hessian_matches_finite_differences(v in proptest::collection::vec(-1.5f64..1.5, 4)) {
                let x = [C64::new(v[0], v[1]), C64::new(v[2], v[3])];
                let exact = Mixed.hessian(&x).unwrap();
                let fd = fd_hessian(&Mixed, &x);
                for i in 0..2 {
                    for j in 0..2 {
                        prop_assert!((exact[(i, j)] - fd[(i, j)]).norm() < 1e-5);
                    }
                }
            }
        }
    }
}
