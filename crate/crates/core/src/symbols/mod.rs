//! Positive homogeneous symbols and their exact derivatives.
//!
//! Two representations are supported, both with closed-form derivatives:
//! elliptic homogeneous polynomials `sum_a c_a xi^a` (all `|a| = m`) and
//! metric powers `q(xi, xi)^{m/2}` with `q` symmetric positive definite.

mod tensor;

pub use tensor::{for_each_sorted, multiplicity, packed_len, polarize, tensor_power, SymTensor};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Highest derivative order available in closed form for metric powers.
pub const METRIC_MAX_ORDER: usize = 4;

/// Tolerance of the construction-time Euler identity check.
const EULER_TOLERANCE: f64 = 1e-10;

/// One term `coeff * xi^exponents` of a polynomial symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: f64, exponents: Vec<u32>) -> Self {
        Self { coeff, exponents }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn eval(&self, xi: &[f64]) -> f64 {
        let mut v = self.coeff;
        for (&x, &a) in xi.iter().zip(&self.exponents) {
            if a > 0 {
                v *= x.powi(a as i32);
            }
        }
        v
    }
}

/// Concrete representation of a symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolForm {
    Polynomial(Vec<Monomial>),
    /// `q(xi, xi)^{m/2}`; `matrix` is row-major `n x n`.
    MetricPower {
        matrix: Vec<f64>,
    },
}

/// A positive `m`-homogeneous function on `R^n \ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousSymbol {
    dim: usize,
    degree: f64,
    form: SymbolForm,
    sphere_min: f64,
    sphere_max: f64,
}

impl HomogeneousSymbol {
    /// Polynomial symbol. Every monomial must have the same total degree;
    /// duplicate exponent vectors are merged.
    pub fn polynomial(dim: usize, monomials: Vec<Monomial>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSymbol("dimension must be at least 1".into()));
        }
        if monomials.is_empty() {
            return Err(Error::InvalidSymbol("polynomial has no terms".into()));
        }
        let degree = monomials[0].degree();
        for (i, mono) in monomials.iter().enumerate() {
            if mono.exponents.len() != dim {
                return Err(Error::InvalidSymbol(format!(
                    "term {} has {} exponents, expected {dim}",
                    i + 1,
                    mono.exponents.len()
                )));
            }
            if mono.degree() != degree {
                return Err(Error::InvalidSymbol(format!("mixed-degree monomial at term {}", i + 1)));
            }
            if !mono.coeff.is_finite() {
                return Err(Error::InvalidSymbol(format!("non-finite coefficient at term {}", i + 1)));
            }
        }
        if degree == 0 {
            return Err(Error::InvalidSymbol("degree must be positive".into()));
        }
        let mut merged: Vec<Monomial> = Vec::with_capacity(monomials.len());
        for mono in monomials {
            match merged.iter_mut().find(|m| m.exponents == mono.exponents) {
                Some(existing) => existing.coeff += mono.coeff,
                None => merged.push(mono),
            }
        }
        merged.retain(|m| m.coeff != 0.0);
        merged.sort_by(|a, b| b.exponents.cmp(&a.exponents));
        Self::validated(dim, degree as f64, SymbolForm::Polynomial(merged))
    }

    /// Metric power `q(xi, xi)^{m/2}` for a symmetric positive definite `q`
    /// given row-major.
    pub fn metric_power(dim: usize, matrix: Vec<f64>, degree: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSymbol("dimension must be at least 1".into()));
        }
        if matrix.len() != dim * dim {
            return Err(Error::InvalidSymbol(format!("metric has {} entries, expected {}", matrix.len(), dim * dim)));
        }
        if !(degree > 0.0 && degree.is_finite()) {
            return Err(Error::InvalidSymbol(format!("degree must be positive, got {degree}")));
        }
        let scale = matrix.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (matrix[i * dim + j] - matrix[j * dim + i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidSymbol("metric matrix is not symmetric".into()));
                }
            }
        }
        if !is_positive_definite(dim, &matrix) {
            return Err(Error::InvalidSymbol("metric matrix is not positive definite".into()));
        }
        Self::validated(dim, degree, SymbolForm::MetricPower { matrix })
    }

    /// `|xi|^m`.
    pub fn euclidean_power(dim: usize, degree: f64) -> Result<Self> {
        let mut id = vec![0.0; dim * dim];
        for i in 0..dim {
            id[i * dim + i] = 1.0;
        }
        Self::metric_power(dim, id, degree)
    }

    /// `|xi|^2` as a polynomial, the principal symbol of the flat Laplacian.
    pub fn laplacian(dim: usize) -> Result<Self> {
        let monomials = (0..dim)
            .map(|i| {
                let mut e = vec![0; dim];
                e[i] = 2;
                Monomial::new(1.0, e)
            })
            .collect();
        Self::polynomial(dim, monomials)
    }

    fn validated(dim: usize, degree: f64, form: SymbolForm) -> Result<Self> {
        let mut sym = Self { dim, degree, form, sphere_min: 0.0, sphere_max: 0.0 };
        let grid = validation_grid(dim);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for omega in &grid {
            let v = sym.eval_unchecked(omega);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSymbol(format!(
                    "not positive on the unit sphere (value {v:e} at {omega:?})"
                )));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        sym.sphere_min = lo;
        sym.sphere_max = hi;
        let euler = euler_check(&sym, &grid);
        if !(euler <= EULER_TOLERANCE) {
            return Err(Error::InvalidSymbol(format!("Euler identity violated ({euler:e})")));
        }
        Ok(sym)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Homogeneity order `m`.
    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn form(&self) -> &SymbolForm {
        &self.form
    }

    /// Minimum of the symbol over the validation grid on the unit sphere.
    pub fn sphere_min(&self) -> f64 {
        self.sphere_min
    }

    /// Maximum of the symbol over the validation grid on the unit sphere.
    pub fn sphere_max(&self) -> f64 {
        self.sphere_max
    }

    /// Highest derivative order with a closed form, `None` if unbounded.
    pub fn max_derivative_order(&self) -> Option<usize> {
        match self.form {
            SymbolForm::Polynomial(_) => None,
            SymbolForm::MetricPower { .. } => Some(METRIC_MAX_ORDER),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        self.check_argument(xi)?;
        Ok(self.eval_unchecked(xi))
    }

    /// Evaluation without dimension or zero checks, for hot loops that have
    /// already validated their input.
    #[inline]
    pub fn eval_unchecked(&self, xi: &[f64]) -> f64 {
        match &self.form {
            SymbolForm::Polynomial(monos) => monos.iter().map(|m| m.eval(xi)).sum(),
            SymbolForm::MetricPower { matrix } => {
                let q = quadratic_form(self.dim, matrix, xi);
                if self.degree == 2.0 {
                    q
                } else {
                    q.powf(0.5 * self.degree)
                }
            }
        }
    }

    /// Integer-lattice evaluation.
    #[inline]
    pub fn eval_lattice(&self, k: &[i64]) -> f64 {
        let mut buf = [0.0f64; 8];
        if k.len() <= buf.len() {
            for (b, &v) in buf.iter_mut().zip(k) {
                *b = v as f64;
            }
            self.eval_unchecked(&buf[..k.len()])
        } else {
            let xi: Vec<f64> = k.iter().map(|&v| v as f64).collect();
            self.eval_unchecked(&xi)
        }
    }

    /// `d sigma(xi)`.
    pub fn gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.deriv_tensor(xi, 1)?.entries().to_vec())
    }

    /// The symmetric k-linear form `d^k sigma(xi)`; order 0 is the value.
    pub fn deriv_tensor(&self, xi: &[f64], k: usize) -> Result<SymTensor> {
        self.check_argument(xi)?;
        if k == 0 {
            return Ok(SymTensor::scalar(self.eval_unchecked(xi)));
        }
        match &self.form {
            SymbolForm::Polynomial(monos) => {
                Ok(SymTensor::from_fn(self.dim, k, |idx| polynomial_derivative(monos, xi, idx)))
            }
            SymbolForm::MetricPower { matrix } => {
                if k > METRIC_MAX_ORDER {
                    return Err(Error::UnsupportedOrder { order: k, max: METRIC_MAX_ORDER });
                }
                let n = self.dim;
                let q = quadratic_form(n, matrix, xi);
                // grad Q = 2 q xi, hess Q = 2 q, higher derivatives vanish
                let grad: Vec<f64> =
                    (0..n).map(|i| 2.0 * (0..n).map(|j| matrix[i * n + j] * xi[j]).sum::<f64>()).collect();
                let p = 0.5 * self.degree;
                // f^{(r)}(Q) for f(Q) = Q^p
                let outer: Vec<f64> = (0..=k).map(|r| falling(p, r as u32) * q.powf(p - r as f64)).collect();
                Ok(SymTensor::from_fn(n, k, |idx| {
                    let mut used = [false; METRIC_MAX_ORDER];
                    matching_sum(idx, &mut used, 0, 1.0, &grad, matrix, n, &outer)
                }))
            }
        }
    }

    fn check_argument(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: xi.len() });
        }
        if xi.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroArgument);
        }
        Ok(())
    }
}

/// Max over the grid of `|d sigma(xi) . xi - m sigma(xi)| / |m sigma(xi)|`.
pub fn euler_check<V: AsRef<[f64]>>(sym: &HomogeneousSymbol, grid: &[V]) -> f64 {
    let mut worst = 0.0f64;
    for xi in grid {
        let xi = xi.as_ref();
        let Ok(grad) = sym.gradient(xi) else { continue };
        let lhs: f64 = grad.iter().zip(xi).map(|(g, x)| g * x).sum();
        let rhs = sym.degree * sym.eval_unchecked(xi);
        let err = (lhs - rhs).abs() / rhs.abs();
        if err.is_nan() {
            return f64::INFINITY;
        }
        worst = worst.max(err);
    }
    worst
}

/// Sum over partial matchings of the index positions: singletons pick up
/// `grad Q`, pairs pick up `hess Q = 2 q`, and a matching with `r` blocks is
/// weighted by `f^{(r)}(Q)`. This is the chain rule for `f(Q(xi))` with `Q`
/// quadratic.
#[allow(clippy::too_many_arguments)]
fn matching_sum(
    idx: &[usize],
    used: &mut [bool; METRIC_MAX_ORDER],
    blocks: usize,
    prod: f64,
    grad: &[f64],
    matrix: &[f64],
    n: usize,
    outer: &[f64],
) -> f64 {
    let Some(first) = (0..idx.len()).find(|&p| !used[p]) else {
        return outer[blocks] * prod;
    };
    used[first] = true;
    let mut total = matching_sum(idx, used, blocks + 1, prod * grad[idx[first]], grad, matrix, n, outer);
    for second in first + 1..idx.len() {
        if !used[second] {
            used[second] = true;
            let h = 2.0 * matrix[idx[first] * n + idx[second]];
            total += matching_sum(idx, used, blocks + 1, prod * h, grad, matrix, n, outer);
            used[second] = false;
        }
    }
    used[first] = false;
    total
}

fn polynomial_derivative(monos: &[Monomial], xi: &[f64], idx: &[usize]) -> f64 {
    let n = xi.len();
    let mut counts = [0u32; 16];
    let mut counts_vec;
    let counts: &mut [u32] = if n <= 16 {
        &mut counts[..n]
    } else {
        counts_vec = vec![0u32; n];
        &mut counts_vec
    };
    for &i in idx {
        counts[i] += 1;
    }
    let mut total = 0.0;
    'terms: for mono in monos {
        let mut v = mono.coeff;
        for j in 0..n {
            let a = mono.exponents[j];
            let b = counts[j];
            if b > a {
                continue 'terms;
            }
            v *= falling(a as f64, b);
            if a > b {
                v *= xi[j].powi((a - b) as i32);
            }
        }
        total += v;
    }
    total
}

/// `x (x - 1) ... (x - r + 1)`.
fn falling(x: f64, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, j| acc * (x - j as f64))
}

fn quadratic_form(n: usize, matrix: &[f64], xi: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += matrix[i * n + j] * xi[j];
        }
        total += xi[i] * row;
    }
    total
}

fn is_positive_definite(n: usize, matrix: &[f64]) -> bool {
    // Cholesky; any non-positive pivot means not SPD
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = matrix[i * n + j];
            for p in 0..j {
                s -= l[i * n + p] * l[j * n + p];
            }
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

/// Fixed sphere grid used for positivity validation: `2^n * 512` points
/// (the two points `+-1` when `n = 1`, equally spaced angles for `n = 2`,
/// a Fibonacci lattice for `n = 3`, normalized cube-surface lattice points
/// beyond that).
pub fn validation_grid(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let count = 2048;
            (0..count)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / count as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        3 => fibonacci_sphere(4096),
        _ => cube_surface(dim, (1usize << dim) * 512),
    }
}

fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|j| {
            let z = 1.0 - (2.0 * j as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * j as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn cube_surface(dim: usize, target: usize) -> Vec<Vec<f64>> {
    let mut half = 1i64;
    while ((2 * half + 1) as f64).powi(dim as i32) - ((2 * half - 1) as f64).powi(dim as i32) < target as f64 {
        half += 1;
    }
    let side = (2 * half + 1) as usize;
    let total = side.pow(dim as u32);
    let mut out = Vec::new();
    let mut k = vec![0i64; dim];
    for flat in 0..total {
        let mut rem = flat;
        for slot in k.iter_mut() {
            *slot = (rem % side) as i64 - half;
            rem /= side;
        }
        if k.iter().any(|v| v.abs() == half) {
            let norm = k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
            out.push(k.iter().map(|&v| v as f64 / norm).collect());
        }
    }
    out
}
