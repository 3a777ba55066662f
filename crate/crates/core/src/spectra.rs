//! Exact model spectra and truncated weighted kernels.
//!
//! Two models with explicitly known eigendata:
//!
//! * the flat torus `(R / 2 pi Z)^n` with a constant-coefficient symbol
//!   `sigma`: eigenvalues `sigma(k)`, eigenfunctions
//!   `(2 pi)^{-n/2} e^{i <k, x>}`, `k in Z^n`;
//! * the Dirichlet Laplacian `-d^2/dx^2` on `(0, pi)`: eigenvalues `k^2`,
//!   eigenfunctions `sqrt(2/pi) sin(k x)`, `k >= 1`.
//!
//! Kernels sum over `0 < lambda <= L`; the torus zero mode never enters.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::levelset::nu_total;
use crate::quadrature::GaussLegendre;
use crate::summation::{pairwise_range, NeumaierSum};
use crate::symbols::HomogeneousSymbol;
use crate::{Error, Result};

/// Enumeration refuses bands predicted to exceed this many entries.
pub const MAX_BAND_ENTRIES: f64 = 1e8;

/// Sphere resolution used for Weyl-law volumes.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 8,
        2 => 4096,
        _ => 128,
    }
}

/// Which exactly solvable eigenproblem a band belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Torus(HomogeneousSymbol),
    /// `-d^2/dx^2` on `(0, pi)` with Dirichlet conditions.
    Dirichlet,
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Torus(sym) => sym.dim(),
            Model::Dirichlet => 1,
        }
    }

    /// Order `m` of the operator.
    pub fn degree(&self) -> f64 {
        match self {
            Model::Torus(sym) => sym.degree(),
            Model::Dirichlet => 2.0,
        }
    }

    /// The critical exponent `n / m`.
    pub fn critical_exponent(&self) -> f64 {
        self.dim() as f64 / self.degree()
    }

    /// `nu(S*)` of the principal symbol (`xi^2` for the Dirichlet model).
    pub fn level_set_mass(&self) -> Result<f64> {
        match self {
            Model::Torus(sym) => nu_total(sym, default_resolution(sym.dim())),
            Model::Dirichlet => Ok(2.0),
        }
    }

    pub fn band(&self, cutoff: f64) -> Result<SpectralBand> {
        match self {
            Model::Torus(sym) => enumerate_band(sym, cutoff),
            Model::Dirichlet => dirichlet_band(cutoff),
        }
    }
}

/// Eigendata `{(k, lambda_k) : 0 < lambda_k <= L}` of a model, in
/// lexicographic index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBand {
    model: Model,
    cutoff: f64,
    dim: usize,
    indices: Vec<i64>,
    eigenvalues: Vec<f64>,
}

impl SpectralBand {
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lattice_point(&self, i: usize) -> &[i64] {
        &self.indices[i * self.dim..(i + 1) * self.dim]
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `e_k(x) conj(e_k(y))` for entry `i`.
    pub fn mode_product(&self, i: usize, x: &[f64], y: &[f64]) -> Complex64 {
        let k = self.lattice_point(i);
        match self.model {
            Model::Torus(_) => {
                let phase: f64 = k.iter().zip(x.iter().zip(y)).map(|(&kj, (xj, yj))| kj as f64 * (xj - yj)).sum();
                let (s, c) = phase.sin_cos();
                Complex64::new(c, s) * (2.0 * PI).powi(-(self.dim as i32))
            }
            Model::Dirichlet => {
                let kf = k[0] as f64;
                Complex64::new(2.0 / PI * (kf * x[0]).sin() * (kf * y[0]).sin(), 0.0)
            }
        }
    }
}

/// Lattice points `k != 0` with `sigma(k) <= L`, scanned over the box
/// `|k|_inf <= (L / sigma_min)^{1/m}`.
///
/// `sigma_min` is the minimum over the symbol's validation grid, deflated by
/// 10% to cover the grid's discretization error.
pub fn enumerate_band(sym: &HomogeneousSymbol, cutoff: f64) -> Result<SpectralBand> {
    check_cutoff(cutoff)?;
    let dim = sym.dim();
    let m = sym.degree();
    let predicted = predicted_count(sym, cutoff)?;
    if predicted > MAX_BAND_ENTRIES {
        return Err(Error::OverflowRisk { predicted });
    }
    let sigma_lower = 0.9 * sym.sphere_min();
    let half = (cutoff / sigma_lower).powf(1.0 / m).floor() as i64 + 1;
    let side = (2 * half + 1) as f64;
    if side.powi(dim as i32) > 64.0 * MAX_BAND_ENTRIES.max(predicted) {
        return Err(Error::OverflowRisk { predicted: side.powi(dim as i32) });
    }
    let mut indices = Vec::with_capacity((predicted * 1.1) as usize * dim + 16);
    let mut eigenvalues = Vec::with_capacity((predicted * 1.1) as usize + 16);
    let mut k = vec![-half; dim];
    loop {
        if k.iter().any(|&v| v != 0) {
            let lambda = sym.eval_lattice(&k);
            if lambda <= cutoff {
                indices.extend_from_slice(&k);
                eigenvalues.push(lambda);
            }
        }
        // lexicographic odometer, last coordinate fastest
        let mut p = dim;
        loop {
            if p == 0 {
                return Ok(SpectralBand { model: Model::Torus(sym.clone()), cutoff, dim, indices, eigenvalues });
            }
            p -= 1;
            k[p] += 1;
            if k[p] <= half {
                break;
            }
            k[p] = -half;
        }
    }
}

/// `k = 1, ..., floor(sqrt(L))` with `lambda_k = k^2`.
pub fn dirichlet_band(cutoff: f64) -> Result<SpectralBand> {
    check_cutoff(cutoff)?;
    let kmax = isqrt_floor(cutoff);
    if kmax as f64 > MAX_BAND_ENTRIES {
        return Err(Error::OverflowRisk { predicted: kmax as f64 });
    }
    let indices: Vec<i64> = (1..=kmax).collect();
    let eigenvalues = indices.iter().map(|&k| (k * k) as f64).collect();
    Ok(SpectralBand { model: Model::Dirichlet, cutoff, dim: 1, indices, eigenvalues })
}

/// Observed eigenvalue count against the Weyl prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCount {
    pub count: usize,
    pub prediction: f64,
}

impl WeylCount {
    pub fn relative_error(&self) -> f64 {
        (self.count as f64 - self.prediction).abs() / self.prediction
    }
}

/// `Vol({sigma <= 1}) = nu(S*) / n`.
pub fn sublevel_volume(sym: &HomogeneousSymbol) -> Result<f64> {
    Ok(nu_total(sym, default_resolution(sym.dim()))? / sym.dim() as f64)
}

/// Number of torus eigenvalues in `(0, L]` and `Vol({sigma <= 1}) L^{n/m}`.
pub fn weyl_count(sym: &HomogeneousSymbol, cutoff: f64) -> Result<WeylCount> {
    let band = enumerate_band(sym, cutoff)?;
    let prediction = sublevel_volume(sym)? * cutoff.powf(sym.dim() as f64 / sym.degree());
    Ok(WeylCount { count: band.len(), prediction })
}

fn predicted_count(sym: &HomogeneousSymbol, cutoff: f64) -> Result<f64> {
    let dim = sym.dim();
    let scale = cutoff.powf(dim as f64 / sym.degree());
    if dim <= 3 {
        Ok(sublevel_volume(sym)? * scale)
    } else {
        // volume of the Euclidean ball containing {sigma <= 1}
        let ball = PI.powf(0.5 * dim as f64) / gamma_half_integer(dim + 2);
        Ok(ball * sym.sphere_min().powf(-(dim as f64) / sym.degree()) * scale)
    }
}

/// `Gamma(j / 2)` for integer `j >= 1`.
fn gamma_half_integer(j: usize) -> f64 {
    let mut g = if j.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if j.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x + 0.5 < 0.5 * j as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if cutoff > 0.0 && cutoff.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("L: cutoff must be positive and finite, got {cutoff}")))
    }
}

fn isqrt_floor(x: f64) -> i64 {
    let mut k = x.sqrt().floor() as i64;
    while ((k + 1) * (k + 1)) as f64 <= x {
        k += 1;
    }
    while k > 0 && (k * k) as f64 > x {
        k -= 1;
    }
    k
}

/// One evaluation of a (differentiated) weighted torus kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelRequest {
    /// Weight exponent `z`; `z = -s` gives `K_L^s`.
    pub exponent: Complex64,
    /// Derivative orders in `x`.
    pub alpha: Vec<u32>,
    /// Derivative orders in `y`.
    pub beta: Vec<u32>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub cutoff: f64,
}

impl KernelRequest {
    /// `K_L^s(x, y)` without derivatives.
    pub fn weighted(s: f64, x: Vec<f64>, y: Vec<f64>, cutoff: f64) -> Self {
        let n = x.len();
        Self { exponent: Complex64::new(-s, 0.0), alpha: vec![0; n], beta: vec![0; n], x, y, cutoff }
    }

    pub fn with_exponent(mut self, z: Complex64) -> Self {
        self.exponent = z;
        self
    }

    pub fn with_derivatives(mut self, alpha: Vec<u32>, beta: Vec<u32>) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    /// Total derivative order `|alpha| + |beta|`.
    pub fn order(&self) -> u32 {
        self.alpha.iter().sum::<u32>() + self.beta.iter().sum::<u32>()
    }
}

/// Summands of [`torus_kernel`], exposed so that parallel drivers can
/// reproduce the sequential reduction tree exactly.
#[derive(Debug)]
pub struct TorusSummands<'a> {
    band: &'a SpectralBand,
    exponent: Complex64,
    powers: Vec<u32>,
    delta: Vec<f64>,
    prefactor: Complex64,
}

impl<'a> TorusSummands<'a> {
    pub fn new(req: &KernelRequest, band: &'a SpectralBand) -> Result<Self> {
        if !matches!(band.model, Model::Torus(_)) {
            return Err(Error::BandMismatch("torus kernel needs a torus band".into()));
        }
        if band.cutoff != req.cutoff {
            return Err(Error::BandMismatch(format!(
                "band cutoff {} differs from requested L = {}",
                band.cutoff, req.cutoff
            )));
        }
        let n = band.dim;
        for (name, len) in
            [("x", req.x.len()), ("y", req.y.len()), ("alpha", req.alpha.len()), ("beta", req.beta.len())]
        {
            if len != n {
                return Err(Error::BandMismatch(format!("{name} has length {len}, band dimension is {n}")));
            }
        }
        let powers = req.alpha.iter().zip(&req.beta).map(|(a, b)| a + b).collect();
        let delta = req.x.iter().zip(&req.y).map(|(x, y)| x - y).collect();
        // (2 pi)^{-n} i^{|alpha|} (-i)^{|beta|}
        let a: u32 = req.alpha.iter().sum();
        let b: u32 = req.beta.iter().sum();
        let phase = Complex64::i().powu(a) * (-Complex64::i()).powu(b);
        let prefactor = phase * (2.0 * PI).powi(-(n as i32));
        Ok(Self { band, exponent: req.exponent, powers, delta, prefactor })
    }

    pub fn len(&self) -> usize {
        self.band.len()
    }

    pub fn is_empty(&self) -> bool {
        self.band.is_empty()
    }

    /// Summand `i` without the common prefactor.
    #[inline]
    pub fn term(&self, i: usize) -> Complex64 {
        let k = self.band.lattice_point(i);
        let lambda = self.band.eigenvalues[i];
        let mut phase = 0.0;
        let mut monomial = 1.0;
        for ((&kj, &dj), &pj) in k.iter().zip(&self.delta).zip(&self.powers) {
            let kj = kj as f64;
            phase += kj * dj;
            if pj > 0 {
                monomial *= kj.powi(pj as i32);
            }
        }
        let (s, c) = phase.sin_cos();
        spectral_power(lambda, self.exponent) * (monomial * Complex64::new(c, s))
    }

    /// Applies `(2 pi)^{-n} i^{|alpha|} (-i)^{|beta|}` to a reduced sum.
    pub fn finish(&self, sum: Complex64) -> Complex64 {
        self.prefactor * sum
    }
}

/// `lambda^z` on the real branch.
#[inline]
pub fn spectral_power(lambda: f64, z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(lambda.powf(z.re), 0.0)
        }
    } else {
        (z * lambda.ln()).exp()
    }
}

/// `(2 pi)^{-n} sum_{0 < sigma(k) <= L} sigma(k)^z (ik)^alpha (-ik)^beta e^{i <k, x - y>}`,
/// reduced pairwise in lexicographic `k` order.
pub fn torus_kernel(req: &KernelRequest, band: &SpectralBand) -> Result<Complex64> {
    let summands = TorusSummands::new(req, band)?;
    let sum = pairwise_range(0, summands.len(), &|i| summands.term(i));
    Ok(summands.finish(sum))
}

/// `sum_{0 < k^2 <= L} k^{-2s} (2/pi) sin(kx) sin(ky)` for interior points.
pub fn dirichlet_kernel(s: f64, cutoff: f64, x: f64, y: f64) -> Result<f64> {
    dirichlet_kernel_with(s, cutoff, x, y, false)
}

/// As [`dirichlet_kernel`]; `allow_boundary` admits `x, y in [0, pi]`.
pub fn dirichlet_kernel_with(s: f64, cutoff: f64, x: f64, y: f64, allow_boundary: bool) -> Result<f64> {
    check_cutoff(cutoff)?;
    for (name, v) in [("x", x), ("y", y)] {
        let inside = if allow_boundary { (0.0..=PI).contains(&v) } else { v > 0.0 && v < PI };
        if !inside {
            return Err(Error::DomainError(format!("{name} = {v} is not inside (0, pi)")));
        }
    }
    let kmax = isqrt_floor(cutoff) as usize;
    let sum = pairwise_range(1, kmax + 1, &|k| {
        let kf = k as f64;
        let w = if s == 0.0 { 1.0 } else { kf.powf(-2.0 * s) };
        w * (kf * x).sin() * (kf * y).sin()
    });
    Ok(2.0 / PI * sum)
}

/// A weight `f` on `(0, inf)` together with its derivative.
pub trait SpectralWeight {
    fn value(&self, t: f64) -> Complex64;
    fn derivative(&self, t: f64) -> Complex64;
}

/// `f(t) = t^z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerWeight {
    pub exponent: Complex64,
}

impl PowerWeight {
    pub fn real(exponent: f64) -> Self {
        Self { exponent: Complex64::new(exponent, 0.0) }
    }
}

impl SpectralWeight for PowerWeight {
    fn value(&self, t: f64) -> Complex64 {
        spectral_power(t, self.exponent)
    }

    fn derivative(&self, t: f64) -> Complex64 {
        self.exponent * spectral_power(t, self.exponent - 1.0)
    }
}

/// Weight given by a pair of closures `(f, f')`.
#[derive(Clone, Copy)]
pub struct FnWeight<F, G> {
    pub value: F,
    pub derivative: G,
}

impl<F, G> core::fmt::Debug for FnWeight<F, G> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("FnWeight")
    }
}

impl<F, G> SpectralWeight for FnWeight<F, G>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    fn value(&self, t: f64) -> Complex64 {
        (self.value)(t)
    }

    fn derivative(&self, t: f64) -> Complex64 {
        (self.derivative)(t)
    }
}

/// Both evaluations of `K_L^f(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPaths {
    /// `sum f(lambda_k) e_k(x) conj(e_k(y))`.
    pub direct: Complex64,
    /// `f(L) E_L - int_0^L f'(lambda) E_lambda d lambda`.
    pub integrated: Complex64,
}

impl WeightPaths {
    pub fn discrepancy(&self) -> f64 {
        (self.direct - self.integrated).norm()
    }
}

/// `K_L^f` computed directly and through the spectral-projector identity.
///
/// `E_lambda` is constant between consecutive distinct eigenvalues, so the
/// integral splits into `sum_j E_{mu_j} int_{mu_j}^{mu_{j+1}} f'` (with
/// `mu_{r+1} = L`); each piece of `f'` is integrated by 24-point
/// Gauss-Legendre.
pub fn kernel_weighted<W: SpectralWeight + ?Sized>(
    weight: &W,
    cutoff: f64,
    x: &[f64],
    y: &[f64],
    band: &SpectralBand,
) -> Result<WeightPaths> {
    if band.cutoff != cutoff {
        return Err(Error::BandMismatch(format!("band cutoff {} differs from requested L = {cutoff}", band.cutoff)));
    }
    if x.len() != band.dim || y.len() != band.dim {
        return Err(Error::DimensionMismatch { expected: band.dim, found: x.len().min(y.len()) });
    }
    if matches!(band.model, Model::Dirichlet) {
        for v in [x[0], y[0]] {
            if !(v > 0.0 && v < PI) {
                return Err(Error::DomainError(format!("{v} is not inside (0, pi)")));
            }
        }
    }
    let direct = pairwise_range(0, band.len(), &|i| weight.value(band.eigenvalues[i]) * band.mode_product(i, x, y));

    let mut order: Vec<usize> = (0..band.len()).collect();
    order.sort_by(|&a, &b| band.eigenvalues[a].total_cmp(&band.eigenvalues[b]).then(a.cmp(&b)));
    let rule = GaussLegendre::new(24);
    let mut projector = NeumaierSum::<Complex64>::new();
    let mut integral = NeumaierSum::<Complex64>::new();
    let mut pos = 0;
    while pos < order.len() {
        let mu = band.eigenvalues[order[pos]];
        while pos < order.len() && band.eigenvalues[order[pos]] == mu {
            projector.add(band.mode_product(order[pos], x, y));
            pos += 1;
        }
        let next = if pos < order.len() { band.eigenvalues[order[pos]] } else { cutoff };
        if next > mu {
            let mut piece = Complex64::new(0.0, 0.0);
            for (t, w) in rule.mapped(mu, next) {
                piece += weight.derivative(t) * w;
            }
            integral.add(projector.value() * piece);
        }
    }
    let integrated = weight.value(cutoff) * projector.value() - integral.value();
    Ok(WeightPaths { direct, integrated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::Monomial;

    fn quartic() -> HomogeneousSymbol {
        HomogeneousSymbol::polynomial(2, vec![Monomial::new(1.0, vec![4, 0]), Monomial::new(1.0, vec![0, 4])]).unwrap()
    }

    #[test]
    fn band_examples() {
        let lap2 = HomogeneousSymbol::laplacian(2).unwrap();
        assert_eq!(enumerate_band(&lap2, 25.0).unwrap().len(), 80);

        let lap1 = HomogeneousSymbol::laplacian(1).unwrap();
        let band = enumerate_band(&lap1, 9.0).unwrap();
        let ks: Vec<i64> = (0..band.len()).map(|i| band.lattice_point(i)[0]).collect();
        assert_eq!(ks, vec![-3, -2, -1, 1, 2, 3]);

        let band = enumerate_band(&quartic(), 1.0).unwrap();
        let ks: Vec<&[i64]> = (0..band.len()).map(|i| band.lattice_point(i)).collect();
        assert_eq!(ks, vec![&[-1, 0][..], &[0, -1], &[0, 1], &[1, 0]]);
    }

    #[test]
    fn weyl_examples() {
        let lap2 = HomogeneousSymbol::laplacian(2).unwrap();
        let w = weyl_count(&lap2, 25.0).unwrap();
        assert_eq!(w.count, 80);
        assert!((w.prediction - 25.0 * PI).abs() < 1e-9);

        let lap1 = HomogeneousSymbol::laplacian(1).unwrap();
        let w = weyl_count(&lap1, 9.0).unwrap();
        assert_eq!(w.count, 6);
        assert!((w.prediction - 6.0).abs() < 1e-12);
    }

    #[test]
    fn overflow_is_refused() {
        let lap3 = HomogeneousSymbol::laplacian(3).unwrap();
        match enumerate_band(&lap3, 1e6) {
            Err(Error::OverflowRisk { predicted }) => assert!(predicted > 1e8),
            other => panic!("expected OverflowRisk, got {other:?}"),
        }
        assert!(matches!(enumerate_band(&lap3, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn tie_at_cutoff_is_included() {
        let lap2 = HomogeneousSymbol::laplacian(2).unwrap();
        let band = enumerate_band(&lap2, 1.0).unwrap();
        assert_eq!(band.len(), 4);
        assert!(band.eigenvalues().iter().all(|&l| l == 1.0));
    }

    #[test]
    fn torus_kernel_counting_example() {
        let lap1 = HomogeneousSymbol::laplacian(1).unwrap();
        let band = enumerate_band(&lap1, 9.0).unwrap();
        let k = torus_kernel(&KernelRequest::weighted(0.0, vec![0.4], vec![0.4], 9.0), &band).unwrap();
        assert!((k.re - 3.0 / PI).abs() < 1e-15);
        assert_eq!(k.im, 0.0);
    }

    #[test]
    fn torus_kernel_symmetric_offset_is_real() {
        let lap2 = HomogeneousSymbol::laplacian(2).unwrap();
        let band = enumerate_band(&lap2, 50.0).unwrap();
        let req = KernelRequest::weighted(0.7, vec![PI, PI], vec![0.0, 0.0], 50.0);
        assert!(torus_kernel(&req, &band).unwrap().im.abs() <= 1e-12);
    }

    #[test]
    fn torus_kernel_rejects_mismatched_band() {
        let lap2 = HomogeneousSymbol::laplacian(2).unwrap();
        let band = enumerate_band(&lap2, 50.0).unwrap();
        let req = KernelRequest::weighted(0.0, vec![0.0, 0.0], vec![0.0, 0.0], 49.0);
        assert!(matches!(torus_kernel(&req, &band), Err(Error::BandMismatch(_))));
        let req = KernelRequest::weighted(0.0, vec![0.0], vec![0.0], 50.0);
        assert!(matches!(torus_kernel(&req, &band), Err(Error::BandMismatch(_))));
        let dir = dirichlet_band(50.0).unwrap();
        let req = KernelRequest::weighted(0.0, vec![1.0], vec![1.0], 50.0);
        assert!(matches!(torus_kernel(&req, &dir), Err(Error::BandMismatch(_))));
    }

    #[test]
    fn derivative_kernel_first_order() {
        // d/dx K^0 at x = y: (2pi)^-1 sum ik = 0 by symmetry; d/dx d/dy: (2pi)^-1 sum k^2
        let lap1 = HomogeneousSymbol::laplacian(1).unwrap();
        let band = enumerate_band(&lap1, 9.0).unwrap();
        let base = KernelRequest::weighted(0.0, vec![0.3], vec![0.3], 9.0);
        let d = torus_kernel(&base.clone().with_derivatives(vec![1], vec![0]), &band).unwrap();
        assert!(d.norm() < 1e-15);
        let dd = torus_kernel(&base.with_derivatives(vec![1], vec![1]), &band).unwrap();
        assert!((dd.re - 28.0 / (2.0 * PI)).abs() < 1e-13);
        assert!(dd.im.abs() < 1e-15);
    }

    #[test]
    fn dirichlet_examples() {
        let v = dirichlet_kernel(0.0, 4.0, PI / 2.0, PI / 2.0).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-15);
        let near = dirichlet_kernel(0.0, 100.0, 1e-9, 1e-9).unwrap();
        assert!(near.abs() < 1e-12);
        assert!(matches!(dirichlet_kernel(0.0, 4.0, 0.0, 1.0), Err(Error::DomainError(_))));
        assert!(matches!(dirichlet_kernel(0.0, 4.0, 1.0, PI), Err(Error::DomainError(_))));
        assert_eq!(dirichlet_kernel_with(0.0, 4.0, 0.0, 1.0, true).unwrap(), 0.0);
    }

    #[test]
    fn dirichlet_half_weight_grows_like_log() {
        // sum over odd k <= 1000 of 1/k, times 2/pi
        let v = dirichlet_kernel(0.5, 1e6, PI / 2.0, PI / 2.0).unwrap();
        let oracle: f64 = (0..500).map(|j| 1.0 / (2 * j + 1) as f64).sum::<f64>() * 2.0 / PI;
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 1e6f64.ln() / (2.0 * PI)).abs() < 1.0);
    }

    #[test]
    fn weighted_paths_agree() {
        let lap2 = HomogeneousSymbol::laplacian(2).unwrap();
        let band = enumerate_band(&lap2, 400.0).unwrap();
        let paths = kernel_weighted(&PowerWeight::real(-1.0), 400.0, &[0.3, 1.1], &[2.0, 0.5], &band).unwrap();
        assert!(paths.discrepancy() <= 1e-10 * paths.direct.norm().max(1.0));

        let unit = PowerWeight::real(0.0);
        let paths = kernel_weighted(&unit, 400.0, &[0.0, 0.0], &[0.0, 0.0], &band).unwrap();
        assert!((paths.direct.re - band.len() as f64 / (4.0 * PI * PI)).abs() < 1e-12);
        assert!(paths.discrepancy() < 1e-12);
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt_floor(9.0), 3);
        assert_eq!(isqrt_floor(8.999), 2);
        assert_eq!(isqrt_floor(1e8), 10_000);
        assert_eq!(isqrt_floor(0.5), 0);
    }
}
