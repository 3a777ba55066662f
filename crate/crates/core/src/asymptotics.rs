//! Limit objects of the weighted kernels and regressions against them.
//!
//! Below the critical exponent (`s < (n + |alpha| + |beta|)/m`) the kernel,
//! rescaled around a base point `w` at scale `L^{-1/m}`, converges to
//!
//! `F(h) = (2 pi)^{-n} int_{sigma <= 1} e^{i <xi, h>} (i xi)^alpha (-i xi)^beta sigma(xi)^{-s} d xi`.
//!
//! At `s = n/m` the diagonal grows like `g ln(L^{1/m})` and off the diagonal
//! `K_L(x, y) = -g ln|x - y| + Q(x, y) + o(1)`, with `g = nu(S*) / (2 pi)^n`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::levelset::LevelSetQuad;
use crate::quadrature::GaussLegendre;
use crate::spectra::{dirichlet_kernel, enumerate_band, torus_kernel, KernelRequest, Model, SpectralBand};
use crate::symbols::HomogeneousSymbol;
use crate::{Error, Result};

/// Abscissa of a regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Design {
    /// `ln L`
    LnCutoff,
    /// `-ln |x - y|`
    NegLnDistance,
    /// `ln t`
    LnT,
}

impl Design {
    pub fn label(self) -> &'static str {
        match self {
            Design::LnCutoff => "ln L",
            Design::NegLnDistance => "-ln|x-y|",
            Design::LnT => "ln t",
        }
    }
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub sample_count: usize,
    pub design: Design,
}

/// OLS fit of `ys` against `xs`; needs at least three samples with
/// distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64], design: Design) -> Result<FitReport> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::DegenerateFit(format!("{n} samples, need at least 3")));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite sample".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::DegenerateFit("abscissae do not vary".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = xs.iter().zip(ys).map(|(x, y)| (y - (intercept + slope * x)).abs()).fold(0.0, f64::max);
    Ok(FitReport { slope, intercept, max_abs_residual, sample_count: n, design })
}

/// `g = nu(S*) / (2 pi)^n`, the coefficient of the critical logarithm.
pub fn g_constant(quad: &LevelSetQuad) -> f64 {
    quad.total() / (2.0 * PI).powi(quad.dim() as i32)
}

fn derivative_order(alpha: &[u32], beta: &[u32]) -> u32 {
    alpha.iter().sum::<u32>() + beta.iter().sum::<u32>()
}

fn check_multi_indices(dim: usize, alpha: &[u32], beta: &[u32]) -> Result<()> {
    if alpha.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: alpha.len() });
    }
    if beta.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: beta.len() });
    }
    Ok(())
}

/// Limit of the rescaled kernel at offset `h` (the rescaled `x - y`).
///
/// In polar form the integral is `(2 pi)^{-n} int_0^1 t^p G(t) dt` with
/// `p = n - 1 + |alpha| + |beta| - m s` and
/// `G(t) = sum_i w_i (i xi_i)^alpha (-i xi_i)^beta e^{i t <xi_i, h>}`.
/// The first two Taylor terms of `G` are integrated exactly; the remainder
/// (of size `t^{p+2}`) uses 20-point Gauss-Legendre on a mesh graded by
/// halving down to `2^-27` when `p` is fractional or negative, and one
/// 32-point panel otherwise.
pub fn limit_kernel(
    sym: &HomogeneousSymbol,
    s: f64,
    alpha: &[u32],
    beta: &[u32],
    h: &[f64],
    quad: &LevelSetQuad,
) -> Result<Complex64> {
    let n = sym.dim();
    check_multi_indices(n, alpha, beta)?;
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    if quad.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: quad.dim() });
    }
    let d = derivative_order(alpha, beta);
    let bound = (n as f64 + d as f64) / sym.degree();
    if !(s < bound) {
        return Err(Error::NonIntegrable { s, bound });
    }
    let p = n as f64 - 1.0 + d as f64 - sym.degree() * s;

    let a: u32 = alpha.iter().sum();
    let b: u32 = beta.iter().sum();
    let phase = Complex64::i().powu(a) * (-Complex64::i()).powu(b);
    let amplitude: Vec<f64> = quad
        .nodes()
        .zip(quad.weights())
        .map(|(xi, w)| {
            let mut v = *w;
            for j in 0..n {
                let e = alpha[j] + beta[j];
                if e > 0 {
                    v *= xi[j].powi(e as i32);
                }
            }
            v
        })
        .collect();
    let freq: Vec<f64> = quad.nodes().map(|xi| xi.iter().zip(h).map(|(x, y)| x * y).sum()).collect();

    let g0: f64 = crate::summation::pairwise_sum(&amplitude);
    let g1: f64 = crate::summation::pairwise_range(0, amplitude.len(), &|i| amplitude[i] * freq[i]);
    // G(t) - G(0) - G'(0) t with G'(0) = i g1
    let remainder = |t: f64| -> Complex64 {
        crate::summation::pairwise_range(0, amplitude.len(), &|i| {
            let (sn, cs) = (t * freq[i]).sin_cos();
            Complex64::new(amplitude[i] * (cs - 1.0), amplitude[i] * (sn - t * freq[i]))
        })
    };

    let mut integral = Complex64::new(g0 / (p + 1.0), g1 / (p + 2.0));
    let smooth = p >= 0.0 && p.fract() == 0.0;
    if smooth {
        let rule = GaussLegendre::new(32);
        for (t, w) in rule.mapped(0.0, 1.0) {
            integral += remainder(t) * (t.powf(p) * w);
        }
    } else {
        let rule = GaussLegendre::new(20);
        let mut hi = 1.0;
        for _ in 0..27 {
            let lo = 0.5 * hi;
            for (t, w) in rule.mapped(lo, hi) {
                integral += remainder(t) * (t.powf(p) * w);
            }
            hi = lo;
        }
    }
    Ok(phase * integral / (2.0 * PI).powi(n as i32))
}

/// Rescaled derivative kernel
/// `L^{s - (n + |alpha| + |beta|)/m} d^alpha_x d^beta_y K_L^s(w + L^{-1/m} h, w)`.
pub fn rescaled_kernel(
    sym: &HomogeneousSymbol,
    s: f64,
    alpha: &[u32],
    beta: &[u32],
    base: &[f64],
    h: &[f64],
    band: &SpectralBand,
) -> Result<Complex64> {
    let n = sym.dim();
    check_multi_indices(n, alpha, beta)?;
    if base.len() != n || h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: base.len().min(h.len()) });
    }
    let cutoff = band.cutoff();
    let m = sym.degree();
    let d = derivative_order(alpha, beta) as f64;
    let scale = cutoff.powf(-1.0 / m);
    let x: Vec<f64> = base.iter().zip(h).map(|(w, h)| w + scale * h).collect();
    let req = KernelRequest::weighted(s, x, base.to_vec(), cutoff).with_derivatives(alpha.to_vec(), beta.to_vec());
    let value = torus_kernel(&req, band)?;
    Ok(value * cutoff.powf(s - (n as f64 + d) / m))
}

/// One row of a rescaling scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub cutoff: f64,
    /// `sup_h |rescaled kernel - limit kernel|`.
    pub sup_error: f64,
    /// Index into the offset grid where the supremum is attained.
    pub worst_offset: usize,
}

/// Sup error over `offsets` between the rescaled torus kernel and its limit,
/// for one cutoff. `limits[j]` must be the limit kernel at `offsets[j]`.
#[allow(clippy::too_many_arguments)]
pub fn rescaled_error_at(
    sym: &HomogeneousSymbol,
    s: f64,
    alpha: &[u32],
    beta: &[u32],
    base: &[f64],
    offsets: &[Vec<f64>],
    limits: &[Complex64],
    cutoff: f64,
) -> Result<ScanRow> {
    let band = enumerate_band(sym, cutoff)?;
    let mut row = ScanRow { cutoff, sup_error: 0.0, worst_offset: 0 };
    for (j, (h, limit)) in offsets.iter().zip(limits).enumerate() {
        let err = (rescaled_kernel(sym, s, alpha, beta, base, h, &band)? - limit).norm();
        if err > row.sup_error {
            row.sup_error = err;
            row.worst_offset = j;
        }
    }
    Ok(row)
}

/// Limit kernel at each offset.
pub fn limit_table(
    sym: &HomogeneousSymbol,
    s: f64,
    alpha: &[u32],
    beta: &[u32],
    offsets: &[Vec<f64>],
    quad: &LevelSetQuad,
) -> Result<Vec<Complex64>> {
    offsets.iter().map(|h| limit_kernel(sym, s, alpha, beta, h, quad)).collect()
}

/// Sup error between rescaled kernel and limit kernel for each cutoff.
#[allow(clippy::too_many_arguments)]
pub fn rescaled_error_scan(
    sym: &HomogeneousSymbol,
    s: f64,
    alpha: &[u32],
    beta: &[u32],
    base: &[f64],
    offsets: &[Vec<f64>],
    cutoffs: &[f64],
    quad: &LevelSetQuad,
) -> Result<Vec<ScanRow>> {
    if offsets.is_empty() {
        return Err(Error::InvalidParameter("h-grid: empty offset grid".into()));
    }
    let limits = limit_table(sym, s, alpha, beta, offsets, quad)?;
    cutoffs.iter().map(|&cutoff| rescaled_error_at(sym, s, alpha, beta, base, offsets, &limits, cutoff)).collect()
}

/// Diagonal fit of the critical kernel against `ln L`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLawReport {
    pub fit: FitReport,
    pub degree: f64,
    /// `slope * m`.
    pub g_estimate: f64,
    /// `nu(S*) / (2 pi)^n`.
    pub g_target: f64,
    /// `g_target / m`, the expected raw slope against `ln L`.
    pub slope_target: f64,
    /// `|g_estimate - g_target| / g_target`.
    pub relative_error: f64,
    /// `(L, K_L(x, x))`.
    pub samples: Vec<(f64, f64)>,
}

/// `g` for a model, with the level-set mass computed at the default resolution.
pub fn model_g_constant(model: &Model) -> Result<f64> {
    Ok(model.level_set_mass()? / (2.0 * PI).powi(model.dim() as i32))
}

/// `K_L^s(x, x)` (real part) for either model.
pub fn diagonal_kernel(model: &Model, s: f64, x: &[f64], cutoff: f64) -> Result<f64> {
    match model {
        Model::Torus(sym) => {
            let band = enumerate_band(sym, cutoff)?;
            let req = KernelRequest::weighted(s, x.to_vec(), x.to_vec(), cutoff);
            Ok(torus_kernel(&req, &band)?.re)
        }
        Model::Dirichlet => {
            if x.len() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: x.len() });
            }
            dirichlet_kernel(s, cutoff, x[0], x[0])
        }
    }
}

/// Requires `s = n/m` for the model.
pub fn check_critical(model: &Model, s: f64) -> Result<()> {
    let critical = model.critical_exponent();
    if (s - critical).abs() > 1e-12 * critical {
        return Err(Error::InvalidParameter(format!("s: must equal n/m = {critical}, got {s}")));
    }
    Ok(())
}

/// Checks a cutoff list for the log-law fit: at least six increasing
/// values spanning two decades.
pub fn check_log_cutoffs(cutoffs: &[f64]) -> Result<()> {
    if cutoffs.len() < 6 {
        return Err(Error::DegenerateFit(format!("{} cutoffs, need at least 6", cutoffs.len())));
    }
    if cutoffs.windows(2).any(|w| !(w[1] > w[0])) || !(cutoffs[0] > 0.0) {
        return Err(Error::DegenerateFit("cutoffs must be positive and increasing".into()));
    }
    if cutoffs[cutoffs.len() - 1] / cutoffs[0] < 100.0 * (1.0 - 1e-9) {
        return Err(Error::DegenerateFit("cutoffs span less than two decades".into()));
    }
    Ok(())
}

/// Assembles a [`LogLawReport`] from diagonal samples `(L, K_L(x, x))`.
pub fn log_law_report(model: &Model, samples: Vec<(f64, f64)>) -> Result<LogLawReport> {
    let xs: Vec<f64> = samples.iter().map(|(l, _)| l.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, k)| *k).collect();
    let fit = fit_line(&xs, &ys, Design::LnCutoff)?;
    let degree = model.degree();
    let g_target = model_g_constant(model)?;
    let g_estimate = fit.slope * degree;
    Ok(LogLawReport {
        relative_error: (g_estimate - g_target).abs() / g_target,
        slope_target: g_target / degree,
        fit,
        degree,
        g_estimate,
        g_target,
        samples,
    })
}

/// Least-squares slope of `K_L^{n/m}(x, x)` against `ln L`, which should
/// approach `g / m`.
pub fn log_fit_diagonal(model: &Model, s: f64, x: &[f64], cutoffs: &[f64]) -> Result<LogLawReport> {
    check_critical(model, s)?;
    check_log_cutoffs(cutoffs)?;
    let samples =
        cutoffs.iter().map(|&l| diagonal_kernel(model, s, x, l).map(|k| (l, k))).collect::<Result<Vec<_>>>()?;
    log_law_report(model, samples)
}

/// Off-diagonal fit of the critical kernel against `-ln |x - y|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenFitReport {
    pub fit: FitReport,
    pub g_target: f64,
    /// `|slope - g_target| / g_target`.
    pub relative_error: f64,
    pub cutoff: f64,
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    /// `K_L(x, y) + g ln |x - y|` per pair, with `g = g_target`.
    pub q_hat: Vec<f64>,
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Validates `0 < |x - y| <= 1/2` and `|x - y| >= kappa_min L^{-1/m}` for every pair.
pub fn check_pairs(sym: &HomogeneousSymbol, pairs: &[(Vec<f64>, Vec<f64>)], cutoff: f64, kappa_min: f64) -> Result<()> {
    if !(kappa_min >= 1.0) {
        return Err(Error::InvalidParameter(format!("kappa: must be at least 1, got {kappa_min}")));
    }
    let required = kappa_min * cutoff.powf(-1.0 / sym.degree());
    for (x, y) in pairs {
        if x.len() != sym.dim() || y.len() != sym.dim() {
            return Err(Error::DimensionMismatch { expected: sym.dim(), found: x.len().min(y.len()) });
        }
        let dist = distance(x, y);
        if !(dist > 0.0 && dist <= 0.5) {
            return Err(Error::InvalidParameter(format!("pairs: |x - y| = {dist} outside (0, 0.5]")));
        }
        // slack for the rounding of `y - x` when pairs are built as `x + d u`
        if dist < required * (1.0 - 1e-12) {
            return Err(Error::PairTooClose { distance: dist, required });
        }
    }
    Ok(())
}

fn pair_values(sym: &HomogeneousSymbol, s: f64, pairs: &[(Vec<f64>, Vec<f64>)], cutoff: f64) -> Result<Vec<f64>> {
    let band = enumerate_band(sym, cutoff)?;
    pairs
        .iter()
        .map(|(x, y)| torus_kernel(&KernelRequest::weighted(s, x.clone(), y.clone(), cutoff), &band).map(|k| k.re))
        .collect()
}

/// Regresses `K_L^{n/m}(x, y)` against `-ln |x - y|` over the pairs; the
/// slope estimates `g`, and `Q-hat = K_L + g ln |x - y|` per pair.
pub fn offdiag_green_fit(
    sym: &HomogeneousSymbol,
    s: f64,
    pairs: &[(Vec<f64>, Vec<f64>)],
    cutoff: f64,
    kappa_min: f64,
) -> Result<GreenFitReport> {
    let model = Model::Torus(sym.clone());
    check_critical(&model, s)?;
    check_pairs(sym, pairs, cutoff, kappa_min)?;
    let values = pair_values(sym, s, pairs, cutoff)?;
    let distances: Vec<f64> = pairs.iter().map(|(x, y)| distance(x, y)).collect();
    green_fit_report(model_g_constant(&model)?, cutoff, distances, values)
}

/// Assembles a [`GreenFitReport`] from kernel values at the given distances.
pub fn green_fit_report(g_target: f64, cutoff: f64, distances: Vec<f64>, values: Vec<f64>) -> Result<GreenFitReport> {
    let xs: Vec<f64> = distances.iter().map(|d| -d.ln()).collect();
    let fit = fit_line(&xs, &values, Design::NegLnDistance)?;
    let q_hat = values.iter().zip(&distances).map(|(k, d)| k + g_target * d.ln()).collect();
    Ok(GreenFitReport {
        relative_error: (fit.slope - g_target).abs() / g_target,
        fit,
        g_target,
        cutoff,
        distances,
        values,
        q_hat,
    })
}

/// Euclidean `|x - y|`.
pub fn pair_distance(x: &[f64], y: &[f64]) -> f64 {
    distance(x, y)
}

/// `max_pairs |Q-hat_{L2} - Q-hat_{L1}|`, the boundedness proxy for `Q`.
pub fn q_spread(
    sym: &HomogeneousSymbol,
    s: f64,
    pairs: &[(Vec<f64>, Vec<f64>)],
    first: f64,
    second: f64,
) -> Result<f64> {
    let model = Model::Torus(sym.clone());
    check_critical(&model, s)?;
    let g = model_g_constant(&model)?;
    let a = pair_values(sym, s, pairs, first)?;
    let b = pair_values(sym, s, pairs, second)?;
    Ok(pairs
        .iter()
        .zip(a.iter().zip(&b))
        .map(|((x, y), (ka, kb))| {
            let log = distance(x, y).ln();
            ((kb + g * log) - (ka + g * log)).abs()
        })
        .fold(0.0, f64::max))
}

/// Human-readable line for a fit.
pub fn describe_fit(fit: &FitReport) -> String {
    format!(
        "slope={:.6} intercept={:.6} max_residual={:.3e} n={} x={}",
        fit.slope,
        fit.intercept,
        fit.max_abs_residual,
        fit.sample_count,
        fit.design.label()
    )
}
