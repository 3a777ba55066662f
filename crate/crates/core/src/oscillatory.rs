//! The level-set oscillatory integral `J(t) = int_{S*} e^{i t <xi, h>} d nu(xi)`
//! and its decay in `t`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::asymptotics::{fit_line, Design, FitReport};
use crate::levelset::{build_quadrature, LevelSetQuad};
use crate::quadrature::GaussLegendre;
use crate::summation::pairwise_range;
use crate::symbols::HomogeneousSymbol;
use crate::{Error, Result};

/// Quadrature points per oscillation demanded by [`j_probe`].
pub const SAMPLING_FACTOR: f64 = 16.0;
/// Window length of the running-max envelope.
pub const ENVELOPE_WINDOW: usize = 5;
/// Default grid density of a decay probe.
pub const DEFAULT_PER_DECADE: usize = 40;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Smallest resolution satisfying the sampling rule at frequency `t |h|`.
pub fn required_resolution(quad_max_norm: f64, h: &[f64], t: f64) -> usize {
    // slack absorbs rounding in node norms
    (SAMPLING_FACTOR * t * norm(h) * quad_max_norm * (1.0 - 1e-12)).ceil() as usize
}

/// `sum_i w_i e^{i t <xi_i, h>}`.
///
/// In dimension two and three the grid must satisfy
/// `resolution >= 16 t |h| max|xi_i|`; the one-dimensional rule is exact.
pub fn j_probe(quad: &LevelSetQuad, h: &[f64], t: f64) -> Result<Complex64> {
    let n = quad.dim();
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    if h.iter().all(|x| *x == 0.0) {
        return Err(Error::ZeroArgument);
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("t: must be positive, got {t}")));
    }
    if n >= 2 {
        let required = required_resolution(quad.max_node_norm(), h, t);
        if quad.resolution() < required {
            return Err(Error::UnderResolved { required, actual: quad.resolution() });
        }
    }
    let w = quad.weights();
    Ok(pairwise_range(0, w.len(), &|i| {
        let phase: f64 = quad.node(i).iter().zip(h).map(|(a, b)| a * b).sum();
        let (s, c) = (t * phase).sin_cos();
        Complex64::new(w[i] * c, w[i] * s)
    }))
}

/// `count` points from `t_min` to `t_max` in geometric progression, with
/// `round(per_decade * log10(t_max / t_min)) + 1` points.
pub fn geometric_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("t-range: need 0 < t-min < t-max, got [{t_min}, {t_max}]")));
    }
    if per_decade == 0 {
        return Err(Error::InvalidParameter("per-decade: must be positive".into()));
    }
    let intervals = ((t_max / t_min).log10() * per_decade as f64).round().max(1.0) as usize;
    let ratio = t_max / t_min;
    let mut grid: Vec<f64> = (0..=intervals).map(|i| t_min * ratio.powf(i as f64 / intervals as f64)).collect();
    grid[intervals] = t_max;
    Ok(grid)
}

/// Samples of `J(t)` along a geometric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProbe {
    sym: HomogeneousSymbol,
    h: Vec<f64>,
    t_grid: Vec<f64>,
    values: Vec<Complex64>,
    resolution: usize,
}

impl DecayProbe {
    /// Quadrature adequate for every `t` up to `t_max`: the next power of
    /// two above the sampling requirement, at least 64.
    pub fn quadrature_for(sym: &HomogeneousSymbol, h: &[f64], t_max: f64) -> Result<LevelSetQuad> {
        let probe = build_quadrature(sym, 64)?;
        let required = required_resolution(probe.max_node_norm(), h, t_max);
        let resolution = required.max(64).next_power_of_two();
        if resolution == 64 {
            return Ok(probe);
        }
        build_quadrature(sym, resolution)
    }

    /// Evaluates `J` on the grid with a quadrature from [`Self::quadrature_for`].
    pub fn run(sym: &HomogeneousSymbol, h: &[f64], t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        let t_grid = geometric_grid(t_min, t_max, per_decade)?;
        let quad = Self::quadrature_for(sym, h, t_max)?;
        let values = t_grid.iter().map(|&t| j_probe(&quad, h, t)).collect::<Result<Vec<_>>>()?;
        Self::from_values(sym.clone(), h.to_vec(), t_grid, values, quad.resolution())
    }

    /// Assembles a probe from precomputed values.
    pub fn from_values(
        sym: HomogeneousSymbol,
        h: Vec<f64>,
        t_grid: Vec<f64>,
        values: Vec<Complex64>,
        resolution: usize,
    ) -> Result<Self> {
        if t_grid.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: t_grid.len(), found: values.len() });
        }
        if h.len() != sym.dim() {
            return Err(Error::DimensionMismatch { expected: sym.dim(), found: h.len() });
        }
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.first().is_some_and(|t| !(*t > 0.0)) {
            return Err(Error::InvalidParameter("t-grid: must be positive and strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::DegenerateFit("non-finite probe value".into()));
        }
        Ok(Self { sym, h, t_grid, values, resolution })
    }

    pub fn symbol(&self) -> &HomogeneousSymbol {
        &self.sym
    }

    pub fn direction(&self) -> &[f64] {
        &self.h
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Sphere resolution the values were computed at.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Indices of the running-max envelope: the argmax of `|J|` over every
    /// window of [`ENVELOPE_WINDOW`] consecutive samples, each index kept once.
    pub fn envelope_indices(&self) -> Vec<usize> {
        let n = self.values.len();
        if n < ENVELOPE_WINDOW {
            return Vec::new();
        }
        let mut picked: Vec<usize> = Vec::new();
        for start in 0..=n - ENVELOPE_WINDOW {
            let mut best = start;
            for i in start + 1..start + ENVELOPE_WINDOW {
                if self.values[i].norm() > self.values[best].norm() {
                    best = i;
                }
            }
            if picked.last() != Some(&best) && !picked.contains(&best) {
                picked.push(best);
            }
        }
        picked.sort_unstable();
        picked
    }

    /// `(t, |J(t)|)` at the envelope indices.
    pub fn envelope(&self) -> Vec<(f64, f64)> {
        self.envelope_indices().into_iter().map(|i| (self.t_grid[i], self.values[i].norm())).collect()
    }
}

/// Log-log slope of the running-max envelope of `|J|`. The grid must span
/// at least two decades.
pub fn decay_slope(probe: &DecayProbe) -> Result<FitReport> {
    let grid = probe.t_grid();
    if grid.len() < ENVELOPE_WINDOW || grid[grid.len() - 1] / grid[0] < 100.0 * (1.0 - 1e-9) {
        return Err(Error::DegenerateFit("t-grid must span two decades".into()));
    }
    let env = probe.envelope();
    if env.iter().any(|(_, v)| !(*v > 0.0)) {
        return Err(Error::DegenerateFit("envelope touches zero".into()));
    }
    let xs: Vec<f64> = env.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = env.iter().map(|(_, v)| v.ln()).collect();
    fit_line(&xs, &ys, Design::LnT)
}

/// Value of the one-dimensional tail integral with its scaled size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailIntegral {
    pub value: Complex64,
    /// `|value| * a`.
    pub bound_ratio: f64,
}

/// Frequency-scaled point beyond which the asymptotic series is used.
const SERIES_START: f64 = 200.0;
const SERIES_TERMS: usize = 12;
const PANEL_ORDER: usize = 16;
const MAX_DEPTH: u32 = 40;

/// `int_B^inf e^{i w eta} eta^{-p} d eta` by its integration-by-parts series,
/// accurate once `w B >= 200`.
fn tail_series(w: f64, b: f64, p: f64) -> Complex64 {
    let iw = Complex64::new(0.0, w);
    let mut coeff = Complex64::new(b.powf(-p), 0.0) / iw;
    let mut sum = coeff;
    for j in 0..SERIES_TERMS - 1 {
        coeff *= (p + j as f64) / (iw * b);
        sum += coeff;
    }
    -Complex64::from_polar(1.0, w * b) * sum
}

fn gauss_panel<F: Fn(f64) -> Complex64>(rule: &GaussLegendre, a: f64, b: f64, f: &F) -> Complex64 {
    rule.mapped(a, b).map(|(x, w)| f(x) * w).sum()
}

fn adaptive<F: Fn(f64) -> Complex64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: Complex64,
    scale: f64,
    depth: u32,
    f: &F,
) -> Complex64 {
    let mid = 0.5 * (a + b);
    let left = gauss_panel(rule, a, mid, f);
    let right = gauss_panel(rule, mid, b, f);
    let refined = left + right;
    if depth >= MAX_DEPTH || (refined - whole).norm() <= 1e-15 * scale.max(refined.norm()) {
        return refined;
    }
    adaptive(rule, a, mid, left, scale, depth + 1, f) + adaptive(rule, mid, b, right, scale, depth + 1, f)
}

/// `int_a^b e^{i hmag eta} / eta d eta` for `0 < a <= b <= inf`.
///
/// One integration by parts leaves `e^{i w eta} eta^{-2}`, which is integrated
/// by adaptive Gauss-Legendre over half-period panels up to `w eta = 200` and
/// by its asymptotic series beyond.
pub fn one_d_tail(a: f64, b: f64, hmag: f64) -> Result<TailIntegral> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("a: must be positive and finite, got {a}")));
    }
    if !(b >= a) {
        return Err(Error::InvalidParameter(alloc::format!("b: must be at least a, got {b}")));
    }
    if !(hmag > 0.0 && hmag.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("hmag: must be positive, got {hmag}")));
    }
    if a == b {
        return Ok(TailIntegral { value: Complex64::new(0.0, 0.0), bound_ratio: 0.0 });
    }
    let w = hmag;
    let iw = Complex64::new(0.0, w);
    let boundary = |eta: f64| Complex64::from_polar(1.0 / eta, w * eta) / iw;
    let mut value = -boundary(a);
    if b.is_finite() {
        value += boundary(b);
    }

    let switch = a.max(SERIES_START / w);
    let numeric_end = b.min(switch);
    let integrand = |eta: f64| Complex64::from_polar(1.0 / (eta * eta), w * eta);
    let mut rest = Complex64::new(0.0, 0.0);
    if numeric_end > a {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let half = PI / w;
        let panels = ((numeric_end - a) / half).ceil().max(1.0) as usize;
        let width = (numeric_end - a) / panels as f64;
        for j in 0..panels {
            let lo = a + width * j as f64;
            let hi = if j + 1 == panels { numeric_end } else { lo + width };
            let whole = gauss_panel(&rule, lo, hi, &integrand);
            rest += adaptive(&rule, lo, hi, whole, width / (a * a), 0, &integrand);
        }
    }
    if b > switch {
        rest += tail_series(w, switch, 2.0);
        if b.is_finite() {
            rest -= tail_series(w, b, 2.0);
        }
    }
    value += rest / iw;
    Ok(TailIntegral { value, bound_ratio: value.norm() * a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci_si(x: f64) -> (f64, f64) {
        const EULER: f64 = 0.577_215_664_901_532_9;
        let (mut ci, mut si) = (EULER + x.ln(), 0.0);
        let mut term = 1.0;
        for k in 1..40 {
            term *= -x * x / ((2 * k - 1) as f64 * (2 * k) as f64);
            ci += term / (2 * k) as f64;
        }
        let mut term = x;
        si += term;
        for k in 1..40 {
            term *= -x * x / ((2 * k) as f64 * (2 * k + 1) as f64);
            si += term / (2 * k + 1) as f64;
        }
        (ci, si)
    }

    #[test]
    fn tail_matches_sine_cosine_integrals() {
        let (ci, si) = ci_si(1.0);
        let tail = one_d_tail(1.0, f64::INFINITY, 1.0).unwrap();
        assert!((tail.value.re + ci).abs() < 1e-12, "{}", tail.value);
        assert!((tail.value.im - (PI / 2.0 - si)).abs() < 1e-12);
        // finite interval: [Ci(3) - Ci(1)] + i [Si(3) - Si(1)], w = 1
        let (ci3, si3) = ci_si(3.0);
        let v = one_d_tail(1.0, 3.0, 1.0).unwrap().value;
        assert!((v.re - (ci3 - ci)).abs() < 1e-12);
        assert!((v.im - (si3 - si)).abs() < 1e-12);
    }

    #[test]
    fn tail_scales_with_frequency() {
        // substitution eta -> eta / w
        let a = one_d_tail(2.0, 50.0, 3.0).unwrap().value;
        let b = one_d_tail(6.0, 150.0, 1.0).unwrap().value;
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn tail_edge_cases() {
        assert_eq!(one_d_tail(2.0, 2.0, 1.0).unwrap().value, Complex64::new(0.0, 0.0));
        assert!(one_d_tail(0.0, 1.0, 1.0).is_err());
        assert!(one_d_tail(2.0, 1.0, 1.0).is_err());
        assert!(one_d_tail(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = geometric_grid(10.0, 1e3, 40).unwrap();
        assert_eq!(g.len(), 81);
        assert!((g[40] - 100.0).abs() < 1e-10);
        assert_eq!(g[80], 1e3);
    }

    #[test]
    fn probe_refuses_coarse_grid() {
        let lap = HomogeneousSymbol::laplacian(2).unwrap();
        let quad = build_quadrature(&lap, 64).unwrap();
        assert_eq!(j_probe(&quad, &[1.0, 0.0], 10.0).unwrap_err(), Error::UnderResolved { required: 160, actual: 64 });
        assert!(j_probe(&quad, &[1.0, 0.0], 4.0).is_ok());
        assert_eq!(j_probe(&quad, &[0.0, 0.0], 1.0).unwrap_err(), Error::ZeroArgument);
    }

    #[test]
    fn envelope_keeps_window_maxima() {
        let lap = HomogeneousSymbol::laplacian(2).unwrap();
        let t: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let v = [1.0, 5.0, 2.0, 1.0, 1.0, 1.0, 4.0, 1.0].map(|x| Complex64::new(x, 0.0)).to_vec();
        let probe = DecayProbe::from_values(lap, alloc::vec![1.0, 0.0], t, v, 64).unwrap();
        assert_eq!(probe.envelope_indices(), alloc::vec![1, 6]);
    }
}
