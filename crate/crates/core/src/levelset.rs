//! Quadrature on the level set `S* = {sigma = 1}` and its density `nu`.
//!
//! `S*` is parametrized through the unit sphere by the radial gauge
//! `omega -> r(omega) omega` with `r(omega) = sigma(omega)^{-1/m}`. Writing
//! Lebesgue measure in polar form, `d xi = rho^{n-1} d rho d omega`, and
//! substituting `rho = t r(omega)` gives
//!
//! `int u(xi) d xi = int_0^inf int_{S^{n-1}} u(t r(omega) omega) r(omega)^n d omega t^{n-1} dt`,
//!
//! so `nu` is the push-forward of `sigma(omega)^{-n/m} d omega`. A sphere
//! rule with weights `w_j` at `omega_j` therefore becomes a level-set rule
//! with nodes `r(omega_j) omega_j` and weights `sigma(omega_j)^{-n/m} w_j`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::GaussLegendre;
use crate::symbols::HomogeneousSymbol;
use crate::{Error, Result};

/// Smallest accepted sphere-grid resolution.
pub const MIN_RESOLUTION: usize = 8;

/// Quadrature nodes on `S*` with weights realizing `d nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetQuad {
    dim: usize,
    resolution: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LevelSetQuad {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `nu(S*)` as seen by this rule.
    pub fn total(&self) -> f64 {
        crate::summation::pairwise_sum(&self.weights)
    }

    /// Largest Euclidean norm of a node.
    pub fn max_node_norm(&self) -> f64 {
        self.nodes().map(norm).fold(0.0, f64::max)
    }

    /// Smallest Euclidean norm of a node.
    pub fn min_node_norm(&self) -> f64 {
        self.nodes().map(norm).fold(f64::INFINITY, f64::min)
    }
}

/// Test integrands for [`verify_disintegration`], both radial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `exp(-|xi|^2)`
    Gaussian,
    /// `(1 - |xi|^2)_+^2`
    Bump,
}

impl TestFunction {
    /// Exact integral over `R^n`.
    pub fn reference(self, dim: usize) -> Result<f64> {
        match (self, dim) {
            (TestFunction::Gaussian, n) => Ok(PI.powf(0.5 * n as f64)),
            (TestFunction::Bump, 1) => Ok(16.0 / 15.0),
            (TestFunction::Bump, 2) => Ok(PI / 3.0),
            (TestFunction::Bump, 3) => Ok(32.0 * PI / 105.0),
            (TestFunction::Bump, n) => Err(Error::UnsupportedDimension(n)),
        }
    }

    fn radial(self, rho: f64) -> f64 {
        match self {
            TestFunction::Gaussian => (-rho * rho).exp(),
            TestFunction::Bump => {
                let v = 1.0 - rho * rho;
                if v > 0.0 {
                    v * v
                } else {
                    0.0
                }
            }
        }
    }
}

/// `r(omega) = sigma(omega)^{-1/m}`, the distance along `omega` to `S*`
/// in units of `|omega|`.
pub fn radial_gauge(sym: &HomogeneousSymbol, omega: &[f64]) -> Result<f64> {
    Ok(sym.eval(omega)?.powf(-1.0 / sym.degree()))
}

/// Unit-sphere rule: directions (flattened) and weights.
///
/// `n = 1`: `{-1, +1}` with unit weights; `n = 2`: `resolution` equally
/// spaced angles (trapezoid, exact on trigonometric polynomials of degree
/// below `resolution`); `n = 3`: `resolution` azimuths times
/// `resolution / 2` Gauss-Legendre heights.
pub fn sphere_rule(dim: usize, resolution: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidParameter(alloc::format!("resolution {resolution} below minimum {MIN_RESOLUTION}")));
    }
    match dim {
        1 => Ok((alloc::vec![1.0, -1.0], alloc::vec![1.0, 1.0])),
        2 => {
            let step = 2.0 * PI / resolution as f64;
            let mut dirs = Vec::with_capacity(2 * resolution);
            for j in 0..resolution {
                let (s, c) = (step * j as f64).sin_cos();
                dirs.push(c);
                dirs.push(s);
            }
            Ok((dirs, alloc::vec![step; resolution]))
        }
        3 => {
            let heights = GaussLegendre::new((resolution / 2).max(2));
            let step = 2.0 * PI / resolution as f64;
            let mut dirs = Vec::new();
            let mut weights = Vec::new();
            for (&z, &wz) in heights.nodes().iter().zip(heights.weights()) {
                let r = (1.0 - z * z).sqrt();
                for j in 0..resolution {
                    let (s, c) = (step * j as f64).sin_cos();
                    dirs.extend_from_slice(&[r * c, r * s, z]);
                    weights.push(wz * step);
                }
            }
            Ok((dirs, weights))
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Level-set rule for `sym` at the given sphere resolution.
pub fn build_quadrature(sym: &HomogeneousSymbol, resolution: usize) -> Result<LevelSetQuad> {
    let dim = sym.dim();
    let (dirs, sphere_weights) = sphere_rule(dim, resolution)?;
    let exponent = -(dim as f64) / sym.degree();
    let mut nodes = Vec::with_capacity(dirs.len());
    let mut weights = Vec::with_capacity(sphere_weights.len());
    for (omega, &w) in dirs.chunks_exact(dim).zip(&sphere_weights) {
        let value = sym.eval(omega)?;
        let r = value.powf(-1.0 / sym.degree());
        nodes.extend(omega.iter().map(|x| r * x));
        weights.push(value.powf(exponent) * w);
    }
    Ok(LevelSetQuad { dim, resolution, nodes, weights })
}

/// `nu(S*)`.
pub fn nu_total(sym: &HomogeneousSymbol, resolution: usize) -> Result<f64> {
    Ok(build_quadrature(sym, resolution)?.total())
}

/// Relative error between `int u d xi` and its radial disintegration
/// `int_0^T sum_i w_i u(t xi_i) t^{n-1} dt`.
///
/// The Gaussian is integrated on `[0, T]` with `T = max(10, 7 / min|xi_i|)`
/// (tail below `e^{-49}`) by composite 16-point Gauss-Legendre; the bump is
/// a polynomial on each ray's support `[0, 1/|xi_i|]` and is integrated
/// there by a single 8-point rule.
pub fn verify_disintegration(sym: &HomogeneousSymbol, quad: &LevelSetQuad, test: TestFunction) -> Result<f64> {
    let dim = sym.dim();
    if quad.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: quad.dim() });
    }
    let reference = test.reference(dim)?;
    let power = (dim - 1) as i32;
    let radial_sum = |i: usize, rule: &GaussLegendre, panels: usize, end: f64| {
        let rho = norm(quad.node(i));
        let width = end / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = width * p as f64;
            acc += rule.integrate(a, a + width, |t| test.radial(t * rho) * t.powi(power));
        }
        acc
    };
    let total = match test {
        TestFunction::Gaussian => {
            let rule = GaussLegendre::new(16);
            let end = 10f64.max(7.0 / quad.min_node_norm());
            let panels = (4.0 * end * quad.max_node_norm()).ceil().max(8.0) as usize;
            crate::summation::pairwise_range(0, quad.len(), &|i| quad.weights()[i] * radial_sum(i, &rule, panels, end))
        }
        TestFunction::Bump => {
            let rule = GaussLegendre::new(8);
            crate::summation::pairwise_range(0, quad.len(), &|i| {
                let end = 1.0 / norm(quad.node(i));
                quad.weights()[i] * radial_sum(i, &rule, 1, end)
            })
        }
    };
    Ok((total - reference).abs() / reference.abs())
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::Monomial;
    use alloc::vec;

    fn quartic() -> HomogeneousSymbol {
        HomogeneousSymbol::polynomial(2, vec![Monomial::new(1.0, vec![4, 0]), Monomial::new(1.0, vec![0, 4])]).unwrap()
    }

    #[test]
    fn radial_gauge_examples() {
        let lap = HomogeneousSymbol::laplacian(2).unwrap();
        assert_eq!(radial_gauge(&lap, &[0.0, 1.0]).unwrap(), 1.0);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let r = radial_gauge(&quartic(), &[s, s]).unwrap();
        assert!((r - 2f64.powf(0.25)).abs() < 1e-14);
        let m = HomogeneousSymbol::metric_power(2, vec![4.0, 0.0, 0.0, 1.0], 2.0).unwrap();
        assert!((radial_gauge(&m, &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(radial_gauge(&lap, &[0.0, 0.0]), Err(Error::ZeroArgument));
    }

    #[test]
    fn one_dimensional_rule_by_hand() {
        // 4 xi^2: nodes +-1/2 with weights 1/2
        let sym = HomogeneousSymbol::polynomial(1, vec![Monomial::new(4.0, vec![2])]).unwrap();
        let quad = build_quadrature(&sym, 8).unwrap();
        assert_eq!(quad.len(), 2);
        assert!((quad.node(0)[0] - 0.5).abs() < 1e-15);
        assert!((quad.node(1)[0] + 0.5).abs() < 1e-15);
        assert_eq!(quad.weights(), &[0.5, 0.5]);
        assert!((quad.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circle_total_is_two_pi() {
        let lap = HomogeneousSymbol::laplacian(2).unwrap();
        for res in [8, 64, 1000] {
            assert!((nu_total(&lap, res).unwrap() - 2.0 * PI).abs() < 1e-12);
        }
        for m in [1.0, 3.0, 7.5] {
            let s = HomogeneousSymbol::euclidean_power(2, m).unwrap();
            assert!((nu_total(&s, 128).unwrap() - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_total_is_four_pi() {
        let lap = HomogeneousSymbol::laplacian(3).unwrap();
        assert!((nu_total(&lap, 64).unwrap() - 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn nodes_lie_on_level_set() {
        let quad = build_quadrature(&quartic(), 512).unwrap();
        for node in quad.nodes() {
            assert!((quartic().eval(node).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(quad.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        let lap4 = HomogeneousSymbol::laplacian(4).unwrap();
        assert_eq!(build_quadrature(&lap4, 64).unwrap_err(), Error::UnsupportedDimension(4));
        let lap = HomogeneousSymbol::laplacian(2).unwrap();
        assert!(matches!(build_quadrature(&lap, 4), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn disintegration_examples() {
        let lap = HomogeneousSymbol::laplacian(2).unwrap();
        let quad = build_quadrature(&lap, 256).unwrap();
        assert!(verify_disintegration(&lap, &quad, TestFunction::Gaussian).unwrap() <= 1e-8);
        assert!(verify_disintegration(&lap, &quad, TestFunction::Bump).unwrap() <= 1e-12);

        let one = HomogeneousSymbol::polynomial(1, vec![Monomial::new(4.0, vec![2])]).unwrap();
        let q1 = build_quadrature(&one, 8).unwrap();
        assert!(verify_disintegration(&one, &q1, TestFunction::Gaussian).unwrap() <= 1e-10);
        assert!(verify_disintegration(&one, &q1, TestFunction::Bump).unwrap() <= 1e-12);
    }
}
