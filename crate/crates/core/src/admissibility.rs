//! Pointwise and on-grid checks of the admissibility condition: at each
//! direction some order `2 <= k <= k0` must break the identity
//! `sigma^{k-1} d^k sigma = C(m, k) (d sigma)^{(x) k}`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::levelset::sphere_rule;
use crate::symbols::{tensor_power, HomogeneousSymbol, SymbolForm};
use crate::{Error, Result};

/// Default residual above which an order counts as a witness.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;
/// Smallest sphere-grid resolution accepted by [`check_admissible`].
pub const MIN_GRID_RESOLUTION: usize = 64;

/// `m (m - 1) ... (m - k + 1) / m^k`.
pub fn c_constant(m: f64, k: usize) -> f64 {
    (0..k).map(|j| (m - j as f64) / m).product()
}

/// Largest order the residual is defined for: 4 for metric powers, the
/// degree for polynomials.
pub fn max_order(sym: &HomogeneousSymbol) -> usize {
    match sym.form() {
        SymbolForm::Polynomial(_) => sym.degree() as usize,
        SymbolForm::MetricPower { .. } => sym.max_derivative_order().unwrap_or(usize::MAX),
    }
}

fn check_order(sym: &HomogeneousSymbol, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(alloc::format!("k: must be at least 2, got {k}")));
    }
    let max = max_order(sym);
    if k > max {
        return Err(Error::UnsupportedOrder { order: k, max });
    }
    Ok(())
}

/// `|A - B| / (|A| + |B| + 1e-300)` in Frobenius norm, with
/// `A = sigma^{k-1} d^k sigma` and `B = C(m, k) (d sigma)^{(x) k}`.
pub fn admissibility_residual(sym: &HomogeneousSymbol, xi: &[f64], k: usize) -> Result<f64> {
    check_order(sym, k)?;
    let sigma = sym.eval(xi)?;
    let grad = sym.gradient(xi)?;
    residual_with(sym, xi, k, sigma, &grad)
}

fn residual_with(sym: &HomogeneousSymbol, xi: &[f64], k: usize, sigma: f64, grad: &[f64]) -> Result<f64> {
    let a = sym.deriv_tensor(xi, k)?.scaled(sigma.powi(k as i32 - 1));
    let b = tensor_power(grad, k).scaled(c_constant(sym.degree(), k));
    let diff = a.sub(&b)?.frobenius_norm();
    Ok(diff / (a.frobenius_norm() + b.frobenius_norm() + 1e-300))
}

/// Residuals at one grid direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCheck {
    pub direction: Vec<f64>,
    /// Residual for `k = 2, ..., k0`.
    pub residuals: Vec<f64>,
    /// Smallest `k` whose residual exceeds the threshold.
    pub witness: Option<usize>,
}

impl DirectionCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Result of scanning a sphere grid. Passing means admissible on this grid
/// at this resolution only.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub k0: usize,
    pub grid_resolution: usize,
    pub threshold: f64,
    pub per_direction: Vec<DirectionCheck>,
    /// Minimum over the grid of the maximum residual over `k`.
    pub min_max_residual: f64,
}

impl AdmissibilityReport {
    /// True when every grid direction has a witness.
    pub fn admissible_on_grid(&self) -> bool {
        self.per_direction.iter().all(|d| d.witness.is_some())
    }

    /// Largest witness over the grid, the order controlling uniform decay.
    pub fn uniform_witness(&self) -> Option<usize> {
        self.per_direction.iter().map(|d| d.witness).try_fold(0, |acc, w| w.map(|w| acc.max(w)))
    }

    /// Directions without a witness.
    pub fn failures(&self) -> impl Iterator<Item = &DirectionCheck> {
        self.per_direction.iter().filter(|d| d.witness.is_none())
    }
}

/// Checks one direction for all orders `2..=k0`.
pub fn check_direction(sym: &HomogeneousSymbol, omega: &[f64], k0: usize, threshold: f64) -> Result<DirectionCheck> {
    check_order(sym, k0)?;
    let sigma = sym.eval(omega)?;
    let grad = sym.gradient(omega)?;
    let residuals = (2..=k0).map(|k| residual_with(sym, omega, k, sigma, &grad)).collect::<Result<Vec<_>>>()?;
    let witness = residuals.iter().position(|r| *r > threshold).map(|i| i + 2);
    Ok(DirectionCheck { direction: omega.to_vec(), residuals, witness })
}

/// Unit directions of the sphere grid used by [`check_admissible`].
pub fn grid_directions(dim: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::InvalidParameter(alloc::format!(
            "resolution: must be at least {MIN_GRID_RESOLUTION}, got {resolution}"
        )));
    }
    let (dirs, _) = sphere_rule(dim, resolution)?;
    Ok(dirs.chunks_exact(dim).map(|c| c.to_vec()).collect())
}

/// Assembles a report from per-direction checks.
pub fn report_from(
    k0: usize,
    grid_resolution: usize,
    threshold: f64,
    per_direction: Vec<DirectionCheck>,
) -> AdmissibilityReport {
    let min_max_residual = per_direction.iter().map(DirectionCheck::max_residual).fold(f64::INFINITY, f64::min);
    AdmissibilityReport { k0, grid_resolution, threshold, per_direction, min_max_residual }
}

/// Scans the sphere grid of the given resolution.
pub fn check_admissible(
    sym: &HomogeneousSymbol,
    k0: usize,
    resolution: usize,
    threshold: f64,
) -> Result<AdmissibilityReport> {
    check_order(sym, k0)?;
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(alloc::format!("threshold: must lie in [0, 1), got {threshold}")));
    }
    let per_direction = grid_directions(sym.dim(), resolution)?
        .iter()
        .map(|omega| check_direction(sym, omega, k0, threshold))
        .collect::<Result<Vec<_>>>()?;
    Ok(report_from(k0, resolution, threshold, per_direction))
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
    fn constants() {
        assert_eq!(c_constant(2.0, 2), 0.5);
        assert_eq!(c_constant(4.0, 3), 3.0 / 8.0);
        assert_eq!(c_constant(4.0, 4), 3.0 / 32.0);
    }

    #[test]
    fn hand_residuals() {
        let lap = HomogeneousSymbol::laplacian(2).unwrap();
        let r = admissibility_residual(&lap, &[1.0, 0.0], 2).unwrap();
        assert!((r - 2.0 / (2.0 * 2f64.sqrt() + 2.0)).abs() < 1e-14);
        let q = quartic();
        assert_eq!(admissibility_residual(&q, &[1.0, 0.0], 2).unwrap(), 0.0);
        assert!(admissibility_residual(&q, &[1.0, 0.0], 4).unwrap() > 0.1);
    }

    #[test]
    fn order_limits() {
        let q = quartic();
        assert_eq!(
            admissibility_residual(&q, &[1.0, 0.0], 5).unwrap_err(),
            Error::UnsupportedOrder { order: 5, max: 4 }
        );
        let metric = HomogeneousSymbol::euclidean_power(2, 6.0).unwrap();
        assert_eq!(
            admissibility_residual(&metric, &[1.0, 0.0], 5).unwrap_err(),
            Error::UnsupportedOrder { order: 5, max: 4 }
        );
        assert!(admissibility_residual(&metric, &[1.0, 0.0], 1).is_err());
    }

    #[test]
    fn quartic_witnesses() {
        let q = quartic();
        let report = check_admissible(&q, 4, 64, DEFAULT_THRESHOLD).unwrap();
        assert!(report.admissible_on_grid());
        assert_eq!(report.uniform_witness(), Some(4));
        for d in &report.per_direction {
            let on_axis = d.direction.iter().any(|x| x.abs() < 1e-12);
            assert_eq!(d.witness, Some(if on_axis { 4 } else { 2 }), "{:?}", d.direction);
        }
        let report = check_admissible(&q, 3, 64, DEFAULT_THRESHOLD).unwrap();
        assert!(!report.admissible_on_grid());
        assert_eq!(report.failures().count(), 4);
    }
}
