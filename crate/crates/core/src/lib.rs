//! Numerical core for truncated weighted spectral kernels.
//!
//! The crate computes the kernels
//! `K_L^z(x, y) = sum_{0 < lambda_k <= L} lambda_k^z e_k(x) conj(e_k(y))`
//! on two model problems with exactly known spectra (flat tori carrying a
//! positive homogeneous constant-coefficient symbol, and the Dirichlet
//! Laplacian on `(0, pi)`), together with the limit objects those kernels
//! converge to: the rescaled limit kernel below the critical exponent, the
//! logarithmic law at the critical exponent, oscillatory integrals over the
//! symbol level set, and the admissibility test on symbols.
//!
//! Everything here is pure computation on immutable inputs. The crate is
//! `no_std` and only needs `alloc`; IO, file formats and the command line
//! live in the `weyllab` companion crate.

#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod admissibility;
pub mod asymptotics;
mod error;
pub mod levelset;
pub mod oscillatory;
pub mod quadrature;
pub mod spectra;
pub mod summation;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use admissibility::{admissibility_residual, c_constant, check_admissible, AdmissibilityReport, DirectionCheck};
pub use asymptotics::{
    fit_line, g_constant, limit_kernel, log_fit_diagonal, offdiag_green_fit, q_spread, rescaled_error_scan, Design,
    FitReport, GreenFitReport, LogLawReport, ScanRow,
};
pub use levelset::{build_quadrature, nu_total, radial_gauge, verify_disintegration, LevelSetQuad, TestFunction};
pub use oscillatory::{decay_slope, j_probe, one_d_tail, DecayProbe, TailIntegral};
pub use spectra::{
    dirichlet_kernel, enumerate_band, kernel_weighted, torus_kernel, weyl_count, KernelRequest, Model, SpectralBand,
    WeightPaths, WeylCount,
};
pub use symbols::{euler_check, polarize, tensor_power, HomogeneousSymbol, Monomial, SymTensor};
