mod common;

use std::f64::consts::PI;

use common::{bessel_j0_large, bessel_series, elliptic_k, quartic};
use weyllab_core::oscillatory::DecayProbe;
use weyllab_core::spectra::sublevel_volume;
use weyllab_core::{
    build_quadrature, g_constant, j_probe, limit_kernel, nu_total, Complex64, Error, HomogeneousSymbol,
};

#[test]
fn bessel_oracles_agree_where_both_apply() {
    assert!((bessel_series(0, 10.0) + 0.245_935_764_451_348_3).abs() < 1e-13);
    assert!((bessel_j0_large(100.0) - 0.019_985_850_304_223_12).abs() < 1e-15);
    assert!((bessel_series(1, 2.0) - 0.576_724_807_756_873_4).abs() < 1e-14);
}

#[test]
fn limit_kernel_off_diagonal_disk() {
    // (1/2pi) int_0^1 J_0(2t) t dt = J_1(2) / (4 pi)
    let lap = HomogeneousSymbol::laplacian(2).unwrap();
    let quad = build_quadrature(&lap, 256).unwrap();
    let v = limit_kernel(&lap, 0.0, &[0, 0], &[0, 0], &[2.0, 0.0], &quad).unwrap();
    assert!((v.re - bessel_series(1, 2.0) / (4.0 * PI)).abs() < 1e-8);
    assert!(v.im.abs() < 1e-14);
}

#[test]
fn limit_kernel_at_origin_is_radial_integral() {
    for sym in [HomogeneousSymbol::laplacian(2).unwrap(), quartic(), HomogeneousSymbol::laplacian(3).unwrap()] {
        let n = sym.dim() as f64;
        let quad = build_quadrature(&sym, 256).unwrap();
        let nu = quad.total();
        let critical = sym.dim() as f64 / sym.degree();
        for s in [0.0, 0.3 * critical, 0.6 * critical, 0.9 * critical] {
            let expected = nu / ((2.0 * PI).powf(n) * (n - sym.degree() * s));
            let v = limit_kernel(&sym, s, &[0; 3][..sym.dim()], &[0; 3][..sym.dim()], &vec![0.0; sym.dim()], &quad)
                .unwrap();
            assert!((v.re - expected).abs() <= 1e-8 * expected, "s={s}: {} vs {expected}", v.re);
        }
    }
}

#[test]
fn limit_kernel_is_hermitian_in_offset() {
    let sym = quartic();
    let quad = build_quadrature(&sym, 512).unwrap();
    for (alpha, beta) in [([0, 0], [0, 0]), ([1, 0], [0, 0]), ([1, 0], [0, 1]), ([2, 0], [0, 1])] {
        for h in [[0.3, -1.1], [1.7, 0.4], [-0.2, 2.0]] {
            let neg = [-h[0], -h[1]];
            let a = limit_kernel(&sym, 0.25, &alpha, &beta, &h, &quad).unwrap();
            let plain = limit_kernel(&sym, 0.25, &[0, 0], &[0, 0], &h, &quad).unwrap();
            let plain_neg = limit_kernel(&sym, 0.25, &[0, 0], &[0, 0], &neg, &quad).unwrap();
            assert!((plain - plain_neg.conj()).norm() < 1e-12);
            // derivatives swap roles: F_{alpha,beta}(-h) = conj F_{beta,alpha}(h)
            let b = limit_kernel(&sym, 0.25, &beta, &alpha, &neg, &quad).unwrap();
            assert!((a - b.conj()).norm() < 1e-12, "{alpha:?} {beta:?} {h:?}");
        }
    }
}

#[test]
fn rescaled_diagonal_limit_is_sublevel_volume() {
    for sym in [HomogeneousSymbol::laplacian(2).unwrap(), quartic()] {
        let quad = build_quadrature(&sym, 4096).unwrap();
        let v = limit_kernel(&sym, 0.0, &[0, 0], &[0, 0], &[0.0, 0.0], &quad).unwrap();
        let vol = sublevel_volume(&sym).unwrap() / (4.0 * PI * PI);
        assert!((v.re - vol).abs() < 1e-8);
    }
}

#[test]
fn g_constant_of_quartic() {
    let nu = 4.0 * elliptic_k(1.0 / 2f64.sqrt());
    let quad = build_quadrature(&quartic(), 4096).unwrap();
    assert!((quad.total() - nu).abs() < 1e-4);
    assert!((g_constant(&quad) - nu / (4.0 * PI * PI)).abs() < 1e-6);
    assert!((g_constant(&quad) - 0.18787).abs() < 5e-5);
}

#[test]
fn probe_matches_bessel() {
    let lap = HomogeneousSymbol::laplacian(2).unwrap();
    let quad = build_quadrature(&lap, 4096).unwrap();
    let j = j_probe(&quad, &[0.6, 0.8], 10.0).unwrap();
    assert!((j.re - 2.0 * PI * bessel_series(0, 10.0)).abs() < 1e-8);
    assert!(j.im.abs() < 1e-12);
    let j = j_probe(&quad, &[1.0, 0.0], 100.0).unwrap();
    assert!((j.norm() - 2.0 * PI * bessel_j0_large(100.0).abs()).abs() < 1e-10);
    assert!((j.norm() - 0.12558).abs() < 1e-5);
}

#[test]
fn probe_tends_to_total_mass() {
    for sym in [HomogeneousSymbol::laplacian(2).unwrap(), quartic(), HomogeneousSymbol::laplacian(3).unwrap()] {
        let quad = build_quadrature(&sym, 128).unwrap();
        let h = vec![1.0; sym.dim()];
        let j = j_probe(&quad, &h, 1e-7).unwrap();
        assert!((j - Complex64::new(quad.total(), 0.0)).norm() < 1e-6);
    }
}

#[test]
fn probe_conjugates_under_reflection() {
    let quad = build_quadrature(&quartic(), 1024).unwrap();
    for t in [0.5, 3.0, 20.0] {
        let a = j_probe(&quad, &[0.3, 0.9], t).unwrap();
        let b = j_probe(&quad, &[-0.3, -0.9], t).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
    }
}

#[test]
fn decay_probe_picks_adequate_resolution() {
    let probe = DecayProbe::run(&quartic(), &[1.0, 0.0], 10.0, 100.0, 20).unwrap();
    // 16 * 100 * 2^{1/4} = 1903 -> 2048
    assert_eq!(probe.resolution(), 2048);
    assert_eq!(probe.t_grid().len(), 21);
    let nu = nu_total(&quartic(), 2048).unwrap();
    assert!(probe.values().iter().all(|v| v.norm() <= nu));
}

#[test]
fn three_dimensional_probe_refuses_coarse_grid() {
    let quad = build_quadrature(&HomogeneousSymbol::laplacian(3).unwrap(), 32).unwrap();
    let err = j_probe(&quad, &[0.0, 0.0, 1.0], 5.0).unwrap_err();
    assert_eq!(err, Error::UnderResolved { required: 80, actual: 32 });
}
