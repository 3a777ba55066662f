mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use weyllab_core::levelset::sphere_rule;
use weyllab_core::oscillatory::DecayProbe;
use weyllab_core::summation::{compensated_sum, pairwise_sum};
use weyllab_core::{
    admissibility_residual, build_quadrature, check_admissible, enumerate_band, j_probe, polarize, radial_gauge,
    torus_kernel, HomogeneousSymbol, KernelRequest, Monomial, SymTensor,
};

/// `a x^4 + b y^4 + c x^2 y^2` with `a, b > 0` and `c > -2 sqrt(ab)`.
fn quartic_symbol() -> impl Strategy<Value = HomogeneousSymbol> {
    (0.2f64..3.0, 0.2f64..3.0, -0.9f64..2.0).prop_map(|(a, b, c)| {
        let c = c * 2.0 * (a * b).sqrt();
        HomogeneousSymbol::polynomial(
            2,
            vec![Monomial::new(a, vec![4, 0]), Monomial::new(b, vec![0, 4]), Monomial::new(c, vec![2, 2])],
        )
        .unwrap()
    })
}

fn spd2() -> impl Strategy<Value = Vec<f64>> {
    (0.3f64..3.0, 0.3f64..3.0, -0.9f64..0.9).prop_map(|(a, b, r)| {
        let c = r * (a * b).sqrt();
        vec![a, c, c, b]
    })
}

fn metric_symbol() -> impl Strategy<Value = HomogeneousSymbol> {
    (spd2(), 0.5f64..5.0).prop_map(|(q, m)| HomogeneousSymbol::metric_power(2, q, m).unwrap())
}

fn any_symbol() -> impl Strategy<Value = HomogeneousSymbol> {
    prop_oneof![quartic_symbol(), metric_symbol()]
}

fn direction() -> impl Strategy<Value = Vec<f64>> {
    (0.0f64..2.0 * PI).prop_map(|t| vec![t.cos(), t.sin()])
}

fn sym_tensor() -> impl Strategy<Value = SymTensor> {
    (1usize..=3, 2usize..=4).prop_flat_map(|(dim, order)| {
        let len = weyllab_core::symbols::packed_len(dim, order);
        proptest::collection::vec(-2.0f64..2.0, len)
            .prop_map(move |entries| SymTensor::from_entries(dim, order, entries).unwrap())
    })
}

fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1e-300)
}

proptest! {
    #[test]
    fn homogeneity(sym in any_symbol(), xi in direction(), t in 0.5f64..2.0) {
        let scaled: Vec<f64> = xi.iter().map(|x| t * x).collect();
        let lhs = sym.eval(&scaled).unwrap();
        let rhs = t.powf(sym.degree()) * sym.eval(&xi).unwrap();
        prop_assert!(rel_close(lhs, rhs, rhs, 1e-10));
    }

    #[test]
    fn derivative_homogeneity(sym in quartic_symbol(), xi in direction(), t in 0.5f64..2.0, k in 1usize..=4) {
        let scaled: Vec<f64> = xi.iter().map(|x| t * x).collect();
        let a = sym.deriv_tensor(&scaled, k).unwrap();
        let b = sym.deriv_tensor(&xi, k).unwrap().scaled(t.powi(4 - k as i32));
        let scale = b.frobenius_norm();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            prop_assert!(rel_close(*x, *y, scale, 1e-8));
        }
    }

    #[test]
    fn polarization_round_trip(tensor in sym_tensor(), seed in proptest::collection::vec(-1.5f64..1.5, 12)) {
        let (dim, order) = (tensor.dim(), tensor.order());
        let points: Vec<Vec<f64>> = (0..order).map(|j| seed[j * dim..(j + 1) * dim].to_vec()).collect();
        let direct = tensor.eval(&points).unwrap();
        let recovered = polarize(|x| tensor.diagonal(x), &points);
        let scale = tensor.frobenius_norm() * points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).product::<f64>();
        prop_assert!(rel_close(recovered, direct, scale, 1e-10), "{recovered} vs {direct}");
    }

    #[test]
    fn derivatives_match_finite_differences(sym in any_symbol(), xi in direction(), k in 1usize..=3) {
        let analytic = sym.deriv_tensor(&xi, k).unwrap();
        let scale = analytic.frobenius_norm().max(sym.eval(&xi).unwrap());
        let lower = |p: &[f64], idx: &[usize]| sym.deriv_tensor(p, k - 1).unwrap().get(idx);
        for idx in analytic.indices() {
            let (last, rest) = idx.split_last().unwrap();
            let central = |h: f64| {
                let mut plus = xi.clone();
                let mut minus = xi.clone();
                plus[*last] += h;
                minus[*last] -= h;
                (lower(&plus, rest) - lower(&minus, rest)) / (2.0 * h)
            };
            let richardson = (4.0 * central(5e-3) - central(1e-2)) / 3.0;
            prop_assert!(rel_close(richardson, analytic.get(&idx), scale, 1e-5), "{idx:?}");
        }
    }

    #[test]
    fn gauge_lands_on_level_set(sym in any_symbol(), omega in direction()) {
        let r = radial_gauge(&sym, &omega).unwrap();
        let node: Vec<f64> = omega.iter().map(|x| r * x).collect();
        prop_assert!((sym.eval(&node).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn residual_is_scale_invariant(sym in any_symbol(), xi in direction(), t in 0.3f64..3.0, k in 2usize..=4) {
        let scaled: Vec<f64> = xi.iter().map(|x| t * x).collect();
        let a = admissibility_residual(&sym, &xi, k).unwrap();
        let b = admissibility_residual(&sym, &scaled, k).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn residual_of_radial_symbol_ignores_direction(m in 0.5f64..6.0, xi in direction(), k in 2usize..=4) {
        let sym = HomogeneousSymbol::euclidean_power(2, m).unwrap();
        let a = admissibility_residual(&sym, &xi, k).unwrap();
        let b = admissibility_residual(&sym, &[1.0, 0.0], k).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn kernel_is_hermitian(x in proptest::collection::vec(0.0f64..6.0, 2), y in proptest::collection::vec(0.0f64..6.0, 2), s in 0.0f64..1.5) {
        let sym = HomogeneousSymbol::laplacian(2).unwrap();
        let band = enumerate_band(&sym, 200.0).unwrap();
        let a = torus_kernel(&KernelRequest::weighted(s, x.clone(), y.clone(), 200.0), &band).unwrap();
        let b = torus_kernel(&KernelRequest::weighted(s, y, x, 200.0), &band).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn pairwise_sum_tracks_compensated_sum(values in proptest::collection::vec(-1e3f64..1e3, 0..2000)) {
        let fast = pairwise_sum(&values);
        let exact = compensated_sum(values.iter().copied());
        let scale: f64 = values.iter().map(|v| v.abs()).sum();
        prop_assert!((fast - exact).abs() <= 1e-13 * scale.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn probe_bounded_by_total_mass(sym in any_symbol(), h in direction(), t in 0.1f64..30.0) {
        let quad = DecayProbe::quadrature_for(&sym, &h, t).unwrap();
        let j = j_probe(&quad, &h, t).unwrap();
        prop_assert!(j.norm() <= quad.total() * (1.0 + 1e-12));
    }

    #[test]
    fn metric_mass_is_inverse_root_determinant(q in spd2()) {
        let sym = HomogeneousSymbol::metric_power(2, q.clone(), 2.0).unwrap();
        let nu = build_quadrature(&sym, 4096).unwrap().total();
        let expected = 2.0 * PI / (q[0] * q[3] - q[1] * q[2]).sqrt();
        prop_assert!((nu - expected).abs() <= 1e-6 * expected);
    }

    #[test]
    fn radial_symbol_has_plain_sphere_weights(m in 0.5f64..6.0) {
        let sym = HomogeneousSymbol::euclidean_power(2, m).unwrap();
        let quad = build_quadrature(&sym, 64).unwrap();
        let (_, sphere) = sphere_rule(2, 64).unwrap();
        for (w, s) in quad.weights().iter().zip(&sphere) {
            prop_assert!((w - s).abs() <= 1e-14);
        }
    }

    #[test]
    fn convex_metric_symbols_have_witness_two(sym in metric_symbol()) {
        let report = check_admissible(&sym, 2, 64, 1e-8).unwrap();
        prop_assert!(report.per_direction.iter().all(|d| d.witness == Some(2)));
    }

    #[test]
    fn elliptic_quartics_are_admissible(sym in quartic_symbol()) {
        let report = check_admissible(&sym, 4, 64, 1e-8).unwrap();
        prop_assert!(report.admissible_on_grid());
    }
}
