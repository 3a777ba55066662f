#![allow(dead_code)]

use std::f64::consts::PI;

use weyllab_core::{HomogeneousSymbol, Monomial};

pub fn quartic() -> HomogeneousSymbol {
    HomogeneousSymbol::polynomial(2, vec![Monomial::new(1.0, vec![4, 0]), Monomial::new(1.0, vec![0, 4])]).unwrap()
}

/// `J_nu(x)` by its power series; accurate to ~1e-13 for `x <= 20`.
pub fn bessel_series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(order as i32) / (1..=order).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-300 {
            break;
        }
    }
    sum
}

/// `J_0(x)` by the Hankel expansion; accurate to ~1e-15 for `x >= 50`.
pub fn bessel_j0_large(x: f64) -> f64 {
    let (mut p, mut q) = (0.0, 0.0);
    let mut term = 1.0;
    for k in 0..30 {
        // a_k(0) / x^k with a_k = prod_{j=1..k} (-(2j-1)^2) / (j 8)
        if k > 0 {
            let j = k as f64;
            term *= -(2.0 * j - 1.0).powi(2) / (8.0 * j * x);
        }
        if k % 2 == 0 {
            p += if k % 4 == 0 { term } else { -term };
        } else {
            q += if k % 4 == 1 { term } else { -term };
        }
    }
    let chi = x - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `K(k)` via the arithmetic-geometric mean.
pub fn elliptic_k(k: f64) -> f64 {
    let (mut a, mut b) = (1.0, (1.0 - k * k).sqrt());
    for _ in 0..40 {
        let next = (0.5 * (a + b), (a * b).sqrt());
        a = next.0;
        b = next.1;
    }
    PI / (2.0 * a)
}
