//! Randomized property tests for the arithmetic and special-function
//! invariants the identity checks lean on.

use proptest::prelude::*;
use sptl::arith::{
    b_delta_product, b_delta_sum, decompose_discriminant, is_fundamental, kronecker, moebius,
    sigma_power,
};
use sptl::density::sym_power_sum;
use sptl::localterms::chebyshev_x;
use sptl::specfun::{bessel_j, gamma, hyp2f1};
use sptl::{c64, C64};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Integers that are 0 or 1 mod 4, nonzero: valid discriminants.
fn discriminants() -> impl Strategy<Value = i64> {
    (-2000i64..2000)
        .prop_map(|n| n * 4 + [0i64, 1][(n.unsigned_abs() % 2) as usize])
        .prop_filter("nonzero", |&d| d != 0)
}

proptest! {
    #[test]
    fn gamma_recurrence(re in 0.2f64..5.0, im in -5.0f64..5.0) {
        let s = c64(re, im);
        let lhs = gamma(s + 1.0).unwrap();
        let rhs = s * gamma(s).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn gamma_conjugation(re in 0.2f64..6.0, im in -6.0f64..6.0) {
        let s = c64(re, im);
        let lhs = gamma(s.conj()).unwrap();
        let rhs = gamma(s).unwrap().conj();
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn gamma_duplication(re in 0.2f64..3.0, im in -3.0f64..3.0) {
        let s = c64(re, im);
        let lhs = gamma(s * 2.0).unwrap();
        let rhs = gamma(s).unwrap() * gamma(s + 0.5).unwrap()
            * (s * 2.0 - 1.0).expf(2.0) / std::f64::consts::PI.sqrt();
        prop_assert!(rel(lhs, rhs) < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn bessel_three_term_recurrence(n in 1u32..20, x in 0.1f64..30.0) {
        let jm = bessel_j(n - 1, x).unwrap();
        let jp = bessel_j(n + 1, x).unwrap();
        let jn = bessel_j(n, x).unwrap();
        let lhs = jm + jp;
        let rhs = 2.0 * n as f64 / x * jn;
        let scale = jm.abs().max(jp.abs()).max(jn.abs()).max(1e-3);
        prop_assert!((lhs - rhs).abs() < 1e-9 * scale, "n={n} x={x}: {lhs} vs {rhs}");
    }

    #[test]
    fn hyp2f1_binomial_collapse(
        are in -2.5f64..2.5,
        aim in -2.0f64..2.0,
        c in 0.3f64..4.0,
        x in -5.0f64..0.95,
    ) {
        // 2F1(a, c; c; x) = (1 - x)^{-a}
        let a = c64(are, aim);
        let lhs = hyp2f1(a, c64(c, 0.0), c64(c, 0.0), x).unwrap();
        let rhs = c64(1.0 - x, 0.0).powc(-a);
        prop_assert!(rel(lhs, rhs) < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn hyp2f1_euler_transformation(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        c in 0.3f64..4.0,
        x in -3.0f64..0.9,
    ) {
        let (a, b, c) = (c64(a, 0.0), c64(b, 0.0), c64(c, 0.0));
        let lhs = hyp2f1(a, b, c, x).unwrap();
        let rhs = c64(1.0 - x, 0.0).powc(c - a - b) * hyp2f1(c - a, c - b, c, x).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-8 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn kronecker_completely_multiplicative(d in discriminants(), m in 1u64..300, n in 1u64..300) {
        prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
    }

    #[test]
    fn kronecker_periodic_for_fundamental(d in discriminants(), n in 1u64..500) {
        prop_assume!(is_fundamental(d));
        prop_assert_eq!(kronecker(d, n), kronecker(d, n + d.unsigned_abs()));
    }

    #[test]
    fn discriminant_decomposition_roundtrip(d in discriminants()) {
        let dd = decompose_discriminant(d).unwrap();
        prop_assert_eq!(dd.fund * (dd.conductor * dd.conductor) as i64, d);
        prop_assert!(dd.fund == 1 || is_fundamental(dd.fund));
    }

    #[test]
    fn moebius_multiplicative_on_coprime(m in 1u64..3000, n in 1u64..3000) {
        prop_assume!(gcd(m, n) == 1);
        prop_assert_eq!(moebius(m * n), moebius(m) * moebius(n));
    }

    #[test]
    fn sigma_power_multiplicative_on_coprime(
        m in 1u64..300,
        n in 1u64..300,
        nu_re in -1.5f64..1.5,
        nu_im in -2.0f64..2.0,
    ) {
        prop_assume!(gcd(m, n) == 1);
        let nu = c64(nu_re, nu_im);
        let lhs = sigma_power(nu, m * n);
        let rhs = sigma_power(nu, m) * sigma_power(nu, n);
        prop_assert!(rel(lhs, rhs) < 1e-11, "{lhs} vs {rhs}");
    }

    #[test]
    fn chebyshev_sine_ratio_identity(n in 0u32..30, theta in 0.05f64..3.09) {
        let lhs = chebyshev_x(n, 2.0 * theta.cos()) * theta.sin();
        let rhs = ((n as f64 + 1.0) * theta).sin();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (n as f64 + 1.0), "n={n} theta={theta}");
    }

    #[test]
    fn chebyshev_bounded_on_segment(n in 0u32..30, x in -2.0f64..2.0) {
        prop_assert!(chebyshev_x(n, x).abs() <= (n as f64 + 1.0) * (1.0 + 1e-9));
    }

    #[test]
    fn sym_power_sum_bounded(r in 1u32..=8, m in 1u32..12, x in -2.0f64..2.0) {
        let v = sym_power_sum(x, r, m).unwrap();
        prop_assert!(v.abs() <= (r as f64 + 1.0) * (1.0 + 1e-9), "r={r} m={m} x={x}: {v}");
    }

    #[test]
    fn conductor_polynomial_sum_equals_product(
        d in discriminants(),
        f in 1u32..=6,
        s_re in 0.6f64..1.8,
        s_im in -1.0f64..1.0,
    ) {
        prop_assume!(is_fundamental(d));
        let delta = d * (f as i64) * (f as i64);
        let dd = decompose_discriminant(delta).unwrap();
        let s = c64(s_re, s_im);
        let lhs = b_delta_sum(&dd, s);
        let rhs = b_delta_product(&dd, s).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9, "delta={delta} s={s}: {lhs} vs {rhs}");
    }
}
