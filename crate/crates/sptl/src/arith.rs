//! Multiplicative arithmetic: Kronecker characters, discriminant
//! decomposition, and the conductor-correction polynomial `B_Δ(s)` together
//! with the quadratic L-series `L(s, Δ)`.

use crate::specfun::{dirichlet_l, riemann_zeta, Kahan};
use crate::{C64, Error, Result};
use std::sync::OnceLock;

/// Prime table up to 10^6 for trial division, built once.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = 1_000_000usize;
        let mut is_comp = vec![false; limit + 1];
        let mut primes = Vec::new();
        for p in 2..=limit {
            if !is_comp[p] {
                primes.push(p as u32);
                let mut q = p * p;
                while q <= limit {
                    is_comp[q] = true;
                    q += p;
                }
            }
        }
        primes
    })
}

/// Factorization by trial division; n <= 10^9 (or any n whose second-largest
/// prime factor is below 10^6).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for &p in small_primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Kronecker symbol (d | n) for positive n, completely multiplicative in n.
pub fn kronecker(d: i64, n: u64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut a = d;
    let mut n = n as i64;
    let mut result = 1i32;
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let am8 = a.rem_euclid(8);
        if am8 == 3 || am8 == 5 {
            result = -result;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let nm8 = n % 8;
            if nm8 == 3 || nm8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Whether d is a fundamental discriminant (1 is included as the trivial one).
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    let squarefree = |m: i64| -> bool {
        factorize(m.unsigned_abs()).iter().all(|&(_, e)| e == 1)
    };
    if d.rem_euclid(4) == 1 {
        d == 1 || squarefree(d)
    } else if d % 4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        (r == 2 || r == 3) && squarefree(m)
    } else {
        false
    }
}

/// A discriminant with its factorization Δ = D f² into a fundamental
/// discriminant and a conductor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscriminantDecomp {
    pub delta: i64,
    pub fund: i64,
    pub conductor: u64,
}

/// Splits Δ ≠ 0, Δ ≡ 0,1 (mod 4) uniquely as Δ = D f².
pub fn decompose_discriminant(delta: i64) -> Result<DiscriminantDecomp> {
    if delta == 0 || !matches!(delta.rem_euclid(4), 0 | 1) {
        return Err(Error::NotADiscriminant(delta));
    }
    // squarefree core d0 (carrying the sign of delta)
    let mut d0: i64 = if delta < 0 { -1 } else { 1 };
    let mut f: u64 = 1;
    for (p, e) in factorize(delta.unsigned_abs()) {
        if e % 2 == 1 {
            d0 *= p as i64;
        }
        f *= p.pow(e / 2);
    }
    let (fund, conductor) = if d0.rem_euclid(4) == 1 {
        (d0, f)
    } else {
        // delta = d0 f^2 with d0 = 2,3 mod 4 forces 4 | f^2, i.e. 2 | f.
        debug_assert!(f % 2 == 0);
        (4 * d0, f / 2)
    };
    debug_assert_eq!(fund * (conductor as i64).pow(2), delta);
    Ok(DiscriminantDecomp {
        delta,
        fund,
        conductor,
    })
}

/// Möbius function, exact.
pub fn moebius(n: u64) -> i32 {
    if n == 1 {
        return 1;
    }
    let fac = factorize(n);
    if fac.iter().any(|&(_, e)| e > 1) {
        0
    } else if fac.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divisor power sum sigma_nu(n) = sum_{c | n} c^nu.
pub fn sigma_power(nu: C64, n: u64) -> C64 {
    let mut acc = Kahan::new();
    for d in divisors(n) {
        acc.add(C64::new(d as f64, 0.0).powc(nu));
    }
    acc.value()
}

/// All positive divisors of n (unsorted order is fine for summation; we sort
/// for determinism).
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Finite sum form of the conductor correction:
/// B_Δ(s) = sum_{d | f} mu(d) chi_D(d) d^{-s} sigma_{1-2s}(f/d).
pub fn b_delta_sum(dd: &DiscriminantDecomp, s: C64) -> C64 {
    let f = dd.conductor;
    let mut acc = Kahan::new();
    for d in divisors(f) {
        let mu = moebius(d);
        if mu == 0 {
            continue;
        }
        let chi = kronecker(dd.fund, d);
        if chi == 0 {
            continue;
        }
        let coef = (mu * chi) as f64;
        acc.add(
            C64::new(coef, 0.0)
                * C64::new(d as f64, 0.0).powc(-s)
                * sigma_power(C64::new(1.0, 0.0) - 2.0 * s, f / d),
        );
    }
    acc.value()
}

/// Local Euler-product form of the same quantity (z = 2s - 1):
/// f^{-(z+1)/2} prod_{p | f} ( zeta_p(z)/L_p((z+1)/2, chi_D) |f|_p^{-(z+1)/2}
///                           + zeta_p(-z)/L_p((1-z)/2, chi_D) |f|_p^{-(1-z)/2} ).
///
/// At z = 0 both local zeta factors are singular individually; the closed
/// l'Hôpital limit of the two-term sum is
/// T_p = (e+1) p^{e/2} - chi_D(p) e p^{(e-1)/2} with e = ord_p f.
pub fn b_delta_product(dd: &DiscriminantDecomp, s: C64) -> Result<C64> {
    let f = dd.conductor;
    let z = 2.0 * s - 1.0;
    let mut prod = C64::new(f as f64, 0.0).powc(-(z + 1.0) / 2.0);
    for (p, e) in factorize(f) {
        let pf = p as f64;
        let chi = kronecker(dd.fund, p) as f64;
        let t = if z.norm() < 1e-9 {
            let ef = e as f64;
            C64::new(
                (ef + 1.0) * pf.powf(ef / 2.0) - chi * ef * pf.powf((ef - 1.0) / 2.0),
                0.0,
            )
        } else {
            let zeta_p = |w: C64| -> Result<C64> {
                let den = C64::new(1.0, 0.0) - C64::new(pf, 0.0).powc(-w);
                if den.norm() < 1e-14 {
                    return Err(Error::LocalFactorPole(format!("zeta_{p} at {w}")));
                }
                Ok(1.0 / den)
            };
            let l_p = |w: C64| C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - chi * C64::new(pf, 0.0).powc(-w));
            let ef = e as f64;
            // |f|_p^{-(z+1)/2} = p^{e(z+1)/2}
            zeta_p(z)? / l_p((z + 1.0) / 2.0) * C64::new(pf, 0.0).powc(ef * (z + 1.0) / 2.0)
                + zeta_p(-z)? / l_p((1.0 - z) / 2.0) * C64::new(pf, 0.0).powc(ef * (1.0 - z) / 2.0)
        };
        prod *= t;
    }
    Ok(prod)
}

/// The quadratic L-series attached to a discriminant:
/// Δ = 0  -> zeta(2s - 1);
/// Δ = f² -> zeta(s) sum_{d|f} mu(d) d^{-s} sigma_{1-2s}(f/d);
/// else   -> L(s, chi_D) B_Δ(s).
pub fn zagier_l(s: C64, delta: i64, _m_hint: Option<u64>) -> Result<C64> {
    if delta == 0 {
        return riemann_zeta(2.0 * s - 1.0);
    }
    if delta.rem_euclid(4) > 1 {
        return Err(Error::NotADiscriminant(delta));
    }
    if delta > 0 {
        let r = (delta as f64).sqrt().round() as i64;
        if r * r == delta {
            let f = r as u64;
            let mut acc = Kahan::new();
            for d in divisors(f) {
                let mu = moebius(d);
                if mu == 0 {
                    continue;
                }
                acc.add(
                    C64::new(mu as f64, 0.0)
                        * C64::new(d as f64, 0.0).powc(-s)
                        * sigma_power(C64::new(1.0, 0.0) - 2.0 * s, f / d),
                );
            }
            return Ok(riemann_zeta(s)? * acc.value());
        }
    }
    let dd = decompose_discriminant(delta)?;
    Ok(dirichlet_l(s, dd.fund)? * b_delta_sum(&dd, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use std::f64::consts::PI;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn kronecker_trivial_and_ramified() {
        for n in 1..50u64 {
            assert_eq!(kronecker(1, n), 1);
        }
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(12, 3), 0);
    }

    #[test]
    fn kronecker_minus_four_period_table() {
        // chi_{-4} has period table {1, 0, -1, 0} starting at n = 1,
        // reproduced here by brute-force quadratic residues mod 4.
        let table = [1i32, 0, -1, 0];
        for n in 1..200u64 {
            assert_eq!(kronecker(-4, n), table[((n - 1) % 4) as usize], "n = {n}");
        }
    }

    #[test]
    fn kronecker_matches_legendre_on_odd_primes() {
        // For odd prime p not dividing D, (D|p) = D^{(p-1)/2} mod p.
        for &p in &[3u64, 5, 7, 11, 13, 17, 19, 23] {
            for d in [-20i64, -8, -7, -4, -3, 5, 8, 12, 13, 21] {
                if d.unsigned_abs() % p == 0 {
                    continue;
                }
                let mut pow = 1u64;
                let base = d.rem_euclid(p as i64) as u64;
                for _ in 0..(p - 1) / 2 {
                    pow = pow * base % p;
                }
                let legendre = if pow == 1 { 1 } else { -1 };
                assert_eq!(kronecker(d, p), legendre, "({d}|{p})");
            }
        }
    }

    #[test]
    fn kronecker_completely_multiplicative() {
        for d in -50i64..=50 {
            if d == 0 {
                continue;
            }
            for m in 1..=20u64 {
                for n in 1..=20u64 {
                    assert_eq!(
                        kronecker(d, m * n),
                        kronecker(d, m) * kronecker(d, n),
                        "d={d}, m={m}, n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let d = decompose_discriminant(5).unwrap();
        assert_eq!((d.fund, d.conductor), (5, 1));
        let d = decompose_discriminant(-16).unwrap();
        assert_eq!((d.fund, d.conductor), (-4, 2));
        let d = decompose_discriminant(45).unwrap();
        assert_eq!((d.fund, d.conductor), (5, 3));
        assert!(decompose_discriminant(0).is_err());
        assert!(decompose_discriminant(7).is_err());
    }

    #[test]
    fn decompose_brute_force_oracle() {
        // enumerate square divisors and test fundamentality of the cofactor
        for delta in -400i64..=400 {
            if delta == 0 || !matches!(delta.rem_euclid(4), 0 | 1) {
                continue;
            }
            let d = decompose_discriminant(delta).unwrap();
            assert_eq!(d.fund * (d.conductor as i64).pow(2), delta);
            assert!(is_fundamental(d.fund), "core of {delta}: {}", d.fund);
        }
    }

    #[test]
    fn moebius_and_sigma() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(30), -1);
        assert!(rel(sigma_power(c64(0.0, 0.0), 12), c64(6.0, 0.0)) < 1e-13);
        assert!(rel(sigma_power(c64(-1.0, 0.0), 6), c64(2.0, 0.0)) < 1e-13);
    }

    #[test]
    fn b_delta_unit_conductor() {
        let dd = decompose_discriminant(-7).unwrap();
        assert_eq!(dd.conductor, 1);
        assert!(rel(b_delta_sum(&dd, c64(0.8, 0.3)), c64(1.0, 0.0)) < 1e-14);
        assert!(rel(b_delta_product(&dd, c64(0.8, 0.3)).unwrap(), c64(1.0, 0.0)) < 1e-14);
    }

    #[test]
    fn b_delta_cross_oracle_cases() {
        for (delta, s) in [(-16i64, c64(0.7, 0.0)), (72, c64(1.2, 0.3))] {
            let dd = decompose_discriminant(delta).unwrap();
            let a = b_delta_sum(&dd, s);
            let b = b_delta_product(&dd, s).unwrap();
            assert!(rel(a, b) < 1e-10, "delta={delta}: {a} vs {b}");
        }
    }

    #[test]
    fn b_delta_z_zero_limit_vs_extrapolation() {
        // at s = 1/2 the product form uses the closed limit; compare with the
        // average of s = 1/2 +- 1e-4 (even function of z to leading order).
        for delta in [-16i64, 45 * 4, 72, -48] {
            let dd = decompose_discriminant(delta).unwrap();
            let exact = b_delta_product(&dd, c64(0.5, 0.0)).unwrap();
            let hi = b_delta_product(&dd, c64(0.5 + 1e-4, 0.0)).unwrap();
            let lo = b_delta_product(&dd, c64(0.5 - 1e-4, 0.0)).unwrap();
            let extrap = (hi + lo) / 2.0;
            assert!(rel(exact, extrap) < 1e-6, "delta={delta}");
            let sum = b_delta_sum(&dd, c64(0.5, 0.0));
            assert!(rel(exact, sum) < 1e-10, "delta={delta} sum vs limit");
        }
    }

    #[test]
    fn zagier_l_cases() {
        // delta = 0 -> zeta(2s-1)
        let v = zagier_l(c64(2.0, 0.0), 0, None).unwrap();
        assert!(rel(v, riemann_zeta(c64(3.0, 0.0)).unwrap()) < 1e-13);
        // delta = 1 -> zeta(s)
        let v = zagier_l(c64(2.0, 0.0), 1, None).unwrap();
        assert!(rel(v, c64(PI * PI / 6.0, 0.0)) < 1e-12);
        // delta = -7 -> L(s, chi_{-7})
        let v = zagier_l(c64(0.8, 0.0), -7, None).unwrap();
        let l = dirichlet_l(c64(0.8, 0.0), -7).unwrap();
        assert!(rel(v, l) < 1e-13);
        assert!(zagier_l(c64(2.0, 0.0), 7, None).is_err());
    }

    #[test]
    fn zagier_l_continuous_across_re_s_one_for_nonsquare() {
        // non-square discriminant: entire in s; check continuity across s = 1
        let delta = -20;
        let a = zagier_l(c64(1.0 - 1e-6, 0.0), delta, None).unwrap();
        let b = zagier_l(c64(1.0 + 1e-6, 0.0), delta, None).unwrap();
        assert!(rel(a, b) < 1e-4);
    }
}
