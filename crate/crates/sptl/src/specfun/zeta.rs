use super::gamma::{digamma, gamma_r};
use super::Kahan;
use crate::{C64, Error, Result};

/// Bernoulli numbers B_2 .. B_24.
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// base^e for positive real base; real exponents go through `powf`, which is
/// noticeably more accurate than the complex exp/ln route.
#[inline]
fn rpow(base: f64, e: C64) -> C64 {
    if e.im == 0.0 {
        C64::new(base.powf(e.re), 0.0)
    } else {
        C64::new(base, 0.0).powc(e)
    }
}

/// Hurwitz zeta by Euler–Maclaurin with `n_explicit` explicit terms and 12
/// Bernoulli corrections. Valid on Re s > -20, s != 1.
pub(crate) fn hurwitz_zeta_n(s: C64, a: f64, n_explicit: u32) -> Result<C64> {
    if (s - C64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(Error::Pole("zeta at s = 1".into()));
    }
    if !(0.0 < a && a <= 1.0) {
        return Err(Error::Domain(format!("Hurwitz parameter a = {a}")));
    }
    let n = n_explicit as f64;
    let mut acc = Kahan::new();
    for k in 0..n_explicit {
        acc.add(rpow(k as f64 + a, -s));
    }
    let na = n + a;
    let mut v = acc.value();
    v += rpow(na, C64::new(1.0, 0.0) - s) / (s - 1.0);
    v += rpow(na, -s) * 0.5;
    // Bernoulli tail: sum_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) * (N+a)^{-s-2j+1}
    let mut rising = s; // (s)_{1}
    let mut fact = 2.0f64; // (2j)! running
    let mut power = rpow(na, -s - 1.0);
    let inv_na2 = 1.0 / (na * na);
    for (j, &b) in BERNOULLI.iter().enumerate() {
        v += b / fact * rising * power;
        // advance to j+1: multiply rising by (s+2j-1)(s+2j), fact by (2j+1)(2j+2)
        let tj = 2.0 * (j as f64 + 1.0);
        rising = rising * (s + (tj - 1.0)) * (s + tj);
        fact *= (tj + 1.0) * (tj + 2.0);
        power *= inv_na2;
    }
    Ok(v)
}

/// Hurwitz zeta zeta(s, a) for 0 < a <= 1, s != 1, Re s > -20.
pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    // For Re s < 1/2 the explicit block grows like N^{1-Re s} while the
    // result stays O(1); fewer explicit nodes avoid the cancellation (the
    // Bernoulli tail still converges since |Im s| bounds the node need).
    let n = if s.re >= 0.5 {
        30
    } else {
        10u32.max((1.5 * s.im.abs()).ceil() as u32)
    };
    hurwitz_zeta_n(s, a, n)
}

/// Riemann zeta function, s != 1, Re s > -20.
pub fn riemann_zeta(s: C64) -> Result<C64> {
    hurwitz_zeta(s, 1.0)
}

/// Completed zeta xi-normalization Gamma_R(s) zeta(s), computed through the
/// functional-equation-symmetric half so that trivial zeros and Gamma poles
/// never collide numerically: for Re s < 1/2 the reflected product
/// Gamma_R(1-s) zeta(1-s) is returned (they are equal).
pub fn completed_zeta(s: C64) -> Result<C64> {
    let w = if s.re < 0.5 { C64::new(1.0, 0.0) - s } else { s };
    if w.norm() < 1e-12 || (w - C64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(Error::Pole(format!("completed zeta at {s}")));
    }
    Ok(gamma_r(w)? * riemann_zeta(w)?)
}

/// Dirichlet L-function for the real character attached to a fundamental
/// discriminant D, via the Hurwitz-zeta decomposition
/// L(s, chi_D) = |D|^{-s} sum_{a=1}^{|D|} chi_D(a) zeta(s, a/|D|).
pub fn dirichlet_l(s: C64, d: i64) -> Result<C64> {
    if d == 1 {
        return riemann_zeta(s);
    }
    if !crate::arith::is_fundamental(d) {
        return Err(Error::Domain(format!("{d} is not a fundamental discriminant")));
    }
    let q = d.unsigned_abs();
    if (s - C64::new(1.0, 0.0)).norm() < 1e-8 {
        // zeta(s, a) = 1/(s-1) - psi(a) + O(s-1); the poles cancel because
        // the character sums to zero over a period.
        let mut acc = Kahan::new();
        for a in 1..=q {
            let chi = crate::arith::kronecker(d, a) as f64;
            if chi != 0.0 {
                acc.add(C64::new(-chi, 0.0) * digamma(C64::new(a as f64 / q as f64, 0.0))?);
            }
        }
        return Ok(acc.value() / q as f64);
    }
    let mut acc = Kahan::new();
    for a in 1..=q {
        let chi = crate::arith::kronecker(d, a) as f64;
        if chi != 0.0 {
            acc.add(C64::new(chi, 0.0) * hurwitz_zeta(s, a as f64 / q as f64)?);
        }
    }
    Ok(C64::new(q as f64, 0.0).powc(-s) * acc.value())
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
    fn zeta_two_and_zero() {
        assert!(rel(riemann_zeta(c64(2.0, 0.0)).unwrap(), c64(PI * PI / 6.0, 0.0)) < 1e-12);
        assert!(rel(riemann_zeta(c64(0.0, 0.0)).unwrap(), c64(-0.5, 0.0)) < 1e-12);
    }

    #[test]
    fn zeta_complex_doubled_node_oracle() {
        let s = c64(3.0, 2.0);
        let v = riemann_zeta(s).unwrap();
        let oracle = hurwitz_zeta_n(s, 1.0, 60).unwrap();
        assert!(rel(v, oracle) < 1e-12);
    }

    #[test]
    fn zeta_negative_arguments() {
        // zeta(-1) = -1/12, zeta(-3) = 1/120
        assert!(rel(riemann_zeta(c64(-1.0, 0.0)).unwrap(), c64(-1.0 / 12.0, 0.0)) < 1e-10);
        assert!(rel(riemann_zeta(c64(-3.0, 0.0)).unwrap(), c64(1.0 / 120.0, 0.0)) < 1e-10);
    }

    #[test]
    fn zeta_pole_rejected() {
        assert!(riemann_zeta(c64(1.0, 0.0)).is_err());
    }

    #[test]
    fn completed_zeta_functional_equation() {
        for &s in &[c64(0.3, 0.7), c64(-0.8, 0.2), c64(2.4, -1.1)] {
            let a = completed_zeta(s).unwrap();
            let b = completed_zeta(c64(1.0, 0.0) - s).unwrap();
            assert!(rel(a, b) < 1e-10, "xi symmetry at {s}");
        }
    }

    #[test]
    fn completed_zeta_at_negative_even_points() {
        // Gamma_R has a pole and zeta a trivial zero at s = -2; the completed
        // product stays finite and equals the reflected value.
        let v = completed_zeta(c64(-2.0, 0.0)).unwrap();
        let w = completed_zeta(c64(3.0, 0.0)).unwrap();
        assert!(rel(v, w) < 1e-12);
    }

    #[test]
    fn dirichlet_leibniz() {
        // L(1, chi_{-4}) = pi/4
        let v = dirichlet_l(c64(1.0, 0.0), -4).unwrap();
        assert!(rel(v, c64(PI / 4.0, 0.0)) < 1e-9, "{v}");
    }

    #[test]
    fn dirichlet_trivial_character_is_zeta() {
        let s = c64(2.5, 0.4);
        assert!(rel(dirichlet_l(s, 1).unwrap(), riemann_zeta(s).unwrap()) < 1e-13);
    }

    #[test]
    fn dirichlet_series_oracle_at_right_edge() {
        // Raw character Dirichlet series at Re s = 3.
        for &d in &[5i64, -7, 8, -4] {
            let s = c64(3.0, 0.0);
            let v = dirichlet_l(s, d).unwrap();
            let mut sum = 0.0f64;
            for n in 1..200_000u64 {
                let chi = crate::arith::kronecker(d, n) as f64;
                if chi != 0.0 {
                    sum += chi / (n as f64).powi(3);
                }
            }
            assert!((v.re - sum).abs() < 1e-8, "D = {d}: {} vs {sum}", v.re);
            assert!(v.im.abs() < 1e-12);
        }
    }
}
