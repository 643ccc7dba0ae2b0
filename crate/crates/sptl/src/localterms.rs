//! Local terms of the trace-formula geometric side: the Chebyshev-type test
//! polynomials, the unipotent orbital weight Upsilon (closed form vs measure
//! integral), the hyperbolic local sums S-hat (closed form vs contour
//! integral), the weighted Plancherel density, and the unipotent
//! Gamma-factor identity.

use crate::specfun::{completed_zeta, gamma, Kahan};
use crate::{c64, C64, Error, Result};
use std::f64::consts::PI;

/// Degree-n polynomial defined by sin((n+1)theta)/sin(theta) =
/// X_n(2 cos theta) via the three-term recursion.
pub fn chebyshev_x(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0f64, x);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Complex-argument version, used on contour integrands.
pub fn chebyshev_x_c(n: u32, x: C64) -> C64 {
    let (mut prev, mut cur) = (c64(1.0, 0.0), x);
    if n == 0 {
        return c64(1.0, 0.0);
    }
    for _ in 1..n {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Local test data at a finite place: prime, polynomial degree, and the
/// spectral parameter z.
#[derive(Debug, Clone, Copy)]
pub struct ChebyshevSpec {
    pub p: u64,
    pub n: u32,
    pub z: f64,
}

impl ChebyshevSpec {
    pub fn new(p: u64, n: u32, z: f64) -> Result<Self> {
        if p < 2 {
            return Err(Error::Domain(format!("prime {p} < 2")));
        }
        if n > 64 {
            return Err(Error::Domain(format!("degree {n} > 64")));
        }
        if !(-1.0..=1.0).contains(&z) {
            return Err(Error::Domain(format!("z = {z} outside [-1, 1]")));
        }
        Ok(Self { p, n, z })
    }
}

/// Closed form of the unipotent local weight:
/// Upsilon = -delta(n even) p^{-n(z+1)/4}.
pub fn upsilon_closed(c: ChebyshevSpec) -> f64 {
    if c.n % 2 != 0 {
        return 0.0;
    }
    -(c.p as f64).powf(-(c.n as f64) * (c.z + 1.0) / 4.0)
}

/// Same weight evaluated as a measure integral over [-2, 2]; the endpoint
/// square-root singularity is removed by x = 2 cos theta and the resulting
/// periodic-analytic integrand is summed by trapezoid (spectral accuracy).
pub fn upsilon_integral(c: ChebyshevSpec, _tol: f64) -> Result<f64> {
    let nodes = 4096usize;
    let h = PI / nodes as f64;
    let mut acc = Kahan::new();
    // trapezoid on [0, pi]; the integrand vanishes at both endpoints
    for j in 1..nodes {
        let theta = j as f64 * h;
        let x = 2.0 * theta.cos();
        acc.add(c64(
            density_times_jacobian(c.p, c.z, theta) * chebyshev_x(c.n, x),
            0.0,
        ));
    }
    Ok(-(acc.value().re * h))
}

/// density(2 cos theta) * |dx/dtheta|, the theta-space integrand of the
/// local measure.
fn density_times_jacobian(p: u64, z: f64, theta: f64) -> f64 {
    let pf = p as f64;
    let q = pf.powf((z + 1.0) / 4.0);
    let sin = theta.sin();
    (1.0 + q * q * q * q / (q * q)) * 4.0 * sin * sin
        / ((q + 1.0 / q).powi(2) - 4.0 * theta.cos().powi(2))
        / (2.0 * PI)
}

/// Local measure on [-2, 2] attached to (p, z).
#[derive(Debug, Clone, Copy)]
pub struct LocalMeasure {
    pub p: u64,
    pub z: f64,
}

/// Probability density of the local measure at x in (-2, 2); its X_n-moments
/// are delta(n even) p^{-n(z+1)/4}.
pub fn plancherel_density(m: LocalMeasure, x: f64) -> Result<f64> {
    if !(-2.0..2.0).contains(&x) || x == -2.0 {
        return Err(Error::Domain(format!("density argument {x} outside (-2, 2)")));
    }
    let pf = m.p as f64;
    let q = pf.powf((m.z + 1.0) / 4.0);
    Ok((1.0 + q * q) * (4.0 - x * x).sqrt() / ((q + 1.0 / q).powi(2) - x * x) / (2.0 * PI))
}

/// X_n-moment of the local measure by quadrature.
pub fn plancherel_moment(m: LocalMeasure, n: u32) -> Result<f64> {
    let spec = ChebyshevSpec::new(m.p, n, m.z)?;
    Ok(-upsilon_integral(spec, 1e-12)?)
}

/// Splitting type of the local quadratic character attached to a
/// discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonType {
    Split,
    Inert,
    Ramified,
}

impl EpsilonType {
    /// chi(p) of the character: +1, -1, 0.
    pub fn chi(self) -> f64 {
        match self {
            EpsilonType::Split => 1.0,
            EpsilonType::Inert => -1.0,
            EpsilonType::Ramified => 0.0,
        }
    }

    /// From a discriminant and a prime, via the Kronecker symbol of the
    /// fundamental part.
    pub fn from_discriminant(delta: i64, p: u64) -> Result<Self> {
        let d = crate::arith::decompose_discriminant(delta)?;
        Ok(match crate::arith::kronecker(d.fund, p) {
            1 => EpsilonType::Split,
            -1 => EpsilonType::Inert,
            _ => EpsilonType::Ramified,
        })
    }
}

/// Local zeta factor zeta_p(s) = (1 - p^{-s})^{-1}.
fn zeta_p(p: f64, s: C64) -> C64 {
    c64(1.0, 0.0) / (c64(1.0, 0.0) - rpowc(p, -s))
}

/// Inverse local L-factor 1 / L_p(s, eps) = 1 - chi(p) p^{-s}; multiplying
/// by this stays finite even where L_p itself has a pole (e.g. split type at
/// s = 0).
fn inv_l_p(p: f64, s: C64, eps: EpsilonType) -> C64 {
    c64(1.0, 0.0) - eps.chi() * rpowc(p, -s)
}

#[inline]
fn rpowc(base: f64, e: C64) -> C64 {
    if e.im == 0.0 {
        c64(base.powf(e.re), 0.0)
    } else {
        c64(base, 0.0).powc(e)
    }
}

/// Closed form of the hyperbolic local sum (positive normalization):
/// delta(parity) p^{-n/2} { zeta_p(-z) p^{w(1-z)/4} / L_p((1-z)/2, eps)
///                        + zeta_p(z)  p^{w(z+1)/4} / L_p((z+1)/2, eps) },
/// with w = n - ord(a). The parity condition is w in 2N_0 when ord(a) >= 0
/// and n even when ord(a) < 0.
pub fn shat_closed(p: u64, eps: EpsilonType, z: f64, n: u32, val_a: i64) -> C64 {
    let w = n as i64 - val_a;
    let parity_ok = if val_a >= 0 {
        w >= 0 && w % 2 == 0
    } else {
        n % 2 == 0
    };
    if !parity_ok {
        return c64(0.0, 0.0);
    }
    let pf = p as f64;
    let wf = w as f64;
    let front = pf.powf(-(n as f64) / 2.0);
    if z.abs() < 1e-9 {
        // z -> 0 limit of the two-pole sum (both local zeta factors are
        // singular; the combination has a finite analytic limit).
        let chi = eps.chi();
        let val = pf.powf(wf / 4.0) * (1.0 + (wf / 2.0) * (1.0 - chi / pf.sqrt()));
        return c64(front * val, 0.0);
    }
    let zc = c64(z, 0.0);
    let t1 = zeta_p(pf, -zc) * pf.powf(wf * (1.0 - z) / 4.0)
        * inv_l_p(pf, c64((1.0 - z) / 2.0, 0.0), eps);
    let t2 = zeta_p(pf, zc) * pf.powf(wf * (1.0 + z) / 4.0)
        * inv_l_p(pf, c64((1.0 + z) / 2.0, 0.0), eps);
    (t1 + t2) * front
}

/// The same local sum as a contour integral over one vertical period
/// s = c + i theta, theta in (-2 pi / log p, 2 pi / log p]. The integrand is
/// periodic and analytic, so the uniform trapezoid rule converges
/// geometrically.
pub fn shat_integral(
    p: u64,
    eps: EpsilonType,
    z: f64,
    n: u32,
    val_a: i64,
    c: f64,
    _tol: f64,
) -> Result<C64> {
    if z.abs() < 1e-12 {
        return Err(Error::Convergence(
            "contour form undefined at z = 0; use the closed-form limit".into(),
        ));
    }
    let pf = p as f64;
    let lp = pf.ln();
    let zc = c64(z, 0.0);
    let nodes = 512usize;
    let period = 4.0 * PI / lp;
    let h = period / nodes as f64;
    let mut acc = Kahan::new();
    for j in 0..nodes {
        let theta = -2.0 * PI / lp + (j as f64 + 1.0) * h;
        let s = c64(c, theta);
        let r = if val_a >= 0 {
            // |a|_p <= 1
            zeta_p(pf, s + (z + 1.0) / 2.0) * zeta_p(pf, s + (1.0 - z) / 2.0)
                * inv_l_p(pf, s + 1.0, eps)
                * rpowc(pf, -(val_a as f64) * (s + 1.0) / 2.0)
        } else {
            // |a|_p > 1
            zeta_p(pf, -zc) * zeta_p(pf, s + (z + 1.0) / 2.0)
                * inv_l_p(pf, c64((1.0 - z) / 2.0, 0.0), eps)
                * pf.powf(-(val_a as f64) * (1.0 - z) / 4.0)
                + zeta_p(pf, zc) * zeta_p(pf, s + (1.0 - z) / 2.0)
                    * inv_l_p(pf, c64((1.0 + z) / 2.0, 0.0), eps)
                    * pf.powf(-(val_a as f64) * (1.0 + z) / 4.0)
        };
        let xn = chebyshev_x_c(n, rpowc(pf, -s / 2.0) + rpowc(pf, s / 2.0));
        let measure = (lp / 2.0) * (rpowc(pf, (s + 1.0) / 2.0) - rpowc(pf, (1.0 - s) / 2.0));
        acc.add(rpowc(pf, -(s + 1.0) / 2.0) * r * xn * measure);
    }
    Ok(acc.value() * (h / (2.0 * PI)))
}

/// Unipotent term of the geometric side over the rationals:
/// J_unip = zeta_completed(-z) * Upsilon * 2^{1-z} pi^{(3-z)/4}
///          Gamma(k + (z-1)/2) / (Gamma((z+1)/4) Gamma(k)).
pub fn junip(k: u32, z: C64, upsilon_value: C64) -> Result<C64> {
    let kf = k as f64;
    let arch = rpowc(2.0, c64(1.0, 0.0) - z)
        * rpowc(PI, (c64(3.0, 0.0) - z) / 4.0)
        * gamma(c64(kf, 0.0) + (z - 1.0) / 2.0)?
        / (gamma((z + 1.0) / 4.0)? * gamma(c64(kf, 0.0))?);
    Ok(completed_zeta(-z)? * upsilon_value * arch)
}

/// Relative discrepancy of the unipotent identity: the normalized
/// combination J_unip(z) + J_unip(-z) (z = 2s - 1) against the closed-form
/// square term plus the degenerate (zero-discriminant) term.
pub fn junip_identity_residual(k: u32, m: u64, s: C64) -> Result<f64> {
    let z = s * 2.0 - 1.0;
    if (s - c64(0.5, 0.0)).norm() < 1e-3 || (s - c64(1.0, 0.0)).norm() < 1e-3 {
        return Err(Error::Pole(format!("identity check too close to s = {s}")));
    }
    let kf = k as f64;
    let root = crate::zagier::exact_sqrt(m);
    // Product over p | m of the local weights, with the orbital sign folded
    // in: nonzero only for square m, where it collapses to m^{-(z+1)/4}.
    let nu = |zz: C64| -> C64 {
        if root.is_some() {
            rpowc(m as f64, -(zz + 1.0) / 4.0)
        } else {
            c64(0.0, 0.0)
        }
    };
    let lhs_core = junip(k, z, nu(z))? + junip(k, -z, nu(-z))?;
    let norm = rpowc(m as f64, c64((kf - 1.0) / 2.0, 0.0))
        / (rpowc(2.0, s + (kf - 2.0))
            * rpowc(PI, -s / 2.0 - 0.5)
            * gamma((s + 1.0) / 2.0)?);
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let lhs = lhs_core * norm * sign;
    let rhs = crate::zagier::square_term(k, m, s)? + crate::zagier::degenerate_term(k, m, s)?;
    let denom = lhs.norm() + rhs.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).norm() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_basics() {
        assert_eq!(chebyshev_x(0, 1.7), 1.0);
        assert_eq!(chebyshev_x(1, 1.7), 1.7);
        assert_eq!(chebyshev_x(2, 2.0), 3.0);
        // sin((n+1)t)/sin(t) identity at a generic angle
        let t = 0.7f64;
        for n in 0..10u32 {
            let lhs = ((n as f64 + 1.0) * t).sin() / t.sin();
            assert!((chebyshev_x(n, 2.0 * t.cos()) - lhs).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn upsilon_examples() {
        let c = ChebyshevSpec::new(5, 3, 0.5).unwrap();
        assert_eq!(upsilon_closed(c), 0.0);
        let c = ChebyshevSpec::new(5, 0, 0.5).unwrap();
        assert_eq!(upsilon_closed(c), -1.0);
        let c = ChebyshevSpec::new(2, 2, 1.0).unwrap();
        assert!((upsilon_closed(c) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn upsilon_integral_matches_closed_on_grid() {
        for &p in &[2u64, 3, 5, 7] {
            for n in 0..=8u32 {
                for &z in &[0.0f64, 0.25, 0.5, 1.0] {
                    let c = ChebyshevSpec::new(p, n, z).unwrap();
                    let a = upsilon_closed(c);
                    let b = upsilon_integral(c, 1e-12).unwrap();
                    assert!((a - b).abs() < 1e-10, "p={p} n={n} z={z}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn plancherel_mass_and_moments() {
        let m = LocalMeasure { p: 3, z: 0.5 };
        assert!((plancherel_moment(m, 0).unwrap() - 1.0).abs() < 1e-9);
        let expected = 3.0f64.powf(-(0.5 + 1.0) / 2.0);
        assert!((plancherel_moment(m, 2).unwrap() - expected).abs() < 1e-9);
        for n in 0..=8u32 {
            let spec = ChebyshevSpec::new(3, n, 0.5).unwrap();
            assert!(
                (plancherel_moment(m, n).unwrap() + upsilon_closed(spec)).abs() < 1e-9,
                "n = {n}"
            );
        }
    }

    #[test]
    fn plancherel_density_positive_and_ordered_in_z() {
        let lo = LocalMeasure { p: 5, z: 0.0 };
        let hi = LocalMeasure { p: 5, z: 1.0 };
        let semicircle = |x: f64| (4.0 - x * x).sqrt() / (2.0 * PI);
        // Grid avoids the sign-change band of density - semicircle (between
        // |x| = 1 and |x| ~ 1.45 at p = 5), where the two-z comparison is not
        // informative.
        let grid: Vec<f64> = (-9..=9)
            .map(|j| j as f64 * 0.1)
            .chain([-1.9, -1.7, -1.5, 1.5, 1.7, 1.9])
            .collect();
        for x in grid {
            let a = plancherel_density(lo, x).unwrap();
            let b = plancherel_density(hi, x).unwrap();
            assert!(a >= 0.0 && b >= 0.0);
            // larger z pushes the density toward the semicircle shape
            let d_lo = (a - semicircle(x)).abs();
            let d_hi = (b - semicircle(x)).abs();
            assert!(d_hi <= d_lo + 1e-12, "x = {x}");
        }
        assert!(plancherel_density(lo, 2.0).is_err());
    }

    #[test]
    fn shat_parity_zero_both_ways() {
        let v = shat_closed(3, EpsilonType::Split, 0.4, 3, 0);
        assert_eq!(v, c64(0.0, 0.0));
        let w = shat_integral(3, EpsilonType::Split, 0.4, 3, 0, 3.0, 1e-10).unwrap();
        assert!(w.norm() < 1e-9);
    }

    #[test]
    fn shat_direct_substitution_example() {
        // n = 0, ord a = 0, split: zeta_p(-z)/L_p((1-z)/2) + zeta_p(z)/L_p((z+1)/2)
        let (p, z) = (5.0f64, 0.6f64);
        let expected = (1.0 - 5.0f64.powf(-(1.0 - z) / 2.0)) / (1.0 - 5.0f64.powf(z))
            + (1.0 - 5.0f64.powf(-(1.0 + z) / 2.0)) / (1.0 - 5.0f64.powf(-z));
        let got = shat_closed(p as u64, EpsilonType::Split, z, 0, 0);
        assert!((got.re - expected).abs() < 1e-12, "{} vs {expected}", got.re);
    }

    #[test]
    fn shat_integral_matches_closed_on_grid() {
        for &p in &[2u64, 3, 5] {
            for &eps in &[EpsilonType::Split, EpsilonType::Inert, EpsilonType::Ramified] {
                for n in 0..=4u32 {
                    for val_a in -2i64..=2 {
                        for &z in &[0.2f64, 0.7, 1.0] {
                            let a = shat_closed(p, eps, z, n, val_a);
                            let b = shat_integral(p, eps, z, n, val_a, 3.0, 1e-10).unwrap();
                            assert!(
                                (a - b).norm() < 1e-9,
                                "p={p} eps={eps:?} n={n} a={val_a} z={z}: {a} vs {b}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shat_contour_abscissa_independent() {
        let a = shat_integral(3, EpsilonType::Inert, 0.4, 2, 0, 3.0, 1e-10).unwrap();
        let b = shat_integral(3, EpsilonType::Inert, 0.4, 2, 0, 4.0, 1e-10).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn shat_z_zero_limit_extrapolation() {
        for &(p, eps, n, val_a) in &[
            (2u64, EpsilonType::Split, 2u32, 0i64),
            (3, EpsilonType::Inert, 4, 2),
            (5, EpsilonType::Ramified, 2, -1),
        ] {
            let limit = shat_closed(p, eps, 0.0, n, val_a);
            let h = 1e-4;
            let approx = (shat_closed(p, eps, h, n, val_a) + shat_closed(p, eps, -h, n, val_a))
                * 0.5;
            assert!((limit - approx).norm() < 1e-6, "p={p} {eps:?}");
        }
    }

    #[test]
    fn junip_symmetrized_combination_even_in_z() {
        // The identity always consumes J(z) + J(-z); swapping z -> -z must
        // leave that combination unchanged.
        let z = c64(0.3, 0.0);
        let u_pos = c64(0.25, 0.0);
        let u_neg = c64(0.4, 0.0);
        let a = junip(12, z, u_pos).unwrap() + junip(12, -z, u_neg).unwrap();
        let b = junip(12, -z, u_neg).unwrap() + junip(12, z, u_pos).unwrap();
        assert!((a - b).norm() < 1e-14);
        // and each piece is genuinely z-dependent (the symmetry is not
        // degeneracy of the factors)
        assert!((junip(12, z, u_pos).unwrap() - junip(12, -z, u_pos).unwrap()).norm() > 1e-6);
    }

    #[test]
    fn junip_identity_examples() {
        let r1 = junip_identity_residual(12, 1, c64(2.0, 0.0)).unwrap();
        assert!(r1 < 1e-8, "residual {r1}");
        let r2 = junip_identity_residual(16, 4, c64(1.3, 0.0)).unwrap();
        assert!(r2 < 1e-8, "residual {r2}");
    }

    #[test]
    fn junip_identity_nonsquare_trivial() {
        let r = junip_identity_residual(12, 7, c64(1.6, 0.0)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn junip_identity_random_strip_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(4201);
        let weights = [12u32, 16, 18, 20, 22, 26];
        let squares = [1u64, 4, 9, 16, 25];
        let mut checked = 0;
        while checked < 20 {
            let k = weights[rng.gen_range(0..weights.len())];
            let m = squares[rng.gen_range(0..squares.len())];
            let s = rng.gen_range(0.2f64..2.2);
            if (s - 0.5).abs() < 0.1 || (s - 1.0).abs() < 0.1 {
                continue;
            }
            let r = junip_identity_residual(k, m, c64(s, 0.0)).unwrap();
            assert!(r < 1e-8, "k={k} m={m} s={s}: residual {r}");
            checked += 1;
        }
    }
}
