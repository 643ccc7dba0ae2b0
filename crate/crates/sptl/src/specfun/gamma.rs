use crate::{C64, Error, Result};
use std::f64::consts::PI;

/// Lanczos coefficients for g = 607/128, n = 15 (relative error ~1e-14 on
/// the right half-plane).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_C: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
];

fn is_near_nonpositive_integer(s: C64) -> bool {
    s.im.abs() < 1e-12 && s.re <= 0.5 && (s.re - s.re.round()).abs() < 1e-12
}

/// Complex Gamma function.
pub fn gamma(s: C64) -> Result<C64> {
    if is_near_nonpositive_integer(s) {
        return Err(Error::Pole(format!("Gamma at {s}")));
    }
    Ok(gamma_unchecked(s))
}

pub(crate) fn gamma_unchecked(s: C64) -> C64 {
    if s.re < 0.5 {
        // Reflection: Gamma(s) Gamma(1-s) = pi / sin(pi s).
        let pis = C64::new(PI, 0.0) * s;
        return C64::new(PI, 0.0) / (pis.sin() * gamma_unchecked(C64::new(1.0, 0.0) - s));
    }
    let z = s - 1.0;
    let mut acc = C64::new(LANCZOS_C[0], 0.0);
    for (k, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += C64::new(c, 0.0) / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc
}

/// Gamma_R(s) = pi^{-s/2} Gamma(s/2).
pub fn gamma_r(s: C64) -> Result<C64> {
    let half = s / 2.0;
    if is_near_nonpositive_integer(half) {
        return Err(Error::Pole(format!("Gamma_R at {s}")));
    }
    Ok(C64::new(PI, 0.0).powc(-half) * gamma_unchecked(half))
}

/// Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s).
pub fn gamma_c(s: C64) -> Result<C64> {
    if is_near_nonpositive_integer(s) {
        return Err(Error::Pole(format!("Gamma_C at {s}")));
    }
    Ok(2.0 * C64::new(2.0 * PI, 0.0).powc(-s) * gamma_unchecked(s))
}

/// Digamma function psi(s) = Gamma'(s)/Gamma(s).
pub fn digamma(s: C64) -> Result<C64> {
    if is_near_nonpositive_integer(s) {
        return Err(Error::Pole(format!("digamma at {s}")));
    }
    let mut z = s;
    let mut acc = C64::new(0.0, 0.0);
    if z.re < 0.5 {
        // psi(1-x) - psi(x) = pi cot(pi x)
        let piz = C64::new(PI, 0.0) * z;
        acc -= C64::new(PI, 0.0) * piz.cos() / piz.sin();
        z = C64::new(1.0, 0.0) - z;
    }
    // Shift to Re z >= 12, then use the asymptotic series.
    while z.re < 12.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    // psi(z) ~ ln z - 1/(2z) - sum B_{2n} / (2n z^{2n})
    const B: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let inv2 = 1.0 / (z * z);
    let mut asym = z.ln() - 0.5 / z;
    let mut pow = inv2;
    for (n, &b) in B.iter().enumerate() {
        asym -= b / (2.0 * (n as f64 + 1.0)) * pow;
        pow *= inv2;
    }
    Ok(acc + asym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    const EULER_GAMMA: f64 = 0.5772156649015328606;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn gamma_basic_values() {
        assert!(rel(gamma(c64(1.0, 0.0)).unwrap(), c64(1.0, 0.0)) < 1e-13);
        assert!(rel(gamma(c64(0.5, 0.0)).unwrap(), c64(PI.sqrt(), 0.0)) < 1e-13);
        assert!(rel(gamma(c64(5.0, 0.0)).unwrap(), c64(24.0, 0.0)) < 1e-13);
    }

    #[test]
    fn gamma_complex_reference() {
        // Gamma(4+10i), independently computed reference value.
        let v = gamma(c64(4.0, 10.0)).unwrap();
        let reference = c64(0.0007715342942399662, -0.0010190827990417);
        assert!((v - reference).norm() < 1e-10);
    }

    #[test]
    fn gamma_pole_rejected() {
        assert!(gamma(c64(0.0, 0.0)).is_err());
        assert!(gamma(c64(-3.0, 0.0)).is_err());
        assert!(gamma(c64(-3.0 + 5e-13, 0.0)).is_err());
    }

    #[test]
    fn gamma_reflection_negative_halfplane() {
        // Gamma(-1.5) = 4 sqrt(pi) / 3
        let v = gamma(c64(-1.5, 0.0)).unwrap();
        assert!(rel(v, c64(4.0 * PI.sqrt() / 3.0, 0.0)) < 1e-12);
    }

    #[test]
    fn gamma_r_and_c_values() {
        assert!(rel(gamma_r(c64(1.0, 0.0)).unwrap(), c64(1.0, 0.0)) < 1e-13);
        let gc2 = gamma_c(c64(2.0, 0.0)).unwrap();
        assert!(rel(gc2, c64(1.0 / (2.0 * PI * PI), 0.0)) < 1e-13);
        // duplication
        let lhs = gamma_r(c64(2.0, 0.0)).unwrap() * gamma_r(c64(3.0, 0.0)).unwrap();
        assert!(rel(lhs, gc2) < 1e-11);
    }

    #[test]
    fn digamma_values() {
        assert!(rel(digamma(c64(1.0, 0.0)).unwrap(), c64(-EULER_GAMMA, 0.0)) < 1e-11);
        assert!(rel(digamma(c64(2.0, 0.0)).unwrap(), c64(1.0 - EULER_GAMMA, 0.0)) < 1e-11);
    }

    #[test]
    fn digamma_three_quarters_series_oracle() {
        // psi(3/4) by the series -gamma + sum_{n>=0} (1/(n+1) - 1/(n+3/4)),
        // 10^6 terms plus the 1/(2N) tail correction.
        let mut s = -EULER_GAMMA;
        let n_terms = 1_000_000;
        for n in 0..n_terms {
            let nf = n as f64;
            s += 1.0 / (nf + 1.0) - 1.0 / (nf + 0.75);
        }
        // tail: sum_{n>=N} (1/(n+1) - 1/(n+a)) ~ (a-1) / N
        s += (0.75 - 1.0) / n_terms as f64;
        let v = digamma(c64(0.75, 0.0)).unwrap();
        assert!((v.re - s).abs() < 1e-10, "{} vs {}", v.re, s);
    }
}
