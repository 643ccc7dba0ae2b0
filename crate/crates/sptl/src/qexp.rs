//! Exact q-expansions of the six one-dimensional level-1 eigenforms
//! (weights 12, 16, 18, 20, 22, 26), their Hecke eigenvalues, the
//! symmetric-square Dirichlet series, and Petersson norms.
//!
//! Coefficients are exact big integers; normalization to real eigenvalues
//! lambda(m) = a(m) / m^{(k-1)/2} happens only at the numeric boundary.

use crate::specfun::{gamma_c, gamma_r, Kahan};
use crate::{C64, Error, Result};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

/// Dense truncated power series with exact integer coefficients, indexed
/// from q^0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigInt>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        Self { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    /// Truncated Cauchy product; the result keeps the shorter truncation.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PowerSeries { coeffs: out }
    }

    /// Multiplication by q (shift by one power).
    pub fn shift1(&self) -> PowerSeries {
        let mut out = Vec::with_capacity(self.coeffs.len());
        out.push(BigInt::zero());
        out.extend_from_slice(&self.coeffs[..self.coeffs.len() - 1]);
        PowerSeries { coeffs: out }
    }
}

/// Dedekind eta-like product prod_{n>=1} (1 - q^n) via the pentagonal-number
/// theorem (sparse, exact).
fn euler_product_series(n: usize) -> PowerSeries {
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[0] = BigInt::one();
    let mut k: i64 = 1;
    loop {
        // generalized pentagonal numbers k(3k-1)/2 for j = k and j = -k
        let done = [k, -k].iter().all(|&j| {
            let idx = j * (3 * j - 1) / 2;
            idx > n as i64
        });
        if done {
            break;
        }
        for &j in &[k, -k] {
            let idx = j * (3 * j - 1) / 2;
            if (0..=n as i64).contains(&idx) {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                coeffs[idx as usize] += sign;
            }
        }
        k += 1;
    }
    PowerSeries { coeffs }
}

/// q-expansion of the weight-12 cusp form: q prod (1-q^n)^24, exact.
pub fn delta_series(n: usize) -> Result<PowerSeries> {
    if n > 100_000 {
        return Err(Error::Domain(format!("series truncation {n} > 1e5")));
    }
    let e = euler_product_series(n);
    let e2 = e.mul(&e);
    let e4 = e2.mul(&e2);
    let e8 = e4.mul(&e4);
    let e16 = e8.mul(&e8);
    let e24 = e16.mul(&e8);
    Ok(e24.shift1())
}

/// Normalized Eisenstein series E_4 or E_6.
pub fn eisenstein(k: u32, n: usize) -> Result<PowerSeries> {
    let (mult, pow): (i64, u32) = match k {
        4 => (240, 3),
        6 => (-504, 5),
        _ => return Err(Error::UnsupportedWeight(k)),
    };
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[0] = BigInt::one();
    for m in 1..=n {
        // sigma_{k-1}(m)
        let mut sig = BigInt::zero();
        for d in crate::arith::divisors(m as u64) {
            sig += BigInt::from(d).pow(pow);
        }
        coeffs[m] = sig * mult;
    }
    Ok(PowerSeries { coeffs })
}

/// Level-1 normalized Hecke eigenform of a one-dimensional weight.
#[derive(Debug, Clone)]
pub struct HeckeForm {
    pub weight: u32,
    /// a(1)..a(N), exact.
    coeffs: Vec<BigInt>,
}

pub const ONE_DIM_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

impl HeckeForm {
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// Exact Fourier coefficient a(m), 1-based.
    pub fn a(&self, m: usize) -> &BigInt {
        &self.coeffs[m - 1]
    }

    pub fn a_f64(&self, m: usize) -> f64 {
        big_to_f64(self.a(m))
    }

    /// Normalized eigenvalue lambda(m) = a(m) / m^{(k-1)/2}.
    pub fn lambda(&self, m: usize) -> f64 {
        self.a_f64(m) / (m as f64).powf((self.weight as f64 - 1.0) / 2.0)
    }

    /// Normalized eigenvalue at a prime power p^j via the Hecke recursion in
    /// normalized form: lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1}).
    pub fn lambda_prime_power(&self, p: u64, j: u32) -> f64 {
        let lp = self.lambda(p as usize);
        let (mut prev, mut cur) = (1.0f64, lp);
        if j == 0 {
            return 1.0;
        }
        for _ in 1..j {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// lambda(m) for arbitrary m through multiplicativity (m may exceed the
    /// stored truncation as long as its prime factors do not).
    pub fn lambda_mult(&self, m: u64) -> f64 {
        let mut out = 1.0;
        for (p, e) in crate::arith::factorize(m) {
            out *= self.lambda_prime_power(p, e);
        }
        out
    }
}

fn big_to_f64(b: &BigInt) -> f64 {
    b.to_f64().expect("BigInt to f64")
}

/// Builds the unique normalized cusp form of the given one-dimensional
/// weight as an exact product of Delta and Eisenstein series, and verifies
/// the Hecke recursion a(p^{r+1}) = a(p) a(p^r) - p^{k-1} a(p^{r-1}) for all
/// prime powers within the truncation.
pub fn newform_level1(k: u32, n: usize) -> Result<HeckeForm> {
    if !ONE_DIM_WEIGHTS.contains(&k) {
        return Err(Error::UnsupportedWeight(k));
    }
    let delta = delta_series(n)?;
    let series = match k {
        12 => delta,
        16 => delta.mul(&eisenstein(4, n)?),
        18 => delta.mul(&eisenstein(6, n)?),
        20 => {
            let e4 = eisenstein(4, n)?;
            delta.mul(&e4).mul(&e4)
        }
        22 => delta.mul(&eisenstein(4, n)?).mul(&eisenstein(6, n)?),
        26 => {
            let e4 = eisenstein(4, n)?;
            delta.mul(&e4).mul(&e4).mul(&eisenstein(6, n)?)
        }
        _ => unreachable!(),
    };
    let coeffs: Vec<BigInt> = series.coeffs[1..].to_vec();
    let form = HeckeForm { weight: k, coeffs };
    verify_hecke_recursion(&form)?;
    Ok(form)
}

fn verify_hecke_recursion(form: &HeckeForm) -> Result<()> {
    let n = form.truncation();
    assert!(form.a(1).is_one(), "normalization a(1) = 1");
    let pk1 = |p: u64| BigInt::from(p).pow(form.weight - 1);
    for &p in crate::arith::small_primes() {
        let p = p as u64;
        if (p * p) as usize > n {
            break;
        }
        let mut power = p * p;
        let mut r = 1u32;
        while power as usize <= n {
            let lhs = form.a(power as usize);
            let rhs = form.a(p as usize) * form.a((power / p) as usize)
                - pk1(p) * form.a((power / p / p) as usize);
            if *lhs != rhs {
                return Err(Error::Config(format!(
                    "Hecke recursion violated at p = {p}, r = {r}"
                )));
            }
            power *= p;
            r += 1;
        }
    }
    Ok(())
}

/// JSON coefficient cache: map weight -> [a(1)..a(N)] as decimal strings.
pub fn newform_cached(k: u32, n: usize, cache_dir: Option<&Path>) -> Result<HeckeForm> {
    let file = cache_dir.map(|d| d.join("qexp_cache.json"));
    if let Some(path) = &file {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(map) = serde_json::from_str::<BTreeMap<String, Vec<String>>>(&text) {
                if let Some(list) = map.get(&k.to_string()) {
                    if list.len() >= n {
                        let coeffs: Option<Vec<BigInt>> =
                            list[..n].iter().map(|s| s.parse().ok()).collect();
                        if let Some(coeffs) = coeffs {
                            let form = HeckeForm { weight: k, coeffs };
                            if verify_hecke_recursion(&form).is_ok() {
                                return Ok(form);
                            }
                        }
                    }
                }
            }
        }
    }
    let form = newform_level1(k, n)?;
    if let Some(path) = &file {
        let mut map: BTreeMap<String, Vec<String>> = std::fs::read_to_string(path)
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
            .unwrap_or_default();
        map.insert(
            k.to_string(),
            form.coeffs.iter().map(|c| c.to_string()).collect(),
        );
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, serde_json::to_string(&map).unwrap())?;
    }
    Ok(form)
}

/// Process-wide memoized forms at the default truncation (2048 terms).
pub fn newform_shared(k: u32) -> Result<Arc<HeckeForm>> {
    static STORE: OnceLock<Mutex<BTreeMap<u32, Arc<HeckeForm>>>> = OnceLock::new();
    let store = STORE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = store.lock().unwrap();
    if let Some(f) = guard.get(&k) {
        return Ok(f.clone());
    }
    let f = Arc::new(newform_level1(k, 2048)?);
    guard.insert(k, f.clone());
    Ok(f)
}

/// Dirichlet coefficients of the finite symmetric-square L-function in the
/// analytic normalization: L_fin(s) = zeta(2s) sum lambda(m^2) m^{-s}
///                                  = sum_n c_n n^{-s},
/// with c_n = sum_{d^2 | n} lambda((n/d^2)^2).
pub fn symsq_dirichlet_coeffs(form: &HeckeForm, n_max: usize) -> Vec<f64> {
    let mut lam_sq = vec![0.0f64; n_max + 1];
    for m in 1..=n_max {
        lam_sq[m] = form
            .lambda_mult((m as u64) * (m as u64));
    }
    let mut c = vec![0.0f64; n_max + 1];
    for (n, cn) in c.iter_mut().enumerate().skip(1) {
        let mut d = 1usize;
        let mut acc = 0.0;
        while d * d <= n {
            if n % (d * d) == 0 {
                acc += lam_sq[n / (d * d)];
            }
            d += 1;
        }
        *cn = acc;
    }
    c
}

/// Completed symmetric-square gamma factor
/// gamma_k(s) = Gamma_R(s+1) Gamma_R(s+k-1) Gamma_R(s+k).
fn symsq_gamma(k: u32, s: C64) -> Result<C64> {
    Ok(gamma_r(s + 1.0)? * gamma_r(s + (k as f64 - 1.0))? * gamma_r(s + k as f64)?)
}

/// Incomplete-gamma-type smoothing kernel G_w(n) = (1/2 pi i)
/// int_(c) gamma_k(w + u) n^{-u} du / u, evaluated by trapezoid on a
/// vertical line (the integrand decays like e^{-3 pi |Im u| / 4}).
struct SmoothKernel {
    c: f64,
    nodes: Vec<(f64, C64)>, // (v, gamma_k(w+c+iv)/(c+iv) * h/(2 pi))
}

impl SmoothKernel {
    fn new(k: u32, w: C64) -> Result<Self> {
        let c = 2.0 + (1.2 - w.re).max(0.0);
        let h = 0.25;
        let vmax = 60.0;
        let mut nodes = Vec::new();
        let m = (vmax / h) as i64;
        for j in -m..=m {
            let v = j as f64 * h;
            let u = C64::new(c, v);
            let g = symsq_gamma(k, w + u)? / u * (h / (2.0 * std::f64::consts::PI));
            nodes.push((v, g));
        }
        Ok(Self { c, nodes })
    }

    fn eval(&self, n: f64) -> C64 {
        let ln_n = n.ln();
        let mut acc = Kahan::new();
        for &(v, g) in &self.nodes {
            // n^{-(c+iv)} = n^{-c} e^{-i v ln n}
            acc.add(g * C64::from_polar(1.0, -v * ln_n));
        }
        acc.value() * n.powf(-self.c)
    }
}

/// Completed symmetric-square L-value Lambda(s) = gamma_k(s) L_fin(s) via the
/// smoothed approximate functional equation (conductor 1, sign +1):
/// Lambda(s) = sum_n c_n [ n^{-s} G_s(n) + n^{-(1-s)} G_{1-s}(n) ].
pub fn symsq_lambda_completed(form: &HeckeForm, s: C64) -> Result<C64> {
    let kernel_s = SmoothKernel::new(form.weight, s)?;
    let kernel_m = SmoothKernel::new(form.weight, C64::new(1.0, 0.0) - s)?;
    let n_max = 700usize.min(form.truncation());
    let c = symsq_dirichlet_coeffs(form, n_max);
    let mut acc = Kahan::new();
    let mut small_run = 0;
    for n in 1..=n_max {
        let nf = n as f64;
        let term = c[n]
            * (C64::new(nf, 0.0).powc(-s) * kernel_s.eval(nf)
                + C64::new(nf, 0.0).powc(s - 1.0) * kernel_m.eval(nf));
        acc.add(term);
        if term.norm() < 1e-16 * acc.value().norm().max(1e-300) {
            small_run += 1;
            if small_run > 8 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(acc.value())
}

/// Finite symmetric-square L-function L_fin(s, Sym^2 f) for Re s > 1.05
/// (analytic continuation inside the strip is exposed through
/// `symsq_lambda_completed`).
pub fn symsq_l_fin(form: &HeckeForm, s: C64, _tol: f64) -> Result<C64> {
    if s.re <= 1.05 {
        return Err(Error::Convergence(format!(
            "symmetric-square Dirichlet series at Re s = {} <= 1.05",
            s.re
        )));
    }
    Ok(symsq_lambda_completed(form, s)? / symsq_gamma(form.weight, s)?)
}

/// Petersson norm through the level-1 bridge
/// (f, f) = Gamma_R(2) Gamma_C(k) L_fin(1, Sym^2 f) / 2^k.
pub fn petersson_norm_sq(form: &HeckeForm, _tol: f64) -> Result<f64> {
    let one = C64::new(1.0, 0.0);
    let l1 = symsq_lambda_completed(form, one)? / symsq_gamma(form.weight, one)?;
    let v = gamma_r(C64::new(2.0, 0.0))? * gamma_c(C64::new(form.weight as f64, 0.0))? * l1
        / 2f64.powi(form.weight as i32);
    if v.im.abs() > 1e-8 * v.re.abs() || v.re <= 0.0 {
        return Err(Error::Convergence(format!(
            "Petersson norm not positive real: {v}"
        )));
    }
    Ok(v.re)
}
