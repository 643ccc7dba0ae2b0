//! Weighted one-level-density machinery: symmetric-power local L-factors,
//! functional-equation signs and conductors, analytic test-function pairs,
//! the five classical density pairings plus the anomalous one, the
//! moment-driven explicit-formula model, and prime-sum asymptotics.

use crate::localterms::chebyshev_x;
use crate::specfun::{digamma, gamma, gamma_r};
use crate::{c64, C64, Error, Result};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

const EULER_GAMMA: f64 = 0.5772156649015329;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An even Schwartz-class test function together with its compactly
/// supported Fourier transform (conventions: phi_hat(xi) = int phi(x)
/// e^{-2 pi i x xi} dx, so int phi = phi_hat(0) and int phi_hat = phi(0)).
#[derive(Clone)]
pub struct TestFunctionPair {
    pub beta: f64,
    pub phi: RealFn,
    pub phi_hat: RealFn,
    pub phi0: f64,
    pub phihat0: f64,
    /// int phi_hat(xi) |xi| d xi in closed form.
    pub phihat_abs_moment: f64,
    /// closed two-sided tail int_{|x|>X} phi(x) dx
    pub tail: RealFn,
    pub name: &'static str,
}

impl std::fmt::Debug for TestFunctionPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestFunctionPair({}, beta={})", self.name, self.beta)
    }
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Fejer pair: phi_hat(xi) = (1 - |xi|/beta)_+, phi(x) = beta
/// sinc^2(pi beta x).
pub fn fejer_pair(beta: f64) -> Result<TestFunctionPair> {
    if beta <= 0.0 {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    let c = 2.0 * PI * beta;
    Ok(TestFunctionPair {
        beta,
        phi: Arc::new(move |x| beta * sinc(PI * beta * x).powi(2)),
        phi_hat: Arc::new(move |xi| (1.0 - xi.abs() / beta).max(0.0)),
        phi0: beta,
        phihat0: 1.0,
        phihat_abs_moment: beta * beta / 3.0,
        tail: Arc::new(move |x_cut: f64| {
            // int_{|x|>X} sin^2(pi beta x)/(pi^2 beta x^2) dx expanded by
            // parts; error O(X^{-4})
            (1.0 / (PI * PI * beta))
                * (1.0 / x_cut + (c * x_cut).sin() / (c * x_cut * x_cut)
                    - 2.0 * (c * x_cut).cos() / (c * c * x_cut.powi(3)))
        }),
        name: "fejer",
    })
}

/// Squared-Fejer pair: phi_hat(xi) = (1 - |xi|/beta)_+^2,
/// phi(x) = 4 beta (u - sin u)/u^3 with u = 2 pi beta x.
pub fn fejer_squared_pair(beta: f64) -> Result<TestFunctionPair> {
    if beta <= 0.0 {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    let c = 2.0 * PI * beta;
    Ok(TestFunctionPair {
        beta,
        phi: Arc::new(move |x| {
            let u = c * x;
            if u.abs() < 1e-4 {
                // (u - sin u)/u^3 = 1/6 - u^2/120 + ...
                4.0 * beta * (1.0 / 6.0 - u * u / 120.0)
            } else {
                4.0 * beta * (u - u.sin()) / (u * u * u)
            }
        }),
        phi_hat: Arc::new(move |xi| (1.0 - xi.abs() / beta).max(0.0).powi(2)),
        phi0: 2.0 * beta / 3.0,
        phihat0: 1.0,
        phihat_abs_moment: beta * beta / 6.0,
        tail: Arc::new(move |x_cut: f64| {
            // phi = 4 beta / (c^2 x^2) - 4 beta sin(cx)/(c^3 x^3); the
            // oscillatory piece integrates to O(X^{-3})
            2.0 / (PI * PI * beta * x_cut)
                + 8.0 * beta * (c * x_cut).cos() / (c.powi(4) * x_cut.powi(3))
        }),
        name: "fejer_squared",
    })
}

/// Trapezoid pair: phi_hat = 1 on [-a, a], linear ramp to 0 at |xi| = beta.
/// The flat plateau gives small primes exact unit weight in explicit-formula
/// sums, so convergent prime sums saturate as fast as the support allows.
/// phi(x) = (beta^2 sinc^2(pi beta x) - a^2 sinc^2(pi a x)) / (beta - a).
pub fn trapezoid_pair(a: f64, beta: f64) -> Result<TestFunctionPair> {
    if !(a > 0.0 && beta > a) {
        return Err(Error::Domain(format!(
            "trapezoid needs 0 < plateau {a} < support {beta}"
        )));
    }
    let d = beta - a;
    Ok(TestFunctionPair {
        beta,
        phi: Arc::new(move |x| {
            (beta * beta * sinc(PI * beta * x).powi(2) - a * a * sinc(PI * a * x).powi(2)) / d
        }),
        phi_hat: Arc::new(move |xi| ((beta - xi.abs()).max(0.0) / d).min(1.0)),
        phi0: beta + a,
        phihat0: 1.0,
        // 2 [ int_0^a xi + int_a^beta xi (beta - xi)/(beta - a) ]
        phihat_abs_moment: a * a + (beta - a) * (beta + 2.0 * a) / 3.0,
        tail: Arc::new(move |x_cut: f64| {
            let t = |c: f64| {
                let w = 2.0 * PI * c;
                (1.0 / (PI * PI * c))
                    * (1.0 / x_cut + (w * x_cut).sin() / (w * x_cut * x_cut)
                        - 2.0 * (w * x_cut).cos() / (w * w * x_cut.powi(3)))
            };
            (beta * t(beta) - a * t(a)) / d
        }),
        name: "trapezoid",
    })
}

/// Cosine-squared pair: phi_hat(xi) = cos^2(pi xi / (2 beta)) on
/// [-beta, beta], phi(x) = sin(2 pi beta x) / (2 pi x (1 - 4 beta^2 x^2)).
/// Unlike the Fejer hat, phi_hat is flat at the origin (derivative zero in
/// |xi|), which removes the leading finite-level saturation error of
/// convergent prime sums.
pub fn cosine_pair(beta: f64) -> Result<TestFunctionPair> {
    if beta <= 0.0 {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    Ok(TestFunctionPair {
        beta,
        phi: Arc::new(move |x| {
            let xa = x.abs();
            let s = 2.0 * beta * xa - 1.0;
            if s.abs() < 0.1 {
                // rewrite through the removable singularity at |x| = 1/(2 beta):
                // phi = sinc(pi s) / (2 |x| (2 + s)) with s = 2 beta |x| - 1
                sinc(PI * s) / (2.0 * xa * (2.0 + s))
            } else if xa < 1e-8 {
                beta
            } else {
                (2.0 * PI * beta * xa).sin()
                    / (2.0 * PI * xa * (1.0 - 4.0 * beta * beta * xa * xa))
            }
        }),
        phi_hat: Arc::new(move |xi| {
            if xi.abs() >= beta {
                0.0
            } else {
                (PI * xi / (2.0 * beta)).cos().powi(2)
            }
        }),
        phi0: beta,
        phihat0: 1.0,
        phihat_abs_moment: beta * beta * (0.5 - 2.0 / (PI * PI)),
        // phi decays like x^{-3} and is mean-free at infinity
        tail: Arc::new(|_x| 0.0),
        name: "cosine",
    })
}

/// Modulated pair with phi_hat(0) = 0: phi_hat(xi) = g(xi - c) + g(xi + c)
/// with g a width-w triangle, so phi(x) = 2 cos(2 pi c x) w sinc^2(pi w x).
/// Support radius beta = c + w; requires c > w so the bumps clear the
/// origin.
pub fn bump_pair(center: f64, width: f64) -> Result<TestFunctionPair> {
    if !(width > 0.0 && center > width) {
        return Err(Error::Domain(format!(
            "bump pair needs center {center} > width {width} > 0"
        )));
    }
    let beta = center + width;
    Ok(TestFunctionPair {
        beta,
        phi: Arc::new(move |x| {
            2.0 * (2.0 * PI * center * x).cos() * width * sinc(PI * width * x).powi(2)
        }),
        phi_hat: Arc::new(move |xi| {
            (1.0 - (xi.abs() - center).abs() / width).max(0.0)
        }),
        phi0: 2.0 * width,
        phihat0: 0.0,
        phihat_abs_moment: 2.0 * center * width,
        // purely oscillatory decay: tail is O(X^{-2}), below tolerance at
        // the cutoffs used
        tail: Arc::new(|_x| 0.0),
        name: "bump",
    })
}

/// Linear blend of Fejer triangles: phi_hat(xi) = sum_i c_i (1 - |xi|/b_i)_+
/// for `parts` = [(c_1, b_1), ...]. Any even piecewise-linear phi_hat with
/// compact support can be written this way, which makes the blend the tool
/// of choice for shaping the weight that explicit-formula prime sums assign
/// to each prime range: an ascending kink at the origin offsets the
/// 1/log-level correction of the zero-shift model, and a negative narrow
/// component suppresses the small-prime discretization error.
pub fn fejer_blend_pair(parts: &[(f64, f64)]) -> Result<TestFunctionPair> {
    if parts.is_empty() {
        return Err(Error::Domain("blend needs at least one component".into()));
    }
    let mut comps = Vec::with_capacity(parts.len());
    for &(c, b) in parts {
        comps.push((c, fejer_pair(b)?));
    }
    let beta = parts.iter().map(|&(_, b)| b).fold(0.0_f64, f64::max);
    let phi0 = comps.iter().map(|(c, f)| c * f.phi0).sum();
    let phihat0 = comps.iter().map(|(c, _)| c).sum();
    let moment = comps.iter().map(|(c, f)| c * f.phihat_abs_moment).sum();
    let phis: Vec<(f64, RealFn)> = comps.iter().map(|(c, f)| (*c, f.phi.clone())).collect();
    let hats: Vec<(f64, RealFn)> = comps.iter().map(|(c, f)| (*c, f.phi_hat.clone())).collect();
    let tails: Vec<(f64, RealFn)> = comps.iter().map(|(c, f)| (*c, f.tail.clone())).collect();
    Ok(TestFunctionPair {
        beta,
        phi: Arc::new(move |x| phis.iter().map(|(c, p)| c * p(x)).sum()),
        phi_hat: Arc::new(move |xi| hats.iter().map(|(c, h)| c * h(xi)).sum()),
        phi0,
        phihat0,
        phihat_abs_moment: moment,
        tail: Arc::new(move |x| tails.iter().map(|(c, t)| c * t(x)).sum()),
        name: "fejer_blend",
    })
}

/// The six limiting-density labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryType {
    Sp,
    O,
    SOeven,
    SOodd,
    U,
    AnomalousSp2,
}

impl SymmetryType {
    pub fn tag(self) -> &'static str {
        match self {
            SymmetryType::Sp => "Sp",
            SymmetryType::O => "O",
            SymmetryType::SOeven => "SOeven",
            SymmetryType::SOodd => "SOodd",
            SymmetryType::U => "U",
            SymmetryType::AnomalousSp2 => "AnomalousSp2",
        }
    }
}

/// Limiting symmetry type of the Sym^r family with spectral weight z.
pub fn symmetry_type(r: u32, z: f64) -> SymmetryType {
    if r == 2 && z == 0.0 {
        SymmetryType::AnomalousSp2
    } else if r % 2 == 0 {
        SymmetryType::Sp
    } else {
        SymmetryType::O
    }
}

/// Closed-form density pairing int phi(x) W(x) dx, valid for supp phi_hat
/// inside (-1, 1).
pub fn pairing_analytic(t: SymmetryType, f: &TestFunctionPair) -> Result<f64> {
    if f.beta > 1.0 {
        return Err(Error::SupportTooWide(f.beta, 1.0));
    }
    // For beta < 1: int phi sinc(2 pi x) dx = (1/2) int phi_hat = phi(0)/2.
    Ok(match t {
        SymmetryType::U => f.phihat0,
        SymmetryType::Sp => f.phihat0 - f.phi0 / 2.0,
        SymmetryType::O => f.phihat0 + f.phi0 / 2.0,
        SymmetryType::SOeven => f.phihat0 + f.phi0 / 2.0,
        SymmetryType::SOodd => f.phihat0 - f.phi0 / 2.0 + f.phi0,
        SymmetryType::AnomalousSp2 => {
            f.phihat0 - 1.5 * f.phi0 + 2.0 * f.phihat_abs_moment
        }
    })
}

const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// 2 int_0^X g(x) dx for even g, composite 16-point Gauss-Legendre on cells
/// of length `cell`, parallel over cells with fixed-order reduction.
fn integral_even<F: Fn(f64) -> f64 + Sync + Send>(g: F, x_max: f64, cell: f64) -> f64 {
    let n_cells = (x_max / cell).ceil() as u64;
    2.0 * crate::parallel::ordered_sum_f64(0, n_cells, 256, |j| {
        let a = j as f64 * cell;
        let b = ((j + 1) as f64 * cell).min(x_max);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut s = 0.0;
        for i in 0..8 {
            s += GL16_W[i] * (g(mid + half * GL16_X[i]) + g(mid - half * GL16_X[i]));
        }
        s * half
    })
}

/// The same pairing by numerical integration against the density kernel,
/// with the slowly decaying mean part of the integrand corrected by the
/// pair's closed tail integral.
pub fn pairing_quadrature(t: SymmetryType, f: &TestFunctionPair, _tol: f64) -> Result<f64> {
    if f.beta > 1.0 {
        return Err(Error::SupportTooWide(f.beta, 1.0));
    }
    if t == SymmetryType::AnomalousSp2 {
        // each closed ingredient recomputed numerically: int phi for
        // phi_hat(0), phi(0) directly, and the |xi|-moment of phi_hat
        let phi = f.phi.clone();
        let phihat0_num =
            integral_even(move |x| phi(x), 2.0e4, 0.5) + (f.tail)(2.0e4);
        let ph = f.phi_hat.clone();
        let beta = f.beta;
        let moment_num = integral_even(move |xi| if xi <= beta { ph(xi) * xi } else { 0.0 }, beta, beta / 64.0) / 1.0;
        return Ok(phihat0_num - 1.5 * f.phi0 + 2.0 * moment_num);
    }
    let x_max = 2.0e4;
    let phi = f.phi.clone();
    let weight = move |x: f64| -> f64 {
        let s = sinc(2.0 * PI * x);
        match t {
            SymmetryType::U => 1.0,
            SymmetryType::Sp => 1.0 - s,
            SymmetryType::SOeven => 1.0 + s,
            // the delta_0 atoms are added outside the integral
            SymmetryType::O | SymmetryType::SOodd => {
                if t == SymmetryType::O {
                    1.0
                } else {
                    1.0 - s
                }
            }
            SymmetryType::AnomalousSp2 => unreachable!(),
        }
    };
    let main = integral_even(move |x| phi(x) * weight(x), x_max, 0.5);
    // mean part of the tail (the density kernels all have mean value 1;
    // the oscillatory sinc parts contribute O(X^{-2}), below tolerance)
    let tail = (f.tail)(x_max);
    let atom = match t {
        SymmetryType::O => 0.5 * f.phi0,
        SymmetryType::SOodd => f.phi0,
        _ => 0.0,
    };
    Ok(main + tail + atom)
}

/// lambda_{Sym^r pi}(p^m) from the Satake point x = alpha + alpha^{-1}:
/// X_r(2 cos(m theta)) with x = 2 cos theta.
pub fn sym_power_sum(x: f64, r: u32, m: u32) -> Result<f64> {
    if !(-2.0..=2.0).contains(&x) {
        return Err(Error::Domain(format!("Satake point {x} outside [-2, 2]")));
    }
    let theta = (x / 2.0).clamp(-1.0, 1.0).acos();
    Ok(chebyshev_x(r, 2.0 * (m as f64 * theta).cos()))
}

/// Family-average model parameters: spectral weight z, prime-power level
/// norm Nq, symmetric-power degree r.
#[derive(Debug, Clone, Copy)]
pub struct MomentSpec {
    pub z: f64,
    pub nq: f64,
    pub r: u32,
}

impl MomentSpec {
    pub fn new(z: f64, nq: f64, r: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::Domain(format!("z = {z} outside [0, 1]")));
        }
        if nq < 100.0 {
            return Err(Error::Domain(format!("Nq = {nq} below 100")));
        }
        if !(1..=8).contains(&r) {
            return Err(Error::Domain(format!("r = {r} outside 1..=8")));
        }
        Ok(Self { z, nq, r })
    }
}

/// Model expectation of the degree-n eigenvalue monomial at p under the
/// weighted family average: delta(n even) p^{-n(z+1)/4}, with the z = 0
/// first-order level correction (1 - n log p / (2 log Nq)).
pub fn moment_main(p: f64, n: u32, spec: &MomentSpec) -> Result<f64> {
    if n % 2 != 0 {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0);
    }
    let base = p.powf(-(n as f64) * (spec.z + 1.0) / 4.0);
    if spec.z == 0.0 {
        let corr = (n as f64) * p.ln() / (2.0 * spec.nq.ln());
        if corr > 1.0 {
            return Err(Error::ModelRange(format!(
                "z = 0 correction {corr:.3} exceeds 1 at p = {p}, n = {n}"
            )));
        }
        Ok(base * (1.0 - corr))
    } else {
        Ok(base)
    }
}

/// The support bound beta_0(r, z) from the quantitative equidistribution
/// input, with d_F = 1, delta_1 = 1/2 and sigma = z:
/// beta_0 = delta_1 / (r (r A + 1/2)), A = min(l)/2 - (z+1)/2.
pub fn beta0(r: u32, z: f64, k_list: &[u32]) -> f64 {
    let d = k_list.len() as f64;
    let l = *k_list.iter().min().unwrap() as f64;
    let a = (l / 2.0 + d - 1.0 - (z + 1.0) / 2.0) / d;
    let rf = r as f64;
    0.5 / (rf * (rf * a + 0.5))
}

const SIEVE_CAP: u64 = 100_000_000;
const PNT_CAP: f64 = 1.0e9;

/// Process-global sieve, grown on demand.
fn with_primes<T>(limit: u64, f: impl FnOnce(&[u32]) -> T) -> Result<T> {
    static SIEVE: OnceLock<Mutex<Option<crate::sieve::PrimeSieve>>> = OnceLock::new();
    let cell = SIEVE.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().unwrap();
    let need_build = match guard.as_ref() {
        Some(s) => s.limit() < limit,
        None => true,
    };
    if need_build {
        // round up so repeated slightly-larger requests reuse the build
        let target = limit.next_power_of_two().max(1 << 14).min(SIEVE_CAP);
        let dir = crate::sieve::env_cache_dir();
        *guard = Some(crate::sieve::load_or_build(target.max(limit), dir.as_deref())?);
    }
    let sieve = guard.as_ref().unwrap();
    let primes = sieve.primes();
    let end = primes.partition_point(|&p| (p as u64) <= limit);
    Ok(f(&primes[..end]))
}

/// Sum of g(p) over primes p <= limit. Within the sieve budget the sum is
/// exact; between the budget and 10^9 the remainder is approximated by the
/// prime-counting integral int g(x) dx / ln x (documented model
/// extrapolation).
pub fn sum_over_primes<F>(limit: f64, g: F) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    // small slack so boundary cases like Nq^{r beta} = 1e9 computed in
    // floating point do not trip the budget check
    if limit > PNT_CAP * (1.0 + 1e-9) {
        return Err(Error::SieveRange(limit as u64, PNT_CAP as u64));
    }
    let exact_to = (limit as u64).min(SIEVE_CAP);
    let mut total = with_primes(exact_to, |ps| {
        crate::parallel::ordered_sum_f64(0, ps.len() as u64, 1 << 14, |i| g(ps[i as usize] as f64))
    })?;
    if limit > SIEVE_CAP as f64 {
        // PNT integral on log-spaced cells
        let (a, b) = (SIEVE_CAP as f64, limit);
        let n_cells = 64;
        let la = a.ln();
        let lb = b.ln();
        let h = (lb - la) / n_cells as f64;
        let mut acc = 0.0;
        for j in 0..n_cells {
            let u0 = la + j as f64 * h;
            let u1 = u0 + h;
            for i in 0..8 {
                for &sgn in &[1.0f64, -1.0] {
                    let u = 0.5 * (u0 + u1) + sgn * 0.5 * h * GL16_X[i];
                    let x = u.exp();
                    // dx = x du; density 1/ln x
                    acc += GL16_W[i] * 0.5 * h * g(x) * x / u;
                }
            }
        }
        total += acc;
    }
    Ok(total)
}

/// Explicit-formula model value D for the Sym^r family with weight z at
/// level norm Nq:
/// phi_hat(0) + (-1)^{r+1} phi(0)/2 - M1 - M2, where the prime sums use the
/// model moments in place of family averages.
pub fn explicit_formula_model(spec: &MomentSpec, f: &TestFunctionPair) -> Result<f64> {
    let rf = spec.r as f64;
    // the model arithmetic is well defined whenever the target pairings
    // are (beta <= 1); the sieve budget below bounds the prime range
    if f.beta > 1.0 {
        return Err(Error::SupportTooWide(f.beta, 1.0));
    }
    let log_q = rf * spec.nq.ln();
    let cutoff = (spec.nq.powf(rf * f.beta)).max(100.0);
    let phi_hat = f.phi_hat.clone();
    // every odd moment vanishes, so for odd r the first prime sum is
    // identically zero and needs no primes at all
    let m1 = if spec.r % 2 == 1 {
        0.0
    } else {
        let spec = *spec;
        let phi_hat = phi_hat.clone();
        (2.0 / log_q)
            * sum_over_primes(cutoff, move |p| {
                let w = phi_hat(p.ln() / log_q) * p.ln() / p.sqrt();
                if w == 0.0 {
                    return 0.0;
                }
                moment_main(p, spec.r, &spec).unwrap_or(0.0) * w
            })?
    };
    let mut m2 = 0.0;
    let cutoff2 = (spec.nq.powf(rf * f.beta / 2.0)).max(100.0);
    for m in 0..spec.r {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let n = 2 * (spec.r - m);
        let spec_c = *spec;
        let phi_hat = phi_hat.clone();
        m2 += sign
            * (2.0 / log_q)
            * sum_over_primes(cutoff2, move |p| {
                let w = phi_hat(2.0 * p.ln() / log_q) * p.ln() / p;
                if w == 0.0 {
                    return 0.0;
                }
                moment_main(p, n, &spec_c).unwrap_or(0.0) * w
            })?;
    }
    let parity = if spec.r % 2 == 0 { -1.0 } else { 1.0 };
    Ok(f.phihat0 + parity * f.phi0 / 2.0 - m1 - m2)
}

/// S1(Q) = sum_p phi_hat(log p / log Q) log p / (p log Q); tends to
/// phi(0)/2 at rate O(1/log Q).
pub fn prime_sum_s1(f: &TestFunctionPair, q: f64) -> Result<f64> {
    let log_q = q.ln();
    let cutoff = q.powf(f.beta).max(100.0);
    let phi_hat = f.phi_hat.clone();
    sum_over_primes(cutoff, move |p| phi_hat(p.ln() / log_q) * p.ln() / (p * log_q))
}

/// S2(Q) = sum_p phi_hat(log p / log Q) (log p)^2 / (p (log Q)^2); tends to
/// (1/2) int phi_hat |x| dx at rate O(1/log Q).
pub fn prime_sum_s2(f: &TestFunctionPair, q: f64) -> Result<f64> {
    let log_q = q.ln();
    let cutoff = q.powf(f.beta).max(100.0);
    let phi_hat = f.phi_hat.clone();
    sum_over_primes(cutoff, move |p| {
        phi_hat(p.ln() / log_q) * p.ln() * p.ln() / (p * log_q * log_q)
    })
}

/// Archimedean L-factor of Sym^r of a weight-k discrete series.
pub fn sym_lfactor_arch(r: u32, k: u32, s: C64) -> Result<C64> {
    let kf = k as f64;
    let mut out = c64(1.0, 0.0);
    if r % 2 == 1 {
        for j in 0..(r + 1) / 2 {
            let shift = (2 * j + 1) as f64 * (kf - 1.0) / 2.0;
            out = out * gamma_r(s + shift)? * gamma_r(s + (1.0 + shift))?;
        }
    } else {
        let mu = if (r / 2) % 2 == 1 { 1.0 } else { 0.0 };
        out = gamma_r(s + mu)?;
        for j in 1..=r / 2 {
            let shift = j as f64 * (kf - 1.0);
            out = out * gamma_r(s + shift)? * gamma_r(s + (1.0 + shift))?;
        }
    }
    Ok(out)
}

/// Unramified local factor of Sym^r at p from the Satake point x:
/// prod_{j=0}^r (1 - alpha^{2j-r} p^{-s})^{-1}.
pub fn sym_lfactor_unram(r: u32, x: f64, p: u64, s: C64) -> Result<C64> {
    if !(-2.0..=2.0).contains(&x) {
        return Err(Error::Domain(format!("Satake point {x} outside [-2, 2]")));
    }
    let theta = (x / 2.0).clamp(-1.0, 1.0).acos();
    let ps = c64(p as f64, 0.0).powc(-s);
    let mut prod = c64(1.0, 0.0);
    for j in 0..=r {
        let phase = (2 * j as i64 - r as i64) as f64 * theta;
        let factor = c64(1.0, 0.0) - C64::from_polar(1.0, phase) * ps;
        if factor.norm() < 1e-14 {
            return Err(Error::LocalFactorPole(format!("Sym^{r} factor at p = {p}, s = {s}")));
        }
        prod *= factor;
    }
    Ok(c64(1.0, 0.0) / prod)
}

/// Steinberg local factor at the level prime:
/// (1 - chi(pi)^r q^{-s - r/2})^{-1}.
pub fn sym_lfactor_steinberg(r: u32, chi: i32, p: u64, s: C64) -> Result<C64> {
    if chi != 1 && chi != -1 {
        return Err(Error::Domain(format!("chi = {chi} must be +-1")));
    }
    let sgn = if r % 2 == 0 { 1.0 } else { chi as f64 };
    let factor = c64(1.0, 0.0) - sgn * c64(p as f64, 0.0).powc(-s - r as f64 / 2.0);
    if factor.norm() < 1e-14 {
        return Err(Error::LocalFactorPole(format!("Steinberg factor at p = {p}, s = {s}")));
    }
    Ok(c64(1.0, 0.0) / factor)
}

/// Sign of the functional equation of Sym^r: +1 for even r; for odd r the
/// product prod_v prod_j i^{(2j+1)(l_v - 1) + 1} times (-chi^r)^r, which
/// must come out real.
pub fn epsilon_sign(r: u32, k_list: &[u32], chi: i32) -> Result<i32> {
    if chi != 1 && chi != -1 {
        return Err(Error::Domain(format!("chi = {chi} must be +-1")));
    }
    if r % 2 == 0 {
        return Ok(1);
    }
    let mut exponent: u64 = 0;
    for &l in k_list {
        for j in 0..(r + 1) / 2 {
            exponent += ((2 * j + 1) as u64) * ((l - 1) as u64) + 1;
        }
    }
    let ipow = match exponent % 4 {
        0 => 1i32,
        2 => -1,
        _ => {
            return Err(Error::NonRealSign(format!(
                "i^{exponent} is imaginary; sign formula transcription error"
            )))
        }
    };
    // (-chi^r)^r with r odd: = -chi
    Ok(ipow * (-chi))
}

/// Analytic conductor Q(Sym^r) = (prod l^{2 floor((r+1)/2)}) Nq^r.
pub fn analytic_conductor(r: u32, k_list: &[u32], nq: f64) -> f64 {
    let e = 2 * ((r + 1) / 2);
    let weight_part: f64 = k_list.iter().map(|&l| (l as f64).powi(e as i32)).product();
    weight_part * nq.powi(r as i32)
}

/// The level-aspect constant D(q) controlling the z = 0 moment correction,
/// with zeta residue 1, constant term gamma, and trivial different.
pub fn dq_constant(k_list: &[u32], q: u64) -> Result<f64> {
    if q < 3 {
        return Err(Error::Domain(format!("level prime {q} must be >= 3")));
    }
    let d_f = k_list.len() as f64;
    let qf = q as f64;
    let m = qf.ln() / (1.0 + qf.powf(-0.5));
    let mut c = 1.0f64;
    for &l in k_list {
        let lf = l as f64;
        c *= (lf - 1.0) / PI
            * PI.powf(0.75)
            * gamma(c64(lf - 0.5, 0.0))?.re
            / (gamma(c64(0.25, 0.0))?.re * gamma(c64(lf, 0.0))?.re);
    }
    let psi34 = digamma(c64(0.75, 0.0))?.re;
    let mut psi_sum = 0.0;
    for &l in k_list {
        psi_sum += digamma(c64(l as f64 - 0.5, 0.0))?.re;
    }
    let bracket = d_f * (-0.5 * 2.0f64.ln() - 0.75 * PI.ln() + 0.25 * psi34) + 0.5 * psi_sum;
    Ok((2.0 * c * bracket) / m + (2.0 * EULER_GAMMA * c) / m + c)
}

/// One-level-density demonstration for a single eigenform (no family
/// average): the explicit-formula combination evaluated with the form's
/// actual normalized Hecke eigenvalues as Satake data.
pub fn empirical_one_level(
    form: &crate::qexp::HeckeForm,
    r: u32,
    f: &TestFunctionPair,
    p_max: u64,
) -> Result<f64> {
    if r == 0 || r > 4 {
        return Err(Error::Domain(format!("r = {r} outside 1..=4 for the demo")));
    }
    if p_max > 10_000_000 {
        return Err(Error::SieveRange(p_max, 10_000_000));
    }
    let q = analytic_conductor(r, &[form.weight], 1.0);
    let log_q = q.ln();
    let mut m1 = 0.0f64;
    let mut m2 = 0.0f64;
    let primes: Vec<u64> = with_primes(p_max.min(form.truncation() as u64), |ps| {
        ps.iter().map(|&p| p as u64).collect()
    })?;
    for &p in &primes {
        let pf = p as f64;
        let x = form.lambda(p as usize).clamp(-2.0, 2.0);
        let w1 = (f.phi_hat)(pf.ln() / log_q) * pf.ln() / pf.sqrt();
        if w1 != 0.0 {
            m1 += sym_power_sum(x, r, 1)? * w1;
        }
        let w2 = (f.phi_hat)(2.0 * pf.ln() / log_q) * pf.ln() / pf;
        if w2 != 0.0 {
            for m in 0..r {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                m2 += sign * sym_power_sum(x, 2 * (r - m), 1)? * w2;
            }
        }
    }
    let parity = if r % 2 == 0 { -1.0 } else { 1.0 };
    Ok(f.phihat0 + parity * f.phi0 / 2.0 - (2.0 / log_q) * m1 - (2.0 / log_q) * m2)
}
