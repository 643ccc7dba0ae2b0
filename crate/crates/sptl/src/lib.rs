//! Spectral trace lab: a numerical laboratory for parameterized trace-formula
//! identities over the rationals and weighted one-level densities of
//! symmetric-power L-functions.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`] — complex special functions (Gamma, ₂F₁, Legendre, Bessel,
//!   Hurwitz/Dirichlet zeta functions);
//! * [`arith`] — multiplicative arithmetic: Kronecker characters, discriminant
//!   decomposition, the conductor-correction polynomial `B_Δ(s)` and the
//!   quadratic L-series `L(s, Δ)`;
//! * [`qexp`] — exact q-expansions of the level-1 eigenforms of weight
//!   12..26, symmetric-square Dirichlet series and Petersson norms;
//! * [`localterms`] — local identities: Chebyshev moments of the weighted
//!   Plancherel measure, the local orbital transform, and the unipotent
//!   Gamma-factor identity;
//! * [`zagier`] — both sides of the parameterized trace formula and the
//!   Bessel-integral kernel identity;
//! * [`density`] — Katz–Sarnak pairings, weighted-moment model of the Weil
//!   explicit formula, and prime-sum asymptotics;
//! * [`sieve`] — a cached prime sieve backing the prime sums.

pub mod arith;
pub mod density;
pub mod error;
pub mod localterms;
pub mod parallel;
pub mod qexp;
pub mod sieve;
pub mod specfun;
pub mod zagier;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Convenience constructor for complex scalars.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
