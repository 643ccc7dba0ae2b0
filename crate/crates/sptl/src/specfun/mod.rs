//! Complex special functions needed by the closed-form kernels and L-factors.
//!
//! Everything works in double precision with compensated summation inside
//! series; target accuracies are 1e-9..1e-12 relative at desk scale.

mod bessel;
mod gamma;
mod hyp;
mod zeta;

pub use bessel::bessel_j;
pub use gamma::{digamma, gamma, gamma_c, gamma_r};
pub use hyp::{hyp2f1, legendre_p};
pub use zeta::{completed_zeta, dirichlet_l, hurwitz_zeta, riemann_zeta};

use crate::C64;

/// Kahan-compensated accumulator for complex series.
#[derive(Default, Clone, Copy)]
pub(crate) struct Kahan {
    sum: C64,
    comp: C64,
}

impl Kahan {
    pub fn new() -> Self {
        Self {
            sum: C64::new(0.0, 0.0),
            comp: C64::new(0.0, 0.0),
        }
    }

    #[inline]
    pub fn add(&mut self, term: C64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> C64 {
        self.sum
    }
}
