//! Special functions: Pochhammer symbols, complex Gamma and digamma, the
//! confluent and Gauss hypergeometric functions, and the fixed square-root
//! branch used by the Kummer-type radial solutions.

mod branch;
mod gamma;
mod gauss;
mod kummer;

pub use branch::{branch_sqrt, BranchInput};
pub use gamma::{digamma, gamma, ln_gamma, rgamma};
pub use gauss::gauss_2f1;
pub use kummer::{kummer_1f1, kummer_1f1_series, kummer_derivative, kummer_second_derivative, KummerParams, DEFAULT_ITERATION_CAP};

use crate::jet::C64;

/// `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: C64, n: u32) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..n {
        acc *= a + j as f64;
    }
    acc
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: C64,
    comp: C64,
}

fn neumaier(sum: f64, comp: &mut f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

impl CompensatedSum {
    pub fn add(&mut self, x: C64) {
        let mut cr = self.comp.re;
        let mut ci = self.comp.im;
        let re = neumaier(self.sum.re, &mut cr, x.re);
        let im = neumaier(self.sum.im, &mut ci, x.im);
        self.sum = C64::new(re, im);
        self.comp = C64::new(cr, ci);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

/// Whether `z` lies within `tol` of a nonpositive integer.
pub(crate) fn near_nonpositive_integer(z: C64, tol: f64) -> bool {
    z.re <= tol && z.im.abs() <= tol && (z.re - z.re.round()).abs() <= tol
}
