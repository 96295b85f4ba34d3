//! Kummer's confluent hypergeometric function `₁F₁(α; γ; z)`.

use serde::{Deserialize, Serialize};

use super::{near_nonpositive_integer, CompensatedSum};
use crate::error::{LabError, Result};
use crate::jet::C64;

pub const DEFAULT_ITERATION_CAP: usize = 20_000;
const RATIO_STOP: f64 = 1e-16;
const QUIET_TERMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KummerParams {
    pub alpha: C64,
    pub gamma: C64,
}

impl KummerParams {
    pub fn new(alpha: C64, gamma: C64) -> Result<Self> {
        if near_nonpositive_integer(gamma, 1e-14) {
            return Err(LabError::Parameter(format!("gamma = {gamma} is a nonpositive integer")));
        }
        Ok(KummerParams { alpha, gamma })
    }

    pub fn shifted(&self) -> KummerParams {
        KummerParams { alpha: self.alpha + 1.0, gamma: self.gamma + 1.0 }
    }
}

/// Direct Maclaurin series, stopping once three consecutive terms fall below
/// `1e-16` of the running sum.
pub fn kummer_1f1_series(p: &KummerParams, z: C64, cap: usize) -> Result<C64> {
    if near_nonpositive_integer(p.gamma, 1e-14) {
        return Err(LabError::Parameter(format!("gamma = {} is a nonpositive integer", p.gamma)));
    }
    let mut sum = CompensatedSum::default();
    let mut term = C64::new(1.0, 0.0);
    sum.add(term);
    let mut quiet = 0;
    for n in 0..cap {
        let nf = n as f64;
        term *= (p.alpha + nf) / ((p.gamma + nf) * (nf + 1.0)) * z;
        if term == C64::new(0.0, 0.0) {
            return Ok(sum.value());
        }
        sum.add(term);
        let s = sum.value();
        if !s.is_finite() {
            return Err(LabError::SeriesNonConvergence { what: "1F1 overflow".into(), iterations: n });
        }
        // past the peak of |term| only
        if nf + 1.0 > (z.norm() - p.alpha.norm()).max(0.0) && term.norm() <= RATIO_STOP * s.norm() {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                return Ok(s);
            }
        } else {
            quiet = 0;
        }
    }
    Err(LabError::SeriesNonConvergence { what: format!("1F1({}; {}; {})", p.alpha, p.gamma, z), iterations: cap })
}

/// `₁F₁(α; γ; z)`, using `e^z ₁F₁(γ−α; γ; −z)` when `Re z < 0`.
pub fn kummer_1f1(p: &KummerParams, z: C64) -> Result<C64> {
    if z.re < 0.0 {
        let q = KummerParams { alpha: p.gamma - p.alpha, gamma: p.gamma };
        Ok(z.exp() * kummer_1f1_series(&q, -z, DEFAULT_ITERATION_CAP)?)
    } else {
        kummer_1f1_series(p, z, DEFAULT_ITERATION_CAP)
    }
}

/// `(α/γ) ₁F₁(α+1; γ+1; z)`.
pub fn kummer_derivative(p: &KummerParams, z: C64) -> Result<C64> {
    if p.alpha == C64::new(0.0, 0.0) {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(p.alpha / p.gamma * kummer_1f1(&p.shifted(), z)?)
}

pub fn kummer_second_derivative(p: &KummerParams, z: C64) -> Result<C64> {
    Ok(p.alpha / p.gamma * kummer_derivative(&p.shifted(), z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn brute(p: &KummerParams, z: C64, terms: usize) -> C64 {
        let mut s = c(0.0, 0.0);
        let mut t = c(1.0, 0.0);
        for n in 0..terms {
            s += t;
            let nf = n as f64;
            t *= (p.alpha + nf) / ((p.gamma + nf) * (nf + 1.0)) * z;
        }
        s
    }

    #[test]
    fn value_at_origin_and_poles() {
        let p = KummerParams::new(c(0.3, 1.0), c(-1.5, 0.2)).unwrap();
        assert_eq!(kummer_1f1(&p, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert!(KummerParams::new(c(1.0, 0.0), c(-2.0, 0.0)).is_err());
        assert!(KummerParams::new(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn one_two_one_against_long_series() {
        let p = KummerParams::new(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let v = kummer_1f1(&p, c(1.0, 0.0)).unwrap();
        assert!((v - brute(&p, c(1.0, 0.0), 200)).norm() < 1e-13);
        assert!((v - (1f64.exp() - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = KummerParams::new(c(0.4, -0.3), c(1.7, 0.5)).unwrap();
        let z = c(0.7, 0.0);
        let num = fd::derivative_complex(|w| kummer_1f1(&p, w).unwrap(), z);
        assert!((kummer_derivative(&p, z).unwrap() - num).norm() < 1e-8);
        let zero = KummerParams::new(c(0.0, 0.0), c(1.5, 0.0)).unwrap();
        assert_eq!(kummer_derivative(&zero, z).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn solves_kummer_equation() {
        for (a, g, z) in [
            (c(0.4, -0.3), c(1.7, 0.5), c(0.7, 0.0)),
            (c(-2.2, 0.1), c(0.5, 0.0), c(12.0, -3.0)),
            (c(1.3, 0.0), c(-0.5, 0.0), c(-20.0, 5.0)),
        ] {
            let p = KummerParams::new(a, g).unwrap();
            let w = kummer_1f1(&p, z).unwrap();
            let w1 = kummer_derivative(&p, z).unwrap();
            let w2 = kummer_second_derivative(&p, z).unwrap();
            let res = z * w2 + (g - z) * w1 - a * w;
            let scale = (z * w2).norm() + ((g - z) * w1).norm() + (a * w).norm();
            assert!(res.norm() < 1e-12 * scale.max(1.0), "{}", res.norm());
        }
    }

    #[test]
    fn doubling_the_cap_changes_nothing() {
        let p = KummerParams::new(c(0.9, 0.4), c(2.5, -1.0)).unwrap();
        let z = c(30.0, 8.0);
        let a = kummer_1f1_series(&p, z, DEFAULT_ITERATION_CAP).unwrap();
        let b = kummer_1f1_series(&p, z, 2 * DEFAULT_ITERATION_CAP).unwrap();
        assert!((a - b).norm() <= 1e-14 * a.norm());
        assert!(matches!(kummer_1f1_series(&p, z, 5), Err(LabError::SeriesNonConvergence { .. })));
    }

    proptest! {
        #[test]
        fn equal_parameters_give_exponential(ar in -3.0f64..3.0, ai in -2.0f64..2.0, zr in -10.0f64..10.0, zi in -5.0f64..5.0) {
            let a = c(ar, ai);
            prop_assume!(!near_nonpositive_integer(a, 1e-3));
            let p = KummerParams::new(a, a).unwrap();
            let z = c(zr, zi);
            let v = kummer_1f1(&p, z).unwrap();
            prop_assert!((v - z.exp()).norm() <= 1e-12 * z.exp().norm());
        }

        #[test]
        fn transformation_agrees_with_direct_series(ar in -3.0f64..3.0, ai in -1.0f64..1.0, gr in 0.2f64..4.0, zr in -5.0f64..5.0, zi in -3.0f64..3.0) {
            let p = KummerParams::new(c(ar, ai), c(gr, 0.3)).unwrap();
            let z = c(zr, zi);
            let direct = kummer_1f1_series(&p, z, DEFAULT_ITERATION_CAP).unwrap();
            let q = KummerParams::new(p.gamma - p.alpha, p.gamma).unwrap();
            let transformed = z.exp() * kummer_1f1_series(&q, -z, DEFAULT_ITERATION_CAP).unwrap();
            prop_assert!((direct - transformed).norm() <= 1e-10 * direct.norm().max(1.0));
        }
    }
}
