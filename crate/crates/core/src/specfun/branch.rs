//! The fixed branch of `sqrt(x² − λ² y²)` with `λ = a + ib`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::jet::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchInput {
    pub x: f64,
    pub y: f64,
    pub lambda: C64,
    /// 0 or 1; `k = 1` multiplies the result by `e^{iπ}`.
    pub k: u8,
}

/// `sqrt|x² − λ²y²| · exp(± (i/2) arccos((x² − (a² − b²)y²)/|x² − λ²y²|) + ikπ)`,
/// sign `+` for `ab ≤ 0` and `−` for `ab > 0`.
pub fn branch_sqrt(b: &BranchInput) -> Result<C64> {
    if b.k > 1 {
        return Err(LabError::Parameter(format!("branch index k = {} not in {{0, 1}}", b.k)));
    }
    let (x, y, lam) = (b.x, b.y, b.lambda);
    let w = x * x - lam * lam * y * y;
    let mag = w.norm();
    if !(mag > 0.0) {
        return Err(LabError::Domain("x² − λ²y² vanishes".into()));
    }
    let (re, im) = (lam.re, lam.im);
    // arccos(Re w / |w|) evaluated as atan2(|Im w|, Re w), which keeps full
    // precision near the positive real axis
    let half = 0.5 * w.im.abs().atan2(w.re);
    let sign = if re * im > 0.0 { -1.0 } else { 1.0 };
    let phase = sign * half + b.k as f64 * std::f64::consts::PI;
    Ok(C64::from_polar(mag.sqrt(), phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn real_lambda_gives_positive_root() {
        let v = branch_sqrt(&BranchInput { x: 3.0, y: 2.0, lambda: C64::new(0.5, 0.0), k: 0 }).unwrap();
        assert!((v - C64::new(8f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn k_one_negates() {
        let b0 = BranchInput { x: 1.0, y: 8.0, lambda: C64::new(0.1, 0.05), k: 0 };
        let b1 = BranchInput { k: 1, ..b0 };
        let (v0, v1) = (branch_sqrt(&b0).unwrap(), branch_sqrt(&b1).unwrap());
        assert!((v0 + v1).norm() < 1e-15);
        assert!(branch_sqrt(&BranchInput { k: 2, ..b0 }).is_err());
        assert!(branch_sqrt(&BranchInput { x: 1.0, y: 1.0, lambda: C64::new(1.0, 0.0), k: 0 }).is_err());
    }

    proptest! {
        #[test]
        fn squares_back(x in -10.0f64..10.0, y in -10.0f64..10.0, a in -2.0f64..2.0, bi in -2.0f64..2.0, k in 0u8..2) {
            let lam = C64::new(a, bi);
            let w = x * x - lam * lam * y * y;
            prop_assume!(w.norm() > 1e-6);
            let v = branch_sqrt(&BranchInput { x, y, lambda: lam, k }).unwrap();
            prop_assert!((v * v - w).norm() <= 1e-12 * w.norm().max(1.0));
        }

        #[test]
        fn k_zero_is_principal_root(x in -10.0f64..10.0, y in -10.0f64..10.0, a in -2.0f64..2.0, bi in -2.0f64..2.0) {
            let lam = C64::new(a, bi);
            let w = x * x - lam * lam * y * y;
            prop_assume!(w.norm() > 1e-6 && w.im.abs() > 1e-9 * w.norm());
            let v = branch_sqrt(&BranchInput { x, y, lambda: lam, k: 0 }).unwrap();
            prop_assert!((v - w.sqrt()).norm() <= 1e-12 * w.norm().sqrt());
        }
    }
}
