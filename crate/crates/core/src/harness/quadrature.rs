//! Adaptive Gauss-Kronrod (7, 15) quadrature over `[lower, upper]` with the
//! substitutions needed for the improper radial integrals.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointSingularity {
    None,
    /// Integrand behaves like `(r − lower)^{−1/2}`; handled by `r = lower + s²`.
    InverseSqrtAtLower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub lower: f64,
    /// May be `f64::INFINITY`, handled by `r = lower + t/(1 − t)`.
    pub upper: f64,
    pub endpoint_singularity: EndpointSingularity,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 2000;

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64) -> Self {
        QuadratureSpec {
            lower,
            upper,
            endpoint_singularity: EndpointSingularity::None,
            rel_tol: DEFAULT_REL_TOL,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    /// `[lower, ∞)`.
    pub fn to_infinity(lower: f64) -> Self {
        Self::new(lower, f64::INFINITY)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_singularity(mut self, s: EndpointSingularity) -> Self {
        self.endpoint_singularity = s;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(LabError::Parameter(format!("rel_tol {} outside (0, 1e-2]", self.rel_tol)));
        }
        if !self.lower.is_finite() || !(self.lower < self.upper) {
            return Err(LabError::Parameter(format!("need finite lower < upper, got [{}, {}]", self.lower, self.upper)));
        }
        if self.max_subdivisions == 0 {
            return Err(LabError::Parameter("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15(g: &impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<Piece> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = g(c - x)? + g(c + x)?;
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    Ok(Piece { a, b, value: kronrod * h, error: ((kronrod - gauss) * h).abs() })
}

/// Adaptive bisection on `[a, b]` until the summed error estimate falls below
/// `rel_tol · |I|`.
pub fn integrate_interval(
    f: impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<f64> {
    let g = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(LabError::NonFinite(x));
        }
        Ok(v)
    };
    let first = gk15(&g, a, b)?;
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;
    while err > rel_tol * total.abs() {
        if subdivisions >= max_subdivisions {
            return Err(LabError::QuadratureNonConvergence { subdivisions, estimate: total, error: err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(&g, worst.a, mid)?;
        let right = gk15(&g, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // refresh the running sums to shed accumulated cancellation
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

/// `∫ integrand(r) dr` over `[spec.lower, spec.upper]`.
pub fn integrate_radial(integrand: impl Fn(f64) -> Result<f64>, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let l = spec.lower;
    let sqrt_sub = spec.endpoint_singularity == EndpointSingularity::InverseSqrtAtLower;
    match (spec.upper.is_finite(), sqrt_sub) {
        (true, false) => integrate_interval(integrand, l, spec.upper, spec.rel_tol, spec.max_subdivisions),
        (true, true) => integrate_interval(
            |s| Ok(integrand(l + s * s)? * 2.0 * s),
            0.0,
            (spec.upper - l).sqrt(),
            spec.rel_tol,
            spec.max_subdivisions,
        ),
        (false, false) => integrate_interval(
            |t| {
                let w = 1.0 - t;
                Ok(integrand(l + t / w)? / (w * w))
            },
            0.0,
            1.0,
            spec.rel_tol,
            spec.max_subdivisions,
        ),
        (false, true) => integrate_interval(
            |t| {
                let w = 1.0 - t;
                let s = t / w;
                Ok(integrand(l + s * s)? * 2.0 * s / (w * w))
            },
            0.0,
            1.0,
            spec.rel_tol,
            spec.max_subdivisions,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square_tail() {
        let spec = QuadratureSpec::to_infinity(1.0);
        let v = integrate_radial(|r| Ok(1.0 / (r + 1.0).powi(2)), &spec).unwrap();
        assert!((v - 0.5).abs() < 1e-9 * 0.5);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        // ∫_N^∞ dr/((r−N)^{1/2}(r+N)^{3/2}) = 1/N with N = 1
        let spec = QuadratureSpec::to_infinity(1.0).with_singularity(EndpointSingularity::InverseSqrtAtLower);
        let v = integrate_radial(|r| Ok(1.0 / ((r - 1.0).sqrt() * (r + 1.0).powf(1.5))), &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let finite = QuadratureSpec::new(1.0, 3.0).with_singularity(EndpointSingularity::InverseSqrtAtLower);
        let w = integrate_radial(|r| Ok(1.0 / (r - 1.0).sqrt()), &finite).unwrap();
        assert!((w - 2.0 * 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn logarithmic_divergence_is_reported() {
        let spec = QuadratureSpec::to_infinity(1.0);
        let res = integrate_radial(|r| Ok(1.0 / (r - 1.0)), &spec);
        assert!(matches!(res, Err(LabError::QuadratureNonConvergence { .. }) | Err(LabError::NonFinite(_))));
    }

    #[test]
    fn nan_is_reported() {
        let spec = QuadratureSpec::new(0.0, 1.0);
        assert!(matches!(integrate_radial(|_| Ok(f64::NAN), &spec), Err(LabError::NonFinite(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1.0).with_rel_tol(0.1).validate().is_err());
        assert!(QuadratureSpec::new(1.0, 1.0).validate().is_err());
        assert!(QuadratureSpec::new(0.0, 1.0).with_rel_tol(1e-2).validate().is_ok());
    }

    #[test]
    fn halving_tolerance_is_stable() {
        let f = |r: f64| Ok(1.0 / ((r + 1.0).powi(2)) + (-r).exp() * r.sin().powi(2));
        let a = integrate_radial(f, &QuadratureSpec::to_infinity(1.0).with_rel_tol(1e-8)).unwrap();
        let b = integrate_radial(f, &QuadratureSpec::to_infinity(1.0).with_rel_tol(5e-9)).unwrap();
        assert!((a - b).abs() < 1e-8 * a.abs());
    }
}
