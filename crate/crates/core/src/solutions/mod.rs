//! Closed-form solution families: parallel, harmonic and Rarita-Schwinger
//! fields on the two NUT backgrounds, and the separated Dirac and
//! Rarita-Schwinger modes with their radial and angular profiles.

mod dirac;
mod fields;
mod rs;

pub use dirac::{
    assemble_dirac_mode, dirac_angular, dirac_radial, dirac_radial_rhs, dirac_radial_rhs_as_printed, AngularProfile,
    DiracAngularCase, DiracModeParams, DiracRadialCase, RadialProfile,
};
pub use fields::{
    harmonic_function, harmonic_spinor, maxwell_coclosure_residual, maxwell_exterior_derivative_residual,
    maxwell_field, hodge_star, parallel_spinor, rs_field, HarmonicKind,
};
pub use rs::{
    assemble_rs_mode, rs_angular, rs_radial, rs_radial_rhs, RsAngularProfile, RsModeParams, RsRadialCase,
    RsRadialProfile,
};

use crate::clifford::{GammaSet, JetField};
use crate::error::{LabError, Result};
use crate::geometry::MetricParams;
use crate::jet::{Jet, C64};
use crate::rs_bundle::JetOneFormField;
use crate::specfun::{kummer_1f1, kummer_derivative, KummerParams};

pub type JetSpinorFn = Box<dyn Fn(&[Jet; 4]) -> Result<[Jet; 4]> + Send + Sync>;
pub type JetOneFormFn = Box<dyn Fn(&[Jet; 4]) -> Result<[[Jet; 4]; 4]> + Send + Sync>;
/// Spinor field with analytic partials.
pub type ClosedSpinorField = JetField<JetSpinorFn>;
/// Spinor-valued 1-form field with analytic partials.
pub type ClosedOneFormField = JetOneFormField<JetOneFormFn>;

/// `γ^(i+1)` applied to jet components.
pub(crate) fn gamma_jet(i: usize, s: &[Jet; 4]) -> [Jet; 4] {
    let m = GammaSet::standard().mats[i];
    [0, 1, 2, 3].map(|row| {
        let mut acc = Jet::constant(0.0);
        for col in 0..4 {
            if m[row][col] != C64::new(0.0, 0.0) {
                acc = acc + s[col] * m[row][col];
            }
        }
        acc
    })
}

pub(crate) fn gamma2_jet(i: usize, j: usize, s: &[Jet; 4]) -> [Jet; 4] {
    gamma_jet(i, &gamma_jet(j, s))
}

pub(crate) fn add_jets(a: &[Jet; 4], b: &[Jet; 4]) -> [Jet; 4] {
    [0, 1, 2, 3].map(|k| a[k] + b[k])
}

pub(crate) fn scale_jets(a: &[Jet; 4], k: Jet) -> [Jet; 4] {
    a.map(|c| c * k)
}

/// Smaller root `r₀` of `r² + C₁ r + C₂` used by the massless families;
/// requires `C₂ > −N² − N C₁` and a simple root.
pub fn massless_root(params: &MetricParams) -> Result<f64> {
    let (n, c1, c2) = (params.n(), params.c1(), params.c2());
    let disc = c1 * c1 - 4.0 * c2;
    if disc <= 1e-12 * (1.0 + c1 * c1) {
        return Err(LabError::Parameter("C1² = 4 C2: r0 is a double root".into()));
    }
    let r0 = (-c1 + disc.sqrt()) / 2.0;
    if !(c2 > -n * n - n * c1) || !(r0 < n) {
        return Err(LabError::Parameter(format!("r0 = {r0} must lie below N = {n} (C2 > -N² - N C1)")));
    }
    Ok(r0)
}

/// `Γ(r) = (r − r₀)^{a} e^{κ r} (r + r₀ + C₁)^{−b}` and the shared exponent
/// bookkeeping `D = 8N(2r₀ + C₁)`, `K = N² − (r₀ + C₁)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MasslessExponents {
    pub r0: f64,
    pub c1: f64,
    pub d: f64,
    pub k: f64,
    pub n: f64,
}

impl MasslessExponents {
    pub fn new(params: &MetricParams) -> Result<Self> {
        let r0 = massless_root(params)?;
        let (n, c1) = (params.n(), params.c1());
        Ok(MasslessExponents { r0, c1, d: 8.0 * n * (2.0 * r0 + c1), k: n * n - (r0 + c1).powi(2), n })
    }

    /// `(r−r₀)^{q(r₀²−N²)/D + p} e^{q r/(8N)} (r+r₀+C₁)^{q K/D + p}` with `p` the
    /// quarter shift.
    pub fn factor(&self, r: Jet, q: f64, p: f64) -> Jet {
        let e1 = q * (self.r0 * self.r0 - self.n * self.n) / self.d + p;
        let e2 = q * self.k / self.d + p;
        (r - self.r0).powf(e1) * (r * (q / (8.0 * self.n))).exp() * (r + self.r0 + self.c1).powf(e2)
    }
}

/// `M(α; γ; z)` lifted to jets through `M' = (α/γ) M(α+1; γ+1; z)`.
pub(crate) fn kummer_jet(alpha: C64, gamma: C64, z: Jet) -> Result<Jet> {
    let p = KummerParams::new(alpha, gamma)?;
    Ok(z.chain(kummer_1f1(&p, z.v)?, kummer_derivative(&p, z.v)?))
}

/// Sine and cosine of `θ/2`, rejecting the poles.
pub(crate) fn half_angles(theta: Jet) -> Result<(Jet, Jet)> {
    let t = theta.re();
    if !(t > 0.0 && t < std::f64::consts::PI) {
        return Err(LabError::Pole(format!("theta = {t} outside (0, π)")));
    }
    Ok(((theta * 0.5).sin(), (theta * 0.5).cos()))
}

/// `|residual| / max(term magnitudes)`, zero when every term vanishes.
pub(crate) fn relative_to_terms(residual: C64, terms: &[C64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.norm()));
    if scale == 0.0 {
        residual.norm()
    } else {
        residual.norm() / scale
    }
}
