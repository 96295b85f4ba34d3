//! L² norms of spinor fields and spinor-valued 1-forms, and the truncated
//! L^p probes used to exhibit non-integrability.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_interval, integrate_radial, QuadratureSpec};
use crate::clifford::SpinorField;
use crate::error::{LabError, Result};
use crate::geometry::{volume_density, CoordPoint, MetricParams, ANGULAR_VOLUME};
use crate::rs_bundle::SpinorOneFormField;

#[derive(Clone, Copy)]
pub enum FieldRef<'a> {
    Spinor(&'a dyn SpinorField),
    OneForm(&'a dyn SpinorOneFormField),
}

impl FieldRef<'_> {
    pub fn norm_sqr(&self, point: &CoordPoint) -> Result<f64> {
        match self {
            FieldRef::Spinor(f) => Ok(f.evaluate(point)?.norm_sqr()),
            FieldRef::OneForm(f) => Ok(f.evaluate(point)?.norm_sqr()),
        }
    }
}

/// Angles at which radially symmetric norms are sampled.
pub const REFERENCE_ANGLES: [f64; 3] = [PI / 2.0, 0.3, 0.7];

const ANGLE_SAMPLES: [[f64; 3]; 4] = [[0.4, 0.0, 0.0], [1.3, 2.0, 5.0], [2.2, 4.1, 1.7], [2.9, 5.9, 11.0]];

/// Whether `|field|²` is independent of the angles, sampled at three radii.
pub fn is_radial(field: FieldRef<'_>, params: &MetricParams) -> Result<bool> {
    let n = params.n();
    for r in [1.3 * n, 2.7 * n, 9.0 * n] {
        let [t, p, q] = REFERENCE_ANGLES;
        let base = field.norm_sqr(&CoordPoint::new(r, t, p, q))?;
        for [t, p, q] in ANGLE_SAMPLES {
            let v = field.norm_sqr(&CoordPoint::new(r, t, p, q))?;
            if (v - base).abs() > 1e-10 * base.abs().max(f64::MIN_POSITIVE) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `2N (r² − N²) V₀ |field|²(r)` with `V₀ = 16π²`.
pub fn radial_density(field: FieldRef<'_>, params: &MetricParams, r: f64) -> Result<f64> {
    let [t, p, q] = REFERENCE_ANGLES;
    Ok(2.0 * params.n() * params.s(r) * ANGULAR_VOLUME * field.norm_sqr(&CoordPoint::new(r, t, p, q))?)
}

/// Fixed tensor rule for the angular integral: Gauss-Legendre in `θ`, the
/// periodic trapezoid rule in `φ` and `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngularRule {
    pub theta_order: usize,
    pub phi_points: usize,
    pub psi_points: usize,
}

impl Default for AngularRule {
    fn default() -> Self {
        AngularRule { theta_order: 48, phi_points: 4, psi_points: 6 }
    }
}

/// `∫ |field|² dμ` over the whole chart at fixed `r`, per unit `dr`.
pub fn angular_density(field: FieldRef<'_>, params: &MetricParams, r: f64, rule: &AngularRule) -> Result<f64> {
    let order = NonZeroUsize::new(rule.theta_order).ok_or(LabError::Parameter("theta_order must be positive".into()))?;
    if rule.phi_points == 0 || rule.psi_points == 0 {
        return Err(LabError::Parameter("angular point counts must be positive".into()));
    }
    let gl = GaussLegendre::new(order);
    let dphi = 2.0 * PI / rule.phi_points as f64;
    let dpsi = 4.0 * PI / rule.psi_points as f64;
    let mut acc = 0.0;
    for &(x, w) in gl.as_node_weight_pairs() {
        let theta = 0.5 * PI * (x + 1.0);
        let mut ring = 0.0;
        for i in 0..rule.phi_points {
            for j in 0..rule.psi_points {
                let p = CoordPoint::new(r, theta, i as f64 * dphi, j as f64 * dpsi);
                ring += volume_density(params, &p) * field.norm_sqr(&p)?;
            }
        }
        acc += 0.5 * PI * w * ring * dphi * dpsi;
    }
    Ok(acc)
}

/// `‖field‖²`. Fields whose pointwise norm depends on `r` alone use the
/// radial factorization; all others the full product quadrature.
pub fn l2_norm_squared(field: FieldRef<'_>, params: &MetricParams, spec: &QuadratureSpec) -> Result<f64> {
    if is_radial(field, params)? {
        l2_norm_squared_radial(field, params, spec)
    } else {
        l2_norm_squared_4d(field, params, spec, &AngularRule::default())
    }
}

pub fn l2_norm_squared_radial(field: FieldRef<'_>, params: &MetricParams, spec: &QuadratureSpec) -> Result<f64> {
    integrate_radial(|r| radial_density(field, params, r), spec)
}

pub fn l2_norm_squared_4d(
    field: FieldRef<'_>,
    params: &MetricParams,
    spec: &QuadratureSpec,
    rule: &AngularRule,
) -> Result<f64> {
    integrate_radial(|r| angular_density(field, params, r, rule), spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpVerdict {
    Converging,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProbe {
    pub p: f64,
    /// `(δ, ∫_{N+δ}^{2N})` for `δ = N·10⁻ᵏ`.
    pub lower_partial_sums: Vec<(f64, f64)>,
    /// `(R, ∫_{2N}^{R})` for `R = N·10ᵏ`.
    pub tail_partial_sums: Vec<(f64, f64)>,
    pub lower_diverges: bool,
    pub tail_diverges: bool,
    pub verdict: LpVerdict,
    /// `∫ |field|^p dμ` when both regimes converge.
    pub value: Option<f64>,
}

const PROBE_DECADES: u32 = 8;

/// Successive decade contributions that fail to shrink by half count as
/// divergence.
fn grows(partial: &[(f64, f64)]) -> bool {
    let inc: Vec<f64> = partial.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let tail = &inc[inc.len() - 3..];
    tail.iter().all(|&d| d > 0.0) && tail.windows(2).all(|w| w[1] >= 0.5 * w[0])
}

/// Truncated L^p integrals of a radially symmetric field on nested domains
/// approaching `r = N` and `r = ∞`.
pub fn lp_divergence_probe(field: FieldRef<'_>, p: f64, params: &MetricParams) -> Result<LpProbe> {
    if !(p > 0.0) {
        return Err(LabError::Parameter(format!("p must be positive, got {p}")));
    }
    if !is_radial(field, params)? {
        return Err(LabError::Parameter("the L^p probe needs a field with radial pointwise norm".into()));
    }
    let n = params.n();
    let [t, ph, ps] = REFERENCE_ANGLES;
    let density = |r: f64| -> Result<f64> {
        let v = field.norm_sqr(&CoordPoint::new(r, t, ph, ps))?;
        Ok(2.0 * n * params.s(r) * ANGULAR_VOLUME * v.powf(0.5 * p))
    };
    let piece = |a: f64, b: f64| integrate_interval(density, a, b, 1e-10, 4000);
    let mut lower = Vec::new();
    let mut acc = piece(1.1 * n, 2.0 * n)?;
    lower.push((0.1 * n, acc));
    for k in 2..=PROBE_DECADES as i32 {
        let (d_new, d_old) = (n * 10f64.powi(-k), n * 10f64.powi(1 - k));
        acc += piece(n + d_new, n + d_old)?;
        lower.push((d_new, acc));
    }
    let mut tail = Vec::new();
    let mut acc = piece(2.0 * n, 10.0 * n)?;
    tail.push((10.0 * n, acc));
    for k in 2..=PROBE_DECADES as i32 {
        let (r_old, r_new) = (n * 10f64.powi(k - 1), n * 10f64.powi(k));
        acc += piece(r_old, r_new)?;
        tail.push((r_new, acc));
    }
    let lower_diverges = grows(&lower);
    let tail_diverges = grows(&tail);
    let diverging = lower_diverges || tail_diverges;
    let value = if diverging { None } else { Some(integrate_radial(density, &QuadratureSpec::to_infinity(n))?) };
    Ok(LpProbe {
        p,
        lower_partial_sums: lower,
        tail_partial_sums: tail,
        lower_diverges,
        tail_diverges,
        verdict: if diverging { LpVerdict::Diverging } else { LpVerdict::Converging },
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Profile;
    use crate::jet::C64;
    use crate::solutions::{harmonic_spinor, rs_field, HarmonicKind};

    fn one() -> (C64, C64) {
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    #[test]
    fn harmonic_norms() {
        let (a, b) = one();
        let nn = MetricParams::negative_nut(1.0).unwrap();
        let spec = QuadratureSpec::to_infinity(1.0);
        let minus = harmonic_spinor(HarmonicKind::Minus, 1.0, a, b).unwrap();
        let v = l2_norm_squared(FieldRef::Spinor(&minus), &nn, &spec).unwrap();
        assert!((v - 16.0 * PI * PI).abs() < 1e-8 * 16.0 * PI * PI);
        let maxwell = harmonic_spinor(HarmonicKind::MaxwellMinus, 1.0, a, b).unwrap();
        let v = l2_norm_squared(FieldRef::Spinor(&maxwell), &nn, &spec).unwrap();
        assert!((v - 32.0 * PI * PI).abs() < 1e-8 * 32.0 * PI * PI);
    }

    #[test]
    fn radial_and_full_quadrature_agree() {
        let nn = MetricParams::negative_nut(1.0).unwrap();
        let spec = QuadratureSpec::to_infinity(1.0).with_rel_tol(1e-8);
        let minus = harmonic_spinor(HarmonicKind::Minus, 1.0, C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let radial = l2_norm_squared_radial(FieldRef::Spinor(&minus), &nn, &spec).unwrap();
        let full = l2_norm_squared_4d(FieldRef::Spinor(&minus), &nn, &spec, &AngularRule::default()).unwrap();
        assert!((radial - full).abs() < 1e-6 * radial);
    }

    #[test]
    fn rs_norms() {
        let (a, b) = one();
        let tn = MetricParams::taub_nut(1.0).unwrap();
        let sigma = rs_field(Profile::TaubNut, 1.0, a, b).unwrap();
        let v = l2_norm_squared(FieldRef::OneForm(&sigma), &tn, &QuadratureSpec::to_infinity(1.0)).unwrap();
        assert!((v - 128.0 * PI * PI).abs() < 1e-8 * 128.0 * PI * PI);
        for n in [1.0, 2.0] {
            let nn = MetricParams::negative_nut(n).unwrap();
            let sigma = rs_field(Profile::NegativeNut, n, a, b).unwrap();
            let v = l2_norm_squared(FieldRef::OneForm(&sigma), &nn, &QuadratureSpec::to_infinity(n)).unwrap();
            let expected = 32.0 * PI * PI / (n * n);
            assert!((v - expected).abs() < 1e-8 * expected, "N={n}: {v}");
        }
    }

    #[test]
    fn harmonic_plus_is_not_square_integrable() {
        let (a, b) = one();
        let tn = MetricParams::taub_nut(1.0).unwrap();
        let plus = harmonic_spinor(HarmonicKind::Plus, 1.0, a, b).unwrap();
        let p2 = lp_divergence_probe(FieldRef::Spinor(&plus), 2.0, &tn).unwrap();
        assert!(p2.lower_diverges && !p2.tail_diverges);
        assert_eq!(p2.verdict, LpVerdict::Diverging);
        let p1 = lp_divergence_probe(FieldRef::Spinor(&plus), 1.0, &tn).unwrap();
        assert!(p1.tail_diverges && !p1.lower_diverges);
    }

    #[test]
    fn harmonic_minus_probe_converges() {
        let (a, b) = one();
        let nn = MetricParams::negative_nut(1.0).unwrap();
        let minus = harmonic_spinor(HarmonicKind::Minus, 1.0, a, b).unwrap();
        let probe = lp_divergence_probe(FieldRef::Spinor(&minus), 2.0, &nn).unwrap();
        assert_eq!(probe.verdict, LpVerdict::Converging);
        let v = probe.value.unwrap();
        assert!((v - 16.0 * PI * PI).abs() < 1e-8 * v);
    }
}
