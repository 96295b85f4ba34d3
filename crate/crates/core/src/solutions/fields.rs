//! Parallel, harmonic and Rarita-Schwinger fields on the two NUT metrics.

use serde::{Deserialize, Serialize};

use super::{add_jets, gamma2_jet, gamma_jet, scale_jets, ClosedOneFormField, ClosedSpinorField};
use crate::clifford::JetField;
use crate::error::{LabError, Result};
use crate::fd;
use crate::geometry::{build_frames, connection_forms, CoordPoint, MetricParams, Profile};
use crate::jet::{Jet, C64};
use crate::rs_bundle::JetOneFormField;

fn nut_family(family: Profile) -> Result<Profile> {
    match family {
        Profile::ScalarFlat => Err(LabError::Parameter(
            "closed-form fields exist only on TaubNut and NegativeNut".into(),
        )),
        p => Ok(p),
    }
}

/// Components of `C₃ u₁ + C₄ u₂` on jets, no radial dependence.
fn parallel_jets(family: Profile, c3: C64, c4: C64, x: &[Jet; 4]) -> [Jet; 4] {
    let [_, th, ph, ps] = *x;
    let (s, c) = ((th * 0.5).sin(), (th * 0.5).cos());
    let em = (ph * C64::new(0.0, -0.5)).exp() * c3;
    let ep = (ph * C64::new(0.0, 0.5)).exp() * c4;
    let qp = (ps * C64::new(0.0, 0.5)).exp();
    let qm = (ps * C64::new(0.0, -0.5)).exp();
    let zero = Jet::constant(0.0);
    let top = em * qp * s + ep * qp * c;
    let bottom_tn = em * qm * c - ep * qm * s;
    let bottom_nn = -(em * qm * c) + ep * qm * s;
    match family {
        Profile::TaubNut => [zero, zero, top, bottom_tn],
        _ => [top, bottom_nn, zero, zero],
    }
}

/// The parallel spinor `C₃ u₁ + C₄ u₂` of Taub-NUT (lower chirality) or of the
/// negative NUT metric (upper chirality).
pub fn parallel_spinor(family: Profile, c3: C64, c4: C64) -> Result<ClosedSpinorField> {
    let family = nut_family(family)?;
    Ok(JetField::new(Box::new(move |x: &[Jet; 4]| Ok(parallel_jets(family, c3, c4, x)))))
}

/// `φ = −1/(r − N)` on Taub-NUT and `−1/(r + N)` on the negative NUT metric.
pub fn harmonic_function(family: Profile, n: f64, point: &CoordPoint) -> Result<f64> {
    match nut_family(family)? {
        Profile::TaubNut => {
            if !(point.r > n) {
                return Err(LabError::Domain(format!("r = {} must exceed N = {n}", point.r)));
            }
            Ok(-1.0 / (point.r - n))
        }
        _ => Ok(-1.0 / (point.r + n)),
    }
}

/// Frame components `F_ab` of `F = (e¹∧e⁴ + e²∧e³)/(r + N)²`.
pub fn maxwell_field(params: &MetricParams, point: &CoordPoint) -> Result<[[f64; 4]; 4]> {
    if !(point.r > params.min_radius()) {
        return Err(LabError::Domain(format!("r = {} outside the metric domain", point.r)));
    }
    let w = 1.0 / (point.r + params.n()).powi(2);
    let mut f = [[0.0; 4]; 4];
    f[0][3] = w;
    f[3][0] = -w;
    f[1][2] = w;
    f[2][1] = -w;
    Ok(f)
}

fn permutation_sign(p: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `(⋆F)_ab = ½ ε_abcd F_cd` for the orientation `e¹∧e²∧e³∧e⁴`.
pub fn hodge_star(f: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    acc += 0.5 * permutation_sign([a, b, c, d]) * f[c][d];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

fn coordinate_components(params: &MetricParams, x: &[f64; 4]) -> Result<[f64; 16]> {
    let point = CoordPoint::from_array(*x);
    let e = build_frames(params, &point)?.coframe;
    let fab = maxwell_field(params, &point)?;
    let mut out = [0.0; 16];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    acc += fab[a][b] * e[a][mu] * e[b][nu];
                }
            }
            out[4 * mu + nu] = acc;
        }
    }
    Ok(out)
}

/// Largest component of `dF` in coordinates, by finite differences.
pub fn maxwell_exterior_derivative_residual(params: &MetricParams, point: &CoordPoint) -> Result<f64> {
    let x = point.to_array();
    coordinate_components(params, &x)?;
    let eval = |y: &[f64; 4]| coordinate_components(params, y).unwrap_or([f64::NAN; 16]);
    let mut partials = [[0.0; 16]; 4];
    for (j, p) in partials.iter_mut().enumerate() {
        *p = fd::partial_real(eval, &x, j)?;
    }
    let mut worst: f64 = 0.0;
    for l in 0..4 {
        for m in l + 1..4 {
            for n in m + 1..4 {
                let v = partials[l][4 * m + n] + partials[m][4 * n + l] + partials[n][4 * l + m];
                if !v.is_finite() {
                    return Err(LabError::NonFinite(v));
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Largest frame component of `Σᵢ (∇_{eᵢ}F)(eᵢ, ·)`.
pub fn maxwell_coclosure_residual(params: &MetricParams, point: &CoordPoint) -> Result<f64> {
    let f = maxwell_field(params, point)?;
    let om = connection_forms(params, point)?.omega;
    let frame = build_frames(params, point)?.frame;
    // frame components depend on r only, through 1/(r+N)²
    let dr = -2.0 / (point.r + params.n());
    let mut worst: f64 = 0.0;
    for b in 0..4 {
        let mut acc = 0.0;
        for i in 0..4 {
            acc += frame[i][0] * dr * f[i][b];
            for a in 0..4 {
                acc -= om[a][i][i] * f[a][b];
                acc -= om[a][b][i] * f[i][a];
            }
        }
        worst = worst.max(acc.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HarmonicKind {
    Plus,
    Minus,
    MaxwellMinus,
}

impl HarmonicKind {
    /// The background on which the field is harmonic.
    pub fn background(&self) -> Profile {
        match self {
            HarmonicKind::Plus => Profile::TaubNut,
            _ => Profile::NegativeNut,
        }
    }
}

/// `dφ·u` type harmonic spinors: `γ¹u/((r+N)^{1/2}(r−N)^{3/2})` on Taub-NUT,
/// `γ¹u/((r−N)^{1/2}(r+N)^{3/2})` and `(γ¹γ⁴ + γ²γ³)u/(r+N)²` on the negative
/// NUT metric.
pub fn harmonic_spinor(kind: HarmonicKind, n: f64, c3: C64, c4: C64) -> Result<ClosedSpinorField> {
    if !(n > 0.0) {
        return Err(LabError::Parameter(format!("N must be positive, got {n}")));
    }
    let family = kind.background();
    Ok(JetField::new(Box::new(move |x: &[Jet; 4]| {
        let r = x[0];
        if !(r.re() > n) {
            return Err(LabError::Domain(format!("r = {} must exceed N = {n}", r.re())));
        }
        let u = parallel_jets(family, c3, c4, x);
        Ok(match kind {
            HarmonicKind::Plus => scale_jets(&gamma_jet(0, &u), ((r + n).powf(0.5) * (r - n).powf(1.5)).recip()),
            HarmonicKind::Minus => scale_jets(&gamma_jet(0, &u), ((r - n).powf(0.5) * (r + n).powf(1.5)).recip()),
            HarmonicKind::MaxwellMinus => {
                let v = add_jets(&gamma2_jet(0, 3, &u), &gamma2_jet(1, 2, &u));
                scale_jets(&v, (r + n).powf(-2.0))
            }
        })
    })))
}

/// The L² Rarita-Schwinger fields: `σᵢ = (γ¹γ⁴ + γ²γ³)γⁱu/(r+N)²` on Taub-NUT
/// and, on the negative NUT metric,
/// `σ = c·(−2(γ¹γ⁴+γ²γ³)u, (γ²γ⁴−γ¹γ³)u, (γ¹γ²+γ³γ⁴)u, 0)` with
/// `c = (r−N)^{−1/2}(r+N)^{−5/2}`.
pub fn rs_field(family: Profile, n: f64, c3: C64, c4: C64) -> Result<ClosedOneFormField> {
    let family = nut_family(family)?;
    if !(n > 0.0) {
        return Err(LabError::Parameter(format!("N must be positive, got {n}")));
    }
    Ok(JetOneFormField::new(Box::new(move |x: &[Jet; 4]| {
        let r = x[0];
        if !(r.re() > n) {
            return Err(LabError::Domain(format!("r = {} must exceed N = {n}", r.re())));
        }
        let u = parallel_jets(family, c3, c4, x);
        let zero = [Jet::constant(0.0); 4];
        Ok(match family {
            Profile::TaubNut => {
                let w = (r + n).powf(-2.0);
                [0, 1, 2, 3].map(|i| {
                    let gu = gamma_jet(i, &u);
                    scale_jets(&add_jets(&gamma2_jet(0, 3, &gu), &gamma2_jet(1, 2, &gu)), w)
                })
            }
            _ => {
                let c = ((r - n).powf(0.5) * (r + n).powf(2.5)).recip();
                let s1 = scale_jets(&add_jets(&gamma2_jet(0, 3, &u), &gamma2_jet(1, 2, &u)), c * -2.0);
                let s2 = scale_jets(&add_jets(&gamma2_jet(1, 3, &u), &scale_jets(&gamma2_jet(0, 2, &u), Jet::constant(-1.0))), c);
                let s3 = scale_jets(&add_jets(&gamma2_jet(0, 1, &u), &gamma2_jet(2, 3, &u)), c);
                [s1, s2, s3, zero]
            }
        })
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{dirac_apply, parallel_residual, twistor_residual, SpinorField, Spinor};
    use crate::rs_bundle::{clifford_trace, divergence, rs_apply, SpinorOneFormField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_points(seed: u64, n: f64, count: usize) -> Vec<CoordPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                CoordPoint::new(
                    n * rng.gen_range(1.05..8.0),
                    rng.gen_range(0.1..PI - 0.1),
                    rng.gen_range(0.0..2.0 * PI),
                    rng.gen_range(0.0..4.0 * PI),
                )
            })
            .collect()
    }

    #[test]
    fn parallel_spinor_at_the_origin_of_angles() {
        let u = parallel_spinor(Profile::TaubNut, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let v = u.eval_jets(&CoordPoint::new(2.0, 0.0, 0.0, 0.0).jets()).unwrap();
        let expect = [0.0, 0.0, 0.0, 1.0];
        for k in 0..4 {
            assert!((v[k].v - c(expect[k], 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn parallel_spinors_are_parallel_with_constant_norm() {
        let (c3, c4) = (c(0.6, -0.2), c(0.3, 0.7));
        let expected = (c3.norm_sqr() + c4.norm_sqr()).sqrt();
        for (family, params) in [
            (Profile::TaubNut, MetricParams::taub_nut(1.3).unwrap()),
            (Profile::NegativeNut, MetricParams::negative_nut(0.8).unwrap()),
        ] {
            let u = parallel_spinor(family, c3, c4).unwrap();
            for p in random_points(3, params.n(), 20) {
                assert!((u.evaluate(&p).unwrap().norm() - expected).abs() < 1e-13);
                assert!(parallel_residual(&u, &p, &params).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn scalar_flat_has_no_closed_form_fields() {
        assert!(parallel_spinor(Profile::ScalarFlat, c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(rs_field(Profile::ScalarFlat, 1.0, c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn harmonic_function_is_harmonic() {
        // Δφ = S⁻¹ ∂ᵣ(S ∂ᵣφ / f²) for radial φ
        for (family, params) in [
            (Profile::TaubNut, MetricParams::taub_nut(1.0).unwrap()),
            (Profile::NegativeNut, MetricParams::negative_nut(1.0).unwrap()),
        ] {
            let flux = |r: f64| {
                let phi = |x: f64| harmonic_function(family, 1.0, &CoordPoint::new(x, 1.0, 0.0, 0.0)).unwrap();
                let f = crate::geometry::profile_f(&params, r).unwrap();
                params.s(r) * fd::derivative(phi, r) / (f * f)
            };
            for &r in &[1.5, 3.0, 7.0] {
                assert!(fd::derivative(flux, r).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn maxwell_field_is_self_dual_closed_and_coclosed() {
        for params in [MetricParams::negative_nut(1.0).unwrap(), MetricParams::taub_nut(1.0).unwrap()] {
            for p in random_points(5, 1.0, 10) {
                let f = maxwell_field(&params, &p).unwrap();
                let sf = hodge_star(&f);
                for a in 0..4 {
                    for b in 0..4 {
                        assert!((sf[a][b] - f[a][b]).abs() < 1e-15);
                    }
                }
                assert!(maxwell_exterior_derivative_residual(&params, &p).unwrap() < 1e-6);
                assert!(maxwell_coclosure_residual(&params, &p).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn harmonic_spinors_are_dirac_zero_modes() {
        for kind in [HarmonicKind::Plus, HarmonicKind::Minus, HarmonicKind::MaxwellMinus] {
            let params = MetricParams::new(1.0, 0.0, 0.0, kind.background()).unwrap();
            let psi = harmonic_spinor(kind, 1.0, c(0.4, 0.1), c(-0.2, 0.9)).unwrap();
            for p in random_points(11, 1.0, 15) {
                let d = dirac_apply(&psi, &p, &params).unwrap();
                assert!(d.norm() < 1e-10, "{kind:?} {}", d.norm());
            }
        }
    }

    #[test]
    fn harmonic_minus_radial_factor() {
        let psi = harmonic_spinor(HarmonicKind::Minus, 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let p = CoordPoint::new(3.0, 0.9, 0.2, 0.4);
        let expected = 2f64.powf(-0.5) * 4f64.powf(-1.5);
        assert!((psi.evaluate(&p).unwrap().norm() - expected).abs() < 1e-15);
    }

    #[test]
    fn harmonic_minus_is_not_twistor() {
        let params = MetricParams::negative_nut(1.0).unwrap();
        let psi = harmonic_spinor(HarmonicKind::Minus, 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let p = CoordPoint::new(2.2, 1.0, 0.3, 0.5);
        assert!(twistor_residual(&psi, &p, &params).unwrap() > 1e-3);
    }

    #[test]
    fn rs_fields_are_trace_free_with_stated_norms() {
        for (family, params) in [
            (Profile::TaubNut, MetricParams::taub_nut(1.0).unwrap()),
            (Profile::NegativeNut, MetricParams::negative_nut(1.0).unwrap()),
        ] {
            let sigma = rs_field(family, 1.0, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
            for p in random_points(17, 1.0, 10) {
                let v = sigma.evaluate(&p).unwrap();
                assert!(clifford_trace(&v).norm() < 1e-12);
                let r = p.r;
                let expected = match family {
                    Profile::TaubNut => 16.0 / (r + 1.0).powi(4),
                    _ => 24.0 / ((r - 1.0) * (r + 1.0).powi(5)),
                };
                assert!((v.norm_sqr() - expected).abs() < 1e-12 * expected);
                assert!(rs_apply(&sigma, &p, &params).unwrap().norm() < 1e-10);
                assert!(divergence(&sigma, &p, &params).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn gamma_on_jets_matches_matrix_action() {
        let g = crate::clifford::GammaSet::standard();
        let s = [c(1.0, 0.5), c(-0.3, 0.2), c(0.0, 1.0), c(2.0, -1.0)];
        let jets = s.map(Jet::constant);
        for i in 0..4 {
            let a = gamma_jet(i, &jets).map(|j| j.v);
            let b = g.apply(i, &Spinor(s));
            for k in 0..4 {
                assert!((a[k] - b[k]).norm() < 1e-15);
            }
        }
    }
}
