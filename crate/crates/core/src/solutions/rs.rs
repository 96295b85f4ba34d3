//! Separated Rarita-Schwinger modes in the form `Ψ₄ = e⁴·e¹·Ψ₁`,
//! `Ψ₃ = e³·e²·Ψ₂`.

use serde::{Deserialize, Serialize};

use super::dirac::{eta_zero_regular, vector_relative};
use super::{gamma2_jet, half_angles, kummer_jet, relative_to_terms, ClosedOneFormField, MasslessExponents};
use crate::error::{LabError, Result};
use crate::geometry::{profile_f, MetricParams, Profile};
use crate::jet::{Jet, C64};
use crate::rs_bundle::{JetOneFormField, TRACE_TOLERANCE};
use crate::specfun::{branch_sqrt, BranchInput};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsModeParams {
    pub m: i32,
    pub m1: i32,
    pub m2: i32,
    pub lambda: C64,
}

impl RsModeParams {
    pub fn new(m: i32, m1: i32, m2: i32, lambda: C64) -> Self {
        RsModeParams { m, m1, m2, lambda }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsAngularProfile {
    pub params: RsModeParams,
    pub regular: bool,
}

pub fn rs_angular(p: RsModeParams) -> RsAngularProfile {
    RsAngularProfile { params: p, regular: eta_zero_regular(p.m, p.m1, p.m2) }
}

impl RsAngularProfile {
    /// Exponents of `sin(θ/2)` and `cos(θ/2)` in `J₊` and `J₋`.
    pub fn exponents(&self) -> [[f64; 2]; 2] {
        let (m, m1, m2) = (self.params.m as f64, self.params.m1 as f64, self.params.m2 as f64);
        [[3.0 * (m - m1 / 2.0 + 0.25), -3.0 * (m + m1 / 2.0 + 0.75)], [3.0 * (m2 / 2.0 - m - 0.25), 3.0 * (m + m2 / 2.0 + 0.75)]]
    }

    pub fn eval_jet(&self, theta: Jet) -> Result<[Jet; 2]> {
        let (s, c) = half_angles(theta)?;
        let [[a, b], [e, g]] = self.exponents();
        Ok([s.powf(a) * c.powf(b), s.powf(e) * c.powf(g)])
    }

    pub fn eval(&self, theta: f64) -> Result<[C64; 2]> {
        Ok(self.eval_jet(Jet::constant(theta))?.map(|j| j.v))
    }

    /// Relative residual of `J₊' = (3M cscθ − (3/2)M₁ cotθ)J₊`,
    /// `J₋' = (−3M cscθ + (3/2)M₂ cotθ)J₋`.
    pub fn residual(&self, theta: f64) -> Result<f64> {
        let j = self.eval_jet(Jet::variable(theta, 1))?;
        let p = &self.params;
        let (st, ct) = theta.sin_cos();
        let big = 3.0 * (p.m as f64 + 0.5) / st;
        let t1 = [j[0].d[1], -j[0].v * (big - 1.5 * (p.m1 as f64 + 0.5) * ct / st)];
        let t2 = [j[1].d[1], -j[1].v * (-big + 1.5 * (p.m2 as f64 + 0.5) * ct / st)];
        Ok(relative_to_terms(t1[0] + t1[1], &t1).max(relative_to_terms(t2[0] + t2[1], &t2)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RsRadialCase {
    /// `λ = 0` on a scalar-flat metric.
    MasslessScalarFlat,
    /// `λ ≠ 0` on Taub-NUT with `m₁ ≤ −1`, `m₂ ≥ 0`; `k` picks the branch.
    KummerTaubNut { k: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RsData {
    Massless(MasslessExponents),
    Kummer { eps: [C64; 2], alpha: [C64; 2] },
}

/// `[Φ₁₁..Φ₁₄, Φ₂₁..Φ₂₄]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsRadialProfile {
    pub case: RsRadialCase,
    pub params: RsModeParams,
    pub metric: MetricParams,
    data: RsData,
    keep_psi1: bool,
}

pub fn rs_radial(case: RsRadialCase, p: RsModeParams, metric: &MetricParams) -> Result<RsRadialProfile> {
    let zero = C64::new(0.0, 0.0);
    let data = match case {
        RsRadialCase::MasslessScalarFlat => {
            if p.lambda != zero {
                return Err(LabError::Parameter("MasslessScalarFlat needs lambda = 0".into()));
            }
            if metric.profile() != Profile::ScalarFlat {
                return Err(LabError::Parameter("MasslessScalarFlat needs the ScalarFlat profile".into()));
            }
            RsData::Massless(MasslessExponents::new(metric)?)
        }
        RsRadialCase::KummerTaubNut { k } => {
            if p.lambda == zero {
                return Err(LabError::Parameter("KummerTaubNut needs lambda ≠ 0".into()));
            }
            if metric.profile() != Profile::TaubNut {
                return Err(LabError::Parameter("KummerTaubNut needs the TaubNut profile".into()));
            }
            if p.m1 > -1 || p.m2 < 0 {
                return Err(LabError::Parameter(format!("KummerTaubNut needs m1 ≤ −1 and m2 ≥ 0, got {}, {}", p.m1, p.m2)));
            }
            let n = metric.n();
            let lam = p.lambda;
            let xs = [3.0 - 6.0 * p.m1 as f64, 9.0 + 6.0 * p.m2 as f64];
            let mut eps = [zero; 2];
            let mut alpha = [zero; 2];
            for i in 0..2 {
                let e = branch_sqrt(&BranchInput { x: xs[i], y: 8.0 * n, lambda: lam, k })?;
                eps[i] = e;
                alpha[i] = xs[i] / 4.0 - (e * e + 32.0 * n * n * lam * lam) / (4.0 * e);
            }
            RsData::Kummer { eps, alpha }
        }
    };
    Ok(RsRadialProfile { case, params: p, metric: *metric, data, keep_psi1: true })
}

impl RsRadialProfile {
    pub fn domain(&self) -> (f64, f64) {
        (self.metric.n(), f64::INFINITY)
    }

    pub fn branch(&self) -> Option<u8> {
        match self.case {
            RsRadialCase::KummerTaubNut { k } => Some(k),
            _ => None,
        }
    }

    /// The same profile with `Φ₁ⱼ` set to zero.
    pub fn without_psi1(mut self) -> Self {
        self.keep_psi1 = false;
        self
    }

    pub fn eval_jet(&self, r: Jet) -> Result<[[Jet; 4]; 2]> {
        let n = self.metric.n();
        if !(r.re() > n) {
            return Err(LabError::Domain(format!("r = {} must exceed N = {n}", r.re())));
        }
        let (m1, m2) = (self.params.m1 as f64, self.params.m2 as f64);
        let zero = Jet::constant(0.0);
        let mut out = match self.data {
            RsData::Massless(ex) => {
                let up = (r + n).powf(1.5);
                let down = (r + n).powf(-0.5);
                [
                    [zero, zero, up * ex.factor(r, 6.0 * m1 + 1.0, -0.75), up * ex.factor(r, -(6.0 * m2 + 5.0), -0.75)],
                    [zero, zero, down * ex.factor(r, 6.0 * m1 - 3.0, -0.25), down * ex.factor(r, -(6.0 * m2 + 9.0), -0.25)],
                ]
            }
            RsData::Kummer { eps, alpha } => {
                let lam = self.params.lambda;
                let l2 = 32.0 * n * n * lam * lam;
                let rm = r - n;
                let pref = ((r + n).sqrt() * (8.0 * n) * lam).recip();

                let z1 = rm * (-eps[0] / (4.0 * n));
                let g1 = 1.5 - 3.0 * m1;
                let e1 = (z1 * -0.5).exp();
                let ka = kummer_jet(alpha[0], C64::from(g1), z1)?;
                let kb = kummer_jet(alpha[0] + 1.0, C64::from(g1 + 1.0), z1)?;
                let x1 = 3.0 - 6.0 * m1;
                let phi21 = rm.powf(-1.5 * m1 - 0.25) * e1 * ka;
                let phi23 = rm.powf(-1.5 * m1 + 0.25)
                    * pref
                    * e1
                    * (ka * (x1 - eps[0]) + kb * ((eps[0] * eps[0] - eps[0] * x1 + l2) / (6.0 * m1 - 3.0)));

                let z2 = rm * (-eps[1] / (4.0 * n));
                let g2 = 3.0 * m2 + 4.5;
                let e2 = (z2 * -0.5).exp();
                let kc = kummer_jet(alpha[1], C64::from(g2), z2)?;
                let kd = kummer_jet(alpha[1] + 1.0, C64::from(g2 + 1.0), z2)?;
                let x2 = 6.0 * m2 + 9.0;
                let phi22 = rm.powf(1.5 * m2 + 1.25) * e2 * kc;
                let phi24 = rm.powf(1.5 * m2 + 1.75)
                    * pref
                    * e2
                    * (kc * (x2 - eps[1]) - kd * ((eps[1] * eps[1] - eps[1] * x2 + l2) / x2));
                [[zero; 4], [phi21, phi22, phi23, phi24]]
            }
        };
        if !self.keep_psi1 {
            out[0] = [zero; 4];
        }
        Ok(out)
    }

    pub fn eval(&self, r: f64) -> Result<[[C64; 4]; 2]> {
        Ok(self.eval_jet(Jet::constant(r))?.map(|row| row.map(|j| j.v)))
    }

    pub fn eval_with_derivative(&self, r: f64) -> Result<([[C64; 4]; 2], [[C64; 4]; 2])> {
        let j = self.eval_jet(Jet::variable(r, 0))?;
        Ok((j.map(|row| row.map(|c| c.v)), j.map(|row| row.map(|c| c.d[0]))))
    }

    pub fn residual(&self, r: f64) -> Result<f64> {
        let (v, d) = self.eval_with_derivative(r)?;
        let rhs = rs_radial_rhs(&self.params, &self.metric, r, &v)?;
        let flat = |x: [[C64; 4]; 2]| [x[0][0], x[0][1], x[0][2], x[0][3], x[1][0], x[1][1], x[1][2], x[1][3]];
        Ok(vector_relative(&flat(d), &flat(rhs)))
    }
}

/// Right-hand sides of both radial systems, `[Φ₁ⱼ', Φ₂ⱼ']`.
pub fn rs_radial_rhs(p: &RsModeParams, metric: &MetricParams, r: f64, phi: &[[C64; 4]; 2]) -> Result<[[C64; 4]; 2]> {
    let n = metric.n();
    if !(r > n) {
        return Err(LabError::Domain(format!("r = {r} must exceed N = {n}")));
    }
    let f = profile_f(metric, r)?;
    let lp = metric.log_f_prime(r);
    let s = metric.s(r);
    let c = f * f / (4.0 * n);
    let (m1, m2) = (p.m1 as f64, p.m2 as f64);
    let (big1, big2) = (m1 + 0.5, m2 + 0.5);
    let up = 1.5 * lp + 1.5 * n / s + c;
    let down = 1.5 * lp - 1.5 * n / s - c;
    let [a, b] = phi;
    let first = [
        a[0] * (up - 3.0 * c * big1),
        a[1] * (up + 3.0 * c * big2),
        a[2] * (down + 3.0 * c * big1),
        a[3] * (down - 3.0 * c * big2),
    ];
    let a1 = 0.5 * lp - (2.0 * r + n) / (2.0 * s);
    let a2 = 0.5 * lp - (2.0 * r - n) / (2.0 * s);
    let c3 = 3.0 * c;
    let lf = p.lambda * f;
    let second = [
        b[0] * (a1 - c3 * (m1 - 0.5)) - lf * b[2],
        b[1] * (a1 + c3 * (m2 + 1.5)) - lf * b[3],
        b[2] * (a2 + c3 * (m1 - 0.5)) + lf * b[0],
        b[3] * (a2 - c3 * (m2 + 1.5)) + lf * b[1],
    ];
    Ok([first, second])
}

/// Components `Ψ₁, Ψ₂` carry `e^{3i(m+½)φ}` and `e^{(3i/2)(mₛ+½)ψ}` with the
/// shared angular profile; `Ψ₃ = e³·e²·Ψ₂`, `Ψ₄ = e⁴·e¹·Ψ₁`. Evaluation fails
/// with a trace violation if `Σ eⁱ·Ψᵢ` is not negligible.
pub fn assemble_rs_mode(p: RsModeParams, angular: RsAngularProfile, radial: RsRadialProfile) -> Result<ClosedOneFormField> {
    if angular.params != p || radial.params != p {
        return Err(LabError::Parameter("angular and radial profiles were built for other mode numbers".into()));
    }
    let big = p.m as f64 + 0.5;
    let (big1, big2) = (p.m1 as f64 + 0.5, p.m2 as f64 + 0.5);
    Ok(JetOneFormField::new(Box::new(move |x: &[Jet; 4]| {
        let [r, th, ph, ps] = *x;
        let [f1, f2] = radial.eval_jet(r)?;
        let [jp, jm] = angular.eval_jet(th)?;
        let common = (ph * C64::new(0.0, 3.0 * big)).exp();
        let a = common * (ps * C64::new(0.0, 1.5 * big1)).exp() * jp;
        let b = common * (ps * C64::new(0.0, 1.5 * big2)).exp() * jm;
        let psi1 = [f1[0] * a, f1[1] * b, f1[2] * a, f1[3] * b];
        let psi2 = [f2[0] * a, f2[1] * b, f2[2] * a, f2[3] * b];
        let psi3 = gamma2_jet(2, 1, &psi2);
        let psi4 = gamma2_jet(3, 0, &psi1);
        let out = [psi1, psi2, psi3, psi4];
        let mut trace = [C64::new(0.0, 0.0); 4];
        let mut size: f64 = 0.0;
        for (i, comp) in out.iter().enumerate() {
            let g = super::gamma_jet(i, comp);
            for k in 0..4 {
                trace[k] += g[k].v;
                size += comp[k].v.norm_sqr();
            }
        }
        let t = trace.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(t <= TRACE_TOLERANCE * size.sqrt().max(1.0)) {
            return Err(LabError::TraceViolation(t));
        }
        Ok(out)
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CoordPoint;
    use crate::rs_bundle::{clifford_trace, divergence, rs_apply, rs_apply_expanded, SpinorOneFormField};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const Z: C64 = C64::new(0.0, 0.0);

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reference_exponents_and_regularity() {
        let a = rs_angular(RsModeParams::new(0, -2, 1, Z));
        assert_eq!(a.exponents()[0], [3.0 * 1.25, 3.0 * 0.25]);
        assert!(a.regular);
        let b = rs_angular(RsModeParams::new(0, 0, 0, Z));
        assert!(b.exponents()[0][1] < 0.0);
        assert!(!b.regular);
    }

    #[test]
    fn massless_profiles_solve_both_systems() {
        let metric = MetricParams::scalar_flat(1.0, 0.5, -0.8).unwrap();
        for (m1, m2) in [(0, 0), (-1, 1), (2, -2)] {
            let rad = rs_radial(RsRadialCase::MasslessScalarFlat, RsModeParams::new(0, m1, m2, Z), &metric).unwrap();
            for i in 0..30 {
                let r = 1.05 + 0.5 * i as f64;
                assert!(rad.residual(r).unwrap() < 1e-8, "r={r} {}", rad.residual(r).unwrap());
            }
        }
    }

    #[test]
    fn kummer_profiles_solve_the_second_system() {
        let metric = MetricParams::taub_nut(1.0).unwrap();
        let p = RsModeParams::new(0, -1, 0, c(0.1, 0.0));
        for k in [0, 1] {
            let rad = rs_radial(RsRadialCase::KummerTaubNut { k }, p, &metric).unwrap();
            for i in 0..=60 {
                let r = 1.0 + 1e-3 + (20.0 - 1.0 - 1e-3) * i as f64 / 60.0;
                assert!(rad.residual(r).unwrap() < 1e-6, "k={k} r={r}: {}", rad.residual(r).unwrap());
            }
            let v = rad.eval(2.0).unwrap();
            assert!(v[0].iter().all(|z| *z == Z));
        }
    }

    #[test]
    fn kummer_case_preconditions() {
        let tn = MetricParams::taub_nut(1.0).unwrap();
        let lam = c(0.1, 0.0);
        assert!(rs_radial(RsRadialCase::KummerTaubNut { k: 0 }, RsModeParams::new(0, 0, 0, lam), &tn).is_err());
        assert!(rs_radial(RsRadialCase::KummerTaubNut { k: 0 }, RsModeParams::new(0, -1, -1, lam), &tn).is_err());
        assert!(rs_radial(RsRadialCase::KummerTaubNut { k: 0 }, RsModeParams::new(0, -1, 0, Z), &tn).is_err());
        let nn = MetricParams::negative_nut(1.0).unwrap();
        assert!(rs_radial(RsRadialCase::KummerTaubNut { k: 0 }, RsModeParams::new(0, -1, 0, lam), &nn).is_err());
    }

    #[test]
    fn decoupling_without_mass() {
        let metric = MetricParams::taub_nut(1.0).unwrap();
        let p = RsModeParams::new(0, 1, 1, Z);
        let phi = [[Z; 4], [Z, Z, c(1.0, 0.0), c(0.0, 1.0)]];
        let rhs = rs_radial_rhs(&p, &metric, 2.0, &phi).unwrap();
        assert_eq!(rhs[1][0], Z);
        assert_eq!(rhs[1][1], Z);
    }

    #[test]
    fn coefficient_spot_check_at_three_n() {
        // Taub-NUT, N = 1, r = 3: f² = 2, f'/f = −1/8, S = 8
        let metric = MetricParams::taub_nut(1.0).unwrap();
        let p = RsModeParams::new(0, 1, 0, Z);
        let one = c(1.0, 0.0);
        let rhs = rs_radial_rhs(&p, &metric, 3.0, &[[one; 4], [one, Z, Z, Z]]).unwrap();
        let c0 = 2.0 / 4.0;
        let expect11 = 1.5 * (-0.125) + 1.5 / 8.0 + c0 - 3.0 * c0 * 1.5;
        assert!((rhs[0][0].re - expect11).abs() < 1e-14);
        let expect21 = 0.5 * (-0.125) - 7.0 / 16.0 - 3.0 * c0 * 0.5;
        assert!((rhs[1][0].re - expect21).abs() < 1e-14);
    }

    fn points() -> Vec<CoordPoint> {
        vec![
            CoordPoint::new(1.7, 0.8, 0.3, 0.4),
            CoordPoint::new(2.9, 1.9, 4.0, 2.2),
            CoordPoint::new(5.5, 2.6, 1.0, 9.0),
        ]
    }

    #[test]
    fn massless_mode_is_annihilated() {
        let metric = MetricParams::scalar_flat(1.0, 0.5, -0.8).unwrap();
        let p = RsModeParams::new(0, -2, 1, Z);
        let field = assemble_rs_mode(
            p,
            rs_angular(p),
            rs_radial(RsRadialCase::MasslessScalarFlat, p, &metric).unwrap(),
        )
        .unwrap();
        for pt in points() {
            let v = field.evaluate(&pt).unwrap();
            assert!(clifford_trace(&v).norm() < 1e-12 * v.norm().max(1.0));
            let q = rs_apply(&field, &pt, &metric).unwrap();
            assert!(q.norm() < 1e-8 * v.norm().max(1.0), "{}", q.norm());
            let e = rs_apply_expanded(&field, &pt, &metric).unwrap();
            assert!((e - q).norm() < 1e-8 * v.norm().max(1.0));
        }
    }

    #[test]
    fn massless_psi2_part_is_divergence_free_but_psi1_part_is_not() {
        let metric = MetricParams::scalar_flat(1.0, 0.5, -0.8).unwrap();
        let p = RsModeParams::new(0, -2, 1, Z);
        let rad = rs_radial(RsRadialCase::MasslessScalarFlat, p, &metric).unwrap();
        let full = assemble_rs_mode(p, rs_angular(p), rad).unwrap();
        let psi2 = assemble_rs_mode(p, rs_angular(p), rad.without_psi1()).unwrap();
        let pt = CoordPoint::new(2.3, 1.2, 0.4, 0.7);
        let scale = full.evaluate(&pt).unwrap().norm();
        assert!(divergence(&psi2, &pt, &metric).unwrap().norm() < 1e-8 * scale);
        assert!(divergence(&full, &pt, &metric).unwrap().norm() > 1e-3 * scale);
    }

    #[test]
    fn kummer_mode_is_an_eigenform() {
        let metric = MetricParams::taub_nut(1.0).unwrap();
        let lam = c(0.1, 0.0);
        let p = RsModeParams::new(0, -1, 0, lam);
        for k in [0, 1] {
            let field =
                assemble_rs_mode(p, rs_angular(p), rs_radial(RsRadialCase::KummerTaubNut { k }, p, &metric).unwrap())
                    .unwrap();
            for pt in points() {
                let v = field.evaluate(&pt).unwrap();
                let q = rs_apply(&field, &pt, &metric).unwrap();
                assert!((q - v.scale(lam)).norm() < 1e-5 * v.norm(), "k={k}");
            }
        }
    }

    proptest! {
        #[test]
        fn angular_profiles_solve_their_system(m in -3i32..4, m1 in -6i32..6, m2 in -6i32..6, th in 1e-2..(PI - 1e-2)) {
            let a = rs_angular(RsModeParams::new(m, m1, m2, Z));
            prop_assert!(a.residual(th).unwrap() < 1e-8);
        }
    }
}
