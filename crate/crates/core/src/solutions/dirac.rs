//! Separated Dirac modes: angular profiles `J±(θ)`, radial profiles
//! `Φ₁..Φ₄(r)`, the radial first-order system and mode assembly.

use serde::{Deserialize, Serialize};

use super::{half_angles, kummer_jet, relative_to_terms, ClosedSpinorField, MasslessExponents};
use crate::clifford::{h_coefficient, JetField};
use crate::error::{LabError, Result};
use crate::geometry::{profile_f, MetricParams, Profile};
use crate::jet::{Jet, C64};
use crate::specfun::{branch_sqrt, gauss_2f1, BranchInput};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracModeParams {
    pub m: i32,
    pub m1: i32,
    pub m2: i32,
    pub lambda: C64,
    pub eta: C64,
}

impl DiracModeParams {
    pub fn new(m: i32, m1: i32, m2: i32, lambda: C64, eta: C64) -> Self {
        DiracModeParams { m, m1, m2, lambda, eta }
    }

    /// `mₛ + ½` for `s = 1, 2`.
    fn shifted(&self) -> (f64, f64) {
        (self.m1 as f64 + 0.5, self.m2 as f64 + 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiracAngularCase {
    /// `η ≠ 0`, `m₁ − m₂ = 2`.
    Hypergeometric,
    /// `η = 0`.
    EtaZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularProfile {
    pub case: DiracAngularCase,
    pub params: DiracModeParams,
    /// Bounded on `[0, π]`. Always false in the hypergeometric case, whose
    /// profiles blow up at `θ = 0`.
    pub regular: bool,
    hyper: Option<[C64; 3]>,
}

/// Regularity of the `η = 0` profiles: `m ≥ 0, m₁ ≤ −2m − 3/2, m₂ ≥ 2m + ½` or
/// `m < 0, m₁ ≤ 2m + ½, m₂ ≥ −2m − 3/2`.
pub(crate) fn eta_zero_regular(m: i32, m1: i32, m2: i32) -> bool {
    let (m, m1, m2) = (m as f64, m1 as f64, m2 as f64);
    if m >= 0.0 {
        m1 <= -2.0 * m - 1.5 && m2 >= 2.0 * m + 0.5
    } else {
        m1 <= 2.0 * m + 0.5 && m2 >= -2.0 * m - 1.5
    }
}

pub fn dirac_angular(case: DiracAngularCase, p: DiracModeParams) -> Result<AngularProfile> {
    match case {
        DiracAngularCase::EtaZero => {
            if p.eta != C64::new(0.0, 0.0) {
                return Err(LabError::Parameter(format!("EtaZero needs eta = 0, got {}", p.eta)));
            }
            Ok(AngularProfile { case, params: p, regular: eta_zero_regular(p.m, p.m1, p.m2), hyper: None })
        }
        DiracAngularCase::Hypergeometric => {
            if p.eta == C64::new(0.0, 0.0) {
                return Err(LabError::Parameter("Hypergeometric case needs eta ≠ 0".into()));
            }
            if p.m1 - p.m2 != 2 {
                return Err(LabError::Parameter(format!("Hypergeometric case needs m1 − m2 = 2, got {} − {}", p.m1, p.m2)));
            }
            let a0 = C64::new(0.25 - 0.5 * p.m1 as f64, 0.0);
            let root = (a0 * a0 + p.eta * p.eta).sqrt();
            let gamma = a0 - p.m as f64;
            Ok(AngularProfile { case, params: p, regular: false, hyper: Some([a0 + root, a0 - root, gamma]) })
        }
    }
}

fn gauss_jet(a: C64, b: C64, c: C64, z: Jet) -> Result<Jet> {
    let v = gauss_2f1(a, b, c, z.re())?;
    let d = a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z.re())?;
    Ok(z.chain(v, d))
}

impl AngularProfile {
    /// `(J₊, J₋)` as jets of `theta`.
    pub fn eval_jet(&self, theta: Jet) -> Result<[Jet; 2]> {
        let (s, c) = half_angles(theta)?;
        let (m, m1, m2) = (self.params.m as f64, self.params.m1 as f64, self.params.m2 as f64);
        match self.hyper {
            None => Ok([
                s.powf(m - m1 / 2.0 + 0.25) * c.powf(-m - m1 / 2.0 - 0.75),
                s.powf(m2 / 2.0 - m - 0.25) * c.powf(m + m2 / 2.0 + 0.75),
            ]),
            Some([alpha, beta, gamma]) => {
                let z = c * c;
                let jp = s.powf(m - m1 / 2.0 + 0.25) * c.powc(gamma - 1.0) * gauss_jet(alpha, beta, gamma, z)?;
                let jm = s.powf(m - m1 / 2.0 + 1.25)
                    * c.powc(gamma)
                    * gauss_jet(alpha + 1.0, beta + 1.0, gamma + 1.0, z)?
                    * (-self.params.eta / gamma);
                Ok([jp, jm])
            }
        }
    }

    pub fn eval(&self, theta: f64) -> Result<[C64; 2]> {
        Ok(self.eval_jet(Jet::constant(theta))?.map(|j| j.v))
    }

    /// Values and θ-derivatives.
    pub fn eval_with_derivative(&self, theta: f64) -> Result<([C64; 2], [C64; 2])> {
        let j = self.eval_jet(Jet::variable(theta, 1))?;
        Ok(([j[0].v, j[1].v], [j[0].d[1], j[1].d[1]]))
    }

    /// Relative residual of the angular equations
    /// `−J₊' + (M/sinθ)J₊ − (m₁/2 + ¼)cotθ J₊ = ηJ₋`,
    /// `J₋' + (M/sinθ)J₋ − (m₂/2 + ¼)cotθ J₋ = ηJ₊`, with `M = m + ½`.
    pub fn residual(&self, theta: f64) -> Result<f64> {
        let ([jp, jm], [dp, dm]) = self.eval_with_derivative(theta)?;
        let p = &self.params;
        let (st, ct) = theta.sin_cos();
        let big_m = p.m as f64 + 0.5;
        let t1 = [-dp, jp * (big_m / st), -jp * ((p.m1 as f64 / 2.0 + 0.25) * ct / st), -p.eta * jm];
        let t2 = [dm, jm * (big_m / st), -jm * ((p.m2 as f64 / 2.0 + 0.25) * ct / st), -p.eta * jp];
        let e1 = relative_to_terms(t1.iter().sum(), &t1);
        let e2 = relative_to_terms(t2.iter().sum(), &t2);
        Ok(e1.max(e2))
    }

    /// Sampled blow-up at `θ → 0` and `θ → π`: growth by more than a factor 10
    /// between `10⁻²` and `10⁻⁵` from the endpoint.
    pub fn singular_endpoints(&self) -> Result<(bool, bool)> {
        let size = |t: f64| -> Result<f64> {
            let [a, b] = self.eval(t)?;
            Ok(a.norm() + b.norm())
        };
        let pi = std::f64::consts::PI;
        let at0 = size(1e-5)? > 10.0 * size(1e-2)?;
        let atpi = size(pi - 1e-5)? > 10.0 * size(pi - 1e-2)?;
        Ok((at0, atpi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiracRadialCase {
    /// `λ = η = 0` on a scalar-flat metric.
    MasslessEtaZero,
    /// `λ ≠ 0`, `η = 0` on the negative NUT metric; `k` picks the branch of `εₛ`.
    KummerNegNut { k: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RadialData {
    Massless(MasslessExponents),
    Kummer { eps: [C64; 2], alpha: [C64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub case: DiracRadialCase,
    pub params: DiracModeParams,
    pub metric: MetricParams,
    data: RadialData,
}

pub fn dirac_radial(case: DiracRadialCase, p: DiracModeParams, metric: &MetricParams) -> Result<RadialProfile> {
    let zero = C64::new(0.0, 0.0);
    if p.eta != zero {
        return Err(LabError::Parameter("closed-form radial modes need eta = 0".into()));
    }
    let data = match case {
        DiracRadialCase::MasslessEtaZero => {
            if p.lambda != zero {
                return Err(LabError::Parameter("MasslessEtaZero needs lambda = 0".into()));
            }
            if metric.profile() != Profile::ScalarFlat {
                return Err(LabError::Parameter("MasslessEtaZero needs the ScalarFlat profile".into()));
            }
            RadialData::Massless(MasslessExponents::new(metric)?)
        }
        DiracRadialCase::KummerNegNut { k } => {
            if p.lambda == zero {
                return Err(LabError::Parameter("KummerNegNut needs lambda ≠ 0".into()));
            }
            if metric.profile() != Profile::NegativeNut {
                return Err(LabError::Parameter("KummerNegNut needs the NegativeNut profile".into()));
            }
            let n = metric.n();
            let lam = p.lambda;
            let mut eps = [zero; 2];
            let mut alpha = [zero; 2];
            for (i, (s, ms)) in [(1.0, p.m1 as f64), (2.0, p.m2 as f64)].into_iter().enumerate() {
                let sign = if i == 0 { -1.0 } else { 1.0 };
                let x = 2.0 * s + 2.0 * sign * ms - 1.0;
                let e = branch_sqrt(&BranchInput { x, y: 8.0 * n, lambda: lam, k })?;
                eps[i] = e;
                alpha[i] = -0.5 * (s + sign * ms) + 0.25 - (e * e + 32.0 * n * n * lam * lam) / (4.0 * e);
            }
            RadialData::Kummer { eps, alpha }
        }
    };
    Ok(RadialProfile { case, params: p, metric: *metric, data })
}

impl RadialProfile {
    /// Open interval `(N, ∞)`.
    pub fn domain(&self) -> (f64, f64) {
        (self.metric.n(), f64::INFINITY)
    }

    /// Branch index used for `εₛ`, if any.
    pub fn branch(&self) -> Option<u8> {
        match self.case {
            DiracRadialCase::KummerNegNut { k } => Some(k),
            _ => None,
        }
    }

    pub fn eval_jet(&self, r: Jet) -> Result<[Jet; 4]> {
        let n = self.metric.n();
        if !(r.re() > n) {
            return Err(LabError::Domain(format!("r = {} must exceed N = {n}", r.re())));
        }
        let (m1, m2) = (self.params.m1 as f64, self.params.m2 as f64);
        let zero = Jet::constant(0.0);
        match self.data {
            RadialData::Massless(ex) => {
                let w = (r - n).powf(-0.5);
                Ok([zero, zero, ex.factor(r, 2.0 * m1 - 1.0, -0.25) * w, ex.factor(r, -(2.0 * m2 + 3.0), -0.25) * w])
            }
            RadialData::Kummer { eps, alpha } => {
                let lam = self.params.lambda;
                let l2 = 32.0 * n * n * lam * lam;
                let rp = r + n;
                let pref = ((r - n).sqrt() * (8.0 * n) * lam).recip();

                let z1 = rp * (eps[0] / (4.0 * n));
                let g1 = m1 - 0.5;
                let e1 = (z1 * -0.5).exp();
                let ka = kummer_jet(alpha[0], C64::from(g1), z1)?;
                let kb = kummer_jet(alpha[0] + 1.0, C64::from(g1 + 1.0), z1)?;
                let x1 = 1.0 - 2.0 * m1;
                let phi1 = rp.powf(m1 / 2.0 - 1.25) * e1 * ka;
                let phi3 = rp.powf(m1 / 2.0 - 0.75)
                    * pref
                    * e1
                    * (ka * (x1 + eps[0]) - kb * ((eps[0] * eps[0] + eps[0] * x1 + l2) / x1));

                let z2 = rp * (eps[1] / (4.0 * n));
                let g2 = -m2 - 1.5;
                let e2 = (z2 * -0.5).exp();
                let kc = kummer_jet(alpha[1], C64::from(g2), z2)?;
                let kd = kummer_jet(alpha[1] + 1.0, C64::from(g2 + 1.0), z2)?;
                let x2 = 2.0 * m2 + 3.0;
                let phi2 = rp.powf(-m2 / 2.0 - 1.75) * e2 * kc;
                let phi4 = rp.powf(-m2 / 2.0 - 1.25)
                    * pref
                    * e2
                    * (kc * (x2 + eps[1]) - kd * ((eps[1] * eps[1] + eps[1] * x2 + l2) / x2));
                Ok([phi1, phi2, phi3, phi4])
            }
        }
    }

    pub fn eval(&self, r: f64) -> Result<[C64; 4]> {
        Ok(self.eval_jet(Jet::constant(r))?.map(|j| j.v))
    }

    pub fn eval_with_derivative(&self, r: f64) -> Result<([C64; 4], [C64; 4])> {
        let j = self.eval_jet(Jet::variable(r, 0))?;
        Ok((j.map(|c| c.v), j.map(|c| c.d[0])))
    }

    /// `max_k |Φ_k' − rhs_k| / max(|Φ'|, |rhs|)` against the corrected system.
    pub fn residual(&self, r: f64) -> Result<f64> {
        let (v, d) = self.eval_with_derivative(r)?;
        let rhs = dirac_radial_rhs(&self.params, &self.metric, r, &v)?;
        Ok(vector_relative(&d, &rhs))
    }
}

pub(crate) fn vector_relative(a: &[C64], b: &[C64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.norm()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn radial_rhs(p: &DiracModeParams, metric: &MetricParams, r: f64, phi: &[C64; 4], h2_sign: f64) -> Result<[C64; 4]> {
    let n = metric.n();
    if !(r > n) {
        return Err(LabError::Domain(format!("r = {r} must exceed N = {n}")));
    }
    let f = profile_f(metric, r)?;
    let h1 = h_coefficient(metric, 1, r)?;
    let h2 = h_coefficient(metric, 2, r)?;
    let (big1, big2) = p.shifted();
    let c = f * f / (4.0 * n);
    let et = p.eta * metric.inv_sqrt_h(r);
    let lf = p.lambda * f;
    Ok([
        phi[0] * (h2_sign * f * h2 - c * big1) + et * phi[1] - lf * phi[2],
        phi[1] * (h2_sign * f * h2 + c * big2) + et * phi[0] - lf * phi[3],
        phi[2] * (-f * h1 + c * big1) - et * phi[3] + lf * phi[0],
        phi[3] * (-f * h1 - c * big2) - et * phi[2] + lf * phi[1],
    ])
}

/// Right-hand side of the four radial equations
/// `Φ₁' = −(f h₂ + f²M₁/(4N))Φ₁ + (η/√h)Φ₂ − λfΦ₃`, …, `Mₛ = mₛ + ½`.
pub fn dirac_radial_rhs(p: &DiracModeParams, metric: &MetricParams, r: f64, phi: &[C64; 4]) -> Result<[C64; 4]> {
    radial_rhs(p, metric, r, phi, -1.0)
}

/// The same system with `+f h₂` in the first two lines, kept to show that it
/// is not satisfied by the closed-form modes.
pub fn dirac_radial_rhs_as_printed(
    p: &DiracModeParams,
    metric: &MetricParams,
    r: f64,
    phi: &[C64; 4],
) -> Result<[C64; 4]> {
    radial_rhs(p, metric, r, phi, 1.0)
}

/// `Ψ = e^{i(m+½)φ} (e^{iM₁ψ/2}Φ₁J₊, e^{iM₂ψ/2}Φ₂J₋, e^{iM₁ψ/2}Φ₃J₊, e^{iM₂ψ/2}Φ₄J₋)`.
pub fn assemble_dirac_mode(p: DiracModeParams, angular: AngularProfile, radial: RadialProfile) -> Result<ClosedSpinorField> {
    if angular.params != p || radial.params != p {
        return Err(LabError::Parameter("angular and radial profiles were built for other mode numbers".into()));
    }
    let (big1, big2) = p.shifted();
    let big = p.m as f64 + 0.5;
    Ok(JetField::new(Box::new(move |x: &[Jet; 4]| {
        let [r, th, ph, ps] = *x;
        let phi = radial.eval_jet(r)?;
        let [jp, jm] = angular.eval_jet(th)?;
        let common = (ph * C64::new(0.0, big)).exp();
        let a = common * (ps * C64::new(0.0, 0.5 * big1)).exp() * jp;
        let b = common * (ps * C64::new(0.0, 0.5 * big2)).exp() * jm;
        Ok([phi[0] * a, phi[1] * b, phi[2] * a, phi[3] * b])
    })))
}
