//! The Taub-NUT type metric family
//! `g = f² dr² + (r² − N²)(σ₁² + σ₂²) + 4N² f⁻² σ₃²`, its orthonormal
//! (co)frame, Levi-Civita connection, curvature and the quantities built on
//! them (total mass, volume density, almost-complex integrability).
//!
//! Every profile in the family has `f² = (r² − N²)/h(r)` with
//! `h(r) = r² + C₁ r + C₂`; Taub-NUT is `(C₁, C₂) = (−2N, N²)` and the negative
//! NUT charge metric is `(2N, N²)`. Closed forms are evaluated in factored
//! form per profile so that nothing cancels near `r = N`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

use crate::error::{LabError, Result};
use crate::fd;
use crate::jet::{Jet, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    TaubNut,
    NegativeNut,
    ScalarFlat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    n: f64,
    c1: f64,
    c2: f64,
    profile: Profile,
}

const RANGE_SLACK: f64 = 1e-12;

impl MetricParams {
    pub fn taub_nut(n: f64) -> Result<Self> {
        Self::new(n, -2.0 * n, n * n, Profile::TaubNut)
    }

    pub fn negative_nut(n: f64) -> Result<Self> {
        Self::new(n, 2.0 * n, n * n, Profile::NegativeNut)
    }

    pub fn scalar_flat(n: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(n, c1, c2, Profile::ScalarFlat)
    }

    /// Builds the parameter set; `c1`, `c2` are ignored (normalized) for the
    /// two NUT profiles.
    pub fn new(n: f64, c1: f64, c2: f64, profile: Profile) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(LabError::Parameter(format!("N must be positive, got {n}")));
        }
        let (c1, c2) = match profile {
            Profile::TaubNut => (-2.0 * n, n * n),
            Profile::NegativeNut => (2.0 * n, n * n),
            Profile::ScalarFlat => {
                if !c1.is_finite() || !c2.is_finite() {
                    return Err(LabError::Parameter("C1, C2 must be finite".into()));
                }
                let scale = RANGE_SLACK * (1.0 + n * n + c1.abs() + c2.abs());
                if c1 < -2.0 * n - scale {
                    return Err(LabError::Parameter(format!("C1 = {c1} < -2N")));
                }
                let lo = -n * n - n * c1;
                let hi = c1 * c1 / 4.0;
                if c2 < lo - scale || c2 > hi + scale {
                    return Err(LabError::Parameter(format!(
                        "C2 = {c2} outside [{lo}, {hi}]"
                    )));
                }
                (c1, c2)
            }
        };
        Ok(MetricParams { n, c1, c2, profile })
    }

    pub fn n(&self) -> f64 {
        self.n
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Smallest radius at which closed forms are evaluated.
    pub fn min_radius(&self) -> f64 {
        match self.profile {
            Profile::TaubNut => self.n * (1.0 + 1e-6),
            _ => self.n * (1.0 + 1e-8),
        }
    }

    /// `h(r) = r² + C₁ r + C₂`.
    pub fn h(&self, r: f64) -> f64 {
        match self.profile {
            Profile::TaubNut => (r - self.n) * (r - self.n),
            Profile::NegativeNut => (r + self.n) * (r + self.n),
            Profile::ScalarFlat => r * r + self.c1 * r + self.c2,
        }
    }

    pub fn h_prime(&self, r: f64) -> f64 {
        2.0 * r + self.c1
    }

    /// `r² − N²` in factored form.
    pub fn s(&self, r: f64) -> f64 {
        (r - self.n) * (r + self.n)
    }

    /// `f'/f`, the logarithmic derivative of the profile.
    pub fn log_f_prime(&self, r: f64) -> f64 {
        let n = self.n;
        match self.profile {
            Profile::TaubNut => -n / self.s(r),
            Profile::NegativeNut => n / self.s(r),
            Profile::ScalarFlat => {
                let p = self.c1 * r * r + 2.0 * (self.c2 + n * n) * r + self.c1 * n * n;
                p / (2.0 * self.h(r) * self.s(r))
            }
        }
    }

    /// Derivative of `f'/f`.
    pub fn log_f_second(&self, r: f64) -> f64 {
        let n = self.n;
        let s = self.s(r);
        match self.profile {
            Profile::TaubNut => 2.0 * n * r / (s * s),
            Profile::NegativeNut => -2.0 * n * r / (s * s),
            Profile::ScalarFlat => {
                let h = self.h(r);
                let p = self.c1 * r * r + 2.0 * (self.c2 + n * n) * r + self.c1 * n * n;
                let dp = 2.0 * self.c1 * r + 2.0 * (self.c2 + n * n);
                dp / (2.0 * h * s) - p * (self.h_prime(r) * s + 2.0 * r * h) / (2.0 * h * h * s * s)
            }
        }
    }

    /// `1/sqrt(h)`, the coefficient that couples the η-terms of the radial system.
    pub fn inv_sqrt_h(&self, r: f64) -> f64 {
        match self.profile {
            Profile::TaubNut => 1.0 / (r - self.n),
            Profile::NegativeNut => 1.0 / (r + self.n),
            Profile::ScalarFlat => 1.0 / self.h(r).sqrt(),
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !r.is_finite() {
            return Err(LabError::Domain(format!("non-finite radius {r}")));
        }
        if r < self.n || (r == self.n && self.profile == Profile::TaubNut) {
            return Err(LabError::Domain(format!("r = {r} must exceed N = {}", self.n)));
        }
        if self.h(r) <= 0.0 {
            return Err(LabError::Domain(format!("r² + C1 r + C2 <= 0 at r = {r}")));
        }
        Ok(())
    }
}

/// Closed form of the profile `f(r)`.
pub fn profile_f(params: &MetricParams, r: f64) -> Result<f64> {
    params.check_radius(r)?;
    let n = params.n;
    Ok(match params.profile {
        Profile::TaubNut => ((r + n) / (r - n)).sqrt(),
        Profile::NegativeNut => ((r - n) / (r + n)).sqrt(),
        Profile::ScalarFlat => (params.s(r) / params.h(r)).sqrt(),
    })
}

pub fn profile_f_prime(params: &MetricParams, r: f64) -> Result<f64> {
    let f = profile_f(params, r)?;
    if r == params.n {
        return Err(LabError::Domain("f' diverges at r = N".into()));
    }
    Ok(f * params.log_f_prime(r))
}

pub fn profile_f_second(params: &MetricParams, r: f64) -> Result<f64> {
    let f = profile_f(params, r)?;
    if r == params.n {
        return Err(LabError::Domain("f'' diverges at r = N".into()));
    }
    let l1 = params.log_f_prime(r);
    Ok(f * (params.log_f_second(r) + l1 * l1))
}

/// `f` lifted to a jet in the radial slot.
pub fn profile_f_jet(params: &MetricParams, r: Jet) -> Result<Jet> {
    let f = profile_f(params, r.re())?;
    let fp = f * params.log_f_prime(r.re());
    Ok(r.chain(C64::new(f, 0.0), C64::new(fp, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl CoordPoint {
    pub fn new(r: f64, theta: f64, phi: f64, psi: f64) -> Self {
        CoordPoint { r, theta, phi, psi }
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        CoordPoint::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.r, self.theta, self.phi, self.psi]
    }

    /// Coordinate jets seeded in slots 0..4.
    pub fn jets(&self) -> [Jet; 4] {
        [
            Jet::variable(self.r, 0),
            Jet::variable(self.theta, 1),
            Jet::variable(self.phi, 2),
            Jet::variable(self.psi, 3),
        ]
    }

    pub fn check_interior(&self) -> Result<()> {
        let s = self.theta.sin();
        if !(self.theta > 0.0 && self.theta < PI) || s.abs() < 1e-300 {
            return Err(LabError::Pole(format!("sin(theta) = 0 at theta = {}", self.theta)));
        }
        Ok(())
    }
}

/// Rows `e¹..e⁴` on `(dr, dθ, dφ, dψ)` and rows `e₁..e₄` on `(∂r, ∂θ, ∂φ, ∂ψ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameData {
    pub coframe: [[f64; 4]; 4],
    pub frame: [[f64; 4]; 4],
}

fn coframe_matrix(params: &MetricParams, x: &[f64; 4]) -> Result<[[f64; 4]; 4]> {
    let [r, th, _ph, ps] = *x;
    let f = profile_f(params, r)?;
    let w = params.s(r).sqrt();
    let n = params.n;
    let (st, ct) = th.sin_cos();
    let (sp, cp) = ps.sin_cos();
    Ok([
        [f, 0.0, 0.0, 0.0],
        [0.0, w * sp, -w * st * cp, 0.0],
        [0.0, -w * cp, -w * st * sp, 0.0],
        [0.0, 0.0, 2.0 * n / f * ct, 2.0 * n / f],
    ])
}

pub fn build_frames(params: &MetricParams, point: &CoordPoint) -> Result<FrameData> {
    point.check_interior()?;
    let x = point.to_array();
    let coframe = coframe_matrix(params, &x)?;
    let f = coframe[0][0];
    let w = params.s(point.r).sqrt();
    let n = params.n;
    let (st, ct) = point.theta.sin_cos();
    let (sp, cp) = point.psi.sin_cos();
    let frame = [
        [1.0 / f, 0.0, 0.0, 0.0],
        [0.0, sp / w, -cp / (st * w), ct * cp / (st * w)],
        [0.0, -cp / w, -sp / (st * w), ct * sp / (st * w)],
        [0.0, 0.0, 0.0, f / (2.0 * n)],
    ];
    Ok(FrameData { coframe, frame })
}

/// `omega[a][b][c] = ω^a_b(e_c)`, zero-based frame indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionForms {
    pub omega: [[[f64; 4]; 4]; 4],
}

impl ConnectionForms {
    /// One-based accessor matching the usual `ω^a_b(e_c)` notation.
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.omega[a - 1][b - 1][c - 1]
    }
}

/// Coefficients shared by the connection and spin connection:
/// `(r/(S f), N/(S f), f'/f², f/(2N))`.
pub(crate) struct ConnectionCoefficients {
    pub radial: f64,
    pub nut: f64,
    pub fprime_over_f2: f64,
    pub f_over_2n: f64,
    pub f: f64,
}

pub(crate) fn connection_coefficients(params: &MetricParams, r: f64) -> Result<ConnectionCoefficients> {
    let f = profile_f(params, r)?;
    if r == params.n {
        return Err(LabError::Domain("connection singular at r = N".into()));
    }
    let s = params.s(r);
    Ok(ConnectionCoefficients {
        radial: r / (s * f),
        nut: params.n / (s * f),
        fprime_over_f2: params.log_f_prime(r) / f,
        f_over_2n: f / (2.0 * params.n),
        f,
    })
}

pub fn connection_forms(params: &MetricParams, point: &CoordPoint) -> Result<ConnectionForms> {
    let k = connection_coefficients(params, point.r)?;
    let mut omega = [[[0.0; 4]; 4]; 4];
    let mut put = |a: usize, b: usize, c: usize, v: f64| {
        omega[a][b][c] = v;
        omega[b][a][c] = -v;
    };
    put(1, 0, 1, k.radial);
    put(2, 0, 2, k.radial);
    put(3, 0, 3, -k.fprime_over_f2);
    put(2, 1, 3, k.nut - k.f_over_2n);
    put(3, 1, 2, k.nut);
    put(3, 2, 1, -k.nut);
    Ok(ConnectionForms { omega })
}

/// `riemann[a][b][i][j] = R^a_b(e_i, e_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureData {
    pub riemann: [[[[f64; 4]; 4]; 4]; 4],
    pub ricci_diag: [f64; 4],
    pub scalar: f64,
    pub a: f64,
    pub b: f64,
}

pub fn curvature(params: &MetricParams, point: &CoordPoint) -> Result<CurvatureData> {
    let r = point.r;
    let f = profile_f(params, r)?;
    if r == params.n {
        return Err(LabError::Domain("curvature singular at r = N".into()));
    }
    let n = params.n;
    let s = params.s(r);
    let f2 = f * f;
    let l1 = params.log_f_prime(r);
    let l2 = params.log_f_second(r);
    let a = (n * n + r * s * l1) / (s * s * f2);
    let b = n * (r + s * l1) / (s * s * f2);
    // (f f'' - 3 f'^2) / f^4
    let k41 = (l2 - 2.0 * l1 * l1) / f2;
    // ((r^2-N^2) f^2 - 3N^2 - r^2) / ((r^2-N^2)^2 f^2)
    let k32 = (s * f2 - 3.0 * n * n - r * r) / (s * s * f2);

    let mut rm = [[[[0.0; 4]; 4]; 4]; 4];
    let mut put = |a_: usize, b_: usize, i: usize, j: usize, v: f64| {
        rm[a_][b_][i][j] += v;
        rm[a_][b_][j][i] -= v;
        rm[b_][a_][i][j] -= v;
        rm[b_][a_][j][i] += v;
    };
    put(1, 0, 1, 0, a);
    put(1, 0, 3, 2, -b);
    put(2, 0, 2, 0, a);
    put(2, 0, 3, 1, b);
    put(3, 0, 3, 0, k41);
    put(3, 0, 2, 1, 2.0 * b);
    put(2, 1, 3, 0, 2.0 * b);
    put(2, 1, 2, 1, k32);
    put(3, 1, 2, 0, b);
    put(3, 1, 3, 1, a);
    put(3, 2, 1, 0, -b);
    put(3, 2, 3, 2, a);

    let ric = (n * n - params.c2) / (s * s);
    let scalar = scalar_curvature_in(n, params.c1, params.c2, params.profile, r);
    Ok(CurvatureData {
        riemann: rm,
        ricci_diag: [ric, -ric, -ric, ric],
        scalar,
        a,
        b,
    })
}

/// Scalar curvature from the profile's logarithmic derivatives, generic so
/// that it can also be evaluated in exact rational arithmetic.
fn scalar_curvature_in<T>(n: T, c1: T, c2: T, profile: Profile, r: T) -> T
where
    T: Clone + Num,
{
    let two = T::one() + T::one();
    let three = two.clone() + T::one();
    let four = two.clone() + two.clone();
    let s = (r.clone() - n.clone()) * (r.clone() + n.clone());
    let (f2, l1, l2) = match profile {
        Profile::TaubNut => (
            (r.clone() + n.clone()) / (r.clone() - n.clone()),
            T::zero() - n.clone() / s.clone(),
            two.clone() * n.clone() * r.clone() / (s.clone() * s.clone()),
        ),
        Profile::NegativeNut => (
            (r.clone() - n.clone()) / (r.clone() + n.clone()),
            n.clone() / s.clone(),
            T::zero() - two.clone() * n.clone() * r.clone() / (s.clone() * s.clone()),
        ),
        Profile::ScalarFlat => {
            let h = r.clone() * r.clone() + c1.clone() * r.clone() + c2.clone();
            let hp = two.clone() * r.clone() + c1.clone();
            let nn = n.clone() * n.clone();
            let p = c1.clone() * r.clone() * r.clone()
                + two.clone() * (c2.clone() + nn.clone()) * r.clone()
                + c1.clone() * nn.clone();
            let dp = two.clone() * c1.clone() * r.clone() + two.clone() * (c2 + nn);
            let l1 = p.clone() / (two.clone() * h.clone() * s.clone());
            let l2 = dp / (two.clone() * h.clone() * s.clone())
                - p * (hp * s.clone() + two.clone() * r.clone() * h.clone())
                    / (two.clone() * h.clone() * h.clone() * s.clone() * s.clone());
            (s.clone() / h, l1, l2)
        }
    };
    // R = -2(f^2 - f^4 - 4 r f f' - S f f'' + 3 S f'^2) / (S f^4), divided through by f^2
    let l1sq = l1.clone() * l1.clone();
    let num = T::one() - f2.clone() - four * r * l1 - s.clone() * (l2 + l1sq.clone()) + three * s.clone() * l1sq;
    T::zero() - two * num / (s * f2)
}

/// The scalar curvature formula evaluated in exact rational arithmetic on
/// the (exactly representable) f64 inputs, rounded once at the end.
pub fn scalar_curvature_exact(params: &MetricParams, r: f64) -> Result<f64> {
    profile_f(params, r)?;
    if r == params.n {
        return Err(LabError::Domain("curvature singular at r = N".into()));
    }
    let q = |x: f64| BigRational::from_float(x).ok_or(LabError::NonFinite(x));
    let v = scalar_curvature_in(q(params.n)?, q(params.c1)?, q(params.c2)?, params.profile, q(r)?);
    v.to_f64().ok_or_else(|| LabError::Domain("scalar curvature overflows f64".into()))
}

/// `Ric(e_b, e_b) = Σ_a R^a_b(e_a, e_b)`.
pub fn ricci_from_riemann(riemann: &[[[[f64; 4]; 4]; 4]; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (b, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|a| riemann[a][b][a][b]).sum();
    }
    out
}

/// Volume of the unit round 3-sphere.
pub const VOL_S3: f64 = 2.0 * PI * PI;
/// `∫ σ₁∧σ₂∧σ₃` over the Euler-angle domain.
pub const ANGULAR_VOLUME: f64 = 16.0 * PI * PI;

/// Boundary integral for the total mass on the sphere `r = r_cutoff`.
pub fn total_mass(params: &MetricParams, r_cutoff: f64) -> Result<f64> {
    let r = r_cutoff;
    let f = profile_f(params, r)?;
    let n = params.n;
    let s = params.s(r);
    let f2_minus_1 = -(n * n + params.c1 * r + params.c2) / params.h(r);
    let integrand = 2.0 * r * f2_minus_1 / s + 2.0 * params.log_f_prime(r) / (f * f);
    // on r = const, ĕ²∧ĕ³∧ĕ⁴ = 2N (r² − N²) σ₁∧σ₂∧σ₃
    Ok(integrand * 2.0 * n * s * ANGULAR_VOLUME / (4.0 * VOL_S3))
}

/// Density of `dμ` against `dr dθ dφ dψ`.
pub fn volume_density(params: &MetricParams, point: &CoordPoint) -> f64 {
    2.0 * params.n * params.s(point.r) * point.theta.sin()
}

/// `Q(r)` from the `dω₂` obstruction of the almost-complex structure `J₁`.
pub fn q_factor(params: &MetricParams, delta: i32, r: f64) -> f64 {
    let n = params.n;
    let d = delta as f64;
    let (c1, c2) = (params.c1, params.c2);
    let sqrt_h = match params.profile {
        Profile::TaubNut => r - n,
        Profile::NegativeNut => r + n,
        Profile::ScalarFlat => params.h(r).sqrt(),
    };
    2.0 * params.s(r) * sqrt_h
        - (r + d * n) * (2.0 * r * r + 3.0 * c1 * r + 2.0 * d * n * r + d * n * c1 + 4.0 * c2)
}

fn tilde_coframe(params: &MetricParams, delta: f64, x: &[f64; 4]) -> Result<[[f64; 4]; 4]> {
    let [r, th, ph, _ps] = *x;
    let f = profile_f(params, r)?;
    let w = params.s(r).sqrt();
    let (st, ct) = th.sin_cos();
    let (sp, cp) = ph.sin_cos();
    let g = 2.0 * delta * params.n / f;
    Ok([
        [f * st * cp, w * ct * cp, -w * st * sp, 0.0],
        [f * st * sp, w * ct * sp, w * st * cp, 0.0],
        [f * ct, -w * st, 0.0, 0.0],
        [0.0, 0.0, g * ct, g],
    ])
}

/// `(p, q, s, t)` with `(1,0)`-forms `ẽ^p + i ẽ^q` and `ẽ^s + i ẽ^t`.
fn holomorphic_pairs(j_index: u8) -> Result<[usize; 4]> {
    match j_index {
        1 => Ok([0, 1, 2, 3]),
        2 => Ok([0, 2, 3, 1]),
        3 => Ok([0, 3, 1, 2]),
        other => Err(LabError::Index(other as usize)),
    }
}

fn invert4(m: [[C64; 4]; 4]) -> Result<[[C64; 4]; 4]> {
    let mut a = m;
    let mut inv = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[piv][col].norm() < 1e-300 {
            return Err(LabError::Domain("singular complex coframe".into()));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for k in 0..4 {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..4 {
            if row != col {
                let fac = a[row][col];
                for k in 0..4 {
                    let (ack, ick) = (a[col][k], inv[col][k]);
                    a[row][k] -= fac * ack;
                    inv[row][k] -= fac * ick;
                }
            }
        }
    }
    Ok(inv)
}

/// Size of the `(0,2)`-components of `dω₁`, `dω₂` for the almost-complex
/// structure `J_j` built on the tilde coframe with sign `delta`, relative to
/// the sum of the magnitudes of the contributing terms. Vanishes exactly when
/// `J_j` is integrable at the point.
pub fn complex_structure_residual(
    params: &MetricParams,
    j_index: u8,
    delta: i32,
    point: &CoordPoint,
) -> Result<f64> {
    point.check_interior()?;
    if delta != 1 && delta != -1 {
        return Err(LabError::Parameter(format!("delta must be ±1, got {delta}")));
    }
    let [p, q, s, t] = holomorphic_pairs(j_index)?;
    let d = delta as f64;
    let x = point.to_array();
    let e = tilde_coframe(params, d, &x)?;
    let i = C64::new(0.0, 1.0);
    // forms ω₁, ω₂, ω̄₁, ω̄₂ on coordinates
    let mut k = [[C64::new(0.0, 0.0); 4]; 4];
    for mu in 0..4 {
        k[0][mu] = e[p][mu] + i * e[q][mu];
        k[1][mu] = e[s][mu] + i * e[t][mu];
        k[2][mu] = e[p][mu] - i * e[q][mu];
        k[3][mu] = e[s][mu] - i * e[t][mu];
    }
    // columns of the inverse are the dual vectors
    let v = invert4(k)?;

    // d ẽ^a as antisymmetric coordinate 2-forms
    let mut partials = [[[0.0; 16]; 4]; 1];
    for mu in 0..4 {
        partials[0][mu] = fd::partial_real(
            |y| {
                let m = tilde_coframe(params, d, y).unwrap_or([[f64::NAN; 4]; 4]);
                let mut flat = [0.0; 16];
                for a in 0..4 {
                    flat[4 * a..4 * a + 4].copy_from_slice(&m[a]);
                }
                flat
            },
            &x,
            mu,
        )?;
    }
    let de = |a: usize, mu: usize, nu: usize| partials[0][mu][4 * a + nu] - partials[0][nu][4 * a + mu];
    let domega = |pair: (usize, usize), mu: usize, nu: usize| {
        C64::new(de(pair.0, mu, nu), 0.0) + i * de(pair.1, mu, nu)
    };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for pair in [(p, q), (s, t)] {
        let mut acc = C64::new(0.0, 0.0);
        for mu in 0..4 {
            for nu in 0..4 {
                let term = domega(pair, mu, nu) * v[mu][2] * v[nu][3];
                acc += term;
                scale += term.norm();
            }
        }
        worst = worst.max(acc.norm());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Finite-difference re-derivations of the structure equations.
pub mod checks {
    use super::*;

    fn connection_coordinate(params: &MetricParams, x: &[f64; 4]) -> [[[f64; 4]; 4]; 4] {
        let p = CoordPoint::from_array(*x);
        let (Ok(w), Ok(e)) = (connection_forms(params, &p), coframe_matrix(params, x)) else {
            return [[[f64::NAN; 4]; 4]; 4];
        };
        let mut out = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for mu in 0..4 {
                    out[a][b][mu] = (0..4).map(|c| w.omega[a][b][c] * e[c][mu]).sum();
                }
            }
        }
        out
    }

    /// `max |de^a + ω^a_b ∧ e^b|` over coordinate components, relative to
    /// `max |de^a|`.
    pub fn first_structure_residual(params: &MetricParams, point: &CoordPoint) -> Result<f64> {
        point.check_interior()?;
        let x = point.to_array();
        let e = coframe_matrix(params, &x)?;
        let w = connection_coordinate(params, &x);
        let mut de = [[0.0; 16]; 4];
        for (mu, slot) in de.iter_mut().enumerate() {
            *slot = fd::partial_real(
                |y| {
                    let m = coframe_matrix(params, y).unwrap_or([[f64::NAN; 4]; 4]);
                    let mut flat = [0.0; 16];
                    for a in 0..4 {
                        flat[4 * a..4 * a + 4].copy_from_slice(&m[a]);
                    }
                    flat
                },
                &x,
                mu,
            )?;
        }
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..4 {
            for mu in 0..4 {
                for nu in (mu + 1)..4 {
                    let d = de[mu][4 * a + nu] - de[nu][4 * a + mu];
                    let mut v = d;
                    scale = scale.max(d.abs());
                    for b in 0..4 {
                        v += w[a][b][mu] * e[b][nu] - w[a][b][nu] * e[b][mu];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }

    /// Riemann tensor `R^a_b(e_i, e_j)` from `dω + ω∧ω` by finite differences.
    pub fn riemann_fd(params: &MetricParams, point: &CoordPoint) -> Result<[[[[f64; 4]; 4]; 4]; 4]> {
        point.check_interior()?;
        let x = point.to_array();
        let frames = build_frames(params, point)?;
        let w = connection_coordinate(params, &x);
        let mut dw = [[0.0; 64]; 4];
        for (mu, slot) in dw.iter_mut().enumerate() {
            *slot = fd::partial_real(
                |y| {
                    let c = connection_coordinate(params, y);
                    let mut flat = [0.0; 64];
                    for a in 0..4 {
                        for b in 0..4 {
                            flat[16 * a + 4 * b..16 * a + 4 * b + 4].copy_from_slice(&c[a][b]);
                        }
                    }
                    flat
                },
                &x,
                mu,
            )?;
        }
        let mut coord = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for mu in 0..4 {
                    for nu in 0..4 {
                        let mut v = dw[mu][16 * a + 4 * b + nu] - dw[nu][16 * a + 4 * b + mu];
                        for c in 0..4 {
                            v += w[a][c][mu] * w[c][b][nu] - w[a][c][nu] * w[c][b][mu];
                        }
                        coord[a][b][mu][nu] = v;
                    }
                }
            }
        }
        let fr = frames.frame;
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        let mut v = 0.0;
                        for mu in 0..4 {
                            for nu in 0..4 {
                                v += fr[i][mu] * fr[j][nu] * coord[a][b][mu][nu];
                            }
                        }
                        out[a][b][i][j] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest deviation of the finite-difference curvature from the closed
    /// form, relative to the largest closed-form component.
    pub fn second_structure_residual(params: &MetricParams, point: &CoordPoint) -> Result<f64> {
        let fd = riemann_fd(params, point)?;
        let cf = curvature(params, point)?.riemann;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        worst = worst.max((fd[a][b][i][j] - cf[a][b][i][j]).abs());
                        scale = scale.max(cf[a][b][i][j].abs());
                    }
                }
            }
        }
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }

    /// `max |g(e_i, e_j) − δ_ij|` with `g` assembled from its coordinate form.
    pub fn orthonormality_defect(params: &MetricParams, point: &CoordPoint) -> Result<f64> {
        let fr = build_frames(params, point)?;
        let r = point.r;
        let f = profile_f(params, r)?;
        let s = params.s(r);
        let n = params.n;
        let x = point.to_array();
        let [_, th, _, ps] = x;
        let sig = [
            [0.0, ps.sin(), -th.sin() * ps.cos(), 0.0],
            [0.0, -ps.cos(), -th.sin() * ps.sin(), 0.0],
            [0.0, 0.0, th.cos(), 1.0],
        ];
        let mut g = [[0.0; 4]; 4];
        g[0][0] = f * f;
        for mu in 0..4 {
            for nu in 0..4 {
                g[mu][nu] += s * (sig[0][mu] * sig[0][nu] + sig[1][mu] * sig[1][nu])
                    + 4.0 * n * n / (f * f) * sig[2][mu] * sig[2][nu];
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let mut v = 0.0;
                for mu in 0..4 {
                    for nu in 0..4 {
                        v += fr.frame[i][mu] * g[mu][nu] * fr.frame[j][nu];
                    }
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::checks::*;
    use super::*;
    use approx::assert_relative_eq;

    fn sf() -> MetricParams {
        MetricParams::scalar_flat(1.0, 0.5, -0.3).unwrap()
    }

    #[test]
    fn taub_nut_profile_value() {
        let p = MetricParams::taub_nut(1.0).unwrap();
        assert_relative_eq!(profile_f(&p, 3.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        let sf = MetricParams::scalar_flat(1.0, -2.0, 1.0).unwrap();
        assert_relative_eq!(profile_f(&sf, 3.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn profile_tends_to_one() {
        for p in [
            MetricParams::taub_nut(1.0).unwrap(),
            MetricParams::negative_nut(1.0).unwrap(),
            sf(),
        ] {
            let r = 1e6;
            let f = profile_f(&p, r).unwrap();
            assert!((f - 1.0).abs() < 3.0 / r);
            assert!(profile_f_prime(&p, r).unwrap().abs() < 1e-11);
        }
    }

    #[test]
    fn profile_domain_errors() {
        let tn = MetricParams::taub_nut(1.0).unwrap();
        assert!(matches!(profile_f(&tn, 1.0), Err(LabError::Domain(_))));
        assert!(matches!(profile_f(&tn, 0.5), Err(LabError::Domain(_))));
        let nn = MetricParams::negative_nut(1.0).unwrap();
        assert_eq!(profile_f(&nn, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn parameter_range_is_enforced() {
        assert!(MetricParams::scalar_flat(1.0, -2.5, 1.0).is_err());
        assert!(MetricParams::scalar_flat(1.0, 0.0, 0.1).is_err());
        assert!(MetricParams::scalar_flat(1.0, 0.0, -1.5).is_err());
        assert!(MetricParams::scalar_flat(0.0, 0.0, 0.0).is_err());
        let tn = MetricParams::new(2.0, 7.0, 7.0, Profile::TaubNut).unwrap();
        assert_eq!((tn.c1(), tn.c2()), (-4.0, 4.0));
    }

    #[test]
    fn profile_derivatives_match_finite_differences() {
        for p in [
            MetricParams::taub_nut(1.0).unwrap(),
            MetricParams::negative_nut(1.3).unwrap(),
            sf(),
            MetricParams::scalar_flat(2.0, 3.0, -1.0).unwrap(),
        ] {
            let r = 5.0 * p.n();
            let num = fd::derivative(|x| profile_f(&p, x).unwrap(), r);
            let exact = profile_f_prime(&p, r).unwrap();
            assert!(((num - exact) / exact).abs() < 1e-8, "{num} vs {exact}");
            let num2 = fd::derivative(|x| profile_f_prime(&p, x).unwrap(), r);
            let exact2 = profile_f_second(&p, r).unwrap();
            assert!(((num2 - exact2) / exact2).abs() < 1e-7);
        }
        let tn = MetricParams::taub_nut(1.0).unwrap();
        let as_sf = MetricParams::scalar_flat(1.0, -2.0, 1.0).unwrap();
        for r in [1.5, 3.0, 10.0] {
            assert_relative_eq!(
                profile_f_prime(&tn, r).unwrap(),
                profile_f_prime(&as_sf, r).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn frames_are_dual() {
        let p = sf();
        let pt = CoordPoint::new(2.0, PI / 2.0, 0.0, 0.0);
        let fr = build_frames(&p, &pt).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let v: f64 = (0..4).map(|k| fr.coframe[i][k] * fr.frame[j][k]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let f = profile_f(&p, 2.0).unwrap();
        assert_relative_eq!(fr.coframe[3][3], 2.0 / f, max_relative = 1e-15);
        assert_relative_eq!(fr.frame[3][3], f / 2.0, max_relative = 1e-15);
        assert!(matches!(
            build_frames(&p, &CoordPoint::new(2.0, 0.0, 0.0, 0.0)),
            Err(LabError::Pole(_))
        ));
    }

    #[test]
    fn connection_entries() {
        let p = sf();
        let r = 2.2;
        let pt = CoordPoint::new(r, 1.0, 0.3, 0.2);
        let w = connection_forms(&p, &pt).unwrap();
        let f = profile_f(&p, r).unwrap();
        let s = r * r - 1.0;
        assert_relative_eq!(w.get(2, 1, 2), r / (s * f), max_relative = 1e-14);
        assert_relative_eq!(w.get(3, 2, 4), 1.0 / (s * f) - f / 2.0, max_relative = 1e-14);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(w.omega[a][b][c], -w.omega[b][a][c]);
                }
            }
        }
    }

    #[test]
    fn structure_equations_hold() {
        for p in [MetricParams::taub_nut(1.0).unwrap(), sf(), MetricParams::scalar_flat(1.5, 2.0, -1.0).unwrap()] {
            for pt in [
                CoordPoint::new(2.3 * p.n(), 0.7, 0.4, 1.1),
                CoordPoint::new(4.0 * p.n(), 2.1, 3.0, 5.0),
            ] {
                assert!(first_structure_residual(&p, &pt).unwrap() < 1e-6);
                assert!(second_structure_residual(&p, &pt).unwrap() < 1e-5);
            }
        }
    }

    #[test]
    fn exact_scalar_curvature() {
        for p in [MetricParams::scalar_flat(1.0, 3.0, -2.0).unwrap(), MetricParams::scalar_flat(1.0, -1.7, 0.71).unwrap()] {
            for r in [1.001, 1.01, 3.0, 50.0] {
                assert_eq!(scalar_curvature_exact(&p, r).unwrap(), 0.0);
            }
        }
        let reference = curvature(&MetricParams::taub_nut(1.0).unwrap(), &CoordPoint::new(3.0, 1.0, 0.0, 0.0)).unwrap();
        let exact = scalar_curvature_exact(&MetricParams::taub_nut(1.0).unwrap(), 3.0).unwrap();
        assert!((exact - reference.scalar).abs() < 1e-13);
        assert!(scalar_curvature_exact(&MetricParams::taub_nut(1.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn scalar_flat_and_ricci() {
        let p = MetricParams::scalar_flat(1.0, 3.0, -2.0).unwrap();
        for r in [1.01, 1.5, 7.0, 300.0] {
            let c = curvature(&p, &CoordPoint::new(r, 1.0, 0.0, 0.0)).unwrap();
            assert!(c.scalar.abs() < 1e-10, "scalar {} at r={r}", c.scalar);
            let contracted = ricci_from_riemann(&c.riemann);
            for i in 0..4 {
                assert!((contracted[i] - c.ricci_diag[i]).abs() < 1e-10 * (1.0 + c.ricci_diag[i].abs()));
            }
        }
        let tn = MetricParams::scalar_flat(1.0, 2.5, 1.0).unwrap();
        let c = curvature(&tn, &CoordPoint::new(2.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(c.ricci_diag, [0.0; 4]);
        assert!(ricci_from_riemann(&c.riemann).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn mass_values() {
        let p = MetricParams::scalar_flat(1.0, 2.0, 1.0).unwrap();
        let e = total_mass(&p, 1e4).unwrap();
        assert!(((e + 8.0) / 8.0).abs() < 1e-3);
        let zero = MetricParams::scalar_flat(1.0, 0.0, -0.5).unwrap();
        assert!(total_mass(&zero, 1e4).unwrap().abs() < 1e-6);
        let tn = MetricParams::taub_nut(1.0).unwrap();
        assert!(((total_mass(&tn, 1e4).unwrap() - 8.0) / 8.0).abs() < 1e-3);
    }

    #[test]
    fn mass_error_decays_like_inverse_cutoff() {
        let p = MetricParams::scalar_flat(1.0, 1.0, 0.0).unwrap();
        let err = |r: f64| (total_mass(&p, r).unwrap() + 4.0).abs();
        let ratio = err(1e3) / err(1e4);
        assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn volume_density_vanishes_at_pole() {
        let p = sf();
        assert!(volume_density(&p, &CoordPoint::new(2.0, 1e-12, 0.0, 0.0)) < 1e-10);
        assert_relative_eq!(
            volume_density(&p, &CoordPoint::new(2.0, PI / 2.0, 0.0, 0.0)),
            6.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn q_factor_vanishes_for_nut_profiles() {
        for delta in [1, -1] {
            let p = MetricParams::scalar_flat(1.3, -2.0 * delta as f64 * 1.3, 1.69).unwrap();
            for r in [1.5, 3.0, 20.0] {
                assert!(q_factor(&p, delta, r).abs() < 1e-10);
            }
        }
        assert!(q_factor(&sf(), 1, 3.0).abs() > 1e-2);
    }

    #[test]
    fn complex_structures() {
        let pt = CoordPoint::new(2.3, 0.8, 0.5, 1.2);
        let tn = MetricParams::scalar_flat(1.0, -2.0, 1.0).unwrap();
        let flat = MetricParams::scalar_flat(1.0, 0.0, 0.0).unwrap();
        for j in 1..=3u8 {
            assert!(complex_structure_residual(&tn, j, 1, &pt).unwrap() < 1e-6, "J{j}");
            assert!(complex_structure_residual(&flat, j, 1, &pt).unwrap() > 1e-3, "J{j} flat");
        }
        assert!(complex_structure_residual(&tn, 4, 1, &pt).is_err());
    }
}
