//! Spinor-valued 1-forms `Ψᵢ ⊗ eⁱ`, the projection onto the trace-free
//! subbundle, the twisted Dirac operator and the Rarita-Schwinger operator.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Sub};

use crate::clifford::{dirac_from_nabla, frame_derivatives, spin_nabla, spinor_from_jets, GammaSet, Spinor};
use crate::error::{LabError, Result};
use crate::fd;
use crate::geometry::{build_frames, connection_coefficients, connection_forms, CoordPoint, MetricParams};
use crate::jet::{Jet, C64};

/// Tolerance on `|Σ eⁱ·Ψᵢ|`, relative to `max(1, |x|)`, accepted as trace-free.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Components `Ψ₁..Ψ₄` against the orthonormal coframe.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpinorOneForm {
    pub psi: [Spinor; 4],
}

impl SpinorOneForm {
    pub const ZERO: SpinorOneForm = SpinorOneForm { psi: [Spinor::ZERO; 4] };

    pub fn new(psi: [Spinor; 4]) -> Self {
        SpinorOneForm { psi }
    }

    /// `Σᵢ ⟨Ψᵢ, Φᵢ⟩`.
    pub fn inner(&self, o: &SpinorOneForm) -> C64 {
        (0..4).map(|i| self.psi[i].inner(&o.psi[i])).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(Spinor::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: impl Into<C64>) -> SpinorOneForm {
        let k = k.into();
        SpinorOneForm { psi: self.psi.map(|s| s.scale(k)) }
    }

    /// Clifford action of a covector on every component.
    pub fn clifford_left(&self, covector: &[f64; 4]) -> SpinorOneForm {
        SpinorOneForm { psi: self.psi.map(|s| crate::clifford::clifford_mul(covector, &s)) }
    }
}

impl Add for SpinorOneForm {
    type Output = SpinorOneForm;
    fn add(mut self, o: SpinorOneForm) -> SpinorOneForm {
        for i in 0..4 {
            self.psi[i] += o.psi[i];
        }
        self
    }
}

impl Sub for SpinorOneForm {
    type Output = SpinorOneForm;
    fn sub(mut self, o: SpinorOneForm) -> SpinorOneForm {
        for i in 0..4 {
            self.psi[i] -= o.psi[i];
        }
        self
    }
}

/// Spinor-valued 1-form field on the chart; `partials()[i][μ] = ∂_μ Ψᵢ`.
pub trait SpinorOneFormField: Sync {
    fn evaluate(&self, point: &CoordPoint) -> Result<SpinorOneForm>;

    fn partials(&self, _point: &CoordPoint) -> Option<Result<[[Spinor; 4]; 4]>> {
        None
    }
}

impl<T: SpinorOneFormField + ?Sized> SpinorOneFormField for &T {
    fn evaluate(&self, point: &CoordPoint) -> Result<SpinorOneForm> {
        (**self).evaluate(point)
    }
    fn partials(&self, point: &CoordPoint) -> Option<Result<[[Spinor; 4]; 4]>> {
        (**self).partials(point)
    }
}

impl<T: SpinorOneFormField + ?Sized + Send> SpinorOneFormField for Box<T> {
    fn evaluate(&self, point: &CoordPoint) -> Result<SpinorOneForm> {
        (**self).evaluate(point)
    }
    fn partials(&self, point: &CoordPoint) -> Option<Result<[[Spinor; 4]; 4]>> {
        (**self).partials(point)
    }
}

pub struct JetOneFormField<F> {
    f: F,
}

impl<F> JetOneFormField<F>
where
    F: Fn(&[Jet; 4]) -> Result<[[Jet; 4]; 4]> + Sync,
{
    pub fn new(f: F) -> Self {
        JetOneFormField { f }
    }

    pub fn eval_jets(&self, x: &[Jet; 4]) -> Result<[[Jet; 4]; 4]> {
        (self.f)(x)
    }
}

impl<F> SpinorOneFormField for JetOneFormField<F>
where
    F: Fn(&[Jet; 4]) -> Result<[[Jet; 4]; 4]> + Sync,
{
    fn evaluate(&self, point: &CoordPoint) -> Result<SpinorOneForm> {
        let j = (self.f)(&point.jets())?;
        Ok(SpinorOneForm { psi: j.map(|c| spinor_from_jets(&c).0) })
    }
    fn partials(&self, point: &CoordPoint) -> Option<Result<[[Spinor; 4]; 4]>> {
        Some((self.f)(&point.jets()).map(|j| j.map(|c| spinor_from_jets(&c).1)))
    }
}

pub struct FnOneFormField<F> {
    f: F,
}

impl<F> FnOneFormField<F>
where
    F: Fn(&CoordPoint) -> Result<SpinorOneForm> + Sync,
{
    pub fn new(f: F) -> Self {
        FnOneFormField { f }
    }
}

impl<F> SpinorOneFormField for FnOneFormField<F>
where
    F: Fn(&CoordPoint) -> Result<SpinorOneForm> + Sync,
{
    fn evaluate(&self, point: &CoordPoint) -> Result<SpinorOneForm> {
        (self.f)(point)
    }
}

/// Hides analytic partials so that finite differences are used.
pub struct FdOnlyOneForm<T>(pub T);

impl<T: SpinorOneFormField> SpinorOneFormField for FdOnlyOneForm<T> {
    fn evaluate(&self, point: &CoordPoint) -> Result<SpinorOneForm> {
        self.0.evaluate(point)
    }
}

fn flatten(x: &SpinorOneForm) -> [C64; 16] {
    let mut out = [C64::new(0.0, 0.0); 16];
    for i in 0..4 {
        out[4 * i..4 * i + 4].copy_from_slice(&x.psi[i].0);
    }
    out
}

pub fn fd_one_form_partials(field: &dyn SpinorOneFormField, point: &CoordPoint) -> Result<[[Spinor; 4]; 4]> {
    let x = point.to_array();
    let mut out = [[Spinor::ZERO; 4]; 4];
    for mu in 0..4 {
        let d = fd::partial_complex(
            |y| match field.evaluate(&CoordPoint::from_array(*y)) {
                Ok(v) => flatten(&v),
                Err(_) => [C64::new(f64::NAN, 0.0); 16],
            },
            &x,
            mu,
        )?;
        for i in 0..4 {
            let s = Spinor([d[4 * i], d[4 * i + 1], d[4 * i + 2], d[4 * i + 3]]);
            if !s.is_finite() {
                return Err(LabError::Domain(format!("field not evaluable around r = {}", point.r)));
            }
            out[i][mu] = s;
        }
    }
    Ok(out)
}

fn value_and_partials(field: &dyn SpinorOneFormField, point: &CoordPoint) -> Result<(SpinorOneForm, [[Spinor; 4]; 4])> {
    let v = field.evaluate(point)?;
    let p = match field.partials(point) {
        Some(p) => p?,
        None => fd_one_form_partials(field, point)?,
    };
    Ok((v, p))
}

/// `Σᵢ eⁱ·Ψᵢ`.
pub fn clifford_trace(x: &SpinorOneForm) -> Spinor {
    let g = GammaSet::standard();
    let mut t = Spinor::ZERO;
    for i in 0..4 {
        t += g.apply(i, &x.psi[i]);
    }
    t
}

/// `Ψᵢ + ¼ eᵢ·(eʲ·Ψⱼ)`.
pub fn project_pi(x: &SpinorOneForm) -> SpinorOneForm {
    let g = GammaSet::standard();
    let t = clifford_trace(x);
    let mut out = *x;
    for i in 0..4 {
        out.psi[i] += g.apply(i, &t).scale(0.25);
    }
    out
}

/// `−¼ eᵢ·(eʲ·Ψⱼ) ⊗ eⁱ`, the complement of [`project_pi`].
pub fn pure_trace_part(x: &SpinorOneForm) -> SpinorOneForm {
    let g = GammaSet::standard();
    let t = clifford_trace(x);
    SpinorOneForm { psi: [0, 1, 2, 3].map(|i| g.apply(i, &t).scale(-0.25)) }
}

/// The 1-form `Ψᵢ = −¼ eᵢ·Φ`, whose trace is `Φ`.
pub fn pure_trace(phi: &Spinor) -> SpinorOneForm {
    let g = GammaSet::standard();
    SpinorOneForm { psi: [0, 1, 2, 3].map(|i| g.apply(i, phi).scale(-0.25)) }
}

struct ComponentData {
    value: SpinorOneForm,
    nabla: [[Spinor; 4]; 4],
    frame_d: [[Spinor; 4]; 4],
}

fn component_data(field: &dyn SpinorOneFormField, point: &CoordPoint, params: &MetricParams) -> Result<ComponentData> {
    let (value, partials) = value_and_partials(field, point)?;
    let frames = build_frames(params, point)?;
    let mut nabla = [[Spinor::ZERO; 4]; 4];
    let mut frame_d = [[Spinor::ZERO; 4]; 4];
    for i in 0..4 {
        nabla[i] = spin_nabla(params, point, &value.psi[i], &partials[i])?;
        frame_d[i] = frame_derivatives(&frames.frame, &partials[i]);
    }
    Ok(ComponentData { value, nabla, frame_d })
}

/// `(D_TM x)_b = DΨ_b − Σ_{i,j} ω^i_b(e_j) eʲ·Ψᵢ`.
pub fn twisted_dirac(field: &dyn SpinorOneFormField, point: &CoordPoint, params: &MetricParams) -> Result<SpinorOneForm> {
    let data = component_data(field, point, params)?;
    let w = connection_forms(params, point)?;
    let g = GammaSet::standard();
    let mut out = SpinorOneForm::ZERO;
    for b in 0..4 {
        let mut v = dirac_from_nabla(&data.nabla[b]);
        for i in 0..4 {
            for j in 0..4 {
                let c = w.omega[i][b][j];
                if c != 0.0 {
                    v -= g.apply(j, &data.value.psi[i]).scale(c);
                }
            }
        }
        out.psi[b] = v;
    }
    Ok(out)
}

fn check_trace(x: &SpinorOneForm) -> Result<()> {
    let t = clifford_trace(x).norm();
    if !(t <= TRACE_TOLERANCE * x.norm().max(1.0)) {
        return Err(LabError::TraceViolation(t));
    }
    Ok(())
}

/// `Q = Π ∘ D_TM` on a trace-free field.
pub fn rs_apply(field: &dyn SpinorOneFormField, point: &CoordPoint, params: &MetricParams) -> Result<SpinorOneForm> {
    check_trace(&field.evaluate(point)?)?;
    Ok(project_pi(&twisted_dirac(field, point, params)?))
}

/// The four component equations of `Q` written out with the auxiliary spinor
/// `Ψ̃`. Agrees with [`rs_apply`] on fields with `Ψ₄ = e⁴·e¹·Ψ₁` and
/// `Ψ₃ = e³·e²·Ψ₂`; not valid on general trace-free fields.
pub fn rs_apply_expanded(field: &dyn SpinorOneFormField, point: &CoordPoint, params: &MetricParams) -> Result<SpinorOneForm> {
    let data = component_data(field, point, params)?;
    let k = connection_coefficients(params, point.r)?;
    let g = GammaSet::standard();
    let (r, n) = (point.r, params.n());
    let v = &data.value.psi;
    let d: [Spinor; 4] = [0, 1, 2, 3].map(|i| dirac_from_nabla(&data.nabla[i]));
    let fp_f2 = k.fprime_over_f2;
    let mut tilde = Spinor::ZERO;
    for i in 0..4 {
        tilde -= data.frame_d[i][i];
    }
    tilde -= v[0].scale(2.0 * k.radial - fp_f2);
    tilde += g.apply2(0, 3, &v[3]).scale(0.5 * fp_f2) - g.apply2(1, 2, &v[3]).scale(0.5 * k.nut - 0.5 * k.f_over_2n);
    let a = 1.0 / (params.s(r) * k.f);
    let half = |i: usize| g.apply(i, &tilde).scale(0.5);
    let out = [
        d[0] + g.apply(3, &v[3]).scale(fp_f2) + half(0),
        d[1] + (g.apply(1, &v[0]).scale(r) - g.apply(3, &v[2]).scale(n) - g.apply(2, &v[3]).scale(n)).scale(a)
            + g.apply(3, &v[2]).scale(k.f_over_2n)
            + half(1),
        d[2] + (g.apply(2, &v[0]).scale(r) + g.apply(3, &v[1]).scale(n) + g.apply(1, &v[3]).scale(n)).scale(a)
            - g.apply(3, &v[1]).scale(k.f_over_2n)
            + half(2),
        d[3] - g.apply(3, &v[0]).scale(fp_f2) + half(3),
    ];
    Ok(SpinorOneForm::new(out))
}

/// `Σᵢ (∇_{eᵢ}Ψᵢ − Σⱼ Ψⱼ ωʲ_i(eᵢ))`.
pub fn divergence(field: &dyn SpinorOneFormField, point: &CoordPoint, params: &MetricParams) -> Result<Spinor> {
    let data = component_data(field, point, params)?;
    let w = connection_forms(params, point)?;
    let mut out = Spinor::ZERO;
    for i in 0..4 {
        out += data.nabla[i][i];
        for j in 0..4 {
            let c = w.omega[j][i][i];
            if c != 0.0 {
                out -= data.value.psi[j].scale(c);
            }
        }
    }
    Ok(out)
}

/// Residual of the constraint `λΨ₁ = 0` carried by the separated system.
pub fn eq_phi1_residual(lambda: C64, psi1: &Spinor) -> Spinor {
    psi1.scale(lambda)
}
