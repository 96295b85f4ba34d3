//! The fixed Clifford representation on the orthonormal coframe, spinor
//! arithmetic, the spin connection, and the Dirac, twistor and parallel
//! operators.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use crate::error::{LabError, Result};
use crate::fd;
use crate::geometry::{build_frames, connection_coefficients, connection_forms, CoordPoint, MetricParams};
use crate::jet::{Jet, C64};

const Z: C64 = C64::new(0.0, 0.0);
const O: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub type Matrix4 = [[C64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Spinor(pub [C64; 4]);

impl Spinor {
    pub const ZERO: Spinor = Spinor([Z; 4]);

    pub fn new(c: [C64; 4]) -> Self {
        Spinor(c)
    }

    /// Hermitian product `Σ s̄ᵢ tᵢ`.
    pub fn inner(&self, t: &Spinor) -> C64 {
        self.0.iter().zip(t.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: impl Into<C64>) -> Spinor {
        let k = k.into();
        Spinor(self.0.map(|c| c * k))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for Spinor {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Spinor {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(mut self, o: Spinor) -> Spinor {
        self += o;
        self
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, o: Spinor) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(mut self, o: Spinor) -> Spinor {
        self -= o;
        self
    }
}

impl SubAssign for Spinor {
    fn sub_assign(&mut self, o: Spinor) {
        for i in 0..4 {
            self.0[i] -= o.0[i];
        }
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor(self.0.map(|c| -c))
    }
}

impl Mul<Spinor> for f64 {
    type Output = Spinor;
    fn mul(self, s: Spinor) -> Spinor {
        s.scale(self)
    }
}

impl Mul<Spinor> for C64 {
    type Output = Spinor;
    fn mul(self, s: Spinor) -> Spinor {
        s.scale(self)
    }
}

/// `γ¹..γ⁴`, the Clifford images of the coframe `e¹..e⁴`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub mats: [Matrix4; 4],
}

fn mat_mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[Z; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl GammaSet {
    fn build() -> Self {
        let mats = [
            [[Z, Z, O, Z], [Z, Z, Z, O], [-O, Z, Z, Z], [Z, -O, Z, Z]],
            [[Z, Z, Z, I], [Z, Z, I, Z], [Z, I, Z, Z], [I, Z, Z, Z]],
            [[Z, Z, Z, -O], [Z, Z, O, Z], [Z, -O, Z, Z], [O, Z, Z, Z]],
            [[Z, Z, I, Z], [Z, Z, Z, -I], [I, Z, Z, Z], [Z, -I, Z, Z]],
        ];
        let set = GammaSet { mats };
        assert_eq!(set.clifford_defect(), 0.0, "gamma matrices violate the Clifford relation");
        set
    }

    /// The shared, verified representation.
    pub fn standard() -> &'static GammaSet {
        static SET: OnceLock<GammaSet> = OnceLock::new();
        SET.get_or_init(GammaSet::build)
    }

    /// `max |γⁱγʲ + γʲγⁱ + 2δⁱʲ I|` over all entries.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let a = mat_mul(&self.mats[i], &self.mats[j]);
                let b = mat_mul(&self.mats[j], &self.mats[i]);
                for r in 0..4 {
                    for c in 0..4 {
                        let diag = if i == j && r == c { 2.0 } else { 0.0 };
                        worst = worst.max((a[r][c] + b[r][c] + diag).norm());
                    }
                }
            }
        }
        worst
    }

    /// `γ^(i+1) s` for a zero-based index.
    #[inline]
    pub fn apply(&self, i: usize, s: &Spinor) -> Spinor {
        let m = &self.mats[i];
        let mut out = [Z; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = m[r][0] * s.0[0] + m[r][1] * s.0[1] + m[r][2] * s.0[2] + m[r][3] * s.0[3];
        }
        Spinor(out)
    }

    /// `γ^(i+1) γ^(j+1) s`.
    #[inline]
    pub fn apply2(&self, i: usize, j: usize, s: &Spinor) -> Spinor {
        self.apply(i, &self.apply(j, s))
    }
}

/// `γⁱ` for `i` in `1..=4`.
pub fn gamma(i: usize) -> Result<Matrix4> {
    if !(1..=4).contains(&i) {
        return Err(LabError::Index(i));
    }
    Ok(GammaSet::standard().mats[i - 1])
}

/// Product of a sequence of gamma matrices, one-based indices.
pub fn gamma_product(indices: &[usize]) -> Result<Matrix4> {
    let mut acc = [[Z; 4]; 4];
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = O;
    }
    for &i in indices {
        acc = mat_mul(&acc, &gamma(i)?);
    }
    Ok(acc)
}

/// `Σᵢ cᵢ γⁱ s` for a covector given on the orthonormal coframe.
pub fn clifford_mul(covector: &[f64; 4], s: &Spinor) -> Spinor {
    let g = GammaSet::standard();
    let mut out = Spinor::ZERO;
    for (i, &c) in covector.iter().enumerate() {
        if c != 0.0 {
            out += g.apply(i, s).scale(c);
        }
    }
    out
}

/// A spinor-valued function on the chart. Implementors supplying
/// [`SpinorField::partials`] get exact derivatives; otherwise the operators
/// fall back to finite differences of [`SpinorField::evaluate`].
pub trait SpinorField: Sync {
    fn evaluate(&self, point: &CoordPoint) -> Result<Spinor>;

    /// Coordinate partials `∂_μ Ψ`, μ over `(r, θ, φ, ψ)`.
    fn partials(&self, _point: &CoordPoint) -> Option<Result<[Spinor; 4]>> {
        None
    }
}

impl<T: SpinorField + ?Sized> SpinorField for &T {
    fn evaluate(&self, point: &CoordPoint) -> Result<Spinor> {
        (**self).evaluate(point)
    }
    fn partials(&self, point: &CoordPoint) -> Option<Result<[Spinor; 4]>> {
        (**self).partials(point)
    }
}

impl<T: SpinorField + ?Sized + Send> SpinorField for Box<T> {
    fn evaluate(&self, point: &CoordPoint) -> Result<Spinor> {
        (**self).evaluate(point)
    }
    fn partials(&self, point: &CoordPoint) -> Option<Result<[Spinor; 4]>> {
        (**self).partials(point)
    }
}

/// Field defined by a jet-valued closure: analytic partials come for free.
pub struct JetField<F> {
    f: F,
}

impl<F> JetField<F>
where
    F: Fn(&[Jet; 4]) -> Result<[Jet; 4]> + Sync,
{
    pub fn new(f: F) -> Self {
        JetField { f }
    }

    fn jets(&self, point: &CoordPoint) -> Result<[Jet; 4]> {
        (self.f)(&point.jets())
    }

    /// Components as jets over caller-supplied coordinate jets.
    pub fn eval_jets(&self, x: &[Jet; 4]) -> Result<[Jet; 4]> {
        (self.f)(x)
    }
}

pub(crate) fn spinor_from_jets(j: &[Jet; 4]) -> (Spinor, [Spinor; 4]) {
    let value = Spinor(j.map(|c| c.v));
    let mut d = [Spinor::ZERO; 4];
    for (mu, dm) in d.iter_mut().enumerate() {
        *dm = Spinor([j[0].d[mu], j[1].d[mu], j[2].d[mu], j[3].d[mu]]);
    }
    (value, d)
}

impl<F> SpinorField for JetField<F>
where
    F: Fn(&[Jet; 4]) -> Result<[Jet; 4]> + Sync,
{
    fn evaluate(&self, point: &CoordPoint) -> Result<Spinor> {
        Ok(spinor_from_jets(&self.jets(point)?).0)
    }
    fn partials(&self, point: &CoordPoint) -> Option<Result<[Spinor; 4]>> {
        Some(self.jets(point).map(|j| spinor_from_jets(&j).1))
    }
}

/// Field from a plain closure; derivatives by finite differences.
pub struct FnField<F> {
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&CoordPoint) -> Result<Spinor> + Sync,
{
    pub fn new(f: F) -> Self {
        FnField { f }
    }
}

impl<F> SpinorField for FnField<F>
where
    F: Fn(&CoordPoint) -> Result<Spinor> + Sync,
{
    fn evaluate(&self, point: &CoordPoint) -> Result<Spinor> {
        (self.f)(point)
    }
}

/// Hides any analytic partials so that finite differences are used.
pub struct FdOnly<T>(pub T);

impl<T: SpinorField> SpinorField for FdOnly<T> {
    fn evaluate(&self, point: &CoordPoint) -> Result<Spinor> {
        self.0.evaluate(point)
    }
}

/// Finite-difference coordinate partials of any field.
pub fn fd_partials(field: &dyn SpinorField, point: &CoordPoint) -> Result<[Spinor; 4]> {
    let x = point.to_array();
    let mut out = [Spinor::ZERO; 4];
    for (mu, o) in out.iter_mut().enumerate() {
        let d = fd::partial_complex(
            |y| match field.evaluate(&CoordPoint::from_array(*y)) {
                Ok(s) => s.0,
                Err(_) => [C64::new(f64::NAN, 0.0); 4],
            },
            &x,
            mu,
        )?;
        *o = Spinor(d);
    }
    if out.iter().any(|s| !s.is_finite()) {
        return Err(LabError::Domain(format!(
            "field not evaluable around r = {}, theta = {}",
            point.r, point.theta
        )));
    }
    Ok(out)
}

/// Value and coordinate partials, analytic when available.
pub fn value_and_partials(field: &dyn SpinorField, point: &CoordPoint) -> Result<(Spinor, [Spinor; 4])> {
    let value = field.evaluate(point)?;
    let partials = match field.partials(point) {
        Some(p) => p?,
        None => fd_partials(field, point)?,
    };
    Ok((value, partials))
}

/// Frame derivatives `e_k(Ψ)` from coordinate partials.
pub fn frame_derivatives(frame: &[[f64; 4]; 4], partials: &[Spinor; 4]) -> [Spinor; 4] {
    let mut out = [Spinor::ZERO; 4];
    for k in 0..4 {
        for mu in 0..4 {
            if frame[k][mu] != 0.0 {
                out[k] += partials[mu].scale(frame[k][mu]);
            }
        }
    }
    out
}

/// Spin connection for all four frame directions, given the value and
/// coordinate partials of a spinor at a point.
pub fn spin_nabla(
    params: &MetricParams,
    point: &CoordPoint,
    value: &Spinor,
    partials: &[Spinor; 4],
) -> Result<[Spinor; 4]> {
    let frames = build_frames(params, point)?;
    let k = connection_coefficients(params, point.r)?;
    let g = GammaSet::standard();
    let ed = frame_derivatives(&frames.frame, partials);
    let a = 1.0 / (2.0 * params.s(point.r) * k.f);
    let (r, n) = (point.r, params.n());
    let u = value;
    let t2 = g.apply2(0, 1, u).scale(r * a) - g.apply2(2, 3, u).scale(n * a);
    let t3 = g.apply2(0, 2, u).scale(r * a) + g.apply2(1, 3, u).scale(n * a);
    let t4 = g.apply2(0, 3, u).scale(-0.5 * k.fprime_over_f2)
        + g.apply2(1, 2, u).scale(0.5 * k.nut - 0.5 * k.f_over_2n);
    Ok([ed[0], ed[1] + t2, ed[2] + t3, ed[3] + t4])
}

/// `∇_k Ψ = e_k(Ψ) + ¼ Σ ω^j_i(e_k) γⁱγʲ Ψ` assembled from the connection
/// forms instead of the specialised coefficients.
pub fn spin_nabla_general(
    params: &MetricParams,
    point: &CoordPoint,
    value: &Spinor,
    partials: &[Spinor; 4],
) -> Result<[Spinor; 4]> {
    let frames = build_frames(params, point)?;
    let w = connection_forms(params, point)?;
    let g = GammaSet::standard();
    let mut out = frame_derivatives(&frames.frame, partials);
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let c = w.omega[j][i][k];
                if c != 0.0 {
                    *o += g.apply2(i, j, value).scale(0.25 * c);
                }
            }
        }
    }
    Ok(out)
}

pub fn dirac_from_nabla(nabla: &[Spinor; 4]) -> Spinor {
    let g = GammaSet::standard();
    let mut out = Spinor::ZERO;
    for (k, n) in nabla.iter().enumerate() {
        out += g.apply(k, n);
    }
    out
}

fn nabla_all(field: &dyn SpinorField, point: &CoordPoint, params: &MetricParams) -> Result<[Spinor; 4]> {
    let (v, p) = value_and_partials(field, point)?;
    spin_nabla(params, point, &v, &p)
}

/// `∇_{e_k} Ψ` for `k` in `1..=4`.
pub fn spin_covariant_derivative(
    field: &dyn SpinorField,
    k: usize,
    point: &CoordPoint,
    params: &MetricParams,
) -> Result<Spinor> {
    if !(1..=4).contains(&k) {
        return Err(LabError::Index(k));
    }
    Ok(nabla_all(field, point, params)?[k - 1])
}

/// `DΨ = Σ_k γᵏ ∇_{e_k} Ψ`.
pub fn dirac_apply(field: &dyn SpinorField, point: &CoordPoint, params: &MetricParams) -> Result<Spinor> {
    Ok(dirac_from_nabla(&nabla_all(field, point, params)?))
}

/// `max_k |∇_{e_k} u + ¼ eᵏ·Du|`.
pub fn twistor_residual(field: &dyn SpinorField, point: &CoordPoint, params: &MetricParams) -> Result<f64> {
    let nabla = nabla_all(field, point, params)?;
    let du = dirac_from_nabla(&nabla);
    let g = GammaSet::standard();
    Ok((0..4)
        .map(|k| (nabla[k] + g.apply(k, &du).scale(0.25)).norm())
        .fold(0.0, f64::max))
}

/// `max_k |∇_{e_k} u|`.
pub fn parallel_residual(field: &dyn SpinorField, point: &CoordPoint, params: &MetricParams) -> Result<f64> {
    Ok(nabla_all(field, point, params)?.iter().map(Spinor::norm).fold(0.0, f64::max))
}

/// `h_s(r)` for `s` in `{1, 2}`.
pub fn h_coefficient(params: &MetricParams, s: u8, r: f64) -> Result<f64> {
    let k = connection_coefficients(params, r)?;
    let sign = if s == 1 { -1.0 } else { 1.0 };
    let n = params.n();
    Ok(sign * (0.5 * k.nut - 0.5 * k.f_over_2n) + 1.0 / ((r + sign * n) * k.f) - 0.5 * k.fprime_over_f2)
}

/// The Dirac operator written as the 4×4 first-order system in `𝓛±`, `𝓓_{s±}`.
pub fn dirac_matrix_form(field: &dyn SpinorField, point: &CoordPoint, params: &MetricParams) -> Result<Spinor> {
    point.check_interior()?;
    let (v, p) = value_and_partials(field, point)?;
    let r = point.r;
    let k = connection_coefficients(params, r)?;
    let sq = params.s(r).sqrt();
    let (st, ct) = point.theta.sin_cos();
    let h1 = h_coefficient(params, 1, r)?;
    let h2 = h_coefficient(params, 2, r)?;
    let n = params.n();
    let l_op = |sign: f64, c: usize| p[1][c] * sign - I * p[2][c] / st + I * ct / st * p[3][c];
    let d_op = |h: f64, sign: f64, c: usize| {
        (p[0][c] / k.f + I * (sign * k.f / (2.0 * n)) * p[3][c] + v[c] * h) * sq
    };
    let eip = C64::from_polar(1.0, point.psi);
    let emp = eip.conj();
    let out = [
        d_op(h1, 1.0, 2) + eip * l_op(1.0, 3),
        emp * l_op(-1.0, 2) + d_op(h1, -1.0, 3),
        -d_op(h2, -1.0, 0) + eip * l_op(1.0, 1),
        emp * l_op(-1.0, 0) - d_op(h2, 1.0, 1),
    ];
    Ok(Spinor(out.map(|c| c / sq)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Profile;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tn() -> MetricParams {
        MetricParams::taub_nut(1.0).unwrap()
    }

    fn sample_field() -> JetField<impl Fn(&[Jet; 4]) -> Result<[Jet; 4]> + Sync> {
        JetField::new(|x: &[Jet; 4]| {
            let [r, th, ph, ps] = *x;
            Ok([
                r * th.sin() * (ph * c(0.0, 1.0)).exp(),
                (r * r).recip() + ps.cos(),
                th.cos() * (ps * c(0.0, 0.5)).exp() * 2.0,
                r.sqrt() * ph.sin() + c(0.3, -0.2),
            ])
        })
    }

    #[test]
    fn gamma_entries_and_squares() {
        let g1 = gamma(1).unwrap();
        assert_eq!(g1[0], [Z, Z, O, Z]);
        assert!(matches!(gamma(0), Err(LabError::Index(0))));
        assert!(matches!(gamma(5), Err(LabError::Index(5))));
        for i in 1..=4 {
            let sq = gamma_product(&[i, i]).unwrap();
            for r in 0..4 {
                for col in 0..4 {
                    let e = if r == col { -O } else { Z };
                    assert_eq!(sq[r][col], e);
                }
            }
        }
        assert_eq!(GammaSet::standard().clifford_defect(), 0.0);
    }

    #[test]
    fn volume_element_is_diagonal() {
        let v = gamma_product(&[1, 2, 3, 4]).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                if r != col {
                    assert_eq!(v[r][col], Z);
                }
            }
        }
        let diag: Vec<C64> = (0..4).map(|i| v[i][i]).collect();
        assert_eq!(diag, vec![-O, -O, O, O]);
    }

    #[test]
    fn gammas_are_anti_hermitian() {
        for i in 1..=4 {
            let g = gamma(i).unwrap();
            for r in 0..4 {
                for col in 0..4 {
                    assert_eq!(g[r][col], -g[col][r].conj());
                }
            }
        }
    }

    #[test]
    fn constant_spinor_first_derivative_vanishes() {
        let f = JetField::new(|_: &[Jet; 4]| Ok([Jet::constant(c(1.0, 2.0)), Jet::constant(0.5), Jet::constant(0.0), Jet::constant(c(0.0, -1.0))]));
        let p = CoordPoint::new(2.0, 1.0, 0.3, 0.4);
        let d = spin_covariant_derivative(&f, 1, &p, &tn()).unwrap();
        assert_eq!(d, Spinor::ZERO);
        assert!(spin_covariant_derivative(&f, 5, &p, &tn()).is_err());
    }

    #[test]
    fn specialised_connection_matches_general() {
        for params in [tn(), MetricParams::scalar_flat(1.3, 0.7, -0.4).unwrap()] {
            let f = sample_field();
            let p = CoordPoint::new(2.2 * params.n(), 0.9, 0.3, 2.0);
            let (v, d) = value_and_partials(&f, &p).unwrap();
            let a = spin_nabla(&params, &p, &v, &d).unwrap();
            let b = spin_nabla_general(&params, &p, &v, &d).unwrap();
            for k in 0..4 {
                assert!((a[k] - b[k]).norm() < 1e-13 * (1.0 + a[k].norm()));
            }
        }
    }

    #[test]
    fn analytic_partials_match_finite_differences() {
        let f = sample_field();
        let p = CoordPoint::new(2.5, 1.1, 0.7, 0.2);
        let a = f.partials(&p).unwrap().unwrap();
        let b = fd_partials(&f, &p).unwrap();
        for mu in 0..4 {
            assert!((a[mu] - b[mu]).norm() < 1e-6);
        }
    }

    #[test]
    fn matrix_form_equals_operator() {
        for params in [tn(), MetricParams::negative_nut(1.0).unwrap(), MetricParams::scalar_flat(1.0, 0.5, -0.3).unwrap()] {
            let f = sample_field();
            for p in [CoordPoint::new(2.0, 0.8, 0.1, 0.6), CoordPoint::new(5.0, 2.2, 4.0, 9.0)] {
                let a = dirac_apply(&f, &p, &params).unwrap();
                let b = dirac_matrix_form(&f, &p, &params).unwrap();
                assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "{:?}", params.profile());
            }
        }
    }

    #[test]
    fn non_solution_is_not_twistor() {
        let u = JetField::new(|x: &[Jet; 4]| Ok([x[0], Jet::constant(0.0), Jet::constant(0.0), Jet::constant(0.0)]));
        let p = CoordPoint::new(2.0, 1.0, 0.5, 0.5);
        assert!(twistor_residual(&u, &p, &tn()).unwrap() > 1e-2);
        assert_eq!(tn().profile(), Profile::TaubNut);
    }

    #[test]
    fn leibniz_and_metricity() {
        let params = MetricParams::scalar_flat(1.0, 0.5, -0.3).unwrap();
        let p = CoordPoint::new(2.4, 1.2, 0.4, 0.9);
        let psi = sample_field();
        let phi = JetField::new(|x: &[Jet; 4]| {
            let [r, th, _, ps] = *x;
            Ok([th.sin() * r, (ps * c(0.0, -1.5)).exp(), r.recip(), th.cos() * c(0.0, 2.0)])
        });
        let np = nabla_all(&psi, &p, &params).unwrap();
        let nq = nabla_all(&phi, &p, &params).unwrap();
        let inner = FnInner { a: &psi, b: &phi };
        let frames = build_frames(&params, &p).unwrap();
        let x = p.to_array();
        let mut dinner = [Z; 4];
        for mu in 0..4 {
            dinner[mu] = fd::partial_complex(|y| [inner.at(&CoordPoint::from_array(*y))], &x, mu).unwrap()[0];
        }
        let vp = psi.evaluate(&p).unwrap();
        let vq = phi.evaluate(&p).unwrap();
        for k in 0..4 {
            let lhs: C64 = (0..4).map(|mu| dinner[mu] * frames.frame[k][mu]).sum();
            let rhs = np[k].inner(&vq) + vp.inner(&nq[k]);
            assert!((lhs - rhs).norm() < 1e-5);
        }

        // ∇(α·Ψ) − (∇α)·Ψ − α·∇Ψ for the coframe 1-form α = e¹
        let g = GammaSet::standard();
        let alpha_psi = JetField::new(|x: &[Jet; 4]| {
            let v = (sample_field().f)(x)?;
            Ok([v[2], v[3], -v[0], -v[1]])
        });
        let lhs = nabla_all(&alpha_psi, &p, &params).unwrap();
        let w = connection_forms(&params, &p).unwrap();
        for k in 0..4 {
            let mut nabla_alpha = Spinor::ZERO;
            for b in 0..4 {
                nabla_alpha += g.apply(b, &vp).scale(-w.omega[0][b][k]);
            }
            let expect = nabla_alpha + g.apply(0, &np[k]);
            assert!((lhs[k] - expect).norm() < 1e-5);
        }
    }

    struct FnInner<'a, A, B> {
        a: &'a A,
        b: &'a B,
    }

    impl<A: SpinorField, B: SpinorField> FnInner<'_, A, B> {
        fn at(&self, p: &CoordPoint) -> C64 {
            self.a.evaluate(p).unwrap().inner(&self.b.evaluate(p).unwrap())
        }
    }

    fn spinor_strategy() -> impl Strategy<Value = Spinor> {
        prop::array::uniform8(-2.0f64..2.0).prop_map(|v| Spinor([c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7])]))
    }

    proptest! {
        #[test]
        fn clifford_relation_on_covectors(a in prop::array::uniform4(-2.0f64..2.0), b in prop::array::uniform4(-2.0f64..2.0), s in spinor_strategy()) {
            let lhs = clifford_mul(&a, &clifford_mul(&b, &s)) + clifford_mul(&b, &clifford_mul(&a, &s));
            let gab: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
            prop_assert!((lhs + s.scale(2.0 * gab)).norm() < 1e-12);
        }

        #[test]
        fn clifford_action_is_skew(a in prop::array::uniform4(-2.0f64..2.0), s in spinor_strategy(), t in spinor_strategy()) {
            let lhs = clifford_mul(&a, &s).inner(&t);
            let rhs = s.inner(&clifford_mul(&a, &t));
            prop_assert!((lhs + rhs).norm() < 1e-12);
        }

        #[test]
        fn unit_covector_squares_to_minus_one(s in spinor_strategy()) {
            let e1 = [1.0, 0.0, 0.0, 0.0];
            prop_assert!((clifford_mul(&e1, &clifford_mul(&e1, &s)) + s).norm() == 0.0);
        }
    }
}
