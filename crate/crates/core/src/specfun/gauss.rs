//! Gauss hypergeometric function `₂F₁(a, b; c; z)` for real `z < 1`.

use super::gamma::{digamma, gamma, rgamma};
use super::{near_nonpositive_integer, CompensatedSum};
use crate::error::{LabError, Result};
use crate::jet::C64;

const CAP: usize = 200_000;
/// Distance of `c − a − b` from an integer below which the limiting formula is used.
const INTEGER_TOL: f64 = 1e-10;
/// Below this distance the connection formula loses digits; the direct series is used.
const NEAR_INTEGER_TOL: f64 = 1e-3;

fn series(a: C64, b: C64, c: C64, z: f64) -> Result<C64> {
    let mut sum = CompensatedSum::default();
    let mut term = C64::new(1.0, 0.0);
    sum.add(term);
    let mut quiet = 0;
    for n in 0..CAP {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        if term == C64::new(0.0, 0.0) {
            return Ok(sum.value());
        }
        sum.add(term);
        let s = sum.value();
        if term.norm() <= 1e-17 * s.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(s);
            }
        } else {
            quiet = 0;
        }
    }
    Err(LabError::SeriesNonConvergence { what: format!("2F1({a}, {b}; {c}; {z})"), iterations: CAP })
}

/// `c − a − b = m` with `m` a nonnegative integer, `w = 1 − z` small.
fn integer_gap(a: C64, b: C64, m: u32, w: f64) -> Result<C64> {
    let mf = m as f64;
    let abm = a + b + mf;
    let mut finite = C64::new(0.0, 0.0);
    if m > 0 {
        let mut t = C64::new(1.0, 0.0);
        for n in 0..m {
            let nf = n as f64;
            finite += t;
            t *= (a + nf) * (b + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * w;
        }
        let g_m = gamma(C64::new(mf, 0.0));
        finite *= g_m * gamma(abm) * rgamma(a + mf) * rgamma(b + mf);
    }
    let pref = gamma(abm) * rgamma(a) * rgamma(b);
    if pref == C64::new(0.0, 0.0) {
        return Ok(finite);
    }
    let ln_w = w.ln();
    let mut sum = CompensatedSum::default();
    // (a+m)_n (b+m)_n / (n! (n+m)!) w^(n+m)
    let mut coef = C64::new(w.powi(m as i32) / gamma(C64::new(mf + 1.0, 0.0)).re, 0.0);
    let mut quiet = 0;
    for n in 0..CAP {
        let nf = n as f64;
        let bracket = ln_w - digamma(C64::new(nf + 1.0, 0.0)) - digamma(C64::new(nf + mf + 1.0, 0.0))
            + digamma(a + nf + mf)
            + digamma(b + nf + mf);
        let term = coef * bracket;
        sum.add(term);
        let s = sum.value();
        if term.norm() <= 1e-17 * s.norm().max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        coef *= (a + mf + nf) * (b + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0)) * w;
        if coef == C64::new(0.0, 0.0) {
            break;
        }
        if n + 1 == CAP {
            return Err(LabError::SeriesNonConvergence { what: "2F1 limiting formula".into(), iterations: CAP });
        }
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(finite - pref * sum.value() * sign)
}

/// `₂F₁(a, b; c; z)`: direct series for `z ≤ ½`, the `1 − z` connection
/// formula above, with the logarithmic limit when `c − a − b` is an integer.
pub fn gauss_2f1(a: C64, b: C64, c: C64, z: f64) -> Result<C64> {
    if near_nonpositive_integer(c, 1e-14) {
        return Err(LabError::Parameter(format!("c = {c} is a nonpositive integer")));
    }
    if !(z < 1.0) || z <= -1.0 || !z.is_finite() {
        return Err(LabError::Domain(format!("2F1 argument {z} outside (-1, 1)")));
    }
    if z <= 0.5 {
        return series(a, b, c, z);
    }
    let w = 1.0 - z;
    let gap = c - a - b;
    let m = gap.re.round();
    let dist = (gap - m).norm();
    if dist < INTEGER_TOL {
        return if m >= 0.0 {
            integer_gap(a, b, m as u32, w)
        } else {
            // Euler transformation makes the gap positive
            let mm = (-m) as u32;
            Ok(w.powi(-(mm as i32)) * integer_gap(c - a, c - b, mm, w)?)
        };
    }
    if dist < NEAR_INTEGER_TOL {
        return series(a, b, c, z);
    }
    let t1 = gamma(c) * gamma(gap) * rgamma(c - a) * rgamma(c - b);
    let t2 = gamma(c) * gamma(-gap) * rgamma(a) * rgamma(b);
    let mut out = C64::new(0.0, 0.0);
    if t1 != C64::new(0.0, 0.0) {
        out += t1 * series(a, b, 1.0 - gap, w)?;
    }
    if t2 != C64::new(0.0, 0.0) {
        out += t2 * C64::new(w, 0.0).powc(gap) * series(c - a, c - b, 1.0 + gap, w)?;
    }
    Ok(out)
}
