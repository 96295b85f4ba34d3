//! Fourth-order central differences over chart coordinates.

use crate::error::{LabError, Result};
use crate::jet::C64;

/// Per-coordinate step `1e-5 * (1 + |x|)`.
pub fn step(x: f64) -> f64 {
    1e-5 * (1.0 + x.abs())
}

fn shifted(x: &[f64; 4], j: usize, h: f64) -> [f64; 4] {
    let mut y = *x;
    y[j] += h;
    y
}

pub fn partial_real<const M: usize>(
    f: impl Fn(&[f64; 4]) -> [f64; M],
    x: &[f64; 4],
    j: usize,
) -> Result<[f64; M]> {
    let h = step(x[j]);
    if x[j] + h == x[j] {
        return Err(LabError::StepUnderflow(j));
    }
    let fm2 = f(&shifted(x, j, -2.0 * h));
    let fm1 = f(&shifted(x, j, -h));
    let fp1 = f(&shifted(x, j, h));
    let fp2 = f(&shifted(x, j, 2.0 * h));
    let mut out = [0.0; M];
    for i in 0..M {
        out[i] = (fm2[i] - 8.0 * fm1[i] + 8.0 * fp1[i] - fp2[i]) / (12.0 * h);
    }
    Ok(out)
}

pub fn partial_complex<const M: usize>(
    f: impl Fn(&[f64; 4]) -> [C64; M],
    x: &[f64; 4],
    j: usize,
) -> Result<[C64; M]> {
    let h = step(x[j]);
    if x[j] + h == x[j] {
        return Err(LabError::StepUnderflow(j));
    }
    let fm2 = f(&shifted(x, j, -2.0 * h));
    let fm1 = f(&shifted(x, j, -h));
    let fp1 = f(&shifted(x, j, h));
    let fp2 = f(&shifted(x, j, 2.0 * h));
    let mut out = [C64::new(0.0, 0.0); M];
    for i in 0..M {
        out[i] = (fm2[i] - fm1[i] * 8.0 + fp1[i] * 8.0 - fp2[i]) / (12.0 * h);
    }
    Ok(out)
}

/// Scalar derivative of a real function of one variable.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = step(x);
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

pub fn derivative_complex(f: impl Fn(C64) -> C64, z: C64) -> C64 {
    let h = step(z.norm());
    (f(z - 2.0 * h) - f(z - h) * 8.0 + f(z + h) * 8.0 - f(z + 2.0 * h)) / (12.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_of_degree_four_is_exact() {
        let f = |x: &[f64; 4]| [x[0].powi(4) + x[1] * x[0], x[2].sin()];
        let x = [1.3, 0.4, 0.9, 0.0];
        let d = partial_real(f, &x, 0).unwrap();
        assert!((d[0] - (4.0 * 1.3f64.powi(3) + 0.4)).abs() < 1e-9);
        let d2 = partial_real(f, &x, 2).unwrap();
        assert!((d2[1] - 0.9f64.cos()).abs() < 1e-10);
    }
}
