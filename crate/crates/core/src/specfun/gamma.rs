//! Complex Gamma via the Lanczos approximation (g = 7, nine terms) and the
//! digamma function via recurrence plus the asymptotic series.

use std::f64::consts::PI;

use crate::jet::C64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: C64) -> C64 {
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    x
}

/// `ln Γ(z)` for `Re z >= 0.5` (principal branch of the log of the Lanczos form).
fn ln_gamma_right(z: C64) -> C64 {
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + lanczos_sum(zm).ln()
}

pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        PI / ((PI * z).sin() * gamma(1.0 - z))
    } else {
        ln_gamma_right(z).exp()
    }
}

/// `1/Γ(z)`, exactly zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return C64::new(0.0, 0.0);
        }
        (PI * z).sin() * gamma(1.0 - z) / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// A logarithm of `Γ(z)` for `Re z >= 0.5`; reflected otherwise (branch not normalised).
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        C64::new(PI.ln(), 0.0) - (PI * z).sin().ln() - ln_gamma_right(1.0 - z)
    } else {
        ln_gamma_right(z)
    }
}

pub fn digamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let t = PI * z;
        return digamma(1.0 - z) - PI * t.cos() / t.sin();
    }
    let mut acc = C64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 12.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let w2 = 1.0 / (w * w);
    // Bernoulli terms B_2k / (2k w^2k)
    let series = w2
        * (1.0 / 12.0
            - w2 * (1.0 / 120.0 - w2 * (1.0 / 252.0 - w2 * (1.0 / 240.0 - w2 * (1.0 / 132.0 - w2 * 691.0 / 32760.0)))));
    acc + w.ln() - 0.5 / w - series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn factorials_and_half_integers() {
        assert!((gamma(c(5.0, 0.0)) - 24.0).norm() < 1e-12);
        assert!((gamma(c(0.5, 0.0)) - PI.sqrt()).norm() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-13);
        assert_eq!(rgamma(c(-3.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn complex_values_match_reference() {
        // mpmath.gamma(1+1j), mpmath.gamma(0.3-2.1j)
        let a = gamma(c(1.0, 1.0));
        assert!((a - c(0.498_015_668_118_356, -0.154_949_828_301_810_7)).norm() < 1e-14);
        let b = gamma(c(0.3, -2.1));
        assert!((b - c(0.053_019_426_201_761_70, 0.059_829_016_981_994_70)).norm() / b.norm() < 1e-12);
    }

    #[test]
    fn recurrence_holds() {
        for z in [c(0.7, 0.2), c(-1.3, 0.4), c(3.2, -5.0)] {
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() / lhs.norm() < 1e-13);
            let dl = digamma(z + 1.0) - digamma(z) - 1.0 / z;
            assert!(dl.norm() < 1e-13);
        }
    }

    #[test]
    fn digamma_at_one_is_minus_euler_gamma() {
        assert!((digamma(c(1.0, 0.0)) + 0.577_215_664_901_532_9).norm() < 1e-15);
        assert!((digamma(c(0.5, 0.0)) + 1.963_510_026_021_423_5).norm() < 1e-14);
    }
}
