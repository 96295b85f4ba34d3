//! First-order forward-mode jets over the four chart coordinates (r, θ, φ, ψ).
//!
//! Closed-form solution families are written once against [`Jet`] and yield
//! their value together with all four coordinate partials, exact to rounding.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: C64,
    pub d: [C64; 4],
}

const ZERO4: [C64; 4] = [C64::new(0.0, 0.0); 4];

impl Jet {
    pub fn constant(v: impl Into<C64>) -> Self {
        Jet { v: v.into(), d: ZERO4 }
    }

    /// The coordinate variable with index `slot`, at value `x`.
    pub fn variable(x: f64, slot: usize) -> Self {
        let mut d = ZERO4;
        d[slot] = C64::new(1.0, 0.0);
        Jet { v: C64::new(x, 0.0), d }
    }

    /// Apply a function with known value `fv` and derivative `dfv` at `self.v`.
    pub fn chain(self, fv: C64, dfv: C64) -> Self {
        Jet {
            v: fv,
            d: self.d.map(|x| x * dfv),
        }
    }

    pub fn re(&self) -> f64 {
        self.v.re
    }

    pub fn scale(self, k: impl Into<C64>) -> Self {
        let k = k.into();
        Jet {
            v: self.v * k,
            d: self.d.map(|x| x * k),
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }

    pub fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(inv, -inv * inv)
    }

    /// `self^p` on the principal branch. Intended for bases with positive real
    /// part, which is all that the closed forms here ever raise to a power.
    pub fn powc(self, p: impl Into<C64>) -> Self {
        let p = p.into();
        if p == C64::new(0.0, 0.0) {
            return Jet::constant(1.0);
        }
        let val = self.v.powc(p);
        self.chain(val, p * val / self.v)
    }

    pub fn powf(self, p: f64) -> Self {
        self.powc(C64::new(p, 0.0))
    }
}

impl From<f64> for Jet {
    fn from(x: f64) -> Self {
        Jet::constant(x)
    }
}

impl From<C64> for Jet {
    fn from(x: C64) -> Self {
        Jet::constant(x)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(o.d) {
            *a += b;
        }
        Jet { v: self.v + o.v, d }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(o.d) {
            *a -= b;
        }
        Jet { v: self.v - o.v, d }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut d = ZERO4;
        for i in 0..4 {
            d[i] = self.d[i] * o.v + self.v * o.d[i];
        }
        Jet { v: self.v * o.v, d }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            v: -self.v,
            d: self.d.map(|x| -x),
        }
    }
}

macro_rules! scalar_ops {
    ($t:ty) => {
        impl Add<$t> for Jet {
            type Output = Jet;
            fn add(self, o: $t) -> Jet {
                Jet { v: self.v + o, d: self.d }
            }
        }
        impl Sub<$t> for Jet {
            type Output = Jet;
            fn sub(self, o: $t) -> Jet {
                Jet { v: self.v - o, d: self.d }
            }
        }
        impl Mul<$t> for Jet {
            type Output = Jet;
            fn mul(self, o: $t) -> Jet {
                self.scale(o)
            }
        }
        impl Div<$t> for Jet {
            type Output = Jet;
            fn div(self, o: $t) -> Jet {
                self.scale(C64::from(1.0) / o)
            }
        }
        impl Add<Jet> for $t {
            type Output = Jet;
            fn add(self, o: Jet) -> Jet {
                o + self
            }
        }
        impl Sub<Jet> for $t {
            type Output = Jet;
            fn sub(self, o: Jet) -> Jet {
                -o + self
            }
        }
        impl Mul<Jet> for $t {
            type Output = Jet;
            fn mul(self, o: Jet) -> Jet {
                o.scale(self)
            }
        }
        impl Div<Jet> for $t {
            type Output = Jet;
            fn div(self, o: Jet) -> Jet {
                o.recip().scale(self)
            }
        }
    };
}

scalar_ops!(f64);
scalar_ops!(C64);

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> C64, x: f64) -> C64 {
        let h = 1e-5;
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let expr = |x: Jet| {
            let a = (x * 2.0 + 1.0).powc(C64::new(0.3, -0.7));
            let b = (x.sin() * C64::new(0.0, 1.5)).exp() / (x * x + 3.0).sqrt();
            a * b - x.cos().recip()
        };
        for &x0 in &[0.3, 1.1, 2.7] {
            let j = expr(Jet::variable(x0, 0));
            let num = fd(|x| expr(Jet::constant(x)).v, x0);
            assert!((j.d[0] - num).norm() < 1e-8, "{} vs {}", j.d[0], num);
            assert_eq!(j.d[1], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn slots_are_independent() {
        let x = Jet::variable(2.0, 0);
        let y = Jet::variable(3.0, 2);
        let p = x * y;
        assert_eq!(p.d[0], C64::new(3.0, 0.0));
        assert_eq!(p.d[2], C64::new(2.0, 0.0));
        assert_eq!(p.d[1], C64::new(0.0, 0.0));
    }
}
