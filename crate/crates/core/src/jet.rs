//! Truncated Taylor arithmetic carrying a value and its first four
//! derivatives; used wherever weights need exact higher derivatives.

use std::ops::{Add, Mul, Neg, Sub};

pub const ORDER: usize = 4;

/// Taylor coefficients `c[k] = f^(k)(x) / k!`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; ORDER + 1],
}

const FACT: [f64; ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; ORDER + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function evaluated at `x`.
    pub fn var(x: f64) -> Self {
        let mut c = [0.0; ORDER + 1];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn zero() -> Self {
        Jet { c: [0.0; ORDER + 1] }
    }

    /// Build from derivatives `[f, f', f'', f''', f'''']`.
    pub fn from_derivatives(d: [f64; ORDER + 1]) -> Self {
        let mut c = d;
        for k in 0..=ORDER {
            c[k] /= FACT[k];
        }
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative.
    pub fn d(&self, k: usize) -> f64 {
        self.c[k] * FACT[k]
    }

    pub fn derivatives(&self) -> [f64; ORDER + 1] {
        let mut d = self.c;
        for k in 0..=ORDER {
            d[k] *= FACT[k];
        }
        d
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    pub fn recip(self) -> Self {
        let a = self.c;
        let mut r = [0.0; ORDER + 1];
        r[0] = 1.0 / a[0];
        for k in 1..=ORDER {
            let s: f64 = (1..=k).map(|j| a[j] * r[k - j]).sum();
            r[k] = -s / a[0];
        }
        Jet { c: r }
    }

    pub fn div(self, other: Self) -> Self {
        self * other.recip()
    }

    pub fn exp(self) -> Self {
        let a = self.c;
        let mut e = [0.0; ORDER + 1];
        e[0] = a[0].exp();
        for k in 1..=ORDER {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn tanh(self) -> Self {
        // tanh z = 1 - 2 / (1 + exp(2z)), folded for z > 0 to avoid overflow
        if self.c[0] > 0.0 {
            -((-self).tanh())
        } else {
            let e = self.scale(2.0).exp();
            Jet::constant(1.0) - (Jet::constant(1.0) + e).recip().scale(2.0)
        }
    }

    pub fn sech(self) -> Self {
        // sech z = 2 e^{-|z|} / (1 + e^{-2|z|})
        let z = if self.c[0] < 0.0 { -self } else { self };
        let e = (-z).exp();
        e.scale(2.0).div(Jet::constant(1.0) + e.square())
    }

    /// Chain rule for `g(x / a)` given the jet of `g` at `x / a`.
    pub fn rescaled(self, a: f64) -> Self {
        let mut c = self.c;
        let mut p = 1.0;
        for v in c.iter_mut() {
            *v *= p;
            p /= a;
        }
        Jet { c }
    }

    /// Jet of the antiderivative `F` with `F(x) = value` and `F' = self`.
    pub fn integral(self, value: f64) -> Self {
        let mut c = [0.0; ORDER + 1];
        c[0] = value;
        for k in 1..=ORDER {
            c[k] = self.c[k - 1] / k as f64;
        }
        Jet { c }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for k in 0..=ORDER {
            c[k] += o.c[k];
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; ORDER + 1];
        for k in 0..=ORDER {
            c[k] = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        Jet { c }
    }
}
