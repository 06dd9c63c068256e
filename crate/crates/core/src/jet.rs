//! Forward-mode jets over the four spacetime coordinates.
//!
//! [`Jet2`] carries a value, its gradient and its (symmetric) Hessian and is
//! what metric components are evaluated into. [`Jet1`] drops the Hessian; it
//! is the carrier for connection coefficients, whose first derivatives are
//! all that curvature needs.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

pub const DIM: usize = 4;

/// Value plus first partial derivatives with respect to `x^0..x^3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Jet1 {
    pub value: f64,
    pub grad: [f64; DIM],
}

/// Value, gradient and Hessian with respect to `x^0..x^3`.
///
/// `hess[a][b] == hess[b][a]` holds bit-for-bit for every jet produced by the
/// arithmetic in this module.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; DIM],
    pub hess: [[f64; DIM]; DIM],
}

impl Jet1 {
    pub const ZERO: Jet1 = Jet1 {
        value: 0.0,
        grad: [0.0; DIM],
    };

    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; DIM],
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            value: k * self.value,
            grad: self.grad.map(|g| k * g),
        }
    }

    /// Reciprocal; the caller guarantees a nonzero value.
    pub fn recip(self) -> Self {
        let r = 1.0 / self.value;
        let d = -r * r;
        Self {
            value: r,
            grad: self.grad.map(|g| d * g),
        }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g += r;
        }
        Jet1 {
            value: self.value + rhs.value,
            grad,
        }
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g -= r;
        }
        Jet1 {
            value: self.value - rhs.value,
            grad,
        }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut grad = [0.0; DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.value * rhs.grad[k] + rhs.value * self.grad[k];
        }
        Jet1 {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Mul<Jet1> for f64 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        rhs.scale(self)
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        self.scale(-1.0)
    }
}

impl AddAssign for Jet1 {
    fn add_assign(&mut self, rhs: Jet1) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet1 {
    fn sub_assign(&mut self, rhs: Jet1) {
        *self = *self - rhs;
    }
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        value: 0.0,
        grad: [0.0; DIM],
        hess: [[0.0; DIM]; DIM],
    };

    pub fn constant(value: f64) -> Self {
        Self {
            value,
            ..Self::ZERO
        }
    }

    /// Jet of the coordinate function `x^k` evaluated at `value`.
    pub fn variable(k: usize, value: f64) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[k] = 1.0;
        jet
    }

    pub fn is_constant(&self) -> bool {
        self.grad.iter().all(|&g| g == 0.0) && self.hess.iter().flatten().all(|&h| h == 0.0)
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            value: k * self.value,
            grad: self.grad.map(|g| k * g),
            hess: self.hess.map(|row| row.map(|h| k * h)),
        }
    }

    /// Value and gradient only.
    pub fn first_order(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            grad: self.grad,
        }
    }

    /// The partial derivative `∂_k` of this jet, as a first-order jet.
    pub fn partial(&self, k: usize) -> Jet1 {
        Jet1 {
            value: self.grad[k],
            grad: self.hess[k],
        }
    }

    /// Composition `f(self)` given `f`, `f'` and `f''` at `self.value`.
    pub fn compose(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(f0);
        for a in 0..DIM {
            out.grad[a] = f1 * self.grad[a];
        }
        for a in 0..DIM {
            for b in a..DIM {
                let h = f1 * self.hess[a][b] + f2 * self.grad[a] * self.grad[b];
                out.hess[a][b] = h;
                out.hess[b][a] = h;
            }
        }
        out
    }

    /// Reciprocal; the caller guarantees a nonzero value.
    pub fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.compose(r, -r * r, 2.0 * r * r * r)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.compose(t, sec2, 2.0 * t * sec2)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    /// Natural logarithm; the caller guarantees a positive value.
    pub fn ln(self) -> Self {
        let x = self.value;
        self.compose(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    /// Square root; the caller guarantees a positive value.
    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        let d = 1.0 - t * t;
        self.compose(t, d, -2.0 * t * d)
    }

    /// Absolute value away from zero.
    pub fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Integer power. Negative exponents require a nonzero value.
    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let x = self.value;
                let nf = f64::from(n);
                self.compose(x.powi(n), nf * x.powi(n - 1), nf * (nf - 1.0) * x.powi(n - 2))
            }
        }
    }

    /// Real power with a constant exponent; the caller guarantees `self.value > 0`
    /// or an exponent for which the derivatives at zero are finite.
    pub fn powf(self, p: f64) -> Self {
        let x = self.value;
        if x == 0.0 {
            return self.compose(0.0, 0.0, if p == 2.0 { 2.0 } else { 0.0 });
        }
        self.compose(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value += rhs.value;
        for a in 0..DIM {
            out.grad[a] += rhs.grad[a];
            for b in 0..DIM {
                out.hess[a][b] += rhs.hess[a][b];
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value -= rhs.value;
        for a in 0..DIM {
            out.grad[a] -= rhs.grad[a];
            for b in 0..DIM {
                out.hess[a][b] -= rhs.hess[a][b];
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (f, g) = (self, rhs);
        let mut out = Jet2::constant(f.value * g.value);
        for a in 0..DIM {
            out.grad[a] = f.value * g.grad[a] + g.value * f.grad[a];
        }
        for a in 0..DIM {
            for b in a..DIM {
                let h = f.value * g.hess[a][b]
                    + g.value * f.hess[a][b]
                    + (f.grad[a] * g.grad[b] + g.grad[a] * f.grad[b]);
                out.hess[a][b] = h;
                out.hess[b][a] = h;
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}
