//! Second-order forward-mode scalars carrying value, gradient and Hessian.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate a metric either on plain floats or on
/// Taylor scalars.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64, like: &Self) -> Self;
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, k: i32) -> Self;

    fn scale(&self, c: f64) -> Self {
        self.clone() * Self::constant(c, self)
    }

    fn add_const(&self, c: f64) -> Self {
        self.clone() + Self::constant(c, self)
    }
}

impl Scalar for f64 {
    fn constant(v: f64, _: &Self) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
}

/// Truncated second-order Taylor expansion in `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorScalar {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `n x n`, symmetric.
    pub hess: Vec<f64>,
}

impl TaylorScalar {
    pub fn constant_n(v: f64, n: usize) -> Self {
        TaylorScalar { value: v, grad: vec![0.0; n], hess: vec![0.0; n * n] }
    }

    /// The coordinate function `x_i` evaluated at `v`.
    pub fn variable(v: f64, i: usize, n: usize) -> Self {
        let mut t = Self::constant_n(v, n);
        t.grad[i] = 1.0;
        t
    }

    pub fn n(&self) -> usize {
        self.grad.len()
    }

    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.n() + j]
    }

    /// `f(self)` given `f`, `f'`, `f''` at the value.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.n();
        let grad = self.grad.iter().map(|g| f1 * g).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = f1 * self.hess[i * n + j] + f2 * self.grad[i] * self.grad[j];
            }
        }
        TaylorScalar { value: f0, grad, hess }
    }

    fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl Add for TaylorScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        TaylorScalar {
            value: self.value + o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for TaylorScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for TaylorScalar {
    type Output = Self;
    fn neg(self) -> Self {
        TaylorScalar {
            value: -self.value,
            grad: self.grad.iter().map(|x| -x).collect(),
            hess: self.hess.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for TaylorScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let n = self.n();
        let (a, b) = (self.value, o.value);
        let grad = (0..n).map(|i| a * o.grad[i] + b * self.grad[i]).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                hess[k] = a * o.hess[k]
                    + b * self.hess[k]
                    + self.grad[i] * o.grad[j]
                    + o.grad[i] * self.grad[j];
            }
        }
        TaylorScalar { value: a * b, grad, hess }
    }
}

impl Div for TaylorScalar {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Scalar for TaylorScalar {
    fn constant(v: f64, like: &Self) -> Self {
        Self::constant_n(v, like.n())
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }
    fn powi(&self, k: i32) -> Self {
        let v = self.value;
        let kf = k as f64;
        let f1 = if k == 0 { 0.0 } else { kf * v.powi(k - 1) };
        let f2 = if k == 0 || k == 1 { 0.0 } else { kf * (kf - 1.0) * v.powi(k - 2) };
        self.chain(v.powi(k), f1, f2)
    }
}
