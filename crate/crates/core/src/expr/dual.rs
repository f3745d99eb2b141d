//! Forward-mode dual numbers.
//!
//! `Dual<f64>` carries a value and its gradient; nesting once,
//! `Dual<Dual<f64>>`, also carries the Hessian.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Numeric type an expression can be evaluated over.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Constant with the same derivative layout as `like`.
    fn constant(value: f64, like: &Self) -> Self;
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn powf(&self, p: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(value: f64, _: &Self) -> Self {
        value
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
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
}

/// Value plus first derivatives with respect to each seeded variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: Vec<T>,
}

impl<T: Scalar> Dual<T> {
    /// The `index`-th of `count` independent variables, with value `re`.
    pub fn variable(re: T, index: usize, count: usize) -> Self {
        let eps = (0..count)
            .map(|k| T::constant(if k == index { 1.0 } else { 0.0 }, &re))
            .collect();
        Self { re, eps }
    }

    /// Applies a function with value `f` and derivative `df` at `self.re`.
    fn chain(&self, f: T, df: T) -> Self {
        Self {
            re: f,
            eps: self.eps.iter().map(|e| df.clone() * e.clone()).collect(),
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            eps: self.eps.into_iter().zip(rhs.eps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            eps: self.eps.into_iter().zip(rhs.eps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let eps = self
            .eps
            .into_iter()
            .zip(rhs.eps)
            .map(|(a, b)| a * rhs.re.clone() + self.re.clone() * b)
            .collect();
        Self {
            re: self.re * rhs.re,
            eps,
        }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let denom = rhs.re.clone() * rhs.re.clone();
        let eps = self
            .eps
            .into_iter()
            .zip(rhs.eps)
            .map(|(a, b)| (a * rhs.re.clone() - self.re.clone() * b) / denom.clone())
            .collect();
        Self {
            re: self.re / rhs.re,
            eps,
        }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            eps: self.eps.into_iter().map(|e| -e).collect(),
        }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn constant(value: f64, like: &Self) -> Self {
        let zero = T::constant(0.0, &like.re);
        Self {
            re: T::constant(value, &like.re),
            eps: vec![zero; like.eps.len()],
        }
    }
    fn value(&self) -> f64 {
        self.re.value()
    }
    fn sin(&self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn tan(&self) -> Self {
        let t = self.re.tan();
        let one = T::constant(1.0, &self.re);
        self.chain(t.clone(), one + t.clone() * t)
    }
    fn exp(&self) -> Self {
        let e = self.re.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        let one = T::constant(1.0, &self.re);
        self.chain(self.re.ln(), one / self.re.clone())
    }
    fn sqrt(&self) -> Self {
        let s = self.re.sqrt();
        let half = T::constant(0.5, &self.re);
        self.chain(s.clone(), half / s)
    }
    fn abs(&self) -> Self {
        let sign = if self.re.value() < 0.0 { -1.0 } else { 1.0 };
        self.chain(self.re.abs(), T::constant(sign, &self.re))
    }
    fn powi(&self, n: i32) -> Self {
        let d = if n == 0 {
            T::constant(0.0, &self.re)
        } else {
            T::constant(n as f64, &self.re) * self.re.powi(n - 1)
        };
        self.chain(self.re.powi(n), d)
    }
    fn powf(&self, p: f64) -> Self {
        let d = T::constant(p, &self.re) * self.re.powf(p - 1.0);
        self.chain(self.re.powf(p), d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Dual::variable(3.0, 0, 2);
        let y = Dual::variable(2.0, 1, 2);
        let f = x.clone() * y.clone() + x.sin();
        assert_eq!(f.re, 6.0 + 3f64.sin());
        assert!((f.eps[0] - (2.0 + 3f64.cos())).abs() < 1e-15);
        assert_eq!(f.eps[1], 3.0);
    }

    #[test]
    fn nested_gives_second_derivatives() {
        // f = x^3 y  ->  f_xx = 6xy, f_xy = 3x^2
        let n = 2;
        let vars: Vec<Dual<Dual<f64>>> = [2.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| Dual {
                re: Dual::variable(v, i, n),
                eps: (0..n)
                    .map(|j| Dual::constant(if i == j { 1.0 } else { 0.0 }, &Dual::variable(v, i, n)))
                    .collect(),
            })
            .collect();
        let f = vars[0].powi(3) * vars[1].clone();
        assert_eq!(f.value(), 40.0);
        assert_eq!(f.eps[0].re, 60.0);
        assert_eq!(f.eps[0].eps[0], 60.0);
        assert_eq!(f.eps[0].eps[1], 12.0);
        assert_eq!(f.eps[1].eps[0], 12.0);
    }
}
