//! Truncated power series in `x` over a [`Coeff`] domain.
//!
//! A series of order `N` knows `c_0 ..= c_N`; coefficients beyond `N` are
//! unknown, not zero. Binary operations return the smaller of the two orders.

use std::ops::{Add, Mul, Neg, Sub};

use crate::coefficients::{Coeff, Domain, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    coefficients: Vec<C>,
}

/// Result of evaluating a series at a real point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Geometric estimate of the neglected tail; infinite when `reliable` is false.
    pub tail_estimate: f64,
    /// False when the root-test ratio `|x|·ρ̂` reaches 1, i.e. the point
    /// looks to be at or beyond the radius of convergence.
    pub reliable: bool,
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn new(coefficients: Vec<C>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::domain("a series needs at least one coefficient"));
        }
        Ok(TruncatedSeries { coefficients })
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> C) -> Self {
        TruncatedSeries {
            coefficients: (0..=order).map(f).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| C::zero())
    }

    /// The series `x`.
    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |n| if n == 1 { C::one() } else { C::zero() })
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coefficients[0] = c;
        s
    }

    pub fn domain(&self) -> Domain {
        C::DOMAIN
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Option<&C> {
        self.coefficients.get(n)
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<C> {
        self.coefficients
    }

    /// Drops coefficients above `order`. Asking for a higher order is an error:
    /// unknown coefficients are never invented.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::domain(format!(
                "series known to order {} cannot be extended to order {order}",
                self.order()
            )));
        }
        Ok(TruncatedSeries {
            coefficients: self.coefficients[..=order].to_vec(),
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncatedSeries {
            coefficients: self.coefficients.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn map<D>(&self, f: impl FnMut(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries {
            coefficients: self.coefficients.iter().map(f).collect(),
        }
    }

    pub fn try_map<D>(&self, f: impl FnMut(&C) -> Result<D>) -> Result<TruncatedSeries<D>> {
        Ok(TruncatedSeries {
            coefficients: self.coefficients.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn to_f64(&self) -> Result<TruncatedSeries<f64>> {
        self.try_map(|c| {
            c.to_f64()
                .ok_or_else(|| Error::domain(format!("coefficient {c:?} has no real value")))
        })
    }

    /// Lowest power at which `self` and `other` differ, within the common order.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .position(|(a, b)| a != b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        TruncatedSeries {
            coefficients: self
                .coefficients
                .iter()
                .zip(&rhs.coefficients)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, C::add)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, C::sub)
    }

    pub fn neg(&self) -> Self {
        self.map(C::neg)
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let a = &self.coefficients;
        let b = &rhs.coefficients;
        Self::from_fn(order, |n| {
            let mut acc: Option<C> = None;
            for i in 0..=n {
                if a[i].is_zero() || b[n - i].is_zero() {
                    continue;
                }
                let term = a[i].mul(&b[n - i]);
                acc = Some(match acc {
                    Some(s) => s.add(&term),
                    None => term,
                });
            }
            acc.unwrap_or_else(C::zero)
        })
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn recip(&self) -> Result<Self> {
        let a = &self.coefficients;
        let a0_inv = a[0].try_inv()?;
        let mut out: Vec<C> = Vec::with_capacity(a.len());
        out.push(a0_inv.clone());
        for n in 1..a.len() {
            let mut acc = C::zero();
            for j in 1..=n {
                if !a[j].is_zero() {
                    acc = acc.add(&a[j].mul(&out[n - j]));
                }
            }
            out.push(acc.mul(&a0_inv).neg());
        }
        Ok(TruncatedSeries { coefficients: out })
    }

    /// `self / rhs`; the constant term of `rhs` must be invertible.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.recip()?))
    }

    /// `self / x`, lowering the order by one. Needs a zero constant term.
    pub fn shift_down(&self) -> Result<Self> {
        if !self.coefficients[0].is_zero() {
            return Err(Error::domain("cannot divide by x: nonzero constant term"));
        }
        if self.order() == 0 {
            return Err(Error::domain("cannot divide an order-0 series by x"));
        }
        Ok(TruncatedSeries {
            coefficients: self.coefficients[1..].to_vec(),
        })
    }

    /// `x · self`, raising the order by one.
    pub fn shift_up(&self) -> Self {
        let mut coefficients = Vec::with_capacity(self.coefficients.len() + 1);
        coefficients.push(C::zero());
        coefficients.extend(self.coefficients.iter().cloned());
        TruncatedSeries { coefficients }
    }

    /// `d/dx`, one order lower.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |n| {
            self.coefficients[n + 1].mul_rational(&Rational::from_integer((n + 1).into()))
        })
    }

    /// `self(inner(x))`, truncated at the smaller order, by Horner's scheme.
    ///
    /// `inner` must vanish at the origin.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coefficients[0].is_zero() {
            return Err(Error::domain(
                "composition needs an inner series with zero constant term",
            ));
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order)?;
        let mut acc = Self::constant(self.coefficients[order].clone(), order);
        for c in self.coefficients[..order].iter().rev() {
            acc = acc.mul(&inner);
            acc.coefficients[0] = acc.coefficients[0].add(c);
        }
        Ok(acc)
    }

    /// Compositional inverse by Lagrange inversion:
    /// `[x^n] b = (1/n) [x^(n-1)] (x / a(x))^n`.
    ///
    /// Needs `a(0) = 0` and an invertible `a'(0)`; in the jet domain `a'(0)`
    /// must be exactly 1.
    pub fn revert(&self) -> Result<Self> {
        if !self.coefficients[0].is_zero() {
            return Err(Error::domain("reversion needs a(0) = 0"));
        }
        if self.order() == 0 {
            return Err(Error::domain("reversion needs order >= 1"));
        }
        let a1 = &self.coefficients[1];
        if C::DOMAIN == Domain::EpsJet && !a1.is_one() {
            return Err(Error::domain("jet reversion needs a'(0) = 1"));
        }
        if a1.is_zero() {
            return Err(Error::domain("reversion needs an invertible a'(0)"));
        }
        let h = self.shift_down()?.recip()?;
        let order = self.order();
        let mut out = Vec::with_capacity(order + 1);
        out.push(C::zero());
        let mut power = h.clone();
        for n in 1..=order {
            let c = power.coefficients[n - 1].mul_rational(&Rational::new(1.into(), n.into()));
            out.push(c);
            if n < order {
                power = power.mul(&h);
            }
        }
        Ok(TruncatedSeries { coefficients: out })
    }

    /// Horner evaluation at a real point with a root-test tail estimate.
    ///
    /// The decay rate `ρ̂` is the largest `|c_n|^(1/n)` over the last five
    /// coefficients; the tail is `|c_m x^m| · r/(1-r)` with `r = |x|·ρ̂` and
    /// `m` the last nonzero index among those five.
    pub fn evaluate(&self, x: f64) -> Result<Evaluation> {
        let c = self.to_f64()?;
        let c = &c.coefficients;
        let value = c.iter().rev().fold(0.0, |acc, a| acc * x + a);

        let n_max = c.len() - 1;
        let start = n_max.saturating_sub(4).max(1);
        let mut rho: f64 = 0.0;
        let mut last_term = 0.0;
        for (n, a) in c.iter().enumerate().take(n_max + 1).skip(start) {
            if *a != 0.0 {
                rho = rho.max(a.abs().powf(1.0 / n as f64));
                last_term = (a * x.powi(n as i32)).abs();
            }
        }
        let r = x.abs() * rho;
        let (tail_estimate, reliable) = if r >= 1.0 {
            (f64::INFINITY, false)
        } else {
            (last_term * r / (1.0 - r), true)
        };
        Ok(Evaluation {
            value,
            tail_estimate,
            reliable,
        })
    }
}

impl<C: Coeff> Add for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn add(self, rhs: Self) -> TruncatedSeries<C> {
        TruncatedSeries::add(self, rhs)
    }
}

impl<C: Coeff> Sub for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn sub(self, rhs: Self) -> TruncatedSeries<C> {
        TruncatedSeries::sub(self, rhs)
    }
}

impl<C: Coeff> Mul for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn mul(self, rhs: Self) -> TruncatedSeries<C> {
        TruncatedSeries::mul(self, rhs)
    }
}

impl<C: Coeff> Neg for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn neg(self) -> TruncatedSeries<C> {
        TruncatedSeries::neg(self)
    }
}

impl TruncatedSeries<Rational> {
    /// Series with exact rational coefficients given as `(num, den)` pairs.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        TruncatedSeries {
            coefficients: coeffs
                .iter()
                .map(|&(n, d)| crate::coefficients::rational(n, d))
                .collect(),
        }
    }
}
