//! Coefficient domains for truncated series.
//!
//! Three domains share the [`Coeff`] contract:
//!
//! - [`Rational`]: exact arbitrary-precision fractions, the reference domain.
//! - `f64`: binary floating point.
//! - [`EpsJet`]: truncated Laurent expansions in `ε = ln s`, used to carry the
//!   `s → 1` limit through pole cancellations.

mod jet;
mod rational;

use std::fmt::{self, Debug};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use jet::EpsJet;
pub use rational::{exact_pow, format_rational, parse_rational, rational, Rational};

/// Tag naming a coefficient domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Rational,
    Float,
    EpsJet,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Rational => "rational",
            Domain::Float => "float",
            Domain::EpsJet => "epsjet",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Domain::Rational),
            "float" => Ok(Domain::Float),
            "epsjet" => Ok(Domain::EpsJet),
            other => Err(Error::Parse(format!("unknown domain `{other}`"))),
        }
    }
}

/// Field-like contract shared by all coefficient domains.
///
/// Arithmetic takes references so that big rationals and jets are not cloned
/// on every operation.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + 'static {
    const DOMAIN: Domain;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// True when every known part of the value is zero.
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn try_inv(&self) -> Result<Self>;

    /// Real value, when the coefficient denotes a single real number.
    fn to_f64(&self) -> Option<f64>;

    /// Size used by residual reports.
    fn magnitude(&self) -> f64;

    fn mul_rational(&self, r: &Rational) -> Self {
        self.mul(&Self::from_rational(r))
    }

    fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Coeff for Rational {
    const DOMAIN: Domain = Domain::Rational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn try_inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }

    fn to_f64(&self) -> Option<f64> {
        ToPrimitive::to_f64(self)
    }

    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
}

impl Coeff for f64 {
    const DOMAIN: Domain = Domain::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_one(&self) -> bool {
        *self == 1.0
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn try_inv(&self) -> Result<Self> {
        if *self == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }

    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coeff for EpsJet {
    const DOMAIN: Domain = Domain::EpsJet;

    fn zero() -> Self {
        EpsJet::exact_zero()
    }

    fn one() -> Self {
        EpsJet::constant(<Rational as One>::one())
    }

    fn from_rational(r: &Rational) -> Self {
        EpsJet::constant(r.clone())
    }

    fn is_zero(&self) -> bool {
        EpsJet::is_zero(self)
    }

    fn is_one(&self) -> bool {
        EpsJet::is_one(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        EpsJet::add(self, rhs)
    }

    fn sub(&self, rhs: &Self) -> Self {
        EpsJet::add(self, &rhs.negate())
    }

    fn mul(&self, rhs: &Self) -> Self {
        EpsJet::mul(self, rhs)
    }

    fn neg(&self) -> Self {
        self.negate()
    }

    fn try_inv(&self) -> Result<Self> {
        self.invert()
    }

    fn to_f64(&self) -> Option<f64> {
        self.as_constant().and_then(|c| ToPrimitive::to_f64(&c))
    }

    fn magnitude(&self) -> f64 {
        self.max_abs_coefficient()
    }

    fn mul_rational(&self, r: &Rational) -> Self {
        self.scale(r)
    }
}
