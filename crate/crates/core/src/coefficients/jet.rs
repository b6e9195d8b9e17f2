use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Stand-in for "no truncation" in precision arithmetic.
const UNBOUNDED: i64 = i64::MAX / 4;

/// Truncated Laurent expansion in `ε`.
///
/// Stores the coefficients of `ε^lowest_power ..= ε^upper`; everything above
/// `upper` is unknown. A jet with `upper == None` is exact (a finite Laurent
/// polynomial), which is how rational constants enter the jet domain.
///
/// Precision is tracked per value: a product `a·b` is only known through
/// `min(upper(a) + val(b), upper(b) + val(a))`, so dividing by small jets
/// visibly costs orders instead of producing silent garbage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsJet {
    lowest_power: i64,
    coefficients: Vec<Rational>,
    upper: Option<i64>,
}

impl EpsJet {
    pub fn exact_zero() -> Self {
        EpsJet {
            lowest_power: 0,
            coefficients: Vec::new(),
            upper: None,
        }
    }

    /// Zero known through `ε^upper`.
    pub fn zero_to(upper: i64) -> Self {
        EpsJet {
            lowest_power: upper + 1,
            coefficients: Vec::new(),
            upper: Some(upper),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// Exact `c·ε^power`.
    pub fn monomial(c: Rational, power: i64) -> Self {
        Self::from_parts(power, vec![c], None)
    }

    /// `ε` itself, known through `ε^upper`.
    pub fn epsilon(upper: i64) -> Self {
        Self::from_terms(1, vec![Rational::one()], Some(upper))
    }

    /// Builds a jet from coefficients of `ε^lowest, ε^(lowest+1), ...`.
    ///
    /// With `upper = Some(h)`, missing coefficients through `ε^h` are zero and
    /// coefficients beyond `ε^h` are dropped.
    pub fn from_terms(lowest: i64, mut coefficients: Vec<Rational>, upper: Option<i64>) -> Self {
        if let Some(h) = upper {
            let len = (h - lowest + 1).max(0) as usize;
            coefficients.resize(len, Rational::zero());
        }
        Self::from_parts(lowest, coefficients, upper)
    }

    fn from_parts(mut lowest: i64, mut coefficients: Vec<Rational>, upper: Option<i64>) -> Self {
        let lead = coefficients.iter().take_while(|c| c.is_zero()).count();
        coefficients.drain(..lead);
        lowest += lead as i64;
        if upper.is_none() {
            while coefficients.last().is_some_and(|c| c.is_zero()) {
                coefficients.pop();
            }
        }
        if coefficients.is_empty() {
            return match upper {
                Some(h) => Self::zero_to(h),
                None => Self::exact_zero(),
            };
        }
        EpsJet {
            lowest_power: lowest,
            coefficients,
            upper,
        }
    }

    /// Lowers the truncation edge to `upper` (never raises it).
    pub fn truncated(&self, upper: i64) -> Self {
        let h = self.upper.map_or(upper, |u| u.min(upper));
        Self::from_terms(self.lowest_power, self.coefficients.clone(), Some(h))
    }

    /// Power of the leading nonzero coefficient; `None` for zero.
    pub fn lowest_power(&self) -> Option<i64> {
        (!self.coefficients.is_empty()).then_some(self.lowest_power)
    }

    /// Highest known power; `None` when exact.
    pub fn upper(&self) -> Option<i64> {
        self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.upper.is_none()
    }

    /// Width `W` of the known window above the leading term.
    pub fn window_width(&self) -> Option<i64> {
        self.upper.map(|h| h - self.valuation())
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.lowest_power == 0
            && self.coefficients.first().is_some_and(|c| c.is_one())
            && self.coefficients[1..].iter().all(|c| c.is_zero())
    }

    /// Coefficient of `ε^power`, or `None` if that power is beyond the window.
    pub fn coefficient(&self, power: i64) -> Option<Rational> {
        if self.upper.is_some_and(|h| power > h) {
            return None;
        }
        Some(self.get(power))
    }

    /// Known `(power, coefficient)` pairs, including interior zeros.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.lowest_power + i as i64, c))
    }

    /// The value as a rational, when the jet is an exact constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match (self.upper, self.coefficients.len()) {
            (None, 0) => Some(Rational::zero()),
            (None, 1) if self.lowest_power == 0 => Some(self.coefficients[0].clone()),
            _ => None,
        }
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    fn get(&self, power: i64) -> Rational {
        let i = power - self.lowest_power;
        if i < 0 || i as usize >= self.coefficients.len() {
            Rational::zero()
        } else {
            self.coefficients[i as usize].clone()
        }
    }

    /// Lower bound on the valuation; an inexact zero has valuation `upper + 1`.
    fn valuation(&self) -> i64 {
        if self.coefficients.is_empty() {
            self.upper.map_or(UNBOUNDED, |h| h + 1)
        } else {
            self.lowest_power
        }
    }

    fn upper_or_unbounded(&self) -> i64 {
        self.upper.unwrap_or(UNBOUNDED)
    }

    fn top_stored_power(&self) -> i64 {
        self.lowest_power + self.coefficients.len() as i64 - 1
    }

    pub fn negate(&self) -> Self {
        EpsJet {
            lowest_power: self.lowest_power,
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            upper: self.upper,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::exact_zero();
        }
        EpsJet {
            lowest_power: self.lowest_power,
            coefficients: self.coefficients.iter().map(|c| c * r).collect(),
            upper: self.upper,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let upper = self.upper_or_unbounded().min(rhs.upper_or_unbounded());
        let upper_opt = (upper < UNBOUNDED).then_some(upper);
        let lo = self.valuation().min(rhs.valuation());
        let hi = match upper_opt {
            Some(h) => h,
            None => self.top_stored_power().max(rhs.top_stored_power()),
        };
        if lo > hi {
            return match upper_opt {
                Some(h) => Self::zero_to(h),
                None => Self::exact_zero(),
            };
        }
        let coefficients = (lo..=hi).map(|k| self.get(k) + rhs.get(k)).collect();
        Self::from_parts(lo, coefficients, upper_opt)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.negate())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let exact_zero = |j: &Self| j.upper.is_none() && j.coefficients.is_empty();
        if exact_zero(self) || exact_zero(rhs) {
            return Self::exact_zero();
        }
        let (va, vb) = (self.valuation(), rhs.valuation());
        let from_a = self.upper.map_or(UNBOUNDED, |h| h + vb);
        let from_b = rhs.upper.map_or(UNBOUNDED, |h| h + va);
        let upper = from_a.min(from_b);
        let upper_opt = (upper < UNBOUNDED).then_some(upper);
        if self.coefficients.is_empty() || rhs.coefficients.is_empty() {
            return Self::zero_to(upper);
        }

        let lo = va + vb;
        let (la, lb) = (self.coefficients.len(), rhs.coefficients.len());
        let len = match upper_opt {
            Some(h) if h < lo => return Self::zero_to(h),
            Some(h) => (h - lo + 1) as usize,
            None => la + lb - 1,
        };
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = Rational::zero();
            let start = k.saturating_sub(lb - 1);
            for i in start..=k.min(la - 1) {
                acc += &self.coefficients[i] * &rhs.coefficients[k - i];
            }
            out.push(acc);
        }
        Self::from_parts(lo, out, upper_opt)
    }

    /// Multiplicative inverse as a Laurent jet.
    ///
    /// The result keeps the relative window width, so its lowest power is the
    /// negated lowest power of `self`. Exact polynomials with more than one
    /// term have no finite inverse and must be truncated first.
    pub fn invert(&self) -> Result<Self> {
        if self.coefficients.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let lo = self.lowest_power;
        let Some(h) = self.upper else {
            if self.coefficients.len() == 1 {
                return Ok(Self::monomial(self.coefficients[0].recip(), -lo));
            }
            return Err(Error::domain(
                "inverse of an exact multi-term jet needs a truncation window",
            ));
        };
        let width = (h - lo) as usize;
        let u = &self.coefficients;
        let u0_inv = u[0].recip();
        let mut w: Vec<Rational> = Vec::with_capacity(width + 1);
        w.push(u0_inv.clone());
        for k in 1..=width {
            let mut acc = Rational::zero();
            for j in 1..=k.min(u.len() - 1) {
                acc += &u[j] * &w[k - j];
            }
            w.push(-(acc * &u0_inv));
        }
        Ok(Self::from_parts(-lo, w, Some(-lo + width as i64)))
    }

    /// `exp(self)` for a jet with no constant term and no negative powers.
    pub fn exp(&self) -> Result<Self> {
        if let Some(lo) = self.lowest_power() {
            if lo < 1 {
                return Err(Error::domain(
                    "exponential needs a jet without negative powers or constant term",
                ));
            }
        }
        let Some(h) = self.upper else {
            if self.coefficients.is_empty() {
                return Ok(Self::constant(Rational::one()));
            }
            return Err(Error::domain(
                "exponential of an exact jet needs a truncation window",
            ));
        };
        if h < 0 {
            return Ok(Self::zero_to(h));
        }
        let h = h as usize;
        let mut e: Vec<Rational> = Vec::with_capacity(h + 1);
        e.push(Rational::one());
        for k in 1..=h {
            let mut acc = Rational::zero();
            for j in 1..=k {
                let a = self.get(j as i64);
                if !a.is_zero() {
                    acc += a * Rational::from_integer(j.into()) * &e[k - j];
                }
            }
            e.push(acc / Rational::from_integer(k.into()));
        }
        Ok(Self::from_parts(0, e, Some(h as i64)))
    }

    /// `ln(self)` for a jet of the form `1 + O(ε)`.
    pub fn ln(&self) -> Result<Self> {
        if self.lowest_power() != Some(0) || !self.coefficients[0].is_one() {
            return Err(Error::domain("logarithm needs a jet of the form 1 + O(ε)"));
        }
        let Some(h) = self.upper else {
            if self.coefficients.len() == 1 {
                return Ok(Self::exact_zero());
            }
            return Err(Error::domain(
                "logarithm of an exact jet needs a truncation window",
            ));
        };
        let h = h as usize;
        let mut l: Vec<Rational> = vec![Rational::zero(); h + 1];
        for k in 1..=h {
            let mut acc = self.get(k as i64) * Rational::from_integer(k.into());
            for (j, lj) in l.iter().enumerate().take(k).skip(1) {
                acc -= lj * Rational::from_integer(j.into()) * self.get((k - j) as i64);
            }
            l[k] = acc / Rational::from_integer(k.into());
        }
        Ok(Self::from_parts(0, l, Some(h as i64)))
    }
}

impl fmt::Display for EpsJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in self.terms().filter(|(_, c)| !c.is_zero()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match p {
                0 => write!(f, "{}", format_rational(c))?,
                _ => write!(f, "({})ε^{}", format_rational(c), p)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        if let Some(h) = self.upper {
            write!(f, " + O(ε^{})", h + 1)?;
        }
        Ok(())
    }
}
