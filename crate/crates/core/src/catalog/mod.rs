//! Built-in maps with known conjugacies.
//!
//! Every entry works in two coordinate systems. Closed forms (`f1`, `psi`,
//! `phi`, `trajectory`, `backward_step`) take and return original
//! coordinates; series builders return the map re-centered on its fixed
//! point `x0`.
//!
//! Times passed to [`CatalogEntry::trajectory`] count applications of `f1`.
//! The physical time of the potential tables is `t = τ·tau_scale`.

mod ricker;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coefficients::{rational, Rational};
use crate::engine::{koenigs_estimate, MapSpec};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

pub use ricker::{
    lambertw_eval, lambertw_series, pn_structural_terms, ricker_integer_iterate, ricker_pn,
    ricker_psi_from_pn, ricker_qn_values, IterateChain, PnPolynomial, StructuralTerm,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapId {
    SchroderExample,
    Ricker,
    Quadratic,
    Quartic,
    Sextic,
}

impl MapId {
    pub const ALL: [MapId; 5] = [
        MapId::SchroderExample,
        MapId::Ricker,
        MapId::Quadratic,
        MapId::Quartic,
        MapId::Sextic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MapId::SchroderExample => "schroder-example",
            MapId::Ricker => "ricker",
            MapId::Quadratic => "quadratic",
            MapId::Quartic => "quartic",
            MapId::Sextic => "sextic",
        }
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MapId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownMap(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    id: MapId,
    /// Multiplier of the Ricker family; unused by the other entries.
    ricker_s: Rational,
}

/// Looks up a catalog entry by id. The Ricker entry uses `s = 2`.
pub fn catalog_lookup(id: &str) -> Result<CatalogEntry> {
    Ok(CatalogEntry::new(id.parse()?))
}

fn check_real(value: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(what()))
    }
}

fn factorial_ratio(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * rational(k as i64, 1))
}

/// `c·(1 + a·x²)^(-1/2)·x`, the odd series shared by the sextic's steps.
fn odd_root_series(order: usize, c: Rational, a: Rational) -> TruncatedSeries<Rational> {
    // (1 + a y)^(-1/2) = Σ binom(2k,k) (-a/4)^k y^k
    let mut term = c;
    let ratio = -a / rational(4, 1);
    TruncatedSeries::from_fn(order, |n| {
        if n % 2 == 0 {
            return Rational::zero();
        }
        let k = (n - 1) / 2;
        if k > 0 {
            term = &term * rational((2 * k * (2 * k - 1)) as i64, (k * k) as i64) * &ratio;
        }
        term.clone()
    })
}

impl CatalogEntry {
    pub fn new(id: MapId) -> Self {
        CatalogEntry {
            id,
            ricker_s: rational(2, 1),
        }
    }

    /// The map `s·x·eˣ`.
    pub fn ricker(s: Rational) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::domain("Ricker multiplier must be nonzero"));
        }
        Ok(CatalogEntry {
            id: MapId::Ricker,
            ricker_s: s,
        })
    }

    pub fn id(&self) -> MapId {
        self.id
    }

    pub fn description(&self) -> String {
        match self.id {
            MapId::SchroderExample => "f(x) = 2x(1+x), Psi = ln(1+2x)/2".into(),
            MapId::Ricker => format!("f(x) = s x e^x with s = {}", self.ricker_s),
            MapId::Quadratic => "f(x) = 2x, v = x, V = -x^2".into(),
            MapId::Quartic => "f(x) = (2x+1)/(x+2) about x0 = 1, v = 1 - x^2".into(),
            MapId::Sextic => "f(x) = sqrt2 x / sqrt(1+x^2), v = x(1 - x^2)".into(),
        }
    }

    /// Multiplier `f1'(x0)`.
    pub fn s(&self) -> f64 {
        match self.id {
            MapId::Sextic => std::f64::consts::SQRT_2,
            _ => ToPrimitive::to_f64(&self.exact_multiplier().expect("rational multiplier"))
                .unwrap_or(f64::NAN),
        }
    }

    /// The exact multiplier when it is rational.
    pub fn exact_multiplier(&self) -> Option<Rational> {
        match self.id {
            MapId::SchroderExample | MapId::Quadratic => Some(rational(2, 1)),
            MapId::Ricker => Some(self.ricker_s.clone()),
            MapId::Quartic => Some(rational(1, 3)),
            MapId::Sextic => None,
        }
    }

    pub fn x0(&self) -> f64 {
        match self.id {
            MapId::Quartic => 1.0,
            _ => 0.0,
        }
    }

    /// Physical time per application of `f1`.
    pub fn tau_scale(&self) -> f64 {
        match self.id {
            MapId::Quadratic => 2f64.ln(),
            MapId::Quartic => 0.5 * 3f64.ln(),
            MapId::Sextic => 0.5 * 2f64.ln(),
            MapId::SchroderExample | MapId::Ricker => 1.0,
        }
    }

    /// Number of `f1` steps represented by [`CatalogEntry::exact_map`].
    ///
    /// The sextic's own multiplier is `√2`; its two-step map
    /// `2x/√(1+3x²)` has rational coefficients and the same `Ψ`.
    pub fn exact_step(&self) -> Rational {
        match self.id {
            MapId::Sextic => rational(2, 1),
            _ => Rational::one(),
        }
    }

    /// Interval on which the closed forms are sampled by checks.
    pub fn sample_domain(&self) -> (f64, f64) {
        match self.id {
            MapId::SchroderExample => (-0.45, 1.0),
            MapId::Ricker => (-0.9, 1.0),
            MapId::Quadratic => (-1.0, 1.0),
            MapId::Quartic => (0.0, 3.0),
            MapId::Sextic => (-0.9, 0.9),
        }
    }

    pub fn has_closed_conjugacy(&self) -> bool {
        self.id != MapId::Ricker
    }

    pub fn f1(&self, x: f64) -> Result<f64> {
        let y = match self.id {
            MapId::SchroderExample => 2.0 * x * (1.0 + x),
            MapId::Ricker => self.s() * x * x.exp(),
            MapId::Quadratic => 2.0 * x,
            MapId::Quartic => (2.0 * x + 1.0) / (x + 2.0),
            MapId::Sextic => std::f64::consts::SQRT_2 * x / (1.0 + x * x).sqrt(),
        };
        check_real(y, || format!("{}: f1({x}) undefined", self.id))
    }

    fn no_closed_form(&self, what: &str) -> Error {
        Error::NotRepresentable(format!("{} has no closed-form {what}", self.id))
    }

    pub fn psi(&self, x: f64) -> Result<f64> {
        let y = match self.id {
            MapId::SchroderExample => 0.5 * (2.0 * x).ln_1p(),
            MapId::Ricker => return Err(self.no_closed_form("Psi")),
            MapId::Quadratic => x,
            MapId::Quartic => 2.0 * (x - 1.0) / (x + 1.0),
            MapId::Sextic => x / (1.0 - x * x).sqrt(),
        };
        check_real(y, || format!("{}: Psi({x}) undefined", self.id))
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        let y = match self.id {
            MapId::SchroderExample => 0.5 * (2.0 * x).exp_m1(),
            MapId::Ricker => return Err(self.no_closed_form("Psi inverse")),
            MapId::Quadratic => x,
            MapId::Quartic => (2.0 + x) / (2.0 - x),
            MapId::Sextic => x / (1.0 + x * x).sqrt(),
        };
        check_real(y, || format!("{}: Psi^-1({x}) undefined", self.id))
    }

    /// `f_τ(x)` from the closed-form trajectory.
    pub fn trajectory(&self, x: f64, tau: f64) -> Result<f64> {
        let t = tau * self.tau_scale();
        let y = match self.id {
            MapId::SchroderExample => {
                if 1.0 + 2.0 * x < 0.0 {
                    // real only where 2^τ is an integer, i.e. forward integer steps
                    if tau >= 0.0 && tau.fract() == 0.0 && tau < 31.0 {
                        0.5 * ((1.0 + 2.0 * x).powi(1 << tau as i32) - 1.0)
                    } else {
                        f64::NAN
                    }
                } else {
                    0.5 * (2f64.powf(tau) * (2.0 * x).ln_1p()).exp_m1()
                }
            }
            MapId::Ricker => return Err(self.no_closed_form("trajectory")),
            MapId::Quadratic => x * t.exp(),
            MapId::Quartic => {
                let e = (2.0 * t).exp();
                (x - 1.0 + (x + 1.0) * e) / (1.0 - x + (x + 1.0) * e)
            }
            MapId::Sextic => {
                let e = t.exp();
                x * e / (1.0 - x * x + x * x * e * e).sqrt()
            }
        };
        check_real(y, || format!("{}: trajectory({x}, {tau}) undefined", self.id))
    }

    /// `f_{-1}(x)`, the branch through the fixed point.
    pub fn backward_step(&self, x: f64) -> Result<f64> {
        let y = match self.id {
            MapId::SchroderExample => {
                let w = 1.0 + 2.0 * x;
                if w < 0.0 {
                    return Err(Error::domain(format!("1 + 2x < 0 at x = {x}")));
                }
                x / (w.sqrt() + 1.0)
            }
            MapId::Ricker => lambertw_eval(x / self.s())?,
            MapId::Quadratic => 0.5 * x,
            MapId::Quartic => (2.0 * x - 1.0) / (2.0 - x),
            MapId::Sextic => {
                let w = 2.0 - x * x;
                if w <= 0.0 {
                    return Err(Error::domain(format!("x^2 >= 2 at x = {x}")));
                }
                x / w.sqrt()
            }
        };
        check_real(y, || format!("{}: f_-1({x}) undefined", self.id))
    }

    /// `f1` in coordinates centered on `x0`.
    pub fn f1_centered(&self, u: f64) -> Result<f64> {
        match self.id {
            MapId::Quartic => check_real(u / (3.0 + u), || format!("quartic: f1 at u = {u}")),
            _ => self.f1(u),
        }
    }

    /// `f_{-1}` in coordinates centered on `x0`.
    pub fn backward_centered(&self, u: f64) -> Result<f64> {
        match self.id {
            MapId::Quartic => {
                check_real(3.0 * u / (1.0 - u), || format!("quartic: f_-1 at u = {u}"))
            }
            _ => self.backward_step(u),
        }
    }

    /// Koenigs' estimate of `Ψ(x)`, iterating whichever of `f1` and `f_{-1}`
    /// contracts toward `x0`. Iteration runs in centered coordinates so the
    /// shrinking offset keeps full relative precision.
    pub fn koenigs(&self, x: f64, iterations: u32) -> Result<f64> {
        let s = self.s();
        let u = x - self.x0();
        if s.abs() > 1.0 {
            koenigs_estimate(s, 0.0, u, iterations, |y| self.backward_centered(y))
        } else {
            koenigs_estimate(s, 0.0, u, iterations, |y| self.f1_centered(y))
        }
    }

    /// Relative residual of `Ψ(f1(y)) = s·Ψ(y)` at one point.
    pub fn schroeder_identity_residual(&self, y: f64) -> Result<f64> {
        let lhs = self.psi(self.f1(y)?)?;
        let rhs = self.s() * self.psi(y)?;
        let scale = lhs.abs().max(rhs.abs());
        Ok(if scale == 0.0 {
            0.0
        } else {
            (lhs - rhs).abs() / scale
        })
    }

    /// Centered series of the map advanced by [`CatalogEntry::exact_step`]
    /// steps, with rational coefficients.
    pub fn exact_series(&self, order: usize) -> TruncatedSeries<Rational> {
        match self.id {
            MapId::SchroderExample => TruncatedSeries::from_fn(order, |n| match n {
                1 | 2 => rational(2, 1),
                _ => Rational::zero(),
            }),
            MapId::Ricker => TruncatedSeries::from_fn(order, |n| {
                if n == 0 {
                    Rational::zero()
                } else {
                    &self.ricker_s / factorial_ratio(n - 1)
                }
            }),
            MapId::Quadratic => TruncatedSeries::from_fn(order, |n| {
                if n == 1 {
                    rational(2, 1)
                } else {
                    Rational::zero()
                }
            }),
            // y/(3+y) = Σ (-1)^(n-1) yⁿ/3ⁿ
            MapId::Quartic => {
                let mut term = rational(-1, 1);
                TruncatedSeries::from_fn(order, |n| {
                    if n == 0 {
                        return Rational::zero();
                    }
                    term = &term * rational(-1, 3);
                    term.clone()
                })
            }
            MapId::Sextic => odd_root_series(order, rational(2, 1), rational(3, 1)),
        }
    }

    pub fn exact_map(&self, order: usize) -> Result<MapSpec<Rational>> {
        Ok(MapSpec::new(self.exact_series(order))?.with_shift(self.x0()))
    }

    /// Centered series of `f1` itself in floating point.
    pub fn float_series(&self, order: usize) -> Result<TruncatedSeries<f64>> {
        match self.id {
            MapId::Sextic => {
                let unit = odd_root_series(order, Rational::one(), Rational::one());
                Ok(unit.to_f64()?.scale(&std::f64::consts::SQRT_2))
            }
            _ => self.exact_series(order).to_f64(),
        }
    }

    pub fn float_map(&self, order: usize) -> Result<MapSpec<f64>> {
        Ok(MapSpec::new(self.float_series(order)?)?.with_shift(self.x0()))
    }

    /// `f1/s` for the Ricker family (`x·eˣ`), the unit-multiplier map used in
    /// the `s → 1` limit. Other entries have no such member.
    pub fn unit_series(&self, order: usize) -> Option<TruncatedSeries<Rational>> {
        (self.id == MapId::Ricker).then(|| {
            TruncatedSeries::from_fn(order, |n| {
                if n == 0 {
                    Rational::zero()
                } else {
                    factorial_ratio(n - 1).recip()
                }
            })
        })
    }

    /// Human-readable multiplier, e.g. `"2/1"` or `"sqrt(2)"`.
    pub fn s_descriptor(&self) -> String {
        match self.exact_multiplier() {
            Some(s) => crate::coefficients::format_rational(&s),
            None => "sqrt(2)".into(),
        }
    }
}

/// True when `s` is a usable Ricker multiplier for exact solves.
pub fn ricker_s_is_regular(s: &Rational) -> bool {
    !(s.is_zero() || s.abs().is_one())
}
