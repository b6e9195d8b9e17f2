//! Schröder solver and the quantities derived from a conjugacy.
//!
//! For a map `f1` fixed at the origin with multiplier `s`, [`solve_psi`]
//! produces `Ψ` (normalized so `Ψ'(0) = 1`) and `Φ = Ψ⁻¹`. Everything else
//! follows from the pair: the flow `f_t = Φ(sᵗΨ)`, the velocity
//! `v = ln s · Ψ/Ψ'` and the potential `V = -v²`.

use std::fmt::Debug;
use std::ops::Add;

use num_traits::{Signed, ToPrimitive};

use crate::coefficients::{exact_pow, Domain, format_rational, rational, Coeff, EpsJet, Rational};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// A map presented as a series around its fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec<C> {
    f1: TruncatedSeries<C>,
    s: C,
    x0: f64,
}

impl<C: Coeff> MapSpec<C> {
    /// `f1` in coordinates centered on the fixed point; the multiplier is
    /// read off its linear coefficient.
    pub fn new(f1: TruncatedSeries<C>) -> Result<Self> {
        let c0 = &f1.coefficients()[0];
        if !c0.is_zero() {
            return Err(Error::NoFixedPoint(format!("{c0:?}")));
        }
        let s = f1
            .coeff(1)
            .cloned()
            .ok_or_else(|| Error::domain("map series needs order >= 1"))?;
        Ok(MapSpec { f1, s, x0: 0.0 })
    }

    /// Records the fixed point's position in the original coordinates.
    pub fn with_shift(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn f1(&self) -> &TruncatedSeries<C> {
        &self.f1
    }

    pub fn multiplier(&self) -> &C {
        &self.s
    }

    pub fn shift(&self) -> f64 {
        self.x0
    }
}

/// `Ψ` and `Φ = Ψ⁻¹` for one map, both to the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyPair<C> {
    pub psi: TruncatedSeries<C>,
    pub phi: TruncatedSeries<C>,
    pub s: C,
    pub order: usize,
}

/// Solves `s·Ψ(x) = Ψ(f1(x))` by coefficient matching,
/// `c_n (sⁿ - s) = -[xⁿ] Σ_{m<n} c_m f1(x)^m`, with `c_1 = 1`.
pub fn solve_psi<C: Coeff>(map: &MapSpec<C>, order: usize) -> Result<ConjugacyPair<C>> {
    if order == 0 {
        return Err(Error::domain("order must be at least 1"));
    }
    let f1 = map.f1.truncate(order)?;
    let s = map.s.clone();

    // Resonance is checked for every k up front, even when the map is linear.
    let mut s_pow = s.clone();
    let mut s_powers = vec![C::one(), s.clone()];
    for k in 2..=order {
        s_pow = s_pow.mul(&s);
        if s_pow.sub(&s).is_zero() {
            return Err(Error::Resonance { k });
        }
        s_powers.push(s_pow.clone());
    }

    let linear = f1.coefficients()[2..].iter().all(Coeff::is_zero);
    let psi = if linear {
        TruncatedSeries::identity(order)
    } else {
        let mut c: Vec<C> = vec![C::zero(), C::one()];
        // powers[m] = f1^m
        let mut powers = vec![TruncatedSeries::constant(C::one(), order), f1.clone()];
        for n in 2..=order {
            let mut acc = C::zero();
            for m in 1..n {
                let term = &powers[m].coefficients()[n];
                if !term.is_zero() && !c[m].is_zero() {
                    acc = acc.add(&c[m].mul(term));
                }
            }
            let denom = s_powers[n].sub(&s);
            c.push(acc.neg().mul(&denom.try_inv()?));
            if n < order {
                powers.push(powers[n - 1].mul(&f1));
            }
        }
        TruncatedSeries::new(c)?
    };
    let phi = if C::DOMAIN == Domain::Float && !linear {
        solve_phi(&f1, &s_powers)?
    } else {
        psi.revert()?
    };
    Ok(ConjugacyPair {
        psi,
        phi,
        s,
        order,
    })
}

/// `Φ` from the Poincaré equation `Φ(sx) = f1(Φ(x))`:
/// `Φ_n (sⁿ - s) = [xⁿ] Σ_{m≥2} f_m Φ^m`, with `Φ_1 = 1`.
///
/// Used for floats, where Lagrange inversion of `Ψ` loses several digits to
/// cancellation at moderate orders.
fn solve_phi<C: Coeff>(f1: &TruncatedSeries<C>, s_powers: &[C]) -> Result<TruncatedSeries<C>> {
    let order = f1.order();
    let s = &s_powers[1];
    let mut phi = TruncatedSeries::identity(order).into_coefficients();
    // f1 without its linear part
    let mut higher = f1.clone().into_coefficients();
    higher[1] = C::zero();
    let higher = TruncatedSeries::new(higher)?;
    for n in 2..=order {
        let partial = TruncatedSeries::new(phi[..=n].to_vec())?;
        let rhs = higher.truncate(n)?.compose(&partial)?;
        phi[n] = rhs.coefficients()[n].mul(&s_powers[n].sub(s).try_inv()?);
    }
    TruncatedSeries::new(phi)
}

/// Domain-specific handling of `sᵗ` and `ln s`.
pub trait FlowDomain: Coeff {
    type Time: Clone + Debug + PartialEq + Add<Output = Self::Time> + Send + Sync;

    /// `sᵗ`, or [`Error::NotRepresentable`] when the domain cannot hold it.
    fn multiplier_power(s: &Self, t: &Self::Time) -> Result<Self>;

    /// `ln s`.
    fn log_multiplier(s: &Self) -> Result<Self>;

    fn time_from_rational(t: &Rational) -> Self::Time;
}

impl FlowDomain for Rational {
    type Time = Rational;

    fn multiplier_power(s: &Self, t: &Rational) -> Result<Self> {
        if t.is_integer() {
            let e = t
                .to_integer()
                .to_i32()
                .ok_or_else(|| Error::Overflow(format!("time {t} too large")))?;
            if e >= 0 {
                return Ok(Coeff::pow(s, e as u32));
            }
            return Coeff::pow(s, e.unsigned_abs()).try_inv();
        }
        exact_pow(s, t)?.ok_or_else(|| {
            Error::NotRepresentable(format!("{}^({})", format_rational(s), format_rational(t)))
        })
    }

    fn log_multiplier(s: &Self) -> Result<Self> {
        if s.is_one() {
            return Ok(<Rational as Coeff>::zero());
        }
        Err(Error::NotRepresentable(format!("ln({})", format_rational(s))))
    }

    fn time_from_rational(t: &Rational) -> Rational {
        t.clone()
    }
}

impl FlowDomain for f64 {
    type Time = f64;

    fn multiplier_power(s: &Self, t: &f64) -> Result<Self> {
        let v = if t.fract() == 0.0 && t.abs() < i32::MAX as f64 {
            s.powi(*t as i32)
        } else {
            s.powf(*t)
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("{s}^{t} is not a finite real")))
        }
    }

    fn log_multiplier(s: &Self) -> Result<Self> {
        if *s > 0.0 {
            Ok(s.ln())
        } else {
            Err(Error::domain(format!("ln({s}) is not real")))
        }
    }

    fn time_from_rational(t: &Rational) -> f64 {
        ToPrimitive::to_f64(t).unwrap_or(f64::NAN)
    }
}

impl FlowDomain for EpsJet {
    type Time = Rational;

    fn multiplier_power(s: &Self, t: &Rational) -> Result<Self> {
        s.ln()?.scale(t).exp()
    }

    fn log_multiplier(s: &Self) -> Result<Self> {
        s.ln()
    }

    fn time_from_rational(t: &Rational) -> Rational {
        t.clone()
    }
}

impl<C: FlowDomain> ConjugacyPair<C> {
    /// `f_t = Φ(sᵗ·Ψ)` to the pair's order.
    pub fn flow(&self, t: &C::Time) -> Result<TruncatedSeries<C>> {
        let st = C::multiplier_power(&self.s, t)?;
        self.phi.compose(&self.psi.scale(&st))
    }

    /// `Ψ/Ψ'`, the velocity with the factor `ln s` removed.
    pub fn velocity_over_log(&self) -> Result<TruncatedSeries<C>> {
        let reduced = self.psi.shift_down()?;
        Ok(reduced.div(&self.psi.derivative())?.shift_up())
    }

    /// `v = ln s · Ψ/Ψ'`, the `t`-derivative of the flow at `t = 0`.
    pub fn velocity(&self) -> Result<TruncatedSeries<C>> {
        Ok(self
            .velocity_over_log()?
            .scale(&C::log_multiplier(&self.s)?))
    }
}

/// `f_t` truncated at `order` (at most the pair's order).
pub fn flow_series<C: FlowDomain>(
    pair: &ConjugacyPair<C>,
    t: &C::Time,
    order: usize,
) -> Result<TruncatedSeries<C>> {
    pair.flow(t)?.truncate(order)
}

pub fn velocity_series<C: FlowDomain>(pair: &ConjugacyPair<C>) -> Result<TruncatedSeries<C>> {
    pair.velocity()
}

/// `V = -v²`, or `-(m/2)·v²` when a mass is given.
pub fn potential_series<C: Coeff>(
    v: &TruncatedSeries<C>,
    mass: Option<&C>,
) -> TruncatedSeries<C> {
    let v2 = v.mul(v);
    match mass {
        None => v2.neg(),
        Some(m) => v2.scale(&m.mul_rational(&rational(-1, 2))),
    }
}

/// Jet window used when the multiplier is `s = e^ε`.
///
/// `Ψ`'s `xⁿ` coefficient has a pole of order at most `n - 1`, and every
/// division by `sⁿ - s` costs one order of `ε` at the top of the window. The
/// multiplier is generated `order + 1` orders beyond `regular`, which leaves
/// flow and velocity coefficients known through `ε^regular` after the poles
/// cancel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetWindow {
    pub regular: i64,
}

impl Default for JetWindow {
    fn default() -> Self {
        JetWindow { regular: 2 }
    }
}

impl JetWindow {
    pub fn new(regular: i64) -> Self {
        JetWindow { regular }
    }

    /// Deepest pole carried by an order-`order` solution.
    pub fn principal_depth(&self, order: usize) -> i64 {
        order as i64 - 1
    }

    /// Precision to which `s = e^ε` is generated.
    pub fn base_precision(&self, order: usize) -> i64 {
        self.regular + order as i64 + 1
    }
}

/// `s·g(x)` with `s = e^ε`, for a map `g` with `g(0) = 0` and `g'(0) = 1`.
///
/// This is the augmentation that makes a parabolic map (multiplier 1)
/// solvable: every quantity is computed as a Laurent jet in `ε` and the
/// limit `s → 1` is read off at the end.
pub fn eps_jet_map(
    g: &TruncatedSeries<Rational>,
    order: usize,
    window: JetWindow,
) -> Result<MapSpec<EpsJet>> {
    if !g.coefficients()[0].is_zero() {
        return Err(Error::NoFixedPoint(format_rational(&g.coefficients()[0])));
    }
    if !g.coeff(1).is_some_and(|c| c.is_one()) {
        return Err(Error::domain(
            "eps-jet mode needs a map with unit linear coefficient",
        ));
    }
    let g = g.truncate(order)?;
    let s = EpsJet::epsilon(window.base_precision(order)).exp()?;
    let f1 = g.map(|c| s.scale(c));
    MapSpec::new(f1)
}

/// Solves a parabolic map in the jet domain; see [`eps_jet_map`].
pub fn solve_psi_eps(
    g: &TruncatedSeries<Rational>,
    order: usize,
    window: JetWindow,
) -> Result<ConjugacyPair<EpsJet>> {
    solve_psi(&eps_jet_map(g, order, window)?, order)
}

/// The `ε^power` coefficient of every jet in a series.
///
/// Fails if any jet does not know that power.
pub fn eps_coefficient(
    series: &TruncatedSeries<EpsJet>,
    power: i64,
) -> Result<TruncatedSeries<Rational>> {
    series.try_map(|j| {
        j.coefficient(power).ok_or_else(|| {
            Error::InternalConsistency(format!(
                "jet {j} does not reach ε^{power}; widen the jet window"
            ))
        })
    })
}

/// Asserts that every coefficient's Laurent principal part cancelled exactly
/// and returns the `ε⁰` part.
pub fn regular_limit(series: &TruncatedSeries<EpsJet>) -> Result<TruncatedSeries<Rational>> {
    for (n, j) in series.coefficients().iter().enumerate() {
        if let Some(lo) = j.lowest_power() {
            if lo < 0 {
                return Err(Error::InternalConsistency(format!(
                    "pole ε^{lo} survives in the x^{n} coefficient: {j}"
                )));
            }
        }
    }
    eps_coefficient(series, 0)
}

/// `lim_{s→1} f_t` as an exact rational series.
pub fn flow_limit_s_to_1(
    pair: &ConjugacyPair<EpsJet>,
    t: &Rational,
) -> Result<TruncatedSeries<Rational>> {
    regular_limit(&pair.flow(t)?)
}

/// `lim_{s→1} v` as an exact rational series.
pub fn velocity_limit_s_to_1(pair: &ConjugacyPair<EpsJet>) -> Result<TruncatedSeries<Rational>> {
    regular_limit(&pair.velocity()?)
}

/// Koenigs' limit `Ψ(x) ≈ (y_N - x0) / λ^N`, where `y_{k+1} = step(y_k)` is
/// the branch of the map that contracts toward `x0` with rate `λ`.
///
/// For `|s| > 1` pass the backward step `f_{-1}` (then `λ = 1/s`); for
/// `|s| < 1` pass `f1` itself (`λ = s`). Error decays like `λ^N`.
pub fn koenigs_estimate(
    s: f64,
    x0: f64,
    x: f64,
    iterations: u32,
    step: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if s.abs() == 1.0 || s == 0.0 {
        return Err(Error::domain("Koenigs limit needs |s| != 0, 1"));
    }
    let contraction = if s.abs() > 1.0 { 1.0 / s } else { s };
    let mut y = x;
    for _ in 0..iterations {
        y = step(y)?;
        if !y.is_finite() {
            return Err(Error::domain(format!("iterate left the real domain from x = {x}")));
        }
    }
    Ok((y - x0) / contraction.powi(iterations as i32))
}

/// Flow-composition pairs checked by default, filtered by representability.
pub fn default_composition_times() -> Vec<(Rational, Rational)> {
    vec![
        (rational(1, 1), rational(-1, 1)),
        (rational(1, 2), rational(1, 2)),
        (rational(2, 1), rational(1, 1)),
        (rational(1, 3), rational(2, 3)),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualCheck {
    pub name: String,
    /// Largest coefficient magnitude of the residual.
    pub max_residual: f64,
    /// `max_residual` over the largest coefficient of the compared series.
    pub relative: f64,
    pub exact_zero: bool,
    /// Lowest power with a nonzero residual coefficient.
    pub first_nonzero_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub order: usize,
    pub domain: String,
    pub checks: Vec<ResidualCheck>,
    /// Checks that could not run, with the reason.
    pub skipped: Vec<String>,
}

impl ResidualReport {
    pub fn all_exact_zero(&self) -> bool {
        self.checks.iter().all(|c| c.exact_zero)
    }

    pub fn max_relative(&self) -> f64 {
        self.checks.iter().map(|c| c.relative).fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&ResidualCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn residual<C: Coeff>(
    name: String,
    lhs: &TruncatedSeries<C>,
    rhs: &TruncatedSeries<C>,
) -> ResidualCheck {
    let diff = lhs.sub(rhs);
    let max_residual = diff.coefficients().iter().map(Coeff::magnitude).fold(0.0, f64::max);
    let scale = lhs
        .coefficients()
        .iter()
        .chain(rhs.coefficients())
        .map(Coeff::magnitude)
        .fold(0.0, f64::max);
    let first_nonzero_order = diff.coefficients().iter().position(|c| !c.is_zero());
    ResidualCheck {
        name,
        max_residual,
        relative: if scale > 0.0 { max_residual / scale } else { max_residual },
        exact_zero: first_nonzero_order.is_none(),
        first_nonzero_order,
    }
}

/// Residuals of the Schröder, Poincaré, inverse and flow-composition
/// identities, each to the pair's order.
pub fn check_conjugacy<C: FlowDomain>(
    pair: &ConjugacyPair<C>,
    map: &MapSpec<C>,
    times: &[(Rational, Rational)],
) -> Result<ResidualReport> {
    let order = pair.order;
    let f1 = map.f1.truncate(order)?;
    let id = TruncatedSeries::identity(order);
    let mut checks = vec![
        residual(
            "schroeder".into(),
            &pair.psi.scale(&pair.s),
            &pair.psi.compose(&f1)?,
        ),
        residual(
            "poincare".into(),
            &pair.phi.compose(&id.scale(&pair.s))?,
            &f1.compose(&pair.phi)?,
        ),
        residual("inverse".into(), &pair.phi.compose(&pair.psi)?, &id),
    ];
    let mut skipped = Vec::new();
    match pair.flow(&C::time_from_rational(&<Rational as Coeff>::one())) {
        Ok(f) => checks.push(residual("flow_at_one".into(), &f, &f1)),
        Err(e) => skipped.push(format!("flow_at_one: {e}")),
    }

    for (t1, t2) in times {
        let name = format!("composition({},{})", format_rational(t1), format_rational(t2));
        let tt1 = C::time_from_rational(t1);
        let tt2 = C::time_from_rational(t2);
        let flows = (|| -> Result<_> {
            let a = pair.flow(&tt1)?;
            let b = pair.flow(&tt2)?;
            let ab = pair.flow(&(tt1.clone() + tt2.clone()))?;
            Ok((a, b, ab))
        })();
        match flows {
            Ok((a, b, ab)) => checks.push(residual(name, &a.compose(&b)?, &ab)),
            Err(Error::NotRepresentable(what)) => {
                skipped.push(format!("{name}: {what} not representable"))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ResidualReport {
        order,
        domain: C::DOMAIN.to_string(),
        checks,
        skipped,
    })
}

/// `q_n = [xⁿ]Φ · (n-1)! · Π_{k<n} (1 - sᵏ)`, the numerator polynomial of the
/// inverse series evaluated at `s`.
pub fn extract_numerator(phi: &TruncatedSeries<Rational>, n: usize, s: &Rational) -> Option<Rational> {
    let c = phi.coeff(n)?;
    let mut scale: Rational = (1..n).map(|k| Rational::from_integer(k.into())).product();
    for k in 1..n {
        scale *= <Rational as Coeff>::one() - Coeff::pow(s, k as u32);
    }
    Some(c * scale)
}

/// True when `s` is usable for an exact solve (`s ∉ {0, 1, -1}` for rationals).
pub fn is_nonresonant_rational(s: &Rational) -> bool {
    !(s.is_zero() || s.abs().is_one())
}
