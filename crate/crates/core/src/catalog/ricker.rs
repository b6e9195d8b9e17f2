//! Exact structures of the map `s·x·eˣ`: the `p_n` polynomials, Lambert W and
//! the nested-exponential integer iterates of `x·eˣ`.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coefficients::Rational;
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// `p_n(s)` stored by ascending power of `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PnPolynomial {
    pub n: usize,
    pub coefficients: Vec<Rational>,
}

impl PnPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, power: usize) -> Rational {
        self.coefficients
            .get(power)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> &Rational {
        self.coefficients.last().expect("polynomial is never empty")
    }

    pub fn eval(&self, s: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * s + c)
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + ToPrimitive::to_f64(c).unwrap_or(f64::NAN))
    }
}

impl std::fmt::Display for PnPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 if a.is_one() => f.write_str("s")?,
                1 => write!(f, "{a}s")?,
                _ if a.is_one() => write!(f, "s^{k}")?,
                _ => write!(f, "{a}s^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

type Poly = Vec<Rational>;

fn poly_mul(a: &[Rational], b: &[Rational]) -> Poly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_scaled(acc: &mut Poly, p: &[Rational], scale: &Rational) {
    if acc.len() < p.len() {
        acc.resize(p.len(), Rational::zero());
    }
    for (a, c) in acc.iter_mut().zip(p) {
        *a += c * scale;
    }
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn factorial(n: usize) -> Rational {
    (1..=n).map(int).product()
}

fn pn_table() -> &'static Mutex<Vec<PnPolynomial>> {
    static TABLE: OnceLock<Mutex<Vec<PnPolynomial>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let one = PnPolynomial {
            n: 1,
            coefficients: vec![Rational::one()],
        };
        let two = PnPolynomial { n: 2, ..one.clone() };
        Mutex::new(vec![one, two])
    })
}

/// `p_n(s)` from the recursion
/// `p_n = (n-1)! Σ_{m=1}^{n-1} p_m s^{m-1}/(m-1)! · m^{n-m}/(n-m)! · Π_{j=m}^{n-2} (1 - s^j)`,
/// with `p_1 = p_2 = 1` and an empty product equal to 1. Results are memoized.
pub fn ricker_pn(n: usize) -> Result<PnPolynomial> {
    if n < 1 {
        return Err(Error::domain("p_n needs n >= 1"));
    }
    let mut table = pn_table().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() < n {
        let n = table.len() + 1;
        let mut acc: Poly = vec![Rational::zero()];
        // product of (1 - s^j) for j = m..n-2, built from the top down
        let mut tail: Poly = vec![Rational::one()];
        for m in (1..n).rev() {
            if m <= n - 2 {
                let mut factor = vec![Rational::zero(); m + 1];
                factor[0] = Rational::one();
                factor[m] = -Rational::one();
                tail = poly_mul(&tail, &factor);
            }
            let mut term = vec![Rational::zero(); m - 1];
            term.extend(table[m - 1].coefficients.iter().cloned());
            let term = poly_mul(&term, &tail);
            let weight = Rational::from_integer(BigInt::from(m).pow((n - m) as u32))
                / (factorial(m - 1) * factorial(n - m));
            poly_add_scaled(&mut acc, &term, &weight);
        }
        let scale = factorial(n - 1);
        let coefficients = trim(acc.into_iter().map(|c| c * &scale).collect());
        table.push(PnPolynomial { n, coefficients });
    }
    Ok(table[n - 1].clone())
}

fn check_ricker_s(s: &Rational) -> Result<()> {
    if s.is_zero() || s.abs().is_one() {
        return Err(Error::domain(format!(
            "s = {s} is excluded (needs s not in {{0, 1, -1}})"
        )));
    }
    Ok(())
}

/// `[xⁿ]Ψ = p_n(s) / (n-1)! · Π_{k=1}^{n-1} 1/(1 - s^k)` for `f1 = s·x·eˣ`.
pub fn ricker_psi_from_pn(n: usize, s: &Rational) -> Result<Rational> {
    check_ricker_s(s)?;
    let p = ricker_pn(n)?;
    let mut denom = factorial(n - 1);
    for k in 1..n {
        denom *= Rational::one() - crate::coefficients::Coeff::pow(s, k as u32);
    }
    Ok(p.eval(s) / denom)
}

/// Inverse-side numerators `q_n(s)`, read off a solved `Ψ⁻¹` series by
/// undoing the common denominator. Entry `n - 1` holds `q_n`.
pub fn ricker_qn_values(phi: &TruncatedSeries<Rational>, s: &Rational) -> Result<Vec<Rational>> {
    check_ricker_s(s)?;
    Ok((1..=phi.order())
        .filter_map(|n| crate::engine::extract_numerator(phi, n, s))
        .collect())
}

/// One known leading-power term of `p_n`, set against the computed
/// coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralTerm {
    pub label: &'static str,
    pub power: usize,
    pub expected: Rational,
    pub actual: Rational,
}

impl StructuralTerm {
    pub fn matches(&self) -> bool {
        self.expected == self.actual
    }
}

/// The closed-form coefficients known for the highest and lowest powers of
/// `p_n`. A term is omitted when any of its exponents is negative.
pub fn pn_structural_terms(n: usize) -> Result<Vec<StructuralTerm>> {
    let p = ricker_pn(n)?;
    let ni = n as i64;
    let q = |num: i64, den: i64| Rational::new(num.into(), den.into());
    // n^e as a rational, absent for e < 0
    let npow = |e: i64| (e >= 0).then(|| Rational::from_integer(BigInt::from(n).pow(e as u32)));
    let ipow = |b: i64, e: i64| (e >= 0).then(|| Rational::from_integer(BigInt::from(b).pow(e as u32)));
    let half_n_n3 = ni * (ni - 3) / 2;
    let quarter = (ni + 1) * (ni - 4) / 2;

    let candidates: Vec<(&'static str, i64, Option<Rational>)> = vec![
        ("leading", (ni - 1) * (ni - 2) / 2, npow(ni - 2)),
        (
            "second",
            half_n_n3,
            npow(ni - 3).map(|v| v * q(ni - 2, 1)),
        ),
        (
            "third",
            half_n_n3 - 1,
            npow(ni - 4).map(|v| v * q((ni - 3) * (7 * ni - 6), 2)),
        ),
        (
            "fourth",
            quarter,
            npow(ni - 5).map(|v| v * q((ni - 1) * (61 * ni * ni - 338 * ni + 384), 6)),
        ),
        (
            "fifth",
            quarter - 1,
            npow(ni - 6).map(|v| {
                v * q(
                    (ni - 1) * (705 * ni * ni * ni - 6265 * ni * ni + 17018 * ni - 15000),
                    24,
                )
            }),
        ),
        (
            "s^2",
            2,
            ipow(3, ni - 3).map(|v| v * q((ni - 1) * (ni - 2), 2) - Rational::one()),
        ),
        (
            "s^1",
            1,
            ipow(2, ni - 2).map(|v| v * q(ni - 1, 1) - Rational::one()),
        ),
        ("s^0", 0, Some(Rational::one())),
    ];
    Ok(candidates
        .into_iter()
        .filter_map(|(label, power, expected)| {
            let expected = expected?;
            (power >= 0).then(|| StructuralTerm {
                label,
                power: power as usize,
                actual: p.coefficient(power as usize),
                expected,
            })
        })
        .collect())
}

const INV_E: f64 = 0.367_879_441_171_442_33;

/// Principal branch of Lambert W, `w·e^w = x`, by Halley iteration.
pub fn lambertw_eval(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::domain(format!("W({x}) needs x >= -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // distance from the branch point, scaled
    let p2 = 2.0 * (std::f64::consts::E * x + 1.0);
    if p2 <= 0.0 {
        return Ok(-1.0);
    }
    let mut w = if x.abs() < 0.3 {
        x
    } else if p2 < 0.5 {
        let p = p2.sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        (1.0 + x).ln() * 0.8
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w)
}

/// `W(x) = Σ (-n)^(n-1)/n! xⁿ`, convergent for `|x| < 1/e`.
pub fn lambertw_series(order: usize) -> TruncatedSeries<Rational> {
    TruncatedSeries::from_fn(order, |n| {
        if n == 0 {
            return Rational::zero();
        }
        let num = BigInt::from(-(n as i64)).pow(n as u32 - 1);
        Rational::from_integer(num) / factorial(n)
    })
}

/// Integer iterate `f_n` of `x·eˣ` with its chain `a_1 … a_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateChain {
    pub n: usize,
    /// `a_1 = x·eˣ`, `a_{k+1} = exp(a_1⋯a_k)`.
    pub a: Vec<f64>,
    pub value: f64,
    /// `|f_n(-1)|`, the convergence radius of the series of `f_{-n}`.
    pub radius: f64,
}

fn chain(n: usize, x: f64) -> Result<Vec<f64>> {
    let mut a = Vec::with_capacity(n);
    let mut product: f64 = 1.0;
    for k in 0..n {
        let next = if k == 0 { x * x.exp() } else { product.exp() };
        if !next.is_finite() {
            return Err(Error::Overflow(format!("a_{} at x = {x}", k + 1)));
        }
        product *= next;
        a.push(next);
    }
    Ok(a)
}

/// `f_n(x) = a_1 exp(a_1(1 + a_2(1 + ⋯ (1 + a_{n-1})⋯)))`, `f_1 = a_1`,
/// `f_0 = x`.
fn nested(a: &[f64], x: f64) -> Result<f64> {
    let value = match a.len() {
        0 => x,
        1 => a[0],
        n => {
            let inner = a[1..n - 1].iter().rev().fold(1.0, |acc, ak| 1.0 + ak * acc);
            a[0] * (a[0] * inner).exp()
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("f_{}({x})", a.len())))
    }
}

pub fn ricker_integer_iterate(n: usize, x: f64) -> Result<IterateChain> {
    let a = chain(n, x)?;
    let value = nested(&a, x)?;
    let radius = nested(&chain(n, -1.0)?, -1.0)?.abs();
    Ok(IterateChain {
        n,
        a,
        value,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::rational as r;

    fn poly(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&v| r(v, 1)).collect()
    }

    #[test]
    fn small_pn() {
        assert_eq!(ricker_pn(1).unwrap().coefficients, poly(&[1]));
        assert_eq!(ricker_pn(2).unwrap().coefficients, poly(&[1]));
        assert_eq!(ricker_pn(3).unwrap().coefficients, poly(&[1, 3]));
        assert_eq!(ricker_pn(4).unwrap().coefficients, poly(&[1, 11, 8, 16]));
        assert_eq!(
            ricker_pn(5).unwrap().coefficients,
            poly(&[1, 31, 53, 146, 145, 75, 125])
        );
        assert_eq!(ricker_pn(5).unwrap().eval(&r(1, 1)), r(576, 1));
        assert!(ricker_pn(0).is_err());
    }

    #[test]
    fn pn_display() {
        assert_eq!(ricker_pn(4).unwrap().to_string(), "16s^3 + 8s^2 + 11s + 1");
    }

    #[test]
    fn psi_from_pn_examples() {
        assert_eq!(ricker_psi_from_pn(2, &r(2, 1)).unwrap(), r(-1, 1));
        assert_eq!(ricker_psi_from_pn(3, &r(2, 1)).unwrap(), r(7, 6));
        assert_eq!(ricker_psi_from_pn(1, &r(7, 3)).unwrap(), r(1, 1));
        assert!(ricker_psi_from_pn(3, &r(1, 1)).is_err());
    }

    #[test]
    fn structural_terms_hold_for_listed_powers() {
        for n in 4..=12 {
            for term in pn_structural_terms(n).unwrap() {
                if matches!(term.label, "leading" | "s^1" | "s^2" | "s^0") {
                    assert!(term.matches(), "n = {n}: {term:?}");
                }
            }
        }
    }

    #[test]
    fn lambertw_values() {
        assert_eq!(lambertw_eval(0.0).unwrap(), 0.0);
        assert!((lambertw_eval(-INV_E).unwrap() + 1.0).abs() < 1e-7);
        let w = lambertw_eval(0.2).unwrap();
        assert!((w - 0.168_915_973_499_109_57).abs() < 1e-15);
        for x in [-0.35, -0.1, 1e-8, 0.5, 1.0, 2.5, 10.0, 1e6] {
            let w = lambertw_eval(x).unwrap();
            assert!((w * w.exp() - x).abs() <= 1e-14 * x.abs().max(1e-300) * 4.0, "{x}");
        }
        assert!(lambertw_eval(-0.4).is_err());
    }

    #[test]
    fn lambertw_series_coefficients() {
        assert_eq!(
            lambertw_series(5),
            TruncatedSeries::from_ratios(&[(0, 1), (1, 1), (-1, 1), (3, 2), (-8, 3), (125, 24)])
        );
    }

    #[test]
    fn integer_iterates() {
        let x: f64 = 0.3;
        assert_eq!(ricker_integer_iterate(0, x).unwrap().value, x);
        assert!((ricker_integer_iterate(1, x).unwrap().value - x * x.exp()).abs() < 1e-16);
        let f1 = x * x.exp();
        let f2 = ricker_integer_iterate(2, x).unwrap().value;
        assert!((f2 - f1 * f1.exp()).abs() < 1e-15);
        let c = ricker_integer_iterate(1, -1.0).unwrap();
        assert!((c.value + INV_E).abs() < 1e-16);
        assert!((c.radius - INV_E).abs() < 1e-16);
        assert!(matches!(
            ricker_integer_iterate(6, 2.0),
            Err(Error::Overflow(_))
        ));
    }
}
