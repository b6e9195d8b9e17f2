//! Serialization of series, grids and residual reports.
//!
//! All output is byte-deterministic: keys are written in a fixed order, reals
//! use C's `%.17g` formatting and lines end in `\n`.

mod grid;
mod report;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::coefficients::{format_rational, parse_rational, Coeff, Domain, EpsJet, Rational};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

pub use grid::{generate_grid, generate_slice, FlowAt, FlowGrid, GridSpec, Provenance, SliceSource};
pub use report::{report_to_json, ReportContext};

/// Formats like C's `printf("%.17g", x)`, which round-trips every `f64`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A finite real as a bare JSON number, otherwise as a string.
pub(crate) fn json_real(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format_g17(x)
    } else {
        format!("\"{}\"", format_g17(x))
    };
    RawValue::from_string(text).expect("valid JSON number")
}

/// Coefficient encoding for the series JSON and CSV formats.
pub trait SeriesCodec: Coeff {
    fn encode(&self) -> CoeffRepr;
    fn decode(repr: &CoeffRepr, upper: Option<i64>) -> Result<Self>;
    /// Top edge of the known `ε` window, for jets.
    fn eps_upper(&self) -> Option<i64> {
        None
    }
}

/// One serialized coefficient: a string, or the `[power, "num/den"]` pairs
/// of a jet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    Text(String),
    Jet(Vec<(i64, String)>),
}

impl SeriesCodec for Rational {
    fn encode(&self) -> CoeffRepr {
        CoeffRepr::Text(format_rational(self))
    }

    fn decode(repr: &CoeffRepr, _: Option<i64>) -> Result<Self> {
        match repr {
            CoeffRepr::Text(t) => parse_rational(t),
            CoeffRepr::Jet(_) => Err(Error::Parse("expected a rational string".into())),
        }
    }
}

impl SeriesCodec for f64 {
    fn encode(&self) -> CoeffRepr {
        CoeffRepr::Text(format_g17(*self))
    }

    fn decode(repr: &CoeffRepr, _: Option<i64>) -> Result<Self> {
        match repr {
            CoeffRepr::Text(t) => t
                .parse()
                .map_err(|_| Error::Parse(format!("invalid real `{t}`"))),
            CoeffRepr::Jet(_) => Err(Error::Parse("expected a real string".into())),
        }
    }
}

impl SeriesCodec for EpsJet {
    /// Every power of the known window is listed, zeros included.
    fn encode(&self) -> CoeffRepr {
        let Some(lo) = self.lowest_power() else {
            return CoeffRepr::Jet(Vec::new());
        };
        let hi = self
            .upper()
            .unwrap_or_else(|| self.terms().map(|(p, _)| p).max().unwrap_or(lo));
        CoeffRepr::Jet(
            (lo..=hi)
                .map(|p| {
                    let c = self.coefficient(p).unwrap_or_else(<Rational as Coeff>::zero);
                    (p, format_rational(&c))
                })
                .collect(),
        )
    }

    fn decode(repr: &CoeffRepr, upper: Option<i64>) -> Result<Self> {
        let CoeffRepr::Jet(pairs) = repr else {
            return Err(Error::Parse("expected [power, \"num/den\"] pairs".into()));
        };
        let mut terms = Vec::with_capacity(pairs.len());
        for (i, (p, c)) in pairs.iter().enumerate() {
            if i > 0 && *p != pairs[i - 1].0 + 1 {
                return Err(Error::Parse("jet powers must be consecutive".into()));
            }
            terms.push(parse_rational(c)?);
        }
        match pairs.first() {
            Some((lo, _)) => Ok(EpsJet::from_terms(*lo, terms, upper)),
            None => Ok(match upper {
                Some(h) => EpsJet::zero_to(h),
                None => EpsJet::exact_zero(),
            }),
        }
    }

    fn eps_upper(&self) -> Option<i64> {
        self.upper()
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesDocument {
    variable: String,
    order: usize,
    domain: String,
    s: String,
    coefficients: Vec<CoeffRepr>,
    /// Per-coefficient top of the `ε` window (`null` for exact jets); jets only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps_upper: Option<Vec<Option<i64>>>,
}

/// `{"variable":"x","order":N,"domain":…,"s":…,"coefficients":[…]}` followed
/// by a newline.
pub fn series_to_json<C: SeriesCodec>(series: &TruncatedSeries<C>, s_descriptor: &str) -> String {
    let doc = SeriesDocument {
        variable: "x".into(),
        order: series.order(),
        domain: C::DOMAIN.to_string(),
        s: s_descriptor.into(),
        coefficients: series.coefficients().iter().map(SeriesCodec::encode).collect(),
        eps_upper: (C::DOMAIN == Domain::EpsJet)
            .then(|| series.coefficients().iter().map(SeriesCodec::eps_upper).collect()),
    };
    let mut out = serde_json::to_string(&doc).expect("series document serializes");
    out.push('\n');
    out
}

/// Parses a series document, rejecting a domain other than `C`'s.
pub fn series_from_json<C: SeriesCodec>(text: &str) -> Result<(TruncatedSeries<C>, String)> {
    let doc: SeriesDocument = serde_json::from_str(text)?;
    let domain: Domain = doc.domain.parse()?;
    if domain != C::DOMAIN {
        return Err(Error::domain(format!(
            "document holds {domain} coefficients, expected {}",
            C::DOMAIN
        )));
    }
    if doc.coefficients.len() != doc.order + 1 {
        return Err(Error::Parse(format!(
            "order {} but {} coefficients",
            doc.order,
            doc.coefficients.len()
        )));
    }
    let uppers = doc.eps_upper.unwrap_or_default();
    let coefficients = doc
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| C::decode(c, uppers.get(i).copied().flatten()))
        .collect::<Result<Vec<_>>>()?;
    Ok((TruncatedSeries::new(coefficients)?, doc.s))
}

/// Reads only the `domain` field of a series document.
pub fn series_domain(text: &str) -> Result<Domain> {
    #[derive(Deserialize)]
    struct Head {
        domain: String,
    }
    let head: Head = serde_json::from_str(text)?;
    head.domain.parse()
}

/// Long-form CSV: `power,coefficient`, or `power,eps_power,coefficient` for
/// jets.
pub fn series_to_csv<C: SeriesCodec>(series: &TruncatedSeries<C>) -> String {
    let mut out = String::new();
    if C::DOMAIN == Domain::EpsJet {
        out.push_str("power,eps_power,coefficient\n");
    } else {
        out.push_str("power,coefficient\n");
    }
    for (n, c) in series.coefficients().iter().enumerate() {
        match c.encode() {
            CoeffRepr::Text(t) => out.push_str(&format!("{n},{t}\n")),
            CoeffRepr::Jet(pairs) => {
                for (p, c) in pairs {
                    out.push_str(&format!("{n},{p},{c}\n"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::rational as r;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (1.5, "1.5"),
            (0.1, "0.10000000000000001"),
            (-2.0, "-2"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (1.2345e-4, "0.00012344999999999999"),
            (f64::INFINITY, "inf"),
            (0.0, "0"),
        ];
        for (x, expected) in cases {
            assert_eq!(format_g17(x), expected, "{x}");
        }
    }

    #[test]
    fn rational_json_round_trip() {
        let s = TruncatedSeries::from_ratios(&[(0, 1), (1, 1), (-1, 1), (4, 3)]);
        let text = series_to_json(&s, "2/1");
        assert_eq!(
            text,
            "{\"variable\":\"x\",\"order\":3,\"domain\":\"rational\",\"s\":\"2/1\",\
             \"coefficients\":[\"0/1\",\"1/1\",\"-1/1\",\"4/3\"]}\n"
        );
        let (back, sd) = series_from_json::<Rational>(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(sd, "2/1");
        assert_eq!(series_domain(&text).unwrap(), Domain::Rational);
        assert!(series_from_json::<f64>(&text).is_err());
    }

    #[test]
    fn jet_json_round_trip() {
        let eps = EpsJet::epsilon(3);
        let a = eps.exp().unwrap().sub(&EpsJet::constant(r(1, 1))).invert().unwrap();
        let s = TruncatedSeries::new(vec![EpsJet::exact_zero(), EpsJet::constant(r(1, 1)), a]).unwrap();
        let text = series_to_json(&s, "exp(eps)");
        let (back, _) = series_from_json::<EpsJet>(&text).unwrap();
        assert_eq!(back, s);
        assert!(text.contains("[[-1,\"1/1\"],[0,\"-1/2\"]"));
    }

    #[test]
    fn csv_layouts() {
        let s = TruncatedSeries::from_ratios(&[(0, 1), (1, 2)]);
        assert_eq!(series_to_csv(&s), "power,coefficient\n0,0/1\n1,1/2\n");
        let f = TruncatedSeries::new(vec![0.0, 0.25]).unwrap();
        assert_eq!(series_to_csv(&f), "power,coefficient\n0,0\n1,0.25\n");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }

        #[test]
        fn float_series_round_trip(c in proptest::collection::vec(-1e6f64..1e6, 1..12)) {
            let s = TruncatedSeries::new(c).unwrap();
            let (back, _) = series_from_json::<f64>(&series_to_json(&s, "2")).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
