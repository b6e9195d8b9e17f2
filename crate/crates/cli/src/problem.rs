//! Turns `--map`/`--s`/`--eps-jet`/`--float` into a solvable problem.

use anyhow::{bail, Context, Result};
use schroeder_core::catalog::{CatalogEntry, MapId};
use schroeder_core::coefficients::{format_rational, parse_rational};
use schroeder_core::engine::{JetWindow, MapSpec};
use schroeder_core::{Coeff, Rational, TruncatedSeries};

use crate::MapArgs;

pub enum Problem {
    /// `map` advances `step` applications of `f1`.
    Exact {
        map: MapSpec<Rational>,
        step: Rational,
    },
    Float {
        map: MapSpec<f64>,
    },
    /// Unit-multiplier map `g`, solved as `e^ε·g`.
    Jet {
        unit: TruncatedSeries<Rational>,
        window: JetWindow,
    },
}

pub struct Resolved {
    pub label: String,
    pub entry: Option<CatalogEntry>,
    pub problem: Problem,
    /// Multiplier descriptor written into series documents.
    pub s: String,
}

fn parse_poly(spec: &str, order: usize) -> Result<TruncatedSeries<Rational>> {
    let mut c = vec![<Rational as Coeff>::zero()];
    for part in spec.split(',') {
        c.push(parse_rational(part).with_context(|| format!("in `poly:{spec}`"))?);
    }
    if c.len() < 2 {
        bail!("poly map needs at least the linear coefficient");
    }
    c.resize(order.max(1) + 1, <Rational as Coeff>::zero());
    c.truncate(order.max(1) + 1);
    Ok(TruncatedSeries::new(c)?)
}

pub fn resolve(args: &MapArgs) -> Result<Resolved> {
    if args.order == 0 {
        bail!("--order must be at least 1");
    }
    let order = args.order;
    if let Some(spec) = args.map.strip_prefix("poly:") {
        if args.s.is_some() {
            bail!("--s applies to the ricker map only; a poly map's multiplier is its first coefficient");
        }
        let series = parse_poly(spec, order)?;
        let s = series.coefficients()[1].clone();
        let problem = if let Some(k) = args.eps_jet {
            if !Coeff::is_one(&s) {
                bail!("--eps-jet needs a unit linear coefficient, got {}", format_rational(&s));
            }
            Problem::Jet {
                unit: series,
                window: JetWindow::new(k),
            }
        } else if args.float {
            Problem::Float {
                map: MapSpec::new(series.to_f64()?)?,
            }
        } else {
            Problem::Exact {
                map: MapSpec::new(series)?,
                step: <Rational as Coeff>::one(),
            }
        };
        let s = if args.eps_jet.is_some() {
            "exp(eps)".to_string()
        } else {
            format_rational(&s)
        };
        return Ok(Resolved {
            label: args.map.clone(),
            entry: None,
            problem,
            s,
        });
    }

    let id: MapId = args.map.parse()?;
    let entry = match (&args.s, id) {
        (Some(s), MapId::Ricker) => CatalogEntry::ricker(parse_rational(s)?)?,
        (Some(_), _) => bail!("--s applies to the ricker map only"),
        (None, _) => CatalogEntry::new(id),
    };
    let (problem, s) = if let Some(k) = args.eps_jet {
        let unit = entry
            .unit_series(order)
            .with_context(|| format!("{id} has no unit-multiplier member for --eps-jet"))?;
        (
            Problem::Jet {
                unit,
                window: JetWindow::new(k),
            },
            "exp(eps)".to_string(),
        )
    } else if args.float {
        (
            Problem::Float {
                map: entry.float_map(order)?,
            },
            entry.s_descriptor(),
        )
    } else {
        let map = entry.exact_map(order)?;
        let s = format_rational(map.multiplier());
        (
            Problem::Exact {
                map,
                step: entry.exact_step(),
            },
            s,
        )
    };
    Ok(Resolved {
        label: id.to_string(),
        entry: Some(entry),
        problem,
        s,
    })
}
