use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use schroeder_core::catalog::{
    pn_structural_terms, ricker_pn, ricker_psi_from_pn, CatalogEntry, MapId,
};
use schroeder_core::coefficients::{format_rational, parse_rational};
use schroeder_core::engine::{
    check_conjugacy, default_composition_times, flow_limit_s_to_1, potential_series, solve_psi,
    solve_psi_eps, velocity_limit_s_to_1, ConjugacyPair, ResidualReport,
};
use schroeder_core::io::{
    format_g17, generate_grid, report_to_json, series_to_csv, series_to_json, GridSpec,
    Provenance, ReportContext, SeriesCodec, SliceSource,
};
use schroeder_core::{Coeff, EpsJet, Rational, TruncatedSeries};

use crate::problem::{resolve, Problem, Resolved};
use crate::{Format, MapArgs, OutputArgs};

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    if output.out.as_os_str() == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        fs::write(&output.out, text)
            .with_context(|| format!("writing {}", output.out.display()))?;
    }
    Ok(())
}

enum AnySeries {
    Rational(TruncatedSeries<Rational>),
    Float(TruncatedSeries<f64>),
    Jet(TruncatedSeries<EpsJet>),
}

impl AnySeries {
    fn render(&self, s: &str, format: Format) -> String {
        fn one<C: SeriesCodec>(series: &TruncatedSeries<C>, s: &str, format: Format) -> String {
            match format {
                Format::Json => series_to_json(series, s),
                Format::Csv => series_to_csv(series),
            }
        }
        match self {
            AnySeries::Rational(x) => one(x, s, format),
            AnySeries::Float(x) => one(x, s, format),
            AnySeries::Jet(x) => one(x, s, format),
        }
    }

    fn to_float(&self) -> Result<TruncatedSeries<f64>> {
        Ok(match self {
            AnySeries::Rational(x) => x.to_f64()?,
            AnySeries::Float(x) => x.clone(),
            AnySeries::Jet(x) => x.to_f64()?,
        })
    }
}

fn emit_series(output: &OutputArgs, series: &AnySeries, s: &str) -> Result<ExitCode> {
    emit(output, &series.render(s, output.format))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_time(text: &str) -> Result<Rational> {
    parse_rational(text).with_context(|| format!("--t `{text}`"))
}

fn rational_to_f64(r: &Rational) -> f64 {
    Coeff::to_f64(r).unwrap_or(f64::NAN)
}

pub fn solve(args: &MapArgs, output: &OutputArgs, inverse: bool) -> Result<ExitCode> {
    let r = resolve(args)?;
    fn pick<C: Coeff>(pair: ConjugacyPair<C>, inverse: bool) -> TruncatedSeries<C> {
        if inverse {
            pair.phi
        } else {
            pair.psi
        }
    }
    let series = match &r.problem {
        Problem::Exact { map, .. } => {
            AnySeries::Rational(pick(solve_psi(map, args.order)?, inverse))
        }
        Problem::Float { map } => {
            AnySeries::Float(pick(solve_psi(map, args.order)?, inverse))
        }
        Problem::Jet { unit, window } => {
            AnySeries::Jet(pick(solve_psi_eps(unit, args.order, *window)?, inverse))
        }
    };
    emit_series(output, &series, &r.s)
}

pub fn iterate(args: &MapArgs, output: &OutputArgs, t: &str, jets: bool) -> Result<ExitCode> {
    let r = resolve(args)?;
    let series = match &r.problem {
        Problem::Exact { map, step } => {
            let pair = solve_psi(map, args.order)?;
            let t = parse_time(t)? / step;
            AnySeries::Rational(pair.flow(&t)?)
        }
        Problem::Float { map } => {
            let pair = solve_psi(map, args.order)?;
            let t = match t.parse::<f64>() {
                Ok(v) => v,
                Err(_) => rational_to_f64(&parse_time(t)?),
            };
            AnySeries::Float(pair.flow(&t)?)
        }
        Problem::Jet { unit, window } => {
            let pair = solve_psi_eps(unit, args.order, *window)?;
            let t = parse_time(t)?;
            if jets {
                AnySeries::Jet(pair.flow(&t)?)
            } else {
                AnySeries::Rational(flow_limit_s_to_1(&pair, &t)?)
            }
        }
    };
    emit_series(output, &series, &r.s)
}

#[derive(Args, Clone, Debug)]
pub struct ProfileArgs {
    /// In exact mode, print the exact v / ln s instead of a float v.
    #[arg(long)]
    pub reduced: bool,

    /// Measure time in the physical units of the catalog tables (t = τ·tau_scale).
    #[arg(long)]
    pub physical: bool,
}

fn velocity_of(r: &Resolved, order: usize, profile: &ProfileArgs) -> Result<AnySeries> {
    let v = match &r.problem {
        Problem::Exact { map, step } => {
            let pair = solve_psi(map, order)?;
            let reduced = pair.velocity_over_log()?;
            if profile.reduced {
                if profile.physical {
                    bail!("--reduced and --physical cannot be combined");
                }
                return Ok(AnySeries::Rational(reduced));
            }
            let s = rational_to_f64(map.multiplier());
            if s <= 0.0 {
                bail!("ln s is not real for s = {}", format_rational(map.multiplier()));
            }
            let per_step = s.ln() / rational_to_f64(step);
            AnySeries::Float(reduced.to_f64()?.scale(&per_step))
        }
        Problem::Float { map } => {
            if profile.reduced {
                bail!("--reduced applies to exact mode");
            }
            AnySeries::Float(solve_psi(map, order)?.velocity()?)
        }
        Problem::Jet { unit, window } => {
            let pair = solve_psi_eps(unit, order, *window)?;
            AnySeries::Rational(velocity_limit_s_to_1(&pair)?)
        }
    };
    if profile.physical {
        let scale = r.entry.as_ref().map_or(1.0, CatalogEntry::tau_scale);
        return Ok(AnySeries::Float(v.to_float()?.scale(&(1.0 / scale))));
    }
    Ok(v)
}

pub fn velocity(args: &MapArgs, output: &OutputArgs, profile: &ProfileArgs) -> Result<ExitCode> {
    let r = resolve(args)?;
    let v = velocity_of(&r, args.order, profile)?;
    emit_series(output, &v, &r.s)
}

pub fn potential(
    args: &MapArgs,
    output: &OutputArgs,
    profile: &ProfileArgs,
    mass: Option<&str>,
) -> Result<ExitCode> {
    let r = resolve(args)?;
    let mass = mass.map(parse_rational).transpose()?;
    let v = velocity_of(&r, args.order, profile)?;
    let potential = match v {
        AnySeries::Rational(v) => AnySeries::Rational(potential_series(&v, mass.as_ref())),
        AnySeries::Float(v) => {
            let m = mass.as_ref().map(rational_to_f64);
            AnySeries::Float(potential_series(&v, m.as_ref()))
        }
        AnySeries::Jet(v) => {
            let m = mass.map(EpsJet::constant);
            AnySeries::Jet(potential_series(&v, m.as_ref()))
        }
    };
    emit_series(output, &potential, &r.s)
}

#[derive(Args, Clone, Debug)]
pub struct GridArgs {
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 21)]
    pub nx: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t_min: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub t_max: String,
    #[arg(long, default_value_t = 11)]
    pub nt: usize,
    /// Evaluate flow series even when a closed-form trajectory exists.
    #[arg(long)]
    pub series: bool,
}

pub fn surface(args: &MapArgs, output: &OutputArgs, grid: &GridArgs) -> Result<ExitCode> {
    // surfaces are plotted from floats unless the s → 1 limit is requested
    let mut args = args.clone();
    if args.eps_jet.is_none() {
        args.float = true;
    }
    let r = resolve(&args)?;
    let spec = GridSpec {
        x_min: grid.x_min,
        x_max: grid.x_max,
        nx: grid.nx,
        t_min: parse_time(&grid.t_min)?,
        t_max: parse_time(&grid.t_max)?,
        nt: grid.nt,
    };
    let x0 = r.entry.as_ref().map_or(0.0, CatalogEntry::x0);
    let mut provenance = Provenance {
        map: r.label.clone(),
        order: args.order,
        domain: String::new(),
        s: r.s.clone(),
        method: String::new(),
        max_tail_estimate: 0.0,
        unreliable_cells: 0,
    };
    let closed = r
        .entry
        .as_ref()
        .filter(|e| e.has_closed_conjugacy() && !grid.series && args.eps_jet.is_none());
    let result = match (&r.problem, closed) {
        (_, Some(entry)) => {
            provenance.domain = "float".into();
            generate_grid(&SliceSource::Closed(entry), &spec, provenance)?
        }
        (Problem::Float { map }, None) => {
            provenance.domain = "float".into();
            let pair = solve_psi(map, args.order)?;
            let source = SliceSource::Series {
                x0,
                flow: Box::new(move |t: &Rational| pair.flow(&rational_to_f64(t))),
            };
            generate_grid(&source, &spec, provenance)?
        }
        (Problem::Jet { unit, window }, None) => {
            provenance.domain = "epsjet".into();
            let pair = solve_psi_eps(unit, args.order, *window)?;
            let source = SliceSource::Series {
                x0,
                flow: Box::new(move |t: &Rational| flow_limit_s_to_1(&pair, t)?.to_f64()),
            };
            generate_grid(&source, &spec, provenance)?
        }
        (Problem::Exact { .. }, None) => unreachable!("surface always resolves to float or jets"),
    };
    let text = match output.format {
        Format::Json => result.to_json(),
        Format::Csv => result.to_csv(),
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn catalog_entry(r: &Resolved) -> Result<&CatalogEntry> {
    r.entry
        .as_ref()
        .with_context(|| format!("{} is not a catalog map", r.label))
}

pub fn koenigs(
    args: &MapArgs,
    output: &OutputArgs,
    x: f64,
    iterations: u32,
    trace: bool,
) -> Result<ExitCode> {
    let r = resolve(&MapArgs {
        float: true,
        eps_jet: None,
        ..args.clone()
    })?;
    let entry = catalog_entry(&r)?;
    let psi = entry.psi(x).ok();
    let first = if trace { 1 } else { iterations };
    let mut rows = Vec::new();
    for n in first..=iterations {
        let estimate = entry.koenigs(x, n)?;
        rows.push((n, estimate, psi.map(|p| (estimate - p).abs())));
    }
    let opt = |v: Option<f64>| v.map(format_g17);
    let text = match output.format {
        Format::Csv => {
            let mut out = String::from("iterations,x,estimate,psi,error\n");
            for (n, est, err) in &rows {
                out.push_str(&format!(
                    "{n},{},{},{},{}\n",
                    format_g17(x),
                    format_g17(*est),
                    opt(psi).unwrap_or_default(),
                    opt(*err).unwrap_or_default()
                ));
            }
            out
        }
        Format::Json => {
            let num = |v: Option<f64>| v.map(format_g17).unwrap_or_else(|| "null".into());
            let items: Vec<String> = rows
                .iter()
                .map(|(n, est, err)| {
                    format!(
                        "{{\"iterations\":{n},\"estimate\":{},\"error\":{}}}",
                        format_g17(*est),
                        num(*err)
                    )
                })
                .collect();
            format!(
                "{{\"map\":\"{}\",\"x\":{},\"psi\":{},\"rows\":[{}]}}\n",
                r.label,
                format_g17(x),
                num(psi),
                items.join(",")
            )
        }
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn pn(n: usize, s: Option<&str>, output: &OutputArgs) -> Result<ExitCode> {
    let p = ricker_pn(n)?;
    let psi_coeff = s
        .map(|s| -> Result<_> {
            let s = parse_rational(s)?;
            let c = ricker_psi_from_pn(n, &s)?;
            Ok((s, c))
        })
        .transpose()?;
    let text = match output.format {
        Format::Csv => {
            let mut out = String::from("power,coefficient\n");
            for (k, c) in p.coefficients.iter().enumerate() {
                out.push_str(&format!("{k},{}\n", format_rational(c)));
            }
            out
        }
        Format::Json => {
            let coeffs: Vec<String> = p
                .coefficients
                .iter()
                .map(|c| format!("\"{}\"", format_rational(c)))
                .collect();
            let terms: Vec<String> = if n >= 3 {
                pn_structural_terms(n)?
                    .iter()
                    .map(|t| {
                        format!(
                            "{{\"term\":\"{}\",\"power\":{},\"expected\":\"{}\",\"actual\":\"{}\",\"matches\":{}}}",
                            t.label,
                            t.power,
                            format_rational(&t.expected),
                            format_rational(&t.actual),
                            t.matches()
                        )
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let mut out = format!(
                "{{\"n\":{n},\"polynomial\":\"{p}\",\"coefficients\":[{}],\"value_at_1\":\"{}\",\"structural_terms\":[{}]",
                coeffs.join(","),
                format_rational(&p.eval(&<Rational as Coeff>::one())),
                terms.join(",")
            );
            if let Some((s, c)) = psi_coeff {
                out.push_str(&format!(
                    ",\"s\":\"{}\",\"psi_coefficient\":\"{}\"",
                    format_rational(&s),
                    format_rational(&c)
                ));
            }
            out.push_str("}\n");
            out
        }
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn report_csv(report: &ResidualReport) -> String {
    let mut out = String::from("check,max_residual,relative,exact_zero,first_nonzero_order\n");
    for c in &report.checks {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.name,
            format_g17(c.max_residual),
            format_g17(c.relative),
            c.exact_zero,
            c.first_nonzero_order.map(|o| o.to_string()).unwrap_or_default()
        ));
    }
    out
}

fn run_check<C: schroeder_core::engine::FlowDomain>(
    pair: &ConjugacyPair<C>,
    map: &schroeder_core::engine::MapSpec<C>,
) -> Result<ResidualReport> {
    Ok(check_conjugacy(pair, map, &default_composition_times())?)
}

pub fn check(args: &MapArgs, output: &OutputArgs) -> Result<ExitCode> {
    let r = resolve(args)?;
    let (report, exact) = match &r.problem {
        Problem::Exact { map, .. } => (run_check(&solve_psi(map, args.order)?, map)?, true),
        Problem::Float { map } => (run_check(&solve_psi(map, args.order)?, map)?, false),
        Problem::Jet { unit, window } => {
            let map = schroeder_core::engine::eps_jet_map(unit, args.order, *window)?;
            let pair = solve_psi(&map, args.order)?;
            // every flow coefficient must be free of poles
            flow_limit_s_to_1(&pair, &parse_rational("1/2")?)?;
            (run_check(&pair, &map)?, true)
        }
    };
    let text = match output.format {
        Format::Json => report_to_json(
            &report,
            &ReportContext {
                map: r.label.clone(),
                s: r.s.clone(),
            },
        ),
        Format::Csv => report_csv(&report),
    };
    emit(output, &text)?;
    if exact && !report.all_exact_zero() {
        eprintln!("error: nonzero residual in exact mode");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn catalog(output: &OutputArgs) -> Result<ExitCode> {
    let entries: Vec<CatalogEntry> = MapId::ALL.into_iter().map(CatalogEntry::new).collect();
    let text = match output.format {
        Format::Csv => {
            let mut out = String::from("id,s,x0,tau_scale,description\n");
            for e in &entries {
                out.push_str(&format!(
                    "{},{},{},{},\"{}\"\n",
                    e.id(),
                    e.s_descriptor(),
                    format_g17(e.x0()),
                    format_g17(e.tau_scale()),
                    e.description()
                ));
            }
            out
        }
        Format::Json => {
            let items: Vec<String> = entries
                .iter()
                .map(|e| {
                    format!(
                        "{{\"id\":\"{}\",\"s\":\"{}\",\"x0\":{},\"tau_scale\":{},\"closed_form\":{},\"description\":\"{}\"}}",
                        e.id(),
                        e.s_descriptor(),
                        format_g17(e.x0()),
                        format_g17(e.tau_scale()),
                        e.has_closed_conjugacy(),
                        e.description()
                    )
                })
                .collect();
            format!("[{}]\n", items.join(","))
        }
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}
