use rayon::prelude::*;
use serde_json::value::RawValue;

use super::{format_g17, json_real};
use crate::catalog::CatalogEntry;
use crate::coefficients::{format_rational, Rational};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// Sampling of the `(x, t)` plane. `t` values are spaced exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: Rational,
    pub t_max: Rational,
    pub nt: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nt < 2 {
            return Err(Error::domain("grid needs nx, nt >= 2"));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(Error::domain("x range must be finite"));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        let step = (self.x_max - self.x_min) / (self.nx - 1) as f64;
        (0..self.nx)
            .map(|i| {
                if i == self.nx - 1 {
                    self.x_max
                } else {
                    self.x_min + step * i as f64
                }
            })
            .collect()
    }

    pub fn ts(&self) -> Vec<Rational> {
        let span = &self.t_max - &self.t_min;
        let last = Rational::from_integer((self.nt as i64 - 1).into());
        (0..self.nt)
            .map(|i| &self.t_min + &span * Rational::from_integer((i as i64).into()) / &last)
            .collect()
    }
}

/// A flow series for a given time.
pub type FlowAt<'a> = Box<dyn Fn(&Rational) -> Result<TruncatedSeries<f64>> + Sync + 'a>;

/// How one `t`-slice of the surface is produced.
pub enum SliceSource<'a> {
    /// Closed-form trajectory of a catalog map (`t` counts steps of `f1`).
    Closed(&'a CatalogEntry),
    /// A flow series in coordinates centered on `x0`, built per slice.
    Series {
        x0: f64,
        flow: FlowAt<'a>,
    },
}

impl SliceSource<'_> {
    fn method(&self) -> &'static str {
        match self {
            SliceSource::Closed(_) => "closed-form",
            SliceSource::Series { .. } => "series",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub map: String,
    pub order: usize,
    pub domain: String,
    pub s: String,
    pub method: String,
    /// Largest tail estimate over all series-evaluated cells.
    pub max_tail_estimate: f64,
    /// Cells evaluated at or beyond the apparent radius of convergence.
    pub unreliable_cells: usize,
}

/// `f_t(x)` sampled on a rectangle; `values[i][j]` is at `(xs[j], ts[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowGrid {
    pub xs: Vec<f64>,
    pub ts: Vec<Rational>,
    pub values: Vec<Vec<Option<f64>>>,
    pub provenance: Provenance,
}

struct Slice {
    values: Vec<Option<f64>>,
    max_tail: f64,
    unreliable: usize,
}

fn slice(source: &SliceSource<'_>, t: &Rational, xs: &[f64]) -> Slice {
    match source {
        SliceSource::Closed(entry) => {
            let tau = crate::coefficients::Coeff::to_f64(t).unwrap_or(f64::NAN);
            Slice {
                values: xs
                    .iter()
                    .map(|&x| entry.trajectory(x, tau).ok().filter(|v| v.is_finite()))
                    .collect(),
                max_tail: 0.0,
                unreliable: 0,
            }
        }
        SliceSource::Series { x0, flow } => {
            let Ok(series) = flow(t) else {
                return Slice {
                    values: vec![None; xs.len()],
                    max_tail: 0.0,
                    unreliable: 0,
                };
            };
            let mut out = Slice {
                values: Vec::with_capacity(xs.len()),
                max_tail: 0.0,
                unreliable: 0,
            };
            for &x in xs {
                match series.evaluate(x - x0) {
                    Ok(ev) if ev.value.is_finite() => {
                        if ev.reliable {
                            out.max_tail = out.max_tail.max(ev.tail_estimate);
                        } else {
                            out.unreliable += 1;
                        }
                        out.values.push(Some(ev.value + x0));
                    }
                    _ => out.values.push(None),
                }
            }
            out
        }
    }
}

/// One row of the grid, identical to the corresponding row of
/// [`generate_grid`].
pub fn generate_slice(source: &SliceSource<'_>, t: &Rational, xs: &[f64]) -> Vec<Option<f64>> {
    slice(source, t, xs).values
}

/// Samples the flow on `spec`. Slices are computed in parallel and assembled
/// in `t` order; cells that cannot be evaluated are left empty.
pub fn generate_grid(
    source: &SliceSource<'_>,
    spec: &GridSpec,
    mut provenance: Provenance,
) -> Result<FlowGrid> {
    spec.validate()?;
    let xs = spec.xs();
    let ts = spec.ts();
    let slices: Vec<Slice> = ts.par_iter().map(|t| slice(source, t, &xs)).collect();
    provenance.method = source.method().into();
    provenance.max_tail_estimate = slices.iter().map(|s| s.max_tail).fold(0.0, f64::max);
    provenance.unreliable_cells = slices.iter().map(|s| s.unreliable).sum();
    Ok(FlowGrid {
        xs,
        ts,
        values: slices.into_iter().map(|s| s.values).collect(),
        provenance,
    })
}

impl FlowGrid {
    pub fn value(&self, ti: usize, xi: usize) -> Option<f64> {
        self.values[ti][xi]
    }

    /// `x,t,value` rows, `t`-major; missing cells have an empty value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,t,value\n");
        for (t, row) in self.ts.iter().zip(&self.values) {
            let t = format_g17(crate::coefficients::Coeff::to_f64(t).unwrap_or(f64::NAN));
            for (x, v) in self.xs.iter().zip(row) {
                let v = v.map(format_g17).unwrap_or_default();
                out.push_str(&format!("{},{t},{v}\n", format_g17(*x)));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(serde::Serialize)]
        struct ProvenanceDoc<'a> {
            map: &'a str,
            order: usize,
            domain: &'a str,
            s: &'a str,
            method: &'a str,
            max_tail_estimate: Box<RawValue>,
            unreliable_cells: usize,
        }
        #[derive(serde::Serialize)]
        struct GridDoc<'a> {
            provenance: ProvenanceDoc<'a>,
            x: Vec<Box<RawValue>>,
            t: Vec<String>,
            values: Vec<Vec<Option<Box<RawValue>>>>,
        }
        let p = &self.provenance;
        let doc = GridDoc {
            provenance: ProvenanceDoc {
                map: &p.map,
                order: p.order,
                domain: &p.domain,
                s: &p.s,
                method: &p.method,
                max_tail_estimate: json_real(p.max_tail_estimate),
                unreliable_cells: p.unreliable_cells,
            },
            x: self.xs.iter().map(|&x| json_real(x)).collect(),
            t: self.ts.iter().map(format_rational).collect(),
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| v.map(json_real)).collect())
                .collect(),
        };
        let mut out = serde_json::to_string(&doc).expect("grid serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_lookup;
    use crate::coefficients::rational as r;
    use crate::engine::solve_psi;

    fn provenance() -> Provenance {
        Provenance {
            map: "schroder-example".into(),
            order: 10,
            domain: "float".into(),
            s: "2/1".into(),
            method: String::new(),
            max_tail_estimate: 0.0,
            unreliable_cells: 0,
        }
    }

    fn spec() -> GridSpec {
        GridSpec {
            x_min: -0.5,
            x_max: 0.5,
            nx: 5,
            t_min: r(0, 1),
            t_max: r(1, 1),
            nt: 3,
        }
    }

    #[test]
    fn closed_form_grid_examples() {
        let entry = catalog_lookup("schroder-example").unwrap();
        let grid = generate_grid(&SliceSource::Closed(&entry), &spec(), provenance()).unwrap();
        assert_eq!(grid.provenance.method, "closed-form");
        assert_eq!(grid.xs, vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
        assert_eq!(grid.value(2, 4), Some(1.5));
        for ti in 0..3 {
            assert_eq!(grid.value(ti, 2), Some(0.0));
            assert_eq!(grid.value(ti, 0), Some(-0.5));
        }
        for (xi, x) in grid.xs.iter().enumerate() {
            assert!((grid.value(0, xi).unwrap() - x).abs() < 1e-15);
        }
        let csv = grid.to_csv();
        assert!(csv.starts_with("x,t,value\n-0.5,0,-0.5\n"));
        assert_eq!(csv.lines().count(), 1 + 15);
    }

    #[test]
    fn series_grid_and_slices_agree() {
        let entry = catalog_lookup("ricker").unwrap();
        let pair = solve_psi(&entry.float_map(10).unwrap(), 10).unwrap();
        let source = SliceSource::Series {
            x0: 0.0,
            flow: Box::new(|t: &Rational| {
                pair.flow(&crate::coefficients::Coeff::to_f64(t).unwrap())
            }),
        };
        let spec = GridSpec {
            t_min: r(-1, 1),
            nt: 5,
            ..spec()
        };
        let grid = generate_grid(&source, &spec, provenance()).unwrap();
        assert_eq!(grid.provenance.method, "series");
        for (i, t) in grid.ts.iter().enumerate() {
            assert_eq!(generate_slice(&source, t, &grid.xs), grid.values[i]);
        }
        assert_eq!(grid.ts[1], r(-1, 2));
        assert_eq!(grid.value(1, 2), Some(0.0));
        assert!(grid.to_json().contains("\"t\":[\"-1/1\",\"-1/2\",\"0/1\",\"1/2\",\"1/1\"]"));
    }

    #[test]
    fn undefined_cells_are_missing() {
        let entry = catalog_lookup("schroder-example").unwrap();
        let spec = GridSpec {
            x_min: -1.0,
            x_max: 0.0,
            nx: 2,
            ..spec()
        };
        let grid = generate_grid(&SliceSource::Closed(&entry), &spec, provenance()).unwrap();
        assert_eq!(grid.value(1, 0), None);
        assert!(grid.to_csv().contains("-1,0.5,\n"));
        assert!(grid.to_json().contains("[null,"));
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let entry = catalog_lookup("quadratic").unwrap();
        let spec = GridSpec { nx: 1, ..spec() };
        assert!(generate_grid(&SliceSource::Closed(&entry), &spec, provenance()).is_err());
    }
}
