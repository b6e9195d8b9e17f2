use proptest::prelude::*;

use schroeder_core::catalog::{CatalogEntry, MapId};
use schroeder_core::coefficients::rational as r;
use schroeder_core::engine::{check_conjugacy, default_composition_times, solve_psi};
use schroeder_core::io::{
    generate_grid, generate_slice, report_to_json, series_from_json, series_to_csv,
    series_to_json, FlowGrid, GridSpec, Provenance, ReportContext, SliceSource,
};
use schroeder_core::{Rational, TruncatedSeries};

fn provenance(map: &str) -> Provenance {
    Provenance {
        map: map.into(),
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
        nx: 11,
        t_min: r(-1, 1),
        t_max: r(1, 1),
        nt: 9,
    }
}

fn ricker_grid(threads: usize) -> FlowGrid {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let pair = solve_psi(&CatalogEntry::new(MapId::Ricker).float_map(10).unwrap(), 10).unwrap();
        let source = SliceSource::Series {
            x0: 0.0,
            flow: Box::new(move |t: &Rational| pair.flow(&num_traits::ToPrimitive::to_f64(t).unwrap())),
        };
        generate_grid(&source, &spec(), provenance("ricker")).unwrap()
    })
}

#[test]
fn grid_bytes_do_not_depend_on_parallelism() {
    let one = ricker_grid(1);
    let four = ricker_grid(4);
    assert_eq!(one.to_json(), four.to_json());
    assert_eq!(one.to_csv(), four.to_csv());
}

#[test]
fn slices_equal_grid_rows() {
    let entry = CatalogEntry::new(MapId::SchroderExample);
    let source = SliceSource::Closed(&entry);
    let grid = generate_grid(&source, &spec(), provenance("schroder-example")).unwrap();
    for (i, t) in grid.ts.iter().enumerate() {
        assert_eq!(generate_slice(&source, t, &grid.xs), grid.values[i]);
    }
}

#[test]
fn schroder_example_grid_values() {
    let entry = CatalogEntry::new(MapId::SchroderExample);
    let spec = GridSpec {
        x_min: -0.5,
        x_max: 0.5,
        nx: 3,
        t_min: r(0, 1),
        t_max: r(2, 1),
        nt: 5,
    };
    let grid = generate_grid(&SliceSource::Closed(&entry), &spec, provenance("schroder-example")).unwrap();
    let t_one = grid.ts.iter().position(|t| *t == r(1, 1)).unwrap();
    assert_eq!(grid.value(t_one, 2), Some(1.5));
    for ti in 0..grid.ts.len() {
        // both fixed points are stationary columns
        assert_eq!(grid.value(ti, 0), Some(-0.5));
        assert_eq!(grid.value(ti, 1), Some(0.0));
    }
    assert!(grid.to_csv().starts_with("x,t,value\n"));
}

#[test]
fn series_documents_are_stable() {
    let entry = CatalogEntry::new(MapId::Ricker);
    let pair = solve_psi(&entry.exact_map(8).unwrap(), 8).unwrap();
    let a = series_to_json(&pair.psi, "2/1");
    let b = series_to_json(&solve_psi(&entry.exact_map(8).unwrap(), 8).unwrap().psi, "2/1");
    assert_eq!(a, b);
    assert!(a.ends_with("}\n") && !a.contains('\r'));
    let csv = series_to_csv(&pair.phi);
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn report_lists_each_check() {
    let entry = CatalogEntry::new(MapId::Quartic);
    let map = entry.float_map(8).unwrap();
    let pair = solve_psi(&map, 8).unwrap();
    let report = check_conjugacy(&pair, &map, &default_composition_times()).unwrap();
    let text = report_to_json(
        &report,
        &ReportContext {
            map: "quartic".into(),
            s: "1/3".into(),
        },
    );
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for c in v["checks"].as_array().unwrap() {
        assert!(c["max_residual"].is_number());
        assert!(c["relative"].as_f64().unwrap() < 1e-12, "{c}");
    }
}

proptest! {
    #[test]
    fn rational_series_round_trip(c in proptest::collection::vec((-1_000i64..1_000, 1i64..1_000), 1..16)) {
        let s = TruncatedSeries::new(c.into_iter().map(|(n, d)| r(n, d)).collect()).unwrap();
        let text = series_to_json(&s, "3/2");
        let (back, desc) = series_from_json::<Rational>(&text).unwrap();
        prop_assert_eq!(back, s);
        prop_assert_eq!(desc, "3/2");
    }
}
