use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use schroeder_core::catalog::{CatalogEntry, MapId};
use schroeder_core::coefficients::rational as r;
use schroeder_core::engine::{
    check_conjugacy, flow_limit_s_to_1, regular_limit, solve_psi, solve_psi_eps, JetWindow,
    MapSpec,
};
use schroeder_core::{EpsJet, Rational, TruncatedSeries};

const ORDER: usize = 7;

fn poly_map(s: Rational, rest: Vec<Rational>, order: usize) -> TruncatedSeries<Rational> {
    let mut c = vec![Rational::zero(), s];
    c.extend(rest);
    c.resize(order + 1, Rational::zero());
    c.truncate(order + 1);
    TruncatedSeries::new(c).unwrap()
}

fn arb_tail() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-4i64..5, 1i64..4), 1..4)
        .prop_map(|v| v.into_iter().map(|(n, d)| r(n, d)).collect())
}

/// Perfect squares, so that half-integer times stay rational.
fn arb_square_multiplier() -> impl Strategy<Value = Rational> {
    (1i64..5, 1i64..5)
        .prop_filter("nonresonant", |(n, d)| n != d)
        .prop_map(|(n, d)| r(n * n, d * d))
}

fn arb_time() -> impl Strategy<Value = Rational> {
    (-6i64..7).prop_map(|n| r(n, 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_conjugacy_residuals_vanish(s in arb_square_multiplier(), tail in arb_tail()) {
        let map = MapSpec::new(poly_map(s, tail, ORDER)).unwrap();
        let pair = solve_psi(&map, ORDER).unwrap();
        let report = check_conjugacy(&pair, &map, &[(r(1, 2), r(1, 2)), (r(3, 2), r(-5, 2))]).unwrap();
        prop_assert!(report.skipped.is_empty(), "{:?}", report.skipped);
        prop_assert!(report.all_exact_zero(), "{:?}", report.checks);
    }

    #[test]
    fn flows_compose(
        s in arb_square_multiplier(),
        tail in arb_tail(),
        t1 in arb_time(),
        t2 in arb_time(),
    ) {
        let map = MapSpec::new(poly_map(s, tail, ORDER)).unwrap();
        let pair = solve_psi(&map, ORDER).unwrap();
        let left = pair.flow(&t1).unwrap().compose(&pair.flow(&t2).unwrap()).unwrap();
        prop_assert_eq!(left, pair.flow(&(&t1 + &t2)).unwrap());
    }

    #[test]
    fn backward_step_inverts_forward_step(s in arb_square_multiplier(), tail in arb_tail()) {
        let map = MapSpec::new(poly_map(s, tail, ORDER)).unwrap();
        let pair = solve_psi(&map, ORDER).unwrap();
        let back = pair.flow(&r(-1, 1)).unwrap();
        prop_assert_eq!(back.compose(map.f1()).unwrap(), TruncatedSeries::identity(ORDER));
        prop_assert_eq!(pair.flow(&r(1, 1)).unwrap(), map.f1().clone());
    }

    #[test]
    fn float_flows_compose(
        s in 1.2f64..3.0,
        tail in proptest::collection::vec(-1.0f64..1.0, 1..4),
        t1 in -1.0f64..1.0,
        t2 in -1.0f64..1.0,
    ) {
        let mut c = vec![0.0, s];
        c.extend(tail);
        c.resize(ORDER + 1, 0.0);
        let map = MapSpec::new(TruncatedSeries::new(c).unwrap()).unwrap();
        let pair = solve_psi(&map, ORDER).unwrap();
        let left = pair.flow(&t1).unwrap().compose(&pair.flow(&t2).unwrap()).unwrap();
        let right = pair.flow(&(t1 + t2)).unwrap();
        let scale = right.coefficients().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (a, b) in left.coefficients().iter().zip(right.coefficients()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn jet_poles_cancel(tail in arb_tail(), t in (-8i64..9, 1i64..5)) {
        let unit = poly_map(Rational::one(), tail, 6);
        let pair = solve_psi_eps(&unit, 6, JetWindow::default()).unwrap();
        let flow = pair.flow(&r(t.0, t.1)).unwrap();
        for (n, c) in flow.coefficients().iter().enumerate() {
            let lowest = c.lowest_power().unwrap_or(0);
            prop_assert!(lowest >= 0, "x^{n}: {c}");
        }
        prop_assert!(regular_limit(&flow).is_ok());
    }
}

#[test]
fn parabolic_limit_is_a_flow() {
    let unit = CatalogEntry::new(MapId::Ricker).unit_series(8).unwrap();
    let pair = solve_psi_eps(&unit, 8, JetWindow::default()).unwrap();
    let third = flow_limit_s_to_1(&pair, &r(1, 3)).unwrap();
    let two_thirds = flow_limit_s_to_1(&pair, &r(2, 3)).unwrap();
    let one = flow_limit_s_to_1(&pair, &r(1, 1)).unwrap();
    assert_eq!(third.compose(&two_thirds).unwrap(), one);
    assert_eq!(third.compose(&third).unwrap().compose(&third).unwrap(), one);
    assert_eq!(one, unit);
}

#[test]
fn wider_jet_window_does_not_change_limits() {
    let unit = CatalogEntry::new(MapId::Ricker).unit_series(7).unwrap();
    let narrow = solve_psi_eps(&unit, 7, JetWindow::new(0)).unwrap();
    let wide = solve_psi_eps(&unit, 7, JetWindow::new(5)).unwrap();
    for t in [r(1, 2), r(-3, 4), r(5, 1)] {
        assert_eq!(
            flow_limit_s_to_1(&narrow, &t).unwrap(),
            flow_limit_s_to_1(&wide, &t).unwrap()
        );
    }
}

#[test]
fn jet_multiplier_tracks_its_precision() {
    let unit = CatalogEntry::new(MapId::Ricker).unit_series(5).unwrap();
    let pair = solve_psi_eps(&unit, 5, JetWindow::new(3)).unwrap();
    let s: &EpsJet = &pair.s;
    assert_eq!(s.coefficient(0), Some(Rational::one()));
    assert!(s.upper().is_some());
}

#[test]
fn koenigs_error_shrinks_by_the_multiplier() {
    // backward iteration for s = 2: error ratio → 1/2
    let entry = CatalogEntry::new(MapId::SchroderExample);
    let x: f64 = 0.3;
    let exact = 0.5 * (2.0 * x).ln_1p();
    let err = |n| (entry.koenigs(x, n).unwrap() - exact).abs();
    for n in 10..20 {
        let ratio = err(n + 1) / err(n);
        assert!((ratio - 0.5).abs() < 0.01, "N = {n}: ratio {ratio}");
    }

    // forward iteration for s = 1/3
    let entry = CatalogEntry::new(MapId::Quartic);
    let exact = entry.psi(1.8).unwrap();
    let err = |n| (entry.koenigs(1.8, n).unwrap() - exact).abs();
    for n in 5..12 {
        let ratio = err(n + 1) / err(n);
        assert!((ratio - 1.0 / 3.0).abs() < 0.01, "N = {n}: ratio {ratio}");
    }
}

#[test]
fn float_and_exact_flows_agree() {
    let entry = CatalogEntry::new(MapId::Ricker);
    let exact = solve_psi(&entry.exact_map(10).unwrap(), 10).unwrap();
    let float = solve_psi(&entry.float_map(10).unwrap(), 10).unwrap();
    let a = exact.flow(&r(3, 1)).unwrap();
    let b = float.flow(&3.0).unwrap();
    for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
        let x = x.to_f64().unwrap();
        assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
    }
}
