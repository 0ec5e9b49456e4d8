mod common;

use cnbs::analytic::{call_price, d1_d2, norm_cdf, parity_residual, put_price, MarketQuery, OptionKind, OptionSpec};
use proptest::prelude::*;

use common::{bs_call_quad, norm_cdf_quad};

#[test]
fn norm_cdf_matches_quadrature_on_eight_sigma_range() {
    let mut worst: f64 = 0.0;
    let mut x = -8.0;
    while x <= 8.0 {
        worst = worst.max((norm_cdf(x).unwrap() - norm_cdf_quad(x)).abs());
        x += 0.0625;
    }
    assert!(worst <= 1e-10, "max abs error {worst:e}");
}

#[test]
fn norm_cdf_quantile_point() {
    // high-precision quadrature: 0.9750000009035576
    let v = norm_cdf(1.959964).unwrap();
    assert!((v - 0.975_000_000_903_557_6).abs() < 1e-13);
    assert!((norm_cdf_quad(1.959964) - 0.975_000_000_903_557_6).abs() < 1e-13);
}

#[test]
fn norm_cdf_is_monotone_and_saturates() {
    let mut prev = norm_cdf(-40.0).unwrap();
    let mut x = -40.0;
    while x < 40.0 {
        x += 0.01;
        let v = norm_cdf(x).unwrap();
        assert!(v >= prev);
        prev = v;
    }
    assert_eq!(norm_cdf(40.0).unwrap(), 1.0);
    assert_eq!(norm_cdf(-40.0).unwrap(), 0.0);
}

#[test]
fn reference_scenario_values() {
    // extended-precision evaluation: d1 = 0.31819805153, d2 = 0.03535533906, C = 1.35803883744637
    let spec = OptionSpec::new(OptionKind::Call, 10.0, 0.1, 0.4, 0.5).unwrap();
    let q = MarketQuery::new(10.0, 0.0);
    let (d1, d2) = d1_d2(&spec, &q).unwrap();
    assert!((d1 - 0.318_198_051_533_946_4).abs() < 1e-14);
    assert!((d2 - 0.035_355_339_059_327_4).abs() < 1e-14);
    let c = call_price(&spec, &q).unwrap();
    assert!((c - 1.358_038_837_446_373).abs() < 1e-12);
    assert!((c - bs_call_quad(10.0, 10.0, 0.1, 0.4, 0.5)).abs() < 1e-12);
    let p = put_price(&spec.with_kind(OptionKind::Put), &q).unwrap();
    assert!((p - 0.870_333_082_453_513).abs() < 1e-12);
}

#[test]
fn put_scenario_value() {
    // extended-precision evaluation of the E = 100 put: 5.653826845314404
    let spec = OptionSpec::new(OptionKind::Put, 100.0, 0.25, 0.4, 1.0).unwrap();
    let p = put_price(&spec, &MarketQuery::new(100.0, 0.0)).unwrap();
    assert!((p - 5.653_826_845_314_404).abs() < 1e-11);
}

#[test]
fn small_volatility_limit() {
    for &(s, e, r, t) in
        &[(10.0, 10.0, 0.1, 0.5), (8.0, 10.0, 0.05, 1.0), (120.0, 100.0, 0.25, 1.0), (95.0, 100.0, 0.0, 2.0)]
    {
        let spec = OptionSpec::new(OptionKind::Call, e, r, 1e-8, t).unwrap();
        let c = call_price(&spec, &MarketQuery::new(s, 0.0)).unwrap();
        let limit = (s - e * (-r * t).exp()).max(0.0);
        assert!((c - limit).abs() <= 1e-4 * e, "{s} {e}: {c} vs {limit}");
    }
}

fn valid_inputs() -> impl Strategy<Value = (OptionSpec, MarketQuery)> {
    (1.0f64..200.0, 0.0f64..0.3, 0.01f64..1.0, 0.05f64..3.0, 0.0f64..1.0, 0.2f64..4.0).prop_map(
        |(strike, rate, vol, expiry, frac, moneyness)| {
            let spec = OptionSpec::new(OptionKind::Call, strike, rate, vol, expiry).unwrap();
            (spec, MarketQuery::new(strike * moneyness, frac * expiry * 0.999))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn parity_holds((spec, q) in valid_inputs()) {
        let c = call_price(&spec, &q).unwrap();
        let p = put_price(&spec.with_kind(OptionKind::Put), &q).unwrap();
        let res = parity_residual(c, p, q.spot, spec.discounted_strike(q.time));
        prop_assert!(res.abs() <= 1e-10 * spec.strike.max(1.0), "residual {res:e}");
    }

    #[test]
    fn no_arbitrage_bounds((spec, q) in valid_inputs()) {
        let disc = spec.discounted_strike(q.time);
        let c = call_price(&spec, &q).unwrap();
        let p = put_price(&spec.with_kind(OptionKind::Put), &q).unwrap();
        prop_assert!(c >= (q.spot - disc).max(0.0) && c <= q.spot);
        prop_assert!(p >= (disc - q.spot).max(0.0) && p <= disc);
    }

    #[test]
    fn d1_minus_d2((spec, q) in valid_inputs()) {
        let (d1, d2) = d1_d2(&spec, &q).unwrap();
        let expected = spec.volatility * (spec.expiry - q.time).sqrt();
        prop_assert!(((d1 - d2) - expected).abs() <= 1e-12 * expected.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn monotone_in_spot(
        (spec, _) in valid_inputs(),
        mut spots in prop::collection::vec(0.0f64..400.0, 2..40),
    ) {
        spots.sort_by(f64::total_cmp);
        let put = spec.with_kind(OptionKind::Put);
        let calls: Vec<f64> = spots.iter().map(|s| call_price(&spec, &MarketQuery::new(*s, 0.0)).unwrap()).collect();
        let puts: Vec<f64> = spots.iter().map(|s| put_price(&put, &MarketQuery::new(*s, 0.0)).unwrap()).collect();
        for w in calls.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        for w in puts.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }
}
