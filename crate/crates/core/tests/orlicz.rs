use krnorm::orlicz::{classify_slope, make_gauge, summability_report, OrliczGauge, Verdict};
use proptest::prelude::*;

proptest! {
    #[test]
    fn larger_powers_are_smaller_on_the_unit_interval(t in 1e-6f64..1.0, p in 2.0f64..5.0, dq in 0.01f64..3.0) {
        let a = OrliczGauge::power(p).unwrap();
        let b = OrliczGauge::power(p + dq).unwrap();
        prop_assert!(b.eval(t) <= a.eval(t));
        prop_assert!((a.eval(t) - t.powf(p)).abs() <= 1e-12);
    }

    #[test]
    fn gauges_are_increasing(s in 1e-4f64..0.99, ds in 1e-3f64..0.5) {
        let t = (s + ds).min(1.0);
        for label in ["power:2", "loglog:2", "logalpha:0.5,1.5", "exp:1,0.5"] {
            let g: OrliczGauge = label.parse().unwrap();
            prop_assert!(g.ln_eval(s) <= g.ln_eval(t), "{} at {} {}", label, s, t);
        }
    }

    #[test]
    fn partial_sums_are_running_totals(c in proptest::collection::vec(0.0f64..1.0, 1..50)) {
        let g = OrliczGauge::power(2.0).unwrap();
        let rep = summability_report(&c, &g, &[1.0]).unwrap();
        let mut acc = 0.0;
        for (k, x) in c.iter().enumerate() {
            acc += x * x;
            prop_assert!((rep.partial_sums[k] - acc).abs() <= 1e-12 * (1.0 + acc));
        }
    }
}

#[test]
fn labels_round_trip() {
    for label in [
        "power:2",
        "power:2.5",
        "loglog:3",
        "logalpha:1,1.5",
        "exp:0.5,2",
    ] {
        let g: OrliczGauge = label.parse().unwrap();
        assert_eq!(g.label(), label);
    }
    assert_eq!(make_gauge("exp", &[1.0, 0.5]).unwrap().label(), "exp:1,0.5");
}

#[test]
fn bad_gauge_parameters() {
    for label in [
        "power:1",
        "loglog:0",
        "logalpha:1,1",
        "exp:1,0",
        "exp:1",
        "cubic:2",
        "power",
    ] {
        assert!(label.parse::<OrliczGauge>().is_err(), "{label}");
    }
    assert!(make_gauge("power", &[f64::NAN]).is_err());
    assert!(OrliczGauge::power(0.0).is_err());
}

#[test]
fn slope_classification() {
    assert_eq!(classify_slope(-2.0), Verdict::Converging);
    assert_eq!(classify_slope(-1.2), Verdict::Converging);
    assert_eq!(classify_slope(-1.0), Verdict::Diverging);
    assert_eq!(classify_slope(-0.5), Verdict::Diverging);
    assert_eq!(classify_slope(-1.07), Verdict::Inconclusive);
}

#[test]
fn doubling_constants() {
    let p2 = OrliczGauge::power(2.0).unwrap();
    assert!((p2.delta2_constant() - 4.0).abs() < 1e-9);
    let e: OrliczGauge = "exp:1,1".parse().unwrap();
    // φ(2t)/φ(t) = e^{1/(2t)} blows up as t → 0.
    assert!(e.delta2_constant() > 1e6);
    assert_eq!(p2.r_profile_concave(), Some(true));
    assert_eq!(
        OrliczGauge::power(3.0).unwrap().r_profile_concave(),
        Some(true)
    );
    assert_eq!(e.r_profile_concave(), None);
}

#[test]
fn classic_series() {
    let harmonic: Vec<f64> = (1..=4096).map(|k| 1.0 / (k as f64).sqrt()).collect();
    let p2 = OrliczGauge::power(2.0).unwrap();
    assert_eq!(
        summability_report(&harmonic, &p2, &[1.0]).unwrap().verdict,
        Verdict::Diverging
    );
    let p3 = OrliczGauge::power(3.0).unwrap();
    assert_eq!(
        summability_report(&harmonic, &p3, &[1.0]).unwrap().verdict,
        Verdict::Converging
    );
    let short = vec![0.5; 8];
    assert_eq!(
        summability_report(&short, &p2, &[1.0]).unwrap().verdict,
        Verdict::Inconclusive
    );
    assert!(summability_report(&[-1.0; 20], &p2, &[1.0]).is_err());
}

#[test]
fn scale_matters_for_exponential_gauges() {
    // exp(−C/(a c_k)) with c_k = 1/ln(k+1): terms (k+1)^{−C/a}.
    let c: Vec<f64> = (1..=4096).map(|k| 1.0 / ((k + 1) as f64).ln()).collect();
    let g: OrliczGauge = "exp:0.5,1".parse().unwrap();
    assert_eq!(
        summability_report(&c, &g, &[1.0]).unwrap().verdict,
        Verdict::Diverging
    );
    let rep = summability_report(&c, &g, &[1.0, 0.1]).unwrap();
    assert_eq!(rep.verdict, Verdict::Converging);
    assert_eq!(rep.scale, 0.1);
}
