use std::f64::consts::PI;
use std::sync::Arc;

use krnorm::domains::io::{read_function_csv, write_function_csv};
use krnorm::domains::{
    atomize, atomize_based, build_space, chord, lipschitz_constant, CurveSpec, GridFunction,
    Metric, MetricMeasureSpace, SpaceKind, SpaceSpec,
};
use proptest::prelude::*;

fn spaces() -> Vec<MetricMeasureSpace> {
    vec![
        MetricMeasureSpace::cube(1, 17).unwrap(),
        MetricMeasureSpace::cube(2, 5).unwrap(),
        MetricMeasureSpace::cube(3, 3).unwrap(),
        MetricMeasureSpace::circle(16, Metric::Arc).unwrap(),
        MetricMeasureSpace::circle(16, Metric::Chordal).unwrap(),
        MetricMeasureSpace::product_circle(&[1.0, 0.5], 6).unwrap(),
        MetricMeasureSpace::interval_partition(&[0.0, 0.1, 0.45, 0.5, 1.0]).unwrap(),
        build_space(&SpaceSpec {
            kind: SpaceKind::Curve,
            dimension: 1,
            resolution: 20,
            metric: None,
            eps: None,
            curve: Some(CurveSpec::Parabola),
        })
        .unwrap()
        .as_ref()
        .clone(),
    ]
}

#[test]
fn metrics_are_metrics() {
    for s in spaces() {
        let n = s.len();
        for i in 0..n {
            assert_eq!(s.distance(i, i), 0.0);
            for j in 0..n {
                let d = s.distance(i, j);
                assert!(d >= 0.0);
                assert!((d - s.distance(j, i)).abs() < 1e-15);
                if i != j {
                    assert!(d > 0.0, "{:?} atoms {i},{j}", s.metric());
                }
                for k in 0..n {
                    assert!(d <= s.distance(i, k) + s.distance(k, j) + 1e-12);
                }
            }
        }
    }
}

#[test]
fn weights_form_a_probability() {
    for s in spaces() {
        let total: f64 = s.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(s.weights().iter().all(|&w| w > 0.0));
    }
}

#[test]
fn midpoint_quadrature_is_exact_for_linear_functions() {
    let s = Arc::new(MetricMeasureSpace::cube(2, 7).unwrap());
    let u = GridFunction::from_fn(s, |x| 3.0 * x[0] - x[1] + 0.25).unwrap();
    assert!((u.integral() - 1.25).abs() < 1e-14);
}

#[test]
fn circle_metrics() {
    let arc = MetricMeasureSpace::circle(8, Metric::Arc).unwrap();
    let chordal = MetricMeasureSpace::circle(8, Metric::Chordal).unwrap();
    // Opposite points.
    assert!((arc.distance(0, 4) - PI).abs() < 1e-14);
    assert!((chordal.distance(0, 4) - 2.0).abs() < 1e-14);
    assert!((chord(PI / 2.0) - 2f64.sqrt()).abs() < 1e-15);
    for j in 0..8 {
        assert!(chordal.distance(0, j) <= arc.distance(0, j) + 1e-15);
        assert!(arc.distance(0, j) <= PI / 2.0 * chordal.distance(0, j) + 1e-12);
    }
}

#[test]
fn weighted_max_chord_on_product() {
    let s = MetricMeasureSpace::product_circle(&[1.0, 0.5], 4).unwrap();
    // Atom index i1 + 4 i2: move half a turn in the second factor only.
    assert!((s.distance(0, 8) - 0.5 * 2.0).abs() < 1e-14);
    assert!((s.distance(0, 2) - 2.0).abs() < 1e-14);
    assert!((s.distance(0, 10) - 2.0).abs() < 1e-14);
}

#[test]
fn curve_metrics_order() {
    let spec = SpaceSpec {
        kind: SpaceKind::Curve,
        dimension: 1,
        resolution: 64,
        metric: None,
        eps: None,
        curve: Some(CurveSpec::Parabola),
    };
    let pull = build_space(&spec).unwrap();
    let chordal = pull.with_metric(Metric::CurveChord).unwrap();
    for j in 1..64 {
        assert!(chordal.distance(0, j) <= pull.distance(0, j) + 1e-12);
    }
    // Length of the parabola between x=0 and x=1.
    let total = (2.0 * 5f64.sqrt() + (2.0 + 5f64.sqrt()).ln()) / 4.0;
    let data = pull.curve_data().unwrap();
    let approx = data.arc[63] + 0.5 / 64.0 * data.speeds[63];
    assert!((approx - total).abs() < 1e-4);
}

#[test]
fn lipschitz_of_linear_functions() {
    let s = Arc::new(MetricMeasureSpace::cube(1, 50).unwrap());
    let u = GridFunction::from_fn(s, |x| 2.5 * x[0]).unwrap();
    assert!((lipschitz_constant(&u) - 2.5).abs() < 1e-12);

    let s = Arc::new(MetricMeasureSpace::cube(2, 12).unwrap());
    let u = GridFunction::from_fn(s, |x| 3.0 * x[0] + 4.0 * x[1]).unwrap();
    assert!((lipschitz_constant(&u) - 5.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lipschitz_is_the_pairwise_maximum(values in proptest::collection::vec(-2.0f64..2.0, 9)) {
        let s = Arc::new(MetricMeasureSpace::cube(2, 3).unwrap());
        let u = GridFunction::new(s.clone(), values.clone()).unwrap();
        let mut brute = 0.0f64;
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    brute = brute.max((values[i] - values[j]).abs() / s.distance(i, j));
                }
            }
        }
        prop_assert!((lipschitz_constant(&u) - brute).abs() <= 1e-12 * (1.0 + brute));
    }

    #[test]
    fn chain_lipschitz_matches_pairs_on_circle(values in proptest::collection::vec(-2.0f64..2.0, 3..30)) {
        let s = Arc::new(MetricMeasureSpace::circle(values.len(), Metric::Arc).unwrap());
        let u = GridFunction::new(s.clone(), values.clone()).unwrap();
        let n = values.len();
        let mut brute = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                brute = brute.max((values[i] - values[j]).abs() / s.distance(i, j));
            }
        }
        prop_assert!((lipschitz_constant(&u) - brute).abs() <= 1e-12 * (1.0 + brute));
    }

    #[test]
    fn centering_gives_mean_zero(values in proptest::collection::vec(-5.0f64..5.0, 2..60)) {
        let s = Arc::new(MetricMeasureSpace::cube(1, values.len()).unwrap());
        let u = GridFunction::new(s, values).unwrap().centered();
        prop_assert!(u.is_mean_zero());
        let mu = atomize(&u).unwrap();
        prop_assert!(mu.dense().iter().sum::<f64>().abs() < 1e-12);
        prop_assert!((mu.total_variation() - u.l1_norm()).abs() < 1e-12);
    }

    #[test]
    fn based_atomization_balances(values in proptest::collection::vec(-5.0f64..5.0, 2..60)) {
        let s = Arc::new(MetricMeasureSpace::cube(1, values.len()).unwrap());
        let u = GridFunction::new(s, values).unwrap();
        let mu = atomize_based(&u).unwrap();
        prop_assert!(mu.dense().iter().sum::<f64>().abs() < 1e-12);
        // Pairs with functions vanishing at the base point like u does.
        let f: Vec<f64> = (0..u.values().len()).map(|i| i as f64).collect();
        let direct: f64 = u.values().iter().zip(u.space().weights()).zip(&f).map(|((v, w), x)| v * w * x).sum();
        prop_assert!((mu.pair(&f) - direct).abs() < 1e-10);
    }
}

#[test]
fn function_csv_round_trip() {
    let s = Arc::new(MetricMeasureSpace::cube(2, 4).unwrap());
    let u = GridFunction::from_fn(s.clone(), |x| x[0] - x[1]).unwrap();
    let mut buf = Vec::new();
    write_function_csv(&mut buf, &u).unwrap();
    let back = read_function_csv(buf.as_slice(), s).unwrap();
    assert_eq!(back.values(), u.values());
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(MetricMeasureSpace::cube(0, 4).is_err());
    assert!(MetricMeasureSpace::interval_partition(&[0.0, 0.6, 0.5, 1.0]).is_err());
    assert!(MetricMeasureSpace::circle(8, Metric::Euclidean).is_err());
    let s = Arc::new(MetricMeasureSpace::cube(1, 4).unwrap());
    assert!(GridFunction::new(s.clone(), vec![1.0; 3]).is_err());
    assert!(GridFunction::new(s, vec![f64::NAN; 4]).is_err());
    let csv = "x1,value\n0.3,1\n";
    let s = Arc::new(MetricMeasureSpace::cube(1, 4).unwrap());
    assert!(read_function_csv(csv.as_bytes(), s).is_err());
}
