use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use krnorm::domains::{lipschitz_constant, GridFunction, Metric, MetricMeasureSpace};
use krnorm::families::{
    bessel_bound, dilated_family, gen_dilated, gen_lemma2, gen_lemma3, gen_sine, gen_sine_with,
    gram_deviation, intermixing_report, lemma2_family, lemma2_intervals, lemma3_family,
    sine_family, sine_indices, Lemma2Params, Sampling,
};
use krnorm::orlicz::Verdict;
use krnorm::transport::{kr, kr_interval_exact, Engine};
use proptest::prelude::*;

#[test]
fn one_dimensional_sines_have_closed_form_norms() {
    // ∫₀¹ |∫₀ˣ √2 sin(πnt) dt| dx = √2/(πn) for even n.
    let space = Arc::new(MetricMeasureSpace::cube(1, 1024).unwrap());
    for n in [2usize, 6, 10, 50, 100] {
        let u = gen_sine(&[n], space.clone()).unwrap();
        let v = kr_interval_exact(&u).unwrap().value;
        let exact = SQRT_2 / (PI * n as f64);
        assert!((v - exact).abs() / exact < 1e-9, "n={n}: {v} vs {exact}");
    }
}

#[test]
fn midpoint_sines_are_orthonormal() {
    let space = Arc::new(MetricMeasureSpace::cube(2, 32).unwrap());
    let f = sine_family(2, 4, space, Sampling::Midpoint).unwrap();
    assert!(gram_deviation(&f, f.len()).unwrap() < 1e-12);
    assert!((bessel_bound(&f, f.len()).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn cell_average_gram_within_declared_tolerance() {
    let space = Arc::new(MetricMeasureSpace::cube(1, 256).unwrap());
    let f = sine_family(1, 20, space, Sampling::CellAverage).unwrap();
    let tol = f.gram_tolerance.unwrap();
    let dev = gram_deviation(&f, f.len()).unwrap();
    assert!(dev <= tol, "{dev} > {tol}");
    assert!(dev > 0.0);
}

#[test]
fn sine_indices_are_ordered_by_norm() {
    let idx = sine_indices(2, 3);
    assert_eq!(idx.len(), 9);
    assert_eq!(idx[0], vec![2, 2]);
    assert_eq!(idx[1], vec![2, 4]);
    assert_eq!(idx[2], vec![4, 2]);
    let norms: Vec<usize> = idx.iter().map(|n| n.iter().map(|k| k * k).sum()).collect();
    assert!(norms.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn odd_or_unresolved_indices_are_rejected() {
    let space = Arc::new(MetricMeasureSpace::cube(1, 16).unwrap());
    assert!(gen_sine(&[3], space.clone()).is_err());
    assert!(gen_sine(&[16], space.clone()).is_err());
    assert!(gen_sine(&[2, 2], space).is_err());
}

#[test]
fn sine_lipschitz_bound() {
    let space = Arc::new(MetricMeasureSpace::cube(1, 512).unwrap());
    for n in [2usize, 8, 40] {
        let u = gen_sine_with(&[n], space.clone(), Sampling::Midpoint).unwrap();
        let lip = lipschitz_constant(&u);
        let bound = SQRT_2 * PI * n as f64;
        assert!(lip <= bound && lip > 0.99 * bound);
    }
}

#[test]
fn indicator_pairs_have_closed_form_norms() {
    let params = Lemma2Params::dyadic(10);
    let f = lemma2_family(&params, 10).unwrap();
    assert!(gram_deviation(&f, 10).unwrap() <= 1e-12);
    for (k, u) in f.members.iter().enumerate() {
        let e = params.eps[k];
        // Each set is one atom; the twins sit 2/3 apart.
        let v = kr(u, Engine::Auto).unwrap().value;
        assert!((v - SQRT_2 * e / 3.0).abs() < 1e-14);
        assert!(v >= e / (3.0 * SQRT_2));
    }
}

#[test]
fn indicator_sets_are_disjoint_and_fit() {
    let sets = lemma2_intervals(&Lemma2Params::dyadic(12), 12).unwrap();
    for w in sets.windows(2) {
        assert!(w[0][0].1 <= w[1][0].0 && w[0][1].1 <= w[1][1].0);
    }
    assert!(sets.last().unwrap()[0].1 <= 1.0 / 3.0);
    assert!(sets[0][1].0 >= 2.0 / 3.0);
    let too_big = Lemma2Params {
        eps: vec![0.5, 0.5],
        a: 1.0,
    };
    assert!(lemma2_intervals(&too_big, 2).is_err());
}

#[test]
fn indicator_pairs_on_an_aligned_grid() {
    // 3·4⁵ cells align every set boundary for ε_k = 2^{-k}, k ≤ 5.
    let space = Arc::new(MetricMeasureSpace::cube(1, 3 * 1024).unwrap());
    let f = gen_lemma2(&Lemma2Params::dyadic(5), 5, space.clone()).unwrap();
    assert!(gram_deviation(&f, 5).unwrap() <= 1e-12);
    let coarse = Arc::new(MetricMeasureSpace::cube(1, 48).unwrap());
    assert!(gen_lemma2(&Lemma2Params::dyadic(8), 8, coarse).is_err());
}

#[test]
fn coordinate_cosines_scale_with_weights() {
    let f = lemma3_family(&[1.0, 0.5], 24).unwrap();
    assert!(gram_deviation(&f, 2).unwrap() <= 1e-10);
    let a = kr(&f.members[0], Engine::Auto).unwrap().value;
    let b = kr(&f.members[1], Engine::Auto).unwrap().value;
    // The second coordinate sees the first factor's metric scaled by 1/2.
    assert!((a / b - 2.0).abs() < 1e-9);
    assert!(gen_lemma3(3, f.space.clone()).is_err());
}

#[test]
fn dilation_divides_the_arc_norm() {
    let space = Arc::new(MetricMeasureSpace::circle(720, Metric::Arc).unwrap());
    let u = GridFunction::from_fn(space, |x| SQRT_2 * x[0].cos()).unwrap();
    let base = kr(&u, Engine::CircleArc).unwrap().value;
    for n in [2usize, 3, 5, 6, 9] {
        let v = kr(&gen_dilated(&u, n).unwrap(), Engine::CircleArc)
            .unwrap()
            .value;
        assert!((v * n as f64 - base).abs() / base < 1e-3, "n={n}");
    }
    assert!(gen_dilated(&u, 7).is_err());
    assert!(dilated_family(&u, &[1, 2])
        .unwrap()
        .gram_tolerance
        .is_none());
}

#[test]
fn report_partial_sums_and_threshold() {
    let space = Arc::new(MetricMeasureSpace::cube(1, 2048).unwrap());
    let f = sine_family(1, 64, space, Sampling::CellAverage).unwrap();
    let g: krnorm::orlicz::OrliczGauge = "power:2".parse().unwrap();
    let r = intermixing_report(&f, 64, Engine::Auto, &[g], &[1.0]).unwrap();
    let kr = r.kr_values();
    let sums = &r.partial_sums["power:2"];
    let direct: f64 = kr.iter().map(|x| x * x).sum();
    assert!((sums[63] - direct).abs() < 1e-15);
    assert_eq!(r.verdicts["power:2"], Verdict::Converging);
    // kr_n ∝ 1/n puts n = 4 exactly at half of kr_2, so rounding picks 2 or 3.
    let brute = (0..kr.len())
        .find(|&k| kr[k..].iter().all(|&x| x <= 0.5 * kr[0]))
        .map(|k| k + 1);
    assert_eq!(r.decay_threshold, brute);
    assert!(matches!(brute, Some(2) | Some(3)));
    assert!(r.all_uncertainty_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn uncertainty_on_random_functions(values in proptest::collection::vec(-3.0f64..3.0, 2..80)) {
        let space = Arc::new(MetricMeasureSpace::cube(1, values.len()).unwrap());
        let u = GridFunction::new(space, values).unwrap().centered();
        prop_assume!(u.l2_norm() > 1e-6);
        let k = kr(&u, Engine::Auto).unwrap().value;
        let lip = lipschitz_constant(&u);
        let l2 = u.l2_norm();
        prop_assert!(k * lip >= l2 * l2 - 1e-9);
    }

    #[test]
    fn uncertainty_on_random_circle_functions(values in proptest::collection::vec(-3.0f64..3.0, 3..40)) {
        let space = Arc::new(MetricMeasureSpace::circle(values.len(), Metric::Chordal).unwrap());
        let u = GridFunction::new(space, values).unwrap().centered();
        let k = kr(&u, Engine::Bipartite).unwrap().value;
        let l2 = u.l2_norm();
        prop_assert!(k * lipschitz_constant(&u) >= l2 * l2 - 1e-9);
    }
}
