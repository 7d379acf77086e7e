use std::sync::Arc;

use krnorm::domains::{atomize, DiscreteSignedMeasure, GridFunction, Metric, MetricMeasureSpace};
use krnorm::transport::{
    dual_check, kr, kr_bipartite, kr_circle_arc, kr_interval_exact, kr_measure, solve_transport,
    Engine, EngineTag,
};
use proptest::prelude::*;

/// Minimum over all assignments of unit sources to unit sinks.
fn brute_force(
    units_src: &[usize],
    units_dst: &[usize],
    cost: impl Fn(usize, usize) -> f64,
) -> f64 {
    fn go(
        k: usize,
        perm: &mut Vec<usize>,
        src: &[usize],
        dst: &[usize],
        cost: &dyn Fn(usize, usize) -> f64,
        best: &mut f64,
    ) {
        if k == perm.len() {
            let c: f64 = (0..perm.len()).map(|i| cost(src[i], dst[perm[i]])).sum();
            *best = best.min(c);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            go(k + 1, perm, src, dst, cost, best);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..units_dst.len()).collect();
    let mut best = f64::INFINITY;
    go(0, &mut perm, units_src, units_dst, &cost, &mut best);
    best
}

fn expand(counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
        .collect()
}

/// Split `total` units into `parts` positive counts.
fn split(total: usize, parts: usize, cuts: &[usize]) -> Vec<usize> {
    let mut c = vec![1; parts];
    for (k, &x) in cuts.iter().enumerate().take(total - parts) {
        c[(x + k) % parts] += 1;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transport_matches_assignment(
        n in 1usize..4, m in 1usize..4, extra in 0usize..3,
        cuts in proptest::collection::vec(0usize..7, 8),
        costs in proptest::collection::vec(0.0f64..10.0, 16),
    ) {
        let total = n.max(m) + extra;
        let a = split(total, n, &cuts);
        let b = split(total, m, &cuts[3..]);
        let supply: Vec<f64> = a.iter().map(|&x| x as f64).collect();
        let demand: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        let cost: Vec<f64> = (0..n * m).map(|k| costs[k]).collect();
        let sol = solve_transport(&supply, &demand, &cost);
        let oracle = brute_force(&expand(&a), &expand(&b), |i, j| cost[i * m + j]);
        prop_assert!((sol.cost - oracle).abs() <= 1e-9 * (1.0 + oracle), "{} vs {}", sol.cost, oracle);
        // Dual feasibility and complementary slackness.
        for i in 0..n {
            for j in 0..m {
                prop_assert!(cost[i * m + j] - sol.u[i] - sol.v[j] >= -1e-9);
            }
        }
        for &(i, j, f) in &sol.flows {
            prop_assert!(f > 0.0);
            prop_assert!((cost[i * m + j] - sol.u[i] - sol.v[j]).abs() <= 1e-9);
        }
        let dual: f64 = supply.iter().zip(&sol.u).map(|(a, u)| a * u).sum::<f64>()
            + demand.iter().zip(&sol.v).map(|(b, v)| b * v).sum::<f64>();
        prop_assert!((dual - sol.cost).abs() <= 1e-9 * (1.0 + sol.cost));
    }

    #[test]
    fn bipartite_matches_assignment_on_grid(
        picks in proptest::collection::vec((0usize..16, 1usize..3, any::<bool>()), 2..6),
    ) {
        let space = Arc::new(MetricMeasureSpace::cube(2, 4).unwrap());
        let mut mass = vec![0i64; space.len()];
        for &(i, c, sign) in &picks {
            mass[i] += if sign { c as i64 } else { -(c as i64) };
        }
        let bal: i64 = mass.iter().sum();
        // Balance on an atom not yet used.
        let free = (0..16).find(|i| mass[*i] == 0).unwrap();
        mass[free] -= bal;
        let pos: Vec<usize> = mass.iter().map(|&x| x.max(0) as usize).collect();
        let neg: Vec<usize> = mass.iter().map(|&x| (-x).max(0) as usize).collect();
        let units = pos.iter().sum::<usize>();
        prop_assume!(units > 0 && units <= 7);
        let entries: Vec<(usize, f64)> = mass.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x as f64)).collect();
        let mu = DiscreteSignedMeasure::new(space.clone(), entries).unwrap();
        let res = kr_bipartite(&mu).unwrap();
        let oracle = brute_force(&expand(&pos), &expand(&neg), |i, j| space.distance(i, j));
        prop_assert!((res.value - oracle).abs() <= 1e-9 * (1.0 + oracle));
        prop_assert!(dual_check(&res, &mu).unwrap().certified());
    }

    #[test]
    fn norm_axioms_on_circle(
        a in proptest::collection::vec(-1.0f64..1.0, 12),
        b in proptest::collection::vec(-1.0f64..1.0, 12),
        c in -3.0f64..3.0,
    ) {
        let space = Arc::new(MetricMeasureSpace::circle(12, Metric::Chordal).unwrap());
        let u = GridFunction::new(space.clone(), a).unwrap().centered();
        let v = GridFunction::new(space, b).unwrap().centered();
        let ku = kr(&u, Engine::Bipartite).unwrap().value;
        let kv = kr(&v, Engine::Bipartite).unwrap().value;
        let ksum = kr(&u.add(&v).unwrap(), Engine::Bipartite).unwrap().value;
        let kc = kr(&u.scaled(c).unwrap(), Engine::Bipartite).unwrap().value;
        prop_assert!(ku >= 0.0);
        prop_assert!(ksum <= ku + kv + 1e-12);
        prop_assert!((kc - c.abs() * ku).abs() <= 1e-12 * (1.0 + ku));
    }

    #[test]
    fn closed_forms_match_bipartite(values in proptest::collection::vec(-1.0f64..1.0, 2..40)) {
        let n = values.len();
        let line = Arc::new(MetricMeasureSpace::cube(1, n).unwrap());
        let u = GridFunction::new(line, values.clone()).unwrap().centered();
        let a = kr_interval_exact(&u).unwrap().value;
        let b = kr(&u, Engine::Bipartite).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12);

        let circle = Arc::new(MetricMeasureSpace::circle(n, Metric::Arc).unwrap());
        let w = GridFunction::new(circle, values).unwrap().centered();
        let a = kr_circle_arc(&w).unwrap().value;
        let b = kr(&w, Engine::Bipartite).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn circle_potential_is_a_dual_witness(values in proptest::collection::vec(-1.0f64..1.0, 2..40)) {
        let circle = Arc::new(MetricMeasureSpace::circle(values.len(), Metric::Arc).unwrap());
        let mu = atomize(&GridFunction::new(circle, values).unwrap().centered()).unwrap();
        let res = kr_measure(&mu, Engine::CircleArc).unwrap();
        let f = res.potential.as_ref().unwrap();
        let space = mu.space();
        prop_assert!((mu.pair(f) - res.value).abs() <= 1e-12);
        for i in 0..f.len() {
            for j in 0..f.len() {
                prop_assert!((f[i] - f[j]).abs() <= space.distance(i, j) + 1e-12);
            }
        }
    }
}

#[test]
fn dirac_pair_costs_the_distance() {
    let space = Arc::new(MetricMeasureSpace::cube(2, 8).unwrap());
    for (i, j) in [(0, 63), (5, 6), (17, 42)] {
        let mu = DiscreteSignedMeasure::new(space.clone(), vec![(i, 0.25), (j, -0.25)]).unwrap();
        let res = kr_bipartite(&mu).unwrap();
        assert!((res.value - 0.25 * space.distance(i, j)).abs() < 1e-15);
    }
}

#[test]
fn step_function_on_interval() {
    // u = 1 on [0, 1/2), −1 after: ∫|F| with F the tent of height 1/2.
    let space = Arc::new(MetricMeasureSpace::cube(1, 64).unwrap());
    let u = GridFunction::from_fn(space, |x| if x[0] < 0.5 { 1.0 } else { -1.0 }).unwrap();
    let res = kr_interval_exact(&u).unwrap();
    // Midpoint atoms: Σ_i |F_i| h with F_i = min(i+1, 64−i−1) h.
    let h = 1.0 / 64.0;
    let expected: f64 = (0..63).map(|i| (i + 1).min(63 - i) as f64 * h * h).sum();
    assert!((res.value - expected).abs() < 1e-14);
    assert!((res.value - 0.25).abs() < h);
    assert_eq!(res.engine, EngineTag::IntervalExact);
}

#[test]
fn engines_reject_wrong_spaces() {
    let circle = Arc::new(MetricMeasureSpace::circle(8, Metric::Chordal).unwrap());
    let u = GridFunction::from_fn(circle, |x| x[0].cos()).unwrap();
    assert!(kr(&u, Engine::CircleArc).is_err());
    assert!(kr(&u, Engine::Interval).is_err());
    assert!(kr(&u, Engine::Curve).is_err());
    assert_eq!(kr(&u, Engine::Auto).unwrap().engine, EngineTag::Bipartite);
}

#[test]
fn non_mean_zero_is_rejected() {
    let space = Arc::new(MetricMeasureSpace::cube(1, 8).unwrap());
    let u = GridFunction::from_fn(space, |x| x[0]).unwrap();
    assert!(kr(&u, Engine::Auto).is_err());
}

#[test]
fn degenerate_transport_is_exact() {
    // Equal masses on a regular grid: many tied optimal bases.
    let space = Arc::new(MetricMeasureSpace::cube(2, 16).unwrap());
    let u = GridFunction::from_fn(space, |x| {
        if (x[0] < 0.5) == (x[1] < 0.5) {
            1.0
        } else {
            -1.0
        }
    })
    .unwrap();
    let mu = atomize(&u).unwrap();
    let res = kr_bipartite(&mu).unwrap();
    assert!(dual_check(&res, &mu).unwrap().certified());
    // Each quadrant moves its mass one quadrant width at best.
    assert!(res.value > 0.0 && res.value <= 0.5);
}
