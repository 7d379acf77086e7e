use std::f64::consts::PI;
use std::sync::Arc;

use krnorm::domains::{lipschitz_constant, MetricMeasureSpace};
use krnorm::linalg::Matrix;
use krnorm::orlicz::Verdict;
use krnorm::spectra::{
    bernstein_widths, diagonal_sine_operator, lip_enclosure_certificate, lower_bound_family,
    multiplier_reference, multiplier_snumbers, schatten_threshold, svd, t_n_bounds,
    volterra_operator, volterra_operator_with, volterra_reference, VolterraRule,
};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Top singular value by power iteration on AᵗA.
fn power_top(a: &Matrix) -> f64 {
    let mut v = vec![1.0; a.cols()];
    let mut s = 0.0;
    for _ in 0..2000 {
        let w = a.matvec_t(&a.matvec(&v));
        let n = dot(&w, &w).sqrt();
        v = w.iter().map(|x| x / n).collect();
        s = n.sqrt();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn svd_reconstructs(rows in 1usize..7, cols in 1usize..7, data in proptest::collection::vec(-2.0f64..2.0, 36)) {
        let a = Matrix::from_rows(rows, cols, data[..rows * cols].to_vec()).unwrap();
        let d = svd(&a).unwrap();
        prop_assert_eq!(d.rank(), rows.min(cols));
        prop_assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        for j in 0..cols {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            let col = d.apply(&e);
            for i in 0..rows {
                prop_assert!((col[i] - a[(i, j)]).abs() < 1e-10);
            }
        }
        for (p, q) in [(&d.x, cols), (&d.y, rows)] {
            for i in 0..p.len() {
                prop_assert_eq!(p[i].len(), q);
                for j in 0..p.len() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot(&p[i], &p[j]) - want).abs() < 1e-10);
                }
            }
        }
        // Frobenius norm is the ℓ² norm of the s-numbers.
        let f2: f64 = d.s.iter().map(|s| s * s).sum();
        prop_assert!((f2.sqrt() - a.frobenius()).abs() < 1e-10 * (1.0 + a.frobenius()));
    }
}

#[test]
fn top_singular_value_matches_power_iteration() {
    let a = volterra_operator(64).unwrap();
    let d = svd(&a.matrix).unwrap();
    assert!((d.s[0] - power_top(&a.matrix)).abs() < 1e-10);
}

#[test]
fn volterra_converges_at_first_order() {
    let err = |n: usize| {
        let d = svd(&volterra_operator(n).unwrap().matrix).unwrap();
        (d.s[0] - volterra_reference(0)).abs() / volterra_reference(0)
    };
    let (e1, e2) = (err(100), err(200));
    assert!(e1 < 1e-2 && e2 < e1);
    assert!((e1 / e2 - 2.0).abs() < 0.1);
    // The half-cell rule is second order.
    let half = |n: usize| {
        let d = svd(&volterra_operator_with(n, VolterraRule::HalfCell)
            .unwrap()
            .matrix)
        .unwrap();
        (d.s[0] - volterra_reference(0)).abs()
    };
    assert!((half(100) / half(200) - 4.0).abs() < 0.3);
}

#[test]
fn volterra_hilbert_schmidt_norm() {
    // ‖J‖²_HS = ∫∫_{y<x} = 1/2, and Σ 4/((2k+1)²π²) = 1/2.
    let reference: f64 = (0..100_000).map(|k| volterra_reference(k).powi(2)).sum();
    assert!((reference - 0.5).abs() < 1e-5);
    let op = volterra_operator(400).unwrap();
    let f = op.matrix.frobenius();
    assert!((f * f - 0.5).abs() < 2.0 / 400.0);
    assert!(volterra_operator(1).is_err());
}

#[test]
fn multiplier_snumbers_in_one_dimension() {
    // 1/|n| for n = ±1, ±2, ...: each value twice.
    let s = multiplier_snumbers(1, 10).unwrap();
    let want: Vec<f64> = (1..=5).flat_map(|k| [1.0 / k as f64; 2]).collect();
    assert_eq!(s, want);
}

#[test]
fn multiplier_snumbers_count_lattice_points() {
    // Z²: 4 points at |n| = 1, 4 at √2, 4 at 2, 8 at √5.
    let s = multiplier_snumbers(2, 20).unwrap();
    let expect = [(4, 1.0), (4, 2f64.sqrt()), (4, 2.0), (8, 5f64.sqrt())];
    let mut k = 0;
    for (count, r) in expect {
        for _ in 0..count {
            assert!((s[k] - 1.0 / r).abs() < 1e-15);
            k += 1;
        }
    }
    let big = multiplier_snumbers(3, 20_000).unwrap();
    let k = 20_000;
    assert!((big[k - 1] / multiplier_reference(3, k) - 1.0).abs() < 0.05);
    assert!(multiplier_snumbers(0, 5).is_err());
}

#[test]
fn schatten_threshold_of_power_sequences() {
    for p in [1.0f64, 2.0, 3.0] {
        let s: Vec<f64> = (1..=5000).map(|k| (k as f64).powf(-1.0 / p)).collect();
        let est = schatten_threshold(&s, &[p, p + 1.0]).unwrap();
        assert!((est.p_estimate.unwrap() - p).abs() < 1e-9);
        assert_eq!(est.probes[0].1, Verdict::Diverging);
        assert_eq!(est.probes[1].1, Verdict::Converging);
    }
    let short = schatten_threshold(&[1.0, 0.5], &[2.0]).unwrap();
    assert!(short.p_estimate.is_none());
    assert!(schatten_threshold(&[0.5, 1.0], &[2.0]).is_err());
    assert!(schatten_threshold(&[1.0, 0.0], &[2.0]).is_err());
}

#[test]
fn widths_and_bracket() {
    let d = svd(&volterra_operator(32).unwrap().matrix).unwrap();
    assert_eq!(bernstein_widths(&d, 3).unwrap(), d.s[3]);
    assert!(bernstein_widths(&d, 32).is_err());
    let (lo, hi) = t_n_bounds(&d.s, 4).unwrap();
    assert_eq!(lo, d.s[4]);
    assert!((hi - 2.0 * d.s[4]).abs() < 1e-15);
    assert!(t_n_bounds(&d.s, 0).is_err());
    assert!(lip_enclosure_certificate(&[1.0], &[1.0, 2.0]).is_err());
    assert!((lip_enclosure_certificate(&[0.3, 0.4], &[1.0, 1.0]).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn diagonal_operator_lower_bound_family() {
    let space = Arc::new(MetricMeasureSpace::cube(1, 128).unwrap());
    let s: Vec<f64> = (1..=10).map(|k| 0.17 / (k * k) as f64).collect();
    let op = diagonal_sine_operator(&space, &s).unwrap();
    let d = svd(&op.matrix).unwrap();
    for (got, want) in d.s.iter().zip(&s) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(d.s[10] < 1e-12);
    // Lip(√2 sin πkx) ≤ √2 πk.
    let lips: Vec<f64> = (1..=10).map(|k| 2f64.sqrt() * PI * k as f64).collect();
    let cert = lip_enclosure_certificate(&s, &lips).unwrap();
    assert!(cert <= 1.0);
    let fam = lower_bound_family(&op, &d, space, 10, Some(cert)).unwrap();
    assert!(fam.verified);
    for k in 0..10 {
        assert!((fam.pairings[k] - fam.claims[k]).abs() < 1e-10);
        let w =
            krnorm::domains::GridFunction::new(fam.family.space.clone(), fam.witnesses[k].clone())
                .unwrap();
        assert!(lipschitz_constant(&w) <= 1.0 + 1e-9);
    }
    let unverified = lower_bound_family(&op, &d, fam.family.space.clone(), 3, Some(1.5)).unwrap();
    assert!(!unverified.verified);
    assert!(diagonal_sine_operator(&fam.family.space, &vec![0.1; 128]).is_err());
}
