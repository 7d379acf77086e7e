use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::orlicz::{ls_slope, summability_report, OrliczGauge, Verdict, MIN_TERMS};

pub const MAX_MULTIPLIER_COUNT: usize = 1_000_000;

/// Tail regression needs at least this many terms.
const SCHATTEN_MIN_TERMS: usize = 64;

/// The `count` largest values of `1/|n|`, `n ∈ Z^d \ {0}`, with
/// multiplicity.
pub fn multiplier_snumbers(d: usize, count: usize) -> Result<Vec<f64>> {
    if d == 0 || d > 8 {
        return invalid("multiplier dimension must be in 1..=8");
    }
    if count > MAX_MULTIPLIER_COUNT {
        return invalid(format!("count {count} exceeds {MAX_MULTIPLIER_COUNT}"));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut radius = (count as f64 / ball_volume(d)).powf(1.0 / d as f64).ceil() as i64 + 2;
    loop {
        let mut norms = Vec::new();
        let mut point = vec![0i64; d];
        shell_points(
            &mut point,
            0,
            0,
            (radius * radius) as u64,
            radius,
            &mut norms,
        );
        if norms.len() >= count {
            norms.sort_unstable();
            // Every point with |n| ≤ radius is present, so the first `count`
            // norms are the smallest overall.
            return Ok(norms[..count]
                .iter()
                .map(|&q| 1.0 / (q as f64).sqrt())
                .collect());
        }
        radius *= 2;
    }
}

fn shell_points(
    point: &mut [i64],
    axis: usize,
    acc: u64,
    limit: u64,
    radius: i64,
    out: &mut Vec<u64>,
) {
    if axis == point.len() {
        if acc > 0 {
            out.push(acc);
        }
        return;
    }
    for c in -radius..=radius {
        let q = acc + (c * c) as u64;
        if q > limit {
            continue;
        }
        point[axis] = c;
        shell_points(point, axis + 1, q, limit, radius, out);
    }
}

/// Volume of the unit ball in `R^d`.
fn ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    PI.powf(half) / gamma_half_integer(half + 1.0)
}

// Γ at positive integers and half-integers.
fn gamma_half_integer(x: f64) -> f64 {
    let mut g = if x.fract() == 0.0 { 1.0 } else { PI.sqrt() };
    let mut t = if x.fract() == 0.0 { 1.0 } else { 0.5 };
    while t < x - 0.25 {
        g *= t;
        t += 1.0;
    }
    g
}

/// Lattice-count asymptotic `(V_d / k)^{1/d}` for the `k`-th (1-based)
/// multiplier s-number.
pub fn multiplier_reference(d: usize, k: usize) -> f64 {
    (ball_volume(d) / k as f64).powf(1.0 / d as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct SchattenEstimate {
    /// `−1 / slope` of `ln s_k` against `ln k` over the tail; `None` when
    /// there are too few terms.
    pub p_estimate: Option<f64>,
    /// `(α, verdict for Σ s_k^α)`.
    pub probes: Vec<(f64, Verdict)>,
}

/// Estimate of `inf{α : Σ s_k^α < ∞}` from the tail decay of `s`, with a
/// summability verdict per probe exponent.
pub fn schatten_threshold(s: &[f64], probes: &[f64]) -> Result<SchattenEstimate> {
    if let Some(x) = s.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return invalid(format!("s-numbers must be positive and finite, got {x}"));
    }
    if s.windows(2).any(|w| w[1] > w[0]) {
        return invalid("s-numbers must be nonincreasing");
    }
    let mut out = Vec::with_capacity(probes.len());
    for &alpha in probes {
        let verdict = if s.len() < SCHATTEN_MIN_TERMS.max(MIN_TERMS) {
            Verdict::Inconclusive
        } else {
            summability_report(s, &OrliczGauge::power(alpha)?, &[1.0])?.verdict
        };
        out.push((alpha, verdict));
    }
    if s.len() < SCHATTEN_MIN_TERMS {
        return Ok(SchattenEstimate {
            p_estimate: None,
            probes: out,
        });
    }
    let start = s.len() / 4;
    let xs: Vec<f64> = (start..s.len()).map(|k| ((k + 1) as f64).ln()).collect();
    let ys: Vec<f64> = s[start..].iter().map(|x| x.ln()).collect();
    let slope = ls_slope(&xs, &ys);
    let p_estimate = (slope < 0.0).then(|| -1.0 / slope);
    Ok(SchattenEstimate {
        p_estimate,
        probes: out,
    })
}
