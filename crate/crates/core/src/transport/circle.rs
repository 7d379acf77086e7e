//! Transport on the circle with the arc metric: cutting the circle and
//! shifting the cumulative mass by a constant `t` gives
//! `min_t ∮ |F(θ) − t| dθ`, minimized at a length-weighted median of `F`.

use std::f64::consts::PI;

use super::{EngineTag, KrResult};
use crate::domains::{atomize, DiscreteSignedMeasure, GridFunction, Metric, SpaceKind};
use crate::error::{Error, Result};

pub fn kr_circle_arc_measure(mu: &DiscreteSignedMeasure) -> Result<KrResult> {
    let space = mu.space();
    if space.kind() != SpaceKind::Circle {
        return Err(Error::EngineMismatch {
            engine: "circle_arc",
            reason: "needs a circle space".into(),
        });
    }
    if *space.metric() != Metric::Arc {
        return Err(Error::EngineMismatch {
            engine: "circle_arc",
            reason: "chordal cost has no rotation formula; use the bipartite solver".into(),
        });
    }
    let n = space.len();
    let masses = mu.dense();
    let angles: Vec<f64> = (0..n).map(|i| space.atom(i)[0]).collect();

    // Segment k covers [θ_{k−1}, θ_k) with θ_{−1} = 0, θ_n = 2π; its cumulative
    // mass is F_{k−1}.
    let mut seg_len = Vec::with_capacity(n + 1);
    let mut seg_f = Vec::with_capacity(n + 1);
    seg_len.push(angles[0]);
    seg_f.push(0.0);
    let mut cumulative = 0.0;
    for i in 0..n {
        cumulative += masses[i];
        let end = if i + 1 < n { angles[i + 1] } else { 2.0 * PI };
        seg_len.push(end - angles[i]);
        seg_f.push(cumulative);
    }

    let t = weighted_median(&seg_f, &seg_len);
    let value: f64 = seg_f
        .iter()
        .zip(&seg_len)
        .map(|(f, l)| (f - t).abs() * l)
        .sum();

    // f' = −s with s = sign(F − t); on segments where F = t, s is the
    // constant that makes ∮ s = 0 so the potential closes up.
    let (mut above, mut below, mut level) = (0.0, 0.0, 0.0);
    for (f, l) in seg_f.iter().zip(&seg_len) {
        if *f > t {
            above += l;
        } else if *f < t {
            below += l;
        } else {
            level += l;
        }
    }
    let tie_slope = if level > 0.0 {
        ((below - above) / level).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let mut potential = vec![0.0; n];
    let mut f = 0.0;
    for i in 0..n {
        // Segment i ends at atom i.
        let s = if seg_f[i] > t {
            1.0
        } else if seg_f[i] < t {
            -1.0
        } else {
            tie_slope
        };
        f -= s * seg_len[i];
        potential[i] = f;
    }
    let shift = potential[space.base_point()];
    potential.iter_mut().for_each(|v| *v -= shift);

    Ok(KrResult::new(
        value,
        EngineTag::CircleArc,
        None,
        Some(potential),
        mu,
    ))
}

/// `min_t ∮ |F − t|` for the atomized `u` on an arc-metric circle.
pub fn kr_circle_arc(u: &GridFunction) -> Result<KrResult> {
    kr_circle_arc_measure(&atomize(u)?)
}

/// Smallest value `t` among `values` with at least half the total weight at
/// or below it.
fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &k in &order {
        acc += weights[k];
        if 2.0 * acc >= total {
            return values[k];
        }
    }
    values[order[order.len() - 1]]
}
