use rayon::prelude::*;

use super::function::GridFunction;
use super::space::{Metric, MetricMeasureSpace, SpaceKind};

/// Spaces up to this many atoms use every pair.
pub const ALL_PAIRS_LIMIT: usize = 8192;

/// Calls `visit(i, j)` once for every pair of grid cells differing by at
/// most one step along each axis (diagonals included; axis steps alone miss
/// slopes along diagonals).
pub fn for_each_neighbor_pair(space: &MetricMeasureSpace, mut visit: impl FnMut(usize, usize)) {
    let n = space.len();
    let grid = match space.grid() {
        Some(g) => g,
        None => {
            for i in 0..n {
                for j in i + 1..n {
                    visit(i, j);
                }
            }
            return;
        }
    };
    let d = grid.shape.len();
    let offsets = half_offsets(d);
    let mut idx = vec![0usize; d];
    for a in 0..n {
        let mut rem = a;
        for k in 0..d {
            idx[k] = rem % grid.shape[k];
            rem /= grid.shape[k];
        }
        'offsets: for off in &offsets {
            let mut b = 0usize;
            let mut stride = 1usize;
            for k in 0..d {
                let len = grid.shape[k] as i64;
                let mut c = idx[k] as i64 + off[k];
                if c < 0 || c >= len {
                    if !grid.periodic {
                        continue 'offsets;
                    }
                    c = c.rem_euclid(len);
                }
                b += c as usize * stride;
                stride *= grid.shape[k];
            }
            if b != a {
                visit(a, b);
            }
        }
    }
}

/// Offsets in `{-1,0,1}^d` whose first nonzero entry is positive.
fn half_offsets(d: usize) -> Vec<Vec<i64>> {
    let total = 3usize.pow(d as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut rem = code;
        let off: Vec<i64> = (0..d)
            .map(|_| {
                let v = (rem % 3) as i64 - 1;
                rem /= 3;
                v
            })
            .collect();
        if off.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
            out.push(off);
        }
    }
    out
}

/// Atoms lie on a path whose metric is the length along it, so the
/// largest slope is attained between consecutive atoms.
fn is_geodesic_chain(space: &MetricMeasureSpace) -> bool {
    match (space.kind(), space.metric()) {
        (SpaceKind::Cube, _) => space.dimension() == 1,
        (SpaceKind::Circle, Metric::Arc) => true,
        (SpaceKind::Curve, Metric::CurvePullback) => true,
        _ => false,
    }
}

/// Largest `|u(x) − u(y)| / ρ(x, y)`.
///
/// Exact on one-dimensional geodesic spaces (consecutive atoms suffice) and
/// on spaces up to [`ALL_PAIRS_LIMIT`] atoms (every pair). Larger grids use
/// neighbouring cells only, a lower estimate of the continuum constant that
/// converges under refinement for smooth `u`.
pub fn lipschitz_constant(u: &GridFunction) -> f64 {
    let space = u.space();
    let v = u.values();
    let n = space.len();
    let slope = |i: usize, j: usize| {
        let diff = (v[i] - v[j]).abs();
        if diff > 0.0 {
            diff / space.distance(i, j)
        } else {
            0.0
        }
    };
    if is_geodesic_chain(space) {
        let mut best = (1..n).map(|i| slope(i - 1, i)).fold(0.0, f64::max);
        if space.kind() == SpaceKind::Circle && n > 1 {
            best = best.max(slope(n - 1, 0));
        }
        return best;
    }
    if n <= ALL_PAIRS_LIMIT {
        return (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| slope(i, j)).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max);
    }
    let mut best = 0.0f64;
    for_each_neighbor_pair(space, |i, j| best = best.max(slope(i, j)));
    best
}
