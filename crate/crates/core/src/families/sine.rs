use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde_json::json;

use super::Family;
use crate::domains::{GridFunction, MetricMeasureSpace, SpaceKind};
use crate::error::{invalid, Result};

/// How a continuum function becomes values on grid cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sampling {
    /// Mean over each cell, so every atom carries exactly the mass of its
    /// cell and the atomized measure has the same antiderivative as the
    /// continuum function at cell boundaries.
    #[default]
    CellAverage,
    /// Value at the cell midpoint. On a midpoint grid distinct sines stay
    /// exactly orthonormal.
    Midpoint,
}

/// `2^{d/2} ∏ sin(π n_j x_j)`.
pub fn sine_value(n: &[usize], x: &[f64]) -> f64 {
    let scale = 2f64.powf(n.len() as f64 / 2.0);
    scale
        * n.iter()
            .zip(x)
            .map(|(&k, &t)| (PI * k as f64 * t).sin())
            .product::<f64>()
}

fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sin() / z
    }
}

fn check_sine_space(n: &[usize], space: &MetricMeasureSpace) -> Result<usize> {
    let resolution = match (space.kind(), space.resolution()) {
        (SpaceKind::Cube, Some(r)) => r,
        (SpaceKind::Curve, Some(r)) if n.len() == 1 => r,
        _ => return invalid("sine functions need a uniform cube grid (or a curve parameter grid)"),
    };
    if n.len() != space.dimension() {
        return invalid(format!(
            "index has {} entries for a {}-dimensional space",
            n.len(),
            space.dimension()
        ));
    }
    if let Some(&k) = n.iter().find(|&&k| k == 0 || k % 2 == 1) {
        return invalid(format!("sine indices must be even and positive, got {k}"));
    }
    if let Some(&k) = n.iter().find(|&&k| k >= resolution) {
        return invalid(format!(
            "index {k} is not resolved by {resolution} cells per axis"
        ));
    }
    Ok(resolution)
}

/// The sine `u_n` on a uniform grid, sampled by cell averages.
pub fn gen_sine(n: &[usize], space: Arc<MetricMeasureSpace>) -> Result<GridFunction> {
    gen_sine_with(n, space, Sampling::CellAverage)
}

pub fn gen_sine_with(
    n: &[usize],
    space: Arc<MetricMeasureSpace>,
    sampling: Sampling,
) -> Result<GridFunction> {
    let resolution = check_sine_space(n, &space)?;
    let h = 1.0 / resolution as f64;
    let damping: f64 = match sampling {
        Sampling::Midpoint => 1.0,
        // Mean of sin(ωx) over [x−h/2, x+h/2] is sin(ωx)·sinc(ωh/2).
        Sampling::CellAverage => n.iter().map(|&k| sinc(0.5 * PI * k as f64 * h)).product(),
    };
    let values = (0..space.len())
        .map(|i| damping * sine_value(n, space.atom(i)))
        .collect();
    let u = GridFunction::new(space, values)?;
    if !u.is_mean_zero() {
        // Even indices integrate to zero on a midpoint grid; reaching this
        // means the grid is not what check_sine_space accepted.
        return invalid("sampled sine is not mean-zero");
    }
    Ok(u)
}

/// Even multi-indices `(2i_1, ..., 2i_d)` with `1 ≤ i_j ≤ imax`, ordered by
/// `|n|` then lexicographically.
pub fn sine_indices(d: usize, imax: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = imax.pow(d as u32);
    for code in 0..total {
        let mut rem = code;
        let mut n = Vec::with_capacity(d);
        for _ in 0..d {
            n.push(2 * (rem % imax + 1));
            rem /= imax;
        }
        n.reverse();
        out.push(n);
    }
    out.sort_by(|a, b| {
        let na: usize = a.iter().map(|k| k * k).sum();
        let nb: usize = b.iter().map(|k| k * k).sum();
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
    out
}

/// All sines with even indices up to `2·imax` per axis.
pub fn sine_family(
    d: usize,
    imax: usize,
    space: Arc<MetricMeasureSpace>,
    sampling: Sampling,
) -> Result<Family> {
    if d == 0 || imax == 0 {
        return invalid("sine family needs d >= 1 and imax >= 1");
    }
    let indices = sine_indices(d, imax);
    let members = indices
        .iter()
        .map(|n| gen_sine_with(n, space.clone(), sampling))
        .collect::<Result<Vec<_>>>()?;
    let resolution = space.resolution().unwrap_or(0);
    let h = 1.0 / resolution as f64;
    // Distinct sines stay orthogonal under either sampling; cell averages
    // shrink the norm by the sinc factor.
    let gram_tolerance = match sampling {
        Sampling::Midpoint => 1e-10,
        Sampling::CellAverage => {
            let worst = indices
                .iter()
                .map(|n| {
                    let s: f64 = n.iter().map(|&k| sinc(0.5 * PI * k as f64 * h)).product();
                    1.0 - s * s
                })
                .fold(0.0, f64::max);
            worst + 1e-10
        }
    };
    let mut params = BTreeMap::new();
    params.insert("d".into(), json!(d));
    params.insert("imax".into(), json!(imax));
    params.insert("resolution".into(), json!(resolution));
    params.insert(
        "sampling".into(),
        json!(match sampling {
            Sampling::CellAverage => "cell_average",
            Sampling::Midpoint => "midpoint",
        }),
    );
    Ok(Family {
        name: "sine".into(),
        space,
        indices: indices
            .into_iter()
            .map(|n| n.into_iter().map(|k| k as i64).collect())
            .collect(),
        members,
        params,
        gram_tolerance: Some(gram_tolerance),
    })
}
