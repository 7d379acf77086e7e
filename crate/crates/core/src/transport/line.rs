//! Transport on a line: the norm is `Σ |F_i| (p_{i+1} − p_i)` where `F` is
//! the cumulative mass and `p` the atom coordinates in increasing order.

use super::{EngineTag, Flow, KrResult, TransportPlan};
use crate::domains::{atomize, DiscreteSignedMeasure, GridFunction, Metric, SpaceKind};
use crate::error::{Error, Result};

struct LineSolution {
    value: f64,
    potential: Vec<f64>,
    plan: TransportPlan,
}

/// `positions` must be strictly increasing; `masses` is dense per atom.
fn solve_line(positions: &[f64], masses: &[f64], base: usize) -> LineSolution {
    let n = positions.len();
    let mut value = 0.0;
    let mut potential = vec![0.0; n];
    let mut cumulative = 0.0;
    for i in 0..n.saturating_sub(1) {
        cumulative += masses[i];
        let gap = positions[i + 1] - positions[i];
        value += cumulative.abs() * gap;
        // f' = −sign(F) makes ∫ f dμ = ∫ |F|.
        let slope = if cumulative > 0.0 {
            -1.0
        } else if cumulative < 0.0 {
            1.0
        } else {
            0.0
        };
        potential[i + 1] = potential[i] + slope * gap;
    }
    let shift = potential[base];
    potential.iter_mut().for_each(|f| *f -= shift);

    // Monotone coupling of the positive and negative parts.
    let sources: Vec<(usize, f64)> = (0..n)
        .filter(|&i| masses[i] > 0.0)
        .map(|i| (i, masses[i]))
        .collect();
    let sinks: Vec<(usize, f64)> = (0..n)
        .filter(|&i| masses[i] < 0.0)
        .map(|i| (i, -masses[i]))
        .collect();
    let mut flows = Vec::new();
    let (mut a, mut b) = (0usize, 0usize);
    let (mut left_a, mut left_b) = (
        sources.first().map_or(0.0, |s| s.1),
        sinks.first().map_or(0.0, |s| s.1),
    );
    while a < sources.len() && b < sinks.len() {
        let m = left_a.min(left_b);
        if m > 0.0 {
            flows.push(Flow {
                src: sources[a].0,
                dst: sinks[b].0,
                mass: m,
            });
        }
        left_a -= m;
        left_b -= m;
        if left_a <= 0.0 {
            a += 1;
            left_a = sources.get(a).map_or(0.0, |s| s.1);
        }
        if left_b <= 0.0 {
            b += 1;
            left_b = sinks.get(b).map_or(0.0, |s| s.1);
        }
    }
    let cost = flows
        .iter()
        .map(|f| f.mass * (positions[f.src] - positions[f.dst]).abs())
        .sum();
    LineSolution {
        value,
        potential,
        plan: TransportPlan { flows, cost },
    }
}

fn line_result(mu: &DiscreteSignedMeasure, positions: &[f64], engine: EngineTag) -> KrResult {
    let sol = solve_line(positions, &mu.dense(), mu.space().base_point());
    KrResult::new(sol.value, engine, Some(sol.plan), Some(sol.potential), mu)
}

/// Exact norm of a measure on a one-dimensional cube space.
pub fn kr_interval_measure(mu: &DiscreteSignedMeasure) -> Result<KrResult> {
    let space = mu.space();
    if space.kind() != SpaceKind::Cube || space.dimension() != 1 {
        return Err(Error::EngineMismatch {
            engine: "interval_exact",
            reason: "needs a one-dimensional cube space".into(),
        });
    }
    let positions: Vec<f64> = (0..space.len()).map(|i| space.atom(i)[0]).collect();
    Ok(line_result(mu, &positions, EngineTag::IntervalExact))
}

/// `∫₀¹ |∫₀ˣ u|` for the atomized `u` on a one-dimensional cube.
pub fn kr_interval_exact(u: &GridFunction) -> Result<KrResult> {
    kr_interval_measure(&atomize(u)?)
}

/// Exact norm on a curve space under its length metric.
pub fn kr_curve_weighted_measure(mu: &DiscreteSignedMeasure) -> Result<KrResult> {
    let space = mu.space();
    if space.kind() != SpaceKind::Curve {
        return Err(Error::EngineMismatch {
            engine: "curve_weighted",
            reason: "needs a curve space".into(),
        });
    }
    if *space.metric() != Metric::CurvePullback {
        return Err(Error::EngineMismatch {
            engine: "curve_weighted",
            reason: "the closed form holds for the curve length metric only; \
                     chord distances route to the bipartite solver"
                .into(),
        });
    }
    let curve = space
        .curve_data()
        .ok_or(Error::Missing("curve speed samples"))?;
    Ok(line_result(mu, &curve.arc, EngineTag::CurveWeighted))
}

/// `∫ |J_μ h(x)| ‖φ'(x)‖ dx` with `J_μ h(x) = ∫₀ˣ h dμ`: between consecutive
/// atoms `J_μ h` is constant and the speed is integrated by the trapezoid rule.
pub fn kr_curve_weighted(h: &GridFunction) -> Result<KrResult> {
    kr_curve_weighted_measure(&atomize(h)?)
}
