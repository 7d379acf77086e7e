use rayon::prelude::*;

use super::KrResult;
use crate::domains::DiscreteSignedMeasure;
use crate::error::{Error, Result};

/// Relative slack allowed in `|f(x) − f(y)| ≤ ρ(x, y)` before a pair counts
/// as a violation.
pub const LIPSCHITZ_SLACK: f64 = 1e-12;

/// Recomputed primal-dual quantities for a result with plan and potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualCheck {
    /// Primal cost recomputed from the plan and the space metric.
    pub cost: f64,
    /// `cost − Σ f dμ`.
    pub gap: f64,
    /// `max(0, |f(x) − f(y)| − ρ(x, y)(1 + LIPSCHITZ_SLACK))` over all pairs.
    pub lipschitz_violation: f64,
    /// Largest difference between the plan's net outflow and `μ` per atom.
    pub marginal_violation: f64,
}

impl DualCheck {
    /// Gap and Lipschitz violation within `1e-9 (1 + cost)`, marginals within
    /// `1e-10`.
    pub fn certified(&self) -> bool {
        let tol = 1e-9 * (1.0 + self.cost);
        self.gap.abs() <= tol && self.lipschitz_violation <= tol && self.marginal_violation <= 1e-10
    }
}

/// Verifies a plan/potential pair against the measure it was computed for.
pub fn dual_check(result: &KrResult, mu: &DiscreteSignedMeasure) -> Result<DualCheck> {
    let plan = result
        .plan
        .as_ref()
        .ok_or(Error::Missing("transport plan"))?;
    let f = result
        .potential
        .as_ref()
        .ok_or(Error::Missing("dual potential"))?;
    let space = mu.space();
    let n = space.len();
    if f.len() != n {
        return Err(Error::InvalidParameter(format!(
            "potential has {} values for {n} atoms",
            f.len()
        )));
    }

    let mut net = vec![0.0; n];
    let mut cost = 0.0;
    for fl in &plan.flows {
        if fl.src >= n || fl.dst >= n {
            return Err(Error::OutOfRange {
                index: fl.src.max(fl.dst),
                len: n,
            });
        }
        net[fl.src] += fl.mass;
        net[fl.dst] -= fl.mass;
        cost += fl.mass * space.distance(fl.src, fl.dst);
    }
    let target = mu.dense();
    let marginal_violation = net
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let gap = cost - mu.pair(f);

    let lipschitz_violation = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in i + 1..n {
                let excess = (f[i] - f[j]).abs() - space.distance(i, j) * (1.0 + LIPSCHITZ_SLACK);
                worst = worst.max(excess);
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    Ok(DualCheck {
        cost,
        gap,
        lipschitz_violation,
        marginal_violation,
    })
}
