use serde::Serialize;

use super::gauge::OrliczGauge;
use crate::error::{invalid, Result};

/// Tail slope below `−1 − CONVERGENCE_MARGIN` reads as converging.
pub const CONVERGENCE_MARGIN: f64 = 0.1;

/// Tail slope at or above `−1 − BOUNDARY_BAND` reads as diverging. Slopes
/// near `−1` are the harmonic boundary, where partial sums grow like a
/// logarithm.
pub const BOUNDARY_BAND: f64 = 0.05;

/// Shorter sequences are always inconclusive.
pub const MIN_TERMS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converging => "converging",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Diagnostics of `Σ φ(a c_k)` at one scale `a`.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleDiagnostic {
    pub a: f64,
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of `ln φ(a c_k)` against `ln k` over the tail.
    pub tail_slope: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummabilityReport {
    pub gauge: String,
    /// Scale that decided the verdict.
    pub scale: f64,
    pub partial_sums: Vec<f64>,
    pub tail_slope: f64,
    pub verdict: Verdict,
    pub per_scale: Vec<ScaleDiagnostic>,
}

/// Verdict for a single tail slope.
pub fn classify_slope(slope: f64) -> Verdict {
    if slope < -1.0 - CONVERGENCE_MARGIN {
        Verdict::Converging
    } else if slope >= -1.0 - BOUNDARY_BAND {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    }
}

/// First index (0-based) of the regression window: the last three quarters.
fn tail_start(len: usize) -> usize {
    len / 4
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

fn diagnose(c: &[f64], gauge: &OrliczGauge, a: f64) -> ScaleDiagnostic {
    let logs: Vec<f64> = c.iter().map(|&x| gauge.ln_eval(a * x)).collect();
    let mut acc = 0.0;
    let partial_sums = logs
        .iter()
        .map(|l| {
            acc += l.exp();
            acc
        })
        .collect();
    if c.len() < MIN_TERMS {
        return ScaleDiagnostic {
            a,
            partial_sums,
            tail_slope: f64::NAN,
            verdict: Verdict::Inconclusive,
        };
    }
    let start = tail_start(c.len());
    let xs: Vec<f64> = (start..c.len()).map(|k| ((k + 1) as f64).ln()).collect();
    let slope = ls_slope(&xs, &logs[start..]);
    let verdict = if slope.is_finite() {
        classify_slope(slope)
    } else {
        Verdict::Inconclusive
    };
    ScaleDiagnostic {
        a,
        partial_sums,
        tail_slope: slope,
        verdict,
    }
}

/// Partial sums and a convergence verdict for `Σ φ(a c_k)`.
///
/// Each scale gets the slope of `ln φ(a c_k)` against `ln k` over the last
/// three quarters of the sequence. The sum is declared converging if some
/// scale has slope below `−1.1`, diverging if every scale has slope at or
/// above `−1.05`, and inconclusive otherwise. Finite data cannot settle an
/// infinite sum; these are trend diagnostics.
pub fn summability_report(
    c: &[f64],
    gauge: &OrliczGauge,
    a_grid: &[f64],
) -> Result<SummabilityReport> {
    if c.is_empty() {
        return invalid("empty sequence");
    }
    if let Some(x) = c.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return invalid(format!(
            "sequence entries must be positive and finite, got {x}"
        ));
    }
    if a_grid.is_empty() || a_grid.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return invalid("scale grid must be nonempty and positive");
    }
    let per_scale: Vec<ScaleDiagnostic> = a_grid.iter().map(|&a| diagnose(c, gauge, a)).collect();

    let converging = per_scale
        .iter()
        .filter(|d| d.verdict == Verdict::Converging)
        .max_by(|x, y| x.a.total_cmp(&y.a));
    let chosen = if let Some(d) = converging {
        d
    } else if per_scale.iter().all(|d| d.verdict == Verdict::Diverging) {
        per_scale
            .iter()
            .min_by(|x, y| x.a.total_cmp(&y.a))
            .expect("nonempty grid")
    } else {
        per_scale
            .iter()
            .find(|d| d.verdict == Verdict::Inconclusive)
            .expect("some scale is inconclusive")
    };
    Ok(SummabilityReport {
        gauge: gauge.label(),
        scale: chosen.a,
        partial_sums: chosen.partial_sums.clone(),
        tail_slope: chosen.tail_slope,
        verdict: chosen.verdict,
        per_scale: per_scale.clone(),
    })
}
