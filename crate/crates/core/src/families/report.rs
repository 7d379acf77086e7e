use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::Family;
use crate::domains::{atomize, lipschitz_constant};
use crate::error::{invalid, Result};
use crate::orlicz::{summability_report, OrliczGauge, SummabilityReport, Verdict};
use crate::transport::{dual_check, kr_measure, resolve_engine, DualCheck, Engine, EngineTag};

/// Slack in `kr·lip ≥ ‖u‖₂²`.
pub const UNCERTAINTY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct MemberReport {
    /// Index label, `6` or `(2,4)`.
    pub k: String,
    pub kr: f64,
    pub lip: f64,
    pub l2: f64,
    /// `‖u‖₂² / Lip(u)`.
    pub kr_lower_bound: f64,
    pub uncertainty_ok: bool,
    pub engine: EngineTag,
    /// Present for exact transport solves.
    #[serde(skip)]
    pub dual: Option<DualCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntermixingReport {
    pub family: String,
    pub members: Vec<MemberReport>,
    /// `Σ_{j≤k} φ(kr_j)` per gauge label, at scale 1.
    pub partial_sums: BTreeMap<String, Vec<f64>>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub summability: Vec<SummabilityReport>,
    /// First `K` (1-based) with `max_{k≥K} kr_k ≤ ½ kr_1`.
    pub decay_threshold: Option<usize>,
}

impl IntermixingReport {
    pub fn kr_values(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.kr).collect()
    }

    pub fn all_uncertainty_ok(&self) -> bool {
        self.members.iter().all(|m| m.uncertainty_ok)
    }

    /// `max_{k≥K} kr_k` for every `K`.
    pub fn suffix_max(&self) -> Vec<f64> {
        let mut out = self.kr_values();
        for k in (0..out.len().saturating_sub(1)).rev() {
            out[k] = out[k].max(out[k + 1]);
        }
        out
    }
}

/// KR norm, Lipschitz constant and `L²` norm of the first `n` members, the
/// uncertainty check per member and summability diagnostics of the KR
/// sequence for each gauge.
pub fn intermixing_report(
    family: &Family,
    n: usize,
    engine: Engine,
    gauges: &[OrliczGauge],
    a_grid: &[f64],
) -> Result<IntermixingReport> {
    if n == 0 || n > family.len() {
        return invalid(format!("need 1..={} members, got {n}", family.len()));
    }
    let members = family.members[..n]
        .par_iter()
        .enumerate()
        .map(|(k, u)| {
            let mu = atomize(u)?;
            let resolved = resolve_engine(engine, &mu);
            let res = kr_measure(&mu, resolved)?;
            let dual = if res.engine == EngineTag::Bipartite {
                Some(dual_check(&res, &mu)?)
            } else {
                None
            };
            let lip = lipschitz_constant(u);
            let l2 = u.l2_norm();
            let l2sq = l2 * l2;
            Ok(MemberReport {
                k: family.index_label(k),
                kr: res.value,
                lip,
                l2,
                kr_lower_bound: if lip > 0.0 { l2sq / lip } else { 0.0 },
                uncertainty_ok: res.value * lip >= l2sq - UNCERTAINTY_TOL,
                engine: res.engine,
                dual,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let kr: Vec<f64> = members.iter().map(|m| m.kr).collect();
    let mut partial_sums = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    let mut summability = Vec::new();
    let positive = kr.iter().all(|&x| x > 0.0);
    for g in gauges {
        let mut acc = 0.0;
        let sums = kr
            .iter()
            .map(|&x| {
                acc += g.eval(x);
                acc
            })
            .collect();
        partial_sums.insert(g.label(), sums);
        if positive {
            let rep = summability_report(&kr, g, a_grid)?;
            verdicts.insert(g.label(), rep.verdict);
            summability.push(rep);
        } else {
            verdicts.insert(g.label(), Verdict::Inconclusive);
        }
    }

    let mut report = IntermixingReport {
        family: family.name.clone(),
        members,
        partial_sums,
        verdicts,
        summability,
        decay_threshold: None,
    };
    let half = 0.5 * kr[0];
    report.decay_threshold = report
        .suffix_max()
        .iter()
        .position(|&m| m <= half)
        .map(|k| k + 1);
    Ok(report)
}
