//! Kantorovich-Rubinstein norms of zero-mass signed measures.
//!
//! Three closed-form engines (interval, circle with arc metric, curve with
//! its length metric) and an exact transportation solver for any metric.
//! Results carry a transfer plan and a 1-Lipschitz dual potential when the
//! engine can produce them, and [`dual_check`] verifies the pair.

mod bipartite;
mod circle;
mod duality;
mod line;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domains::{atomize, DiscreteSignedMeasure, GridFunction, Metric, SpaceKind};
use crate::error::{invalid, Error, Result};

pub use bipartite::{kr_bipartite, solve_transport, TransportSolution, MAX_SIDE};
pub use circle::{kr_circle_arc, kr_circle_arc_measure};
pub use duality::{dual_check, DualCheck, LIPSCHITZ_SLACK};
pub use line::{
    kr_curve_weighted, kr_curve_weighted_measure, kr_interval_exact, kr_interval_measure,
};

/// Attached to every result: the value is exact for the point masses, not
/// for the continuum function they were sampled from.
pub const ATOMIZED_NOTE: &str = "value for the atomized measure";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineTag {
    IntervalExact,
    CircleArc,
    CurveWeighted,
    Bipartite,
}

impl fmt::Display for EngineTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineTag::IntervalExact => "interval_exact",
            EngineTag::CircleArc => "circle_arc",
            EngineTag::CurveWeighted => "curve_weighted",
            EngineTag::Bipartite => "bipartite",
        })
    }
}

/// Engine selection; `Auto` picks the closed form when one applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    Auto,
    Interval,
    CircleArc,
    Curve,
    Bipartite,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Engine::Auto,
            "interval" => Engine::Interval,
            "circle-arc" => Engine::CircleArc,
            "curve" => Engine::Curve,
            "bipartite" => Engine::Bipartite,
            other => return invalid(format!("unknown engine `{other}`")),
        })
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Interval => "interval",
            Engine::CircleArc => "circle-arc",
            Engine::Curve => "curve",
            Engine::Bipartite => "bipartite",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub src: usize,
    pub dst: usize,
    pub mass: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub flows: Vec<Flow>,
    pub cost: f64,
}

#[derive(Clone, Debug)]
pub struct KrResult {
    pub value: f64,
    pub engine: EngineTag,
    pub plan: Option<TransportPlan>,
    /// Dual function per atom, zero at the base point.
    pub potential: Option<Vec<f64>>,
    /// `cost − Σ f dμ` when both plan and potential are present.
    pub duality_gap: Option<f64>,
    pub discretization_note: String,
}

impl KrResult {
    pub(crate) fn new(
        value: f64,
        engine: EngineTag,
        plan: Option<TransportPlan>,
        potential: Option<Vec<f64>>,
        mu: &DiscreteSignedMeasure,
    ) -> Self {
        let duality_gap = match (&plan, &potential) {
            (Some(p), Some(f)) => Some(p.cost - mu.pair(f)),
            _ => None,
        };
        KrResult {
            value,
            engine,
            plan,
            potential,
            duality_gap,
            discretization_note: ATOMIZED_NOTE.to_string(),
        }
    }
}

/// The engine `Auto` resolves to for measures on this kind of space.
pub fn resolve_engine(engine: Engine, mu: &DiscreteSignedMeasure) -> Engine {
    if engine != Engine::Auto {
        return engine;
    }
    let space = mu.space();
    match (space.kind(), space.metric()) {
        (SpaceKind::Cube, _) if space.dimension() == 1 => Engine::Interval,
        (SpaceKind::Circle, Metric::Arc) => Engine::CircleArc,
        (SpaceKind::Curve, Metric::CurvePullback) => Engine::Curve,
        _ => Engine::Bipartite,
    }
}

pub fn kr_measure(mu: &DiscreteSignedMeasure, engine: Engine) -> Result<KrResult> {
    match resolve_engine(engine, mu) {
        Engine::Interval => kr_interval_measure(mu),
        Engine::CircleArc => kr_circle_arc_measure(mu),
        Engine::Curve => kr_curve_weighted_measure(mu),
        Engine::Bipartite | Engine::Auto => kr_bipartite(mu),
    }
}

/// `‖u‖_KR` with the chosen engine.
pub fn kr(u: &GridFunction, engine: Engine) -> Result<KrResult> {
    kr_measure(&atomize(u)?, engine)
}
