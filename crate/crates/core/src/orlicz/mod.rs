//! Orlicz gauges and summability diagnostics for decreasing sequences such
//! as KR norms of a family or singular numbers of an operator.

mod gauge;
mod summability;

pub use gauge::{make_gauge, GaugeFamily, OrliczGauge};
pub use summability::{
    classify_slope, ls_slope, summability_report, ScaleDiagnostic, SummabilityReport, Verdict,
    BOUNDARY_BAND, CONVERGENCE_MARGIN, MIN_TERMS,
};
