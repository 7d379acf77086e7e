//! Finite atomizations of metric-measure spaces: the unit cube, the circle,
//! a weighted product of circles and a curve-parametrized interval, together
//! with grid functions, signed measures and discrete Lipschitz constants.

mod function;
pub mod io;
mod lipschitz;
mod space;

pub use function::{
    atomize, atomize_based, compensated_sum, DiscreteSignedMeasure, GridFunction, MEAN_ZERO_TOL,
};
pub use lipschitz::{for_each_neighbor_pair, lipschitz_constant, ALL_PAIRS_LIMIT};
pub use space::{
    build_space, chord, parabola_samples, CurveData, CurveSpec, Grid, Metric, MetricMeasureSpace,
    SpaceKind, SpaceSpec,
};
