//! Dense singular value decompositions and the operators whose s-numbers
//! drive KR decay: the Volterra integration operator, the Fourier multiplier
//! with symbol `1/|n|`, and operators diagonal in the sine basis. Also
//! Bernstein widths of operator-range ellipsoids, the enclosure certificate
//! and lower-bound family built from a Schmidt decomposition, Schatten
//! thresholds and the two-sided bracket for `t(n)`.

mod operator;
mod snumbers;
mod svd;
mod widths;

pub use operator::{
    diagonal_sine_operator, volterra_operator, volterra_operator_with, volterra_reference,
    OperatorKind, OperatorMatrix, VolterraRule,
};
pub use snumbers::{
    multiplier_reference, multiplier_snumbers, schatten_threshold, SchattenEstimate,
    MAX_MULTIPLIER_COUNT,
};
pub use svd::{svd, SchmidtDecomposition, MAX_SVD_SIDE};
pub use widths::{
    bernstein_widths, lip_enclosure_certificate, lower_bound_family, t_n_bounds, LowerBoundFamily,
};
