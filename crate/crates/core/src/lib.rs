//! Kantorovich-Rubinstein (Wasserstein-1) norms of zero-mean functions on
//! finite atomizations of metric-measure spaces, the orthonormal families
//! whose norms they measure, and the spectral and summability tools used to
//! study how fast those norms decay.
//!
//! The crate is organised bottom-up:
//!
//! - [`domains`]: spaces, grid functions, signed measures, Lipschitz constants.
//! - [`transport`]: exact KR engines and the duality verifier.
//! - [`families`]: sine, disjoint-indicator, product-torus and dilated families.
//! - [`spectra`]: dense SVD, Volterra and multiplier operators, widths.
//! - [`orlicz`]: gauges and summability verdicts.
//! - [`harness`]: the experiment registry behind the `run` subcommand.
#![forbid(unsafe_code)]
// `!(x > 0.0)` rejects NaN on purpose; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod domains;
pub mod error;
pub mod families;
pub mod harness;
pub mod linalg;
pub mod orlicz;
pub mod spectra;
pub mod transport;

pub use error::{Error, Result};
