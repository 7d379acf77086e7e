//! Explicit function families: products of sines on the cube, disjoint
//! indicator pairs on the interval, coordinate cosines on a product of
//! circles, and dilates of a circle function. Plus Gram/Bessel diagnostics
//! and per-family reports of KR norms, Lipschitz constants and summability.

mod dilated;
mod lemma2;
mod lemma3;
mod report;
mod sine;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::Value;

use crate::domains::{GridFunction, MetricMeasureSpace};
use crate::error::{invalid, Result};
use crate::linalg::{symmetric_eigen, Matrix};

pub use dilated::{dilated_family, gen_dilated};
pub use lemma2::{gen_lemma2, lemma2_family, lemma2_intervals, lemma2_space, Lemma2Params};
pub use lemma3::{gen_lemma3, lemma3_family};
pub use report::{intermixing_report, IntermixingReport, MemberReport, UNCERTAINTY_TOL};
pub use sine::{gen_sine, gen_sine_with, sine_family, sine_indices, sine_value, Sampling};

/// A finite section of a family: members generated in index order.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub space: Arc<MetricMeasureSpace>,
    /// One label per member (an integer or a tuple).
    pub indices: Vec<Vec<i64>>,
    pub members: Vec<GridFunction>,
    pub params: BTreeMap<String, Value>,
    /// Allowed `max |G − I|` for the discrete Gram matrix; `None` when the
    /// family is not meant to be orthonormal.
    pub gram_tolerance: Option<f64>,
}

impl Family {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Label of member `k` as text: `6` or `(2,4)`.
    pub fn index_label(&self, k: usize) -> String {
        let idx = &self.indices[k];
        if idx.len() == 1 {
            idx[0].to_string()
        } else {
            let parts: Vec<String> = idx.iter().map(i64::to_string).collect();
            format!("({})", parts.join(","))
        }
    }
}

/// Discrete Gram matrix of the first `n` members.
pub fn gram_matrix(family: &Family, n: usize) -> Result<Matrix> {
    if n == 0 || n > family.len() {
        return invalid(format!("need 1..={} members, got {n}", family.len()));
    }
    let m = &family.members[..n];
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = m[i].inner(&m[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `max_{ij} |G_ij − δ_ij|` over the first `n` members.
pub fn gram_deviation(family: &Family, n: usize) -> Result<f64> {
    let g = gram_matrix(family, n)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    Ok(worst)
}

/// `√λ_max` of the Gram matrix of the first `n` members: the Bessel constant
/// of the finite section.
pub fn bessel_bound(family: &Family, n: usize) -> Result<f64> {
    bessel_bound_of(&gram_matrix(family, n)?)
}

/// `√λ_max` of a Gram matrix.
pub fn bessel_bound_of(gram: &Matrix) -> Result<f64> {
    if gram.rows() == 0 {
        return invalid("empty Gram matrix");
    }
    let eig = symmetric_eigen(gram)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}
