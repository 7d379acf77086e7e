use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::json;

use super::{OperatorMatrix, SchmidtDecomposition};
use crate::domains::{GridFunction, MetricMeasureSpace};
use crate::error::{invalid, Error, Result};
use crate::families::Family;

/// `b_n` of the ellipsoid `T·B(H)`, which is `s_n(T)`; the optimal
/// subspace is spanned by `y_0..y_n`.
pub fn bernstein_widths(s: &SchmidtDecomposition, n: usize) -> Result<f64> {
    s.s.get(n).copied().ok_or(Error::OutOfRange {
        index: n,
        len: s.s.len(),
    })
}

/// `√(Σ s_k² Lip(y_k)²)`. A value `≤ 1` shows `Lip(Tg) ≤ 1` for every unit
/// `g`, by Cauchy-Schwarz over the Schmidt expansion.
pub fn lip_enclosure_certificate(s: &[f64], lip_of_y: &[f64]) -> Result<f64> {
    if s.len() != lip_of_y.len() {
        return invalid(format!(
            "{} s-numbers but {} Lipschitz constants",
            s.len(),
            lip_of_y.len()
        ));
    }
    Ok(s.iter()
        .zip(lip_of_y)
        .map(|(a, b)| (a * b) * (a * b))
        .sum::<f64>()
        .sqrt())
}

/// `(b_n, √n·b_n)`: the proved bracket for `t(n)`, with `b[n] = b_n`.
pub fn t_n_bounds(b: &[f64], n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return invalid("t(n) is defined for n >= 1");
    }
    let bn = *b.get(n).ok_or(Error::OutOfRange {
        index: n,
        len: b.len(),
    })?;
    Ok((bn, (n as f64).sqrt() * bn))
}

/// `u_k = y_k` with the claim `‖u_k‖_KR ≥ s_k`, witnessed by the pairing
/// `(y_k, T x_k) = s_k` against `T x_k ∈ Lip₁`.
#[derive(Clone, Debug)]
pub struct LowerBoundFamily {
    pub family: Family,
    /// `s_k` per member.
    pub claims: Vec<f64>,
    /// `(y_k, T x_k)` in the grid `L²` pairing.
    pub pairings: Vec<f64>,
    /// The witnesses `T x_k` as grid values.
    pub witnesses: Vec<Vec<f64>>,
    /// The enclosure certificate supplied by the caller.
    pub certificate: Option<f64>,
    /// Certificate present and `≤ 1`; otherwise the claim is unverified.
    pub verified: bool,
}

/// Builds the first `count` members of the lower-bound family on `space`,
/// the grid `op` acts on.
pub fn lower_bound_family(
    op: &OperatorMatrix,
    s: &SchmidtDecomposition,
    space: Arc<MetricMeasureSpace>,
    count: usize,
    certificate: Option<f64>,
) -> Result<LowerBoundFamily> {
    if count == 0 || count > s.rank() {
        return invalid(format!("need 1..={} members, got {count}", s.rank()));
    }
    if op.matrix.rows() != space.len() || op.matrix.cols() != space.len() {
        return invalid("operator size does not match the space");
    }
    let h = op.cell_weight;
    let mut members = Vec::with_capacity(count);
    let mut pairings = Vec::with_capacity(count);
    let mut witnesses = Vec::with_capacity(count);
    for k in 0..count {
        let y = op.to_function_values(&s.y[k]);
        let x = op.to_function_values(&s.x[k]);
        let tx = op.matrix.matvec(&x);
        let u = GridFunction::new(space.clone(), y)?;
        let w = GridFunction::new(space.clone(), tx.clone())?;
        pairings.push(u.inner(&w)?);
        witnesses.push(tx);
        members.push(u);
    }
    let mut params = BTreeMap::new();
    params.insert("operator".into(), json!(op.note));
    params.insert("cell_weight".into(), json!(h));
    params.insert("certificate".into(), json!(certificate));
    Ok(LowerBoundFamily {
        family: Family {
            name: "lower_bound".into(),
            space,
            indices: (0..count as i64).map(|k| vec![k]).collect(),
            members,
            params,
            gram_tolerance: Some(1e-9),
        },
        claims: s.s[..count].to_vec(),
        pairings,
        witnesses,
        certificate,
        verified: certificate.is_some_and(|c| c <= 1.0),
    })
}
