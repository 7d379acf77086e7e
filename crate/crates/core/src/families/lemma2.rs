use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::json;

use super::Family;
use crate::domains::{GridFunction, MetricMeasureSpace, SpaceKind};
use crate::error::{invalid, Result};

/// `K₁ = [0, ⅓]`, `K₂ = [⅔, 1]`.
const K_LENGTH: f64 = 1.0 / 3.0;
const K2_START: f64 = 2.0 / 3.0;

/// Parameters of the disjoint-indicator family: `Δ¹_k ⊂ K₁`, `Δ²_k ⊂ K₂`
/// with `m(Δ^i_k) = a² ε_k²`, and `u_k = c_k (χ_{Δ¹_k} − χ_{Δ²_k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Params {
    pub eps: Vec<f64>,
    pub a: f64,
}

impl Lemma2Params {
    /// `ε_k = 2^{-k}`, `a = 1`: the sets fill `K_i` exactly in the limit.
    pub fn dyadic(count: usize) -> Self {
        Lemma2Params {
            eps: (1..=count).map(|k| 0.5f64.powi(k as i32)).collect(),
            a: 1.0,
        }
    }

    fn masses(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 || count > self.eps.len() {
            return invalid(format!("count must be in 1..={}", self.eps.len()));
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return invalid("scale a must be positive");
        }
        if self.eps.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return invalid("eps entries must be positive");
        }
        let masses: Vec<f64> = self.eps[..count]
            .iter()
            .map(|e| self.a * self.a * e * e)
            .collect();
        let total: f64 = masses.iter().sum();
        if total > K_LENGTH * (1.0 + 1e-12) {
            return invalid(format!(
                "packing overflow: a^2 sum eps^2 = {total} exceeds m(K_i) = 1/3"
            ));
        }
        Ok(masses)
    }
}

/// `(Δ¹_k, Δ²_k)` as `[lo, hi)` pairs, packed from the left of each `K_i`.
pub fn lemma2_intervals(params: &Lemma2Params, count: usize) -> Result<Vec<[(f64, f64); 2]>> {
    let masses = params.masses(count)?;
    let mut out = Vec::with_capacity(count);
    let mut left = 0.0;
    for m in masses {
        let right = left + m;
        out.push([(left, right), (K2_START + left, K2_START + right)]);
        left = right;
    }
    Ok(out)
}

/// Partition of `[0, 1]` whose cells are the sets `Δ¹_1..Δ¹_N`, the rest of
/// `K₁`, the gap `(⅓, ⅔)`, `Δ²_1..Δ²_N` and the rest of `K₂`. Each `Δ` is a
/// single atom whose weight is its measure, identical for the two copies.
pub fn lemma2_space(params: &Lemma2Params, count: usize) -> Result<Arc<MetricMeasureSpace>> {
    let masses = params.masses(count)?;
    let rest = leftover(&masses);
    let mut lengths = masses.clone();
    lengths.extend(rest);
    lengths.push(K2_START - K_LENGTH);
    lengths.extend_from_slice(&masses);
    lengths.extend(rest);
    Ok(Arc::new(MetricMeasureSpace::interval_cells(&lengths)?))
}

/// Part of `K_i` not covered by the sets, unless it is rounding noise.
fn leftover(masses: &[f64]) -> Option<f64> {
    let rest = K_LENGTH - masses.iter().sum::<f64>();
    (rest > 1e-15).then_some(rest)
}

fn lemma2_params_map(params: &Lemma2Params, count: usize) -> BTreeMap<String, serde_json::Value> {
    let mut map = BTreeMap::new();
    map.insert("eps".into(), json!(params.eps[..count].to_vec()));
    map.insert("a".into(), json!(params.a));
    map.insert("k1".into(), json!([0.0, K_LENGTH]));
    map.insert("k2".into(), json!([K2_START, 1.0]));
    map.insert("delta".into(), json!(K2_START - K_LENGTH));
    map
}

/// The family on its own partition ([`lemma2_space`]): exactly orthonormal,
/// with `c_k = (2 a² ε_k²)^{-1/2}`.
pub fn lemma2_family(params: &Lemma2Params, count: usize) -> Result<Family> {
    let space = lemma2_space(params, count)?;
    let masses = params.masses(count)?;
    // Δ²_1 follows Δ¹_*, the optional rest of K₁ and the gap.
    let twin_offset = count + usize::from(leftover(&masses).is_some()) + 1;
    let mut members = Vec::with_capacity(count);
    for (k, &m) in masses.iter().enumerate() {
        debug_assert_eq!(space.weight(k), m);
        let c = 1.0 / (2.0 * m).sqrt();
        let mut values = vec![0.0; space.len()];
        values[k] = c;
        values[twin_offset + k] = -c;
        members.push(GridFunction::new(space.clone(), values)?);
    }
    let mut map = lemma2_params_map(params, count);
    map.insert("partition".into(), json!("adapted"));
    Ok(Family {
        name: "lemma2".into(),
        space,
        indices: (1..=count as i64).map(|k| vec![k]).collect(),
        members,
        params: map,
        gram_tolerance: Some(1e-12),
    })
}

/// The family on an arbitrary one-dimensional cube space. Cells cut by a
/// set boundary get mass in proportion to the overlap; each member is then
/// normalized in the discrete norm. Members are exactly orthonormal when
/// every set is a union of cells.
pub fn gen_lemma2(
    params: &Lemma2Params,
    count: usize,
    space: Arc<MetricMeasureSpace>,
) -> Result<Family> {
    if space.kind() != SpaceKind::Cube || space.dimension() != 1 {
        return invalid("the disjoint-indicator family lives on a one-dimensional cube space");
    }
    let sets = lemma2_intervals(params, count)?;
    let n = space.len();
    let cells: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = space.atom(i)[0];
            let w = space.weight(i);
            (x - 0.5 * w, x + 0.5 * w)
        })
        .collect();
    let overlap = |(lo, hi): (f64, f64), i: usize| -> f64 {
        let (a, b) = cells[i];
        let w = space.weight(i);
        let o = (hi.min(b) - lo.max(a)).max(0.0);
        // Snap rounding noise at aligned boundaries.
        if o >= w * (1.0 - 1e-9) {
            w
        } else if o <= w * 1e-9 {
            0.0
        } else {
            o
        }
    };
    let mut members = Vec::with_capacity(count);
    for (k, pair) in sets.iter().enumerate() {
        for (lo, hi) in pair {
            if !(0..n).any(|i| {
                let x = space.atom(i)[0];
                *lo <= x && x < *hi
            }) {
                return invalid(format!(
                    "resolution too coarse: set {} of member {} contains no atom",
                    if *lo < K_LENGTH { 1 } else { 2 },
                    k + 1
                ));
            }
        }
        let plus: Vec<f64> = (0..n).map(|i| overlap(pair[0], i)).collect();
        let mut minus: Vec<f64> = (0..n).map(|i| overlap(pair[1], i)).collect();
        // Balance the two masses to rounding before normalizing.
        let (sp, sm): (f64, f64) = (plus.iter().sum(), minus.iter().sum());
        minus.iter_mut().for_each(|o| *o *= sp / sm);
        let raw: Vec<f64> = (0..n)
            .map(|i| (plus[i] - minus[i]) / space.weight(i))
            .collect();
        let u = GridFunction::new(space.clone(), raw)?;
        let norm = u.l2_norm();
        members.push(u.scaled(1.0 / norm)?);
    }
    let mut map = lemma2_params_map(params, count);
    map.insert("partition".into(), json!("given"));
    Ok(Family {
        name: "lemma2".into(),
        space,
        indices: (1..=count as i64).map(|k| vec![k]).collect(),
        members,
        params: map,
        gram_tolerance: Some(1e-12),
    })
}
