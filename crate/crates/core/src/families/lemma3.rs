use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::sync::Arc;

use serde_json::json;

use super::Family;
use crate::domains::{GridFunction, Metric, MetricMeasureSpace, SpaceKind};
use crate::error::{invalid, Result};

/// `√2 cos θ_k` on a product of circles; `k` counts factors from 1.
pub fn gen_lemma3(k: usize, space: Arc<MetricMeasureSpace>) -> Result<GridFunction> {
    if space.kind() != SpaceKind::ProductCircle {
        return invalid("coordinate cosines live on a product_circle space");
    }
    let m = space.dimension();
    if k == 0 || k > m {
        return invalid(format!(
            "factor index {k} outside 1..={m} represented factors"
        ));
    }
    let values = (0..space.len())
        .map(|i| SQRT_2 * space.atom(i)[k - 1].cos())
        .collect();
    let u = GridFunction::new(space, values)?;
    if !u.is_mean_zero() {
        return invalid("coordinate cosine is not mean-zero at this resolution");
    }
    Ok(u)
}

/// `u_1..u_m` on the product of `m = eps.len()` circles with the weighted
/// max-chord metric.
pub fn lemma3_family(eps: &[f64], resolution: usize) -> Result<Family> {
    let space = Arc::new(MetricMeasureSpace::product_circle(eps, resolution)?);
    let members = (1..=eps.len())
        .map(|k| gen_lemma3(k, space.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut params = BTreeMap::new();
    params.insert("eps".into(), json!(eps));
    params.insert("resolution".into(), json!(resolution));
    params.insert(
        "metric".into(),
        json!(Metric::MaxWeighted(eps.to_vec()).name()),
    );
    Ok(Family {
        name: "lemma3".into(),
        space,
        indices: (1..=eps.len() as i64).map(|k| vec![k]).collect(),
        members,
        params,
        gram_tolerance: Some(1e-10),
    })
}
