use std::collections::BTreeMap;

use serde_json::json;

use super::Family;
use crate::domains::{GridFunction, SpaceKind};
use crate::error::{invalid, Result};

/// `u(ζ^n)`: the value at angle `nθ mod 2π`. Needs `n | resolution` so the
/// dilation maps atoms onto atoms.
pub fn gen_dilated(u: &GridFunction, n: usize) -> Result<GridFunction> {
    let space = u.space();
    if space.kind() != SpaceKind::Circle {
        return invalid("dilation is defined for functions on the circle");
    }
    let len = space.len();
    if n == 0 || !len.is_multiple_of(n) {
        return invalid(format!(
            "resolution {len} is not divisible by dilation factor {n}"
        ));
    }
    let values = (0..len).map(|i| u.values()[(n * i) % len]).collect();
    GridFunction::new(space.clone(), values)
}

/// `u(ζ^n)` for each listed factor.
pub fn dilated_family(u: &GridFunction, factors: &[usize]) -> Result<Family> {
    if !u.is_mean_zero() {
        return invalid("base function of a dilated family must be mean-zero");
    }
    let members = factors
        .iter()
        .map(|&n| gen_dilated(u, n))
        .collect::<Result<Vec<_>>>()?;
    let mut params = BTreeMap::new();
    params.insert("factors".into(), json!(factors));
    params.insert("resolution".into(), json!(u.space().len()));
    params.insert("metric".into(), json!(u.space().metric().name()));
    Ok(Family {
        name: "dilated".into(),
        space: u.space().clone(),
        indices: factors.iter().map(|&n| vec![n as i64]).collect(),
        members,
        params,
        gram_tolerance: None,
    })
}
