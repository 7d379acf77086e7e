use std::f64::consts::PI;

use serde::Serialize;

use crate::domains::MetricMeasureSpace;
use crate::error::{invalid, Result};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Volterra,
    DiagonalMultiplier,
    Custom,
}

/// A kernel matrix acting on grid values: `(Au)_i = Σ_j A_ij u_j`.
///
/// On a uniform grid with cell weight `h` the operator norm in `L²_h`
/// equals the Euclidean one, so singular values of the matrix are those of
/// the discretized operator. Unit Euclidean vectors become unit functions
/// after division by `√h`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub matrix: Matrix,
    pub kind: OperatorKind,
    pub note: String,
    /// Common cell weight of the grid the operator acts on.
    pub cell_weight: f64,
}

impl OperatorMatrix {
    pub fn custom(matrix: Matrix, cell_weight: f64) -> Result<Self> {
        if !(cell_weight > 0.0) {
            return invalid("cell weight must be positive");
        }
        Ok(OperatorMatrix {
            matrix,
            kind: OperatorKind::Custom,
            note: "custom".into(),
            cell_weight,
        })
    }

    /// Grid values of the function represented by a unit Euclidean vector.
    pub fn to_function_values(&self, v: &[f64]) -> Vec<f64> {
        let s = self.cell_weight.sqrt();
        v.iter().map(|x| x / s).collect()
    }
}

/// Quadrature rule for `Ju(x) = ∫₀ˣ u`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolterraRule {
    /// `A_ij = w_j` for `j ≤ i`: the integral up to the right end of cell `i`.
    /// Its largest singular values carry relative error `1/(2N)`.
    #[default]
    Inclusive,
    /// `A_ii = w_i/2`, `A_ij = w_j` for `j < i`: the integral up to the
    /// midpoint, so `J1(x_i) = x_i`. Second order in `1/N`.
    HalfCell,
}

pub fn volterra_operator(resolution: usize) -> Result<OperatorMatrix> {
    volterra_operator_with(resolution, VolterraRule::Inclusive)
}

pub fn volterra_operator_with(resolution: usize, rule: VolterraRule) -> Result<OperatorMatrix> {
    if resolution < 2 {
        return invalid("volterra operator needs resolution >= 2");
    }
    let h = 1.0 / resolution as f64;
    let diag = match rule {
        VolterraRule::Inclusive => h,
        VolterraRule::HalfCell => 0.5 * h,
    };
    let matrix = Matrix::from_fn(resolution, resolution, |i, j| {
        if j < i {
            h
        } else if j == i {
            diag
        } else {
            0.0
        }
    });
    let note = match rule {
        VolterraRule::Inclusive => "volterra, inclusive cumulative rule",
        VolterraRule::HalfCell => "volterra, half-cell midpoint rule",
    };
    Ok(OperatorMatrix {
        matrix,
        kind: OperatorKind::Volterra,
        note: format!("{note}, resolution {resolution}"),
        cell_weight: h,
    })
}

/// `s_k(J) = 2/((2k+1)π)`, `k ≥ 0`.
pub fn volterra_reference(k: usize) -> f64 {
    2.0 / ((2 * k + 1) as f64 * PI)
}

/// `T = Σ_k s_k (·, e_k) e_k` with `e_k = √2 sin(π k x)` for `k = 1..=s.len()`,
/// on the midpoint grid of `[0, 1]`. Distinct sines are exactly orthogonal
/// on that grid, so the s-numbers are `s` itself.
pub fn diagonal_sine_operator(space: &MetricMeasureSpace, s: &[f64]) -> Result<OperatorMatrix> {
    let n = match space.resolution() {
        Some(n) if space.dimension() == 1 => n,
        _ => return invalid("diagonal sine operator needs a uniform one-dimensional grid"),
    };
    if s.len() >= n {
        return invalid(format!(
            "{} sine modes are not resolved by {n} cells",
            s.len()
        ));
    }
    if s.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return invalid("s-numbers must be nonnegative and finite");
    }
    let h = 1.0 / n as f64;
    // Euclidean-unit sine vectors √(2h) sin(πk x_i).
    let modes: Vec<Vec<f64>> = (1..=s.len())
        .map(|k| {
            (0..n)
                .map(|i| (2.0 * h).sqrt() * (PI * k as f64 * space.atom(i)[0]).sin())
                .collect()
        })
        .collect();
    let mut matrix = Matrix::zeros(n, n);
    for (e, &sk) in modes.iter().zip(s) {
        for i in 0..n {
            let a = sk * e[i];
            for j in 0..n {
                matrix[(i, j)] += a * e[j];
            }
        }
    }
    Ok(OperatorMatrix {
        matrix,
        kind: OperatorKind::DiagonalMultiplier,
        note: format!(
            "diagonal in the sine basis, {} modes, resolution {n}",
            s.len()
        ),
        cell_weight: h,
    })
}
