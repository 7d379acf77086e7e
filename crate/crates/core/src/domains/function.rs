use std::sync::Arc;

use super::space::MetricMeasureSpace;
use crate::error::{invalid, Error, Result};

/// Relative tolerance for the zero-mean flag and measure balance.
pub const MEAN_ZERO_TOL: f64 = 1e-10;

/// Real values on the atoms of a space.
#[derive(Clone, Debug)]
pub struct GridFunction {
    space: Arc<MetricMeasureSpace>,
    values: Vec<f64>,
    mean_zero: bool,
}

pub(crate) fn same_space(a: &Arc<MetricMeasureSpace>, b: &Arc<MetricMeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GridFunction {
    pub fn new(space: Arc<MetricMeasureSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return invalid(format!(
                "function has {} values for {} atoms",
                values.len(),
                space.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid function values"));
        }
        let (defect, scale) = mean_defect(&space, &values);
        Ok(GridFunction {
            space,
            values,
            mean_zero: defect.abs() <= MEAN_ZERO_TOL * scale,
        })
    }

    /// Point samples `f(x_i)` at the atoms.
    pub fn from_fn(space: Arc<MetricMeasureSpace>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..space.len()).map(|i| f(space.atom(i))).collect();
        Self::new(space, values)
    }

    pub fn zero(space: Arc<MetricMeasureSpace>) -> Self {
        let n = space.len();
        GridFunction {
            space,
            values: vec![0.0; n],
            mean_zero: true,
        }
    }

    pub fn space(&self) -> &Arc<MetricMeasureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    /// `Σ u_i w_i`.
    pub fn integral(&self) -> f64 {
        mean_defect(&self.space, &self.values).0
    }

    pub fn l1_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.space.weights())
            .map(|(v, w)| v.abs() * w)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner_unchecked(self).sqrt()
    }

    /// Discrete pairing `Σ u_i v_i w_i`.
    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        if !same_space(&self.space, &other.space) {
            return invalid("inner product of functions on different spaces");
        }
        Ok(self.inner_unchecked(other))
    }

    fn inner_unchecked(&self, other: &GridFunction) -> f64 {
        compensated_sum(
            self.values
                .iter()
                .zip(&other.values)
                .zip(self.space.weights())
                .map(|((a, b), w)| a * b * w),
        )
    }

    pub fn scaled(&self, c: f64) -> Result<GridFunction> {
        Self::new(
            self.space.clone(),
            self.values.iter().map(|v| c * v).collect(),
        )
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if !same_space(&self.space, &other.space) {
            return invalid("sum of functions on different spaces");
        }
        Self::new(
            self.space.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// The function minus its mean.
    pub fn centered(&self) -> GridFunction {
        let mean = self.integral();
        let values: Vec<f64> = self.values.iter().map(|v| v - mean).collect();
        GridFunction {
            space: self.space.clone(),
            values,
            mean_zero: true,
        }
    }
}

fn mean_defect(space: &MetricMeasureSpace, values: &[f64]) -> (f64, f64) {
    let sum = compensated_sum(values.iter().zip(space.weights()).map(|(v, w)| v * w));
    let abs = values
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v.abs() * w)
        .sum();
    (sum, abs)
}

/// Neumaier's compensated summation; quadrature sums over many equal cells
/// otherwise lose digits linearly in the cell count.
pub fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            carry += (sum - s) + t;
        } else {
            carry += (t - s) + sum;
        }
        sum = s;
    }
    sum + carry
}

/// Finitely many signed point masses on the atoms of a space, with total
/// mass zero.
#[derive(Clone, Debug)]
pub struct DiscreteSignedMeasure {
    space: Arc<MetricMeasureSpace>,
    entries: Vec<(usize, f64)>,
}

impl DiscreteSignedMeasure {
    pub fn new(space: Arc<MetricMeasureSpace>, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        let n = space.len();
        for &(i, m) in &entries {
            if i >= n {
                return Err(Error::OutOfRange { index: i, len: n });
            }
            if !m.is_finite() {
                return Err(Error::NonFinite("measure masses"));
            }
        }
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return invalid("duplicate atom index in measure");
        }
        let total = compensated_sum(entries.iter().map(|e| e.1));
        let variation: f64 = entries.iter().map(|e| e.1.abs()).sum();
        if total.abs() > MEAN_ZERO_TOL * variation {
            return Err(Error::Unbalanced { total, variation });
        }
        Ok(DiscreteSignedMeasure { space, entries })
    }

    pub fn space(&self) -> &Arc<MetricMeasureSpace> {
        &self.space
    }

    /// Entries sorted by atom index.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn total_variation(&self) -> f64 {
        self.entries.iter().map(|e| e.1.abs()).sum()
    }

    pub fn positive_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.1.max(0.0)).sum()
    }

    /// Mass per atom, zero where no entry exists.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.space.len()];
        for &(i, m) in &self.entries {
            out[i] = m;
        }
        out
    }

    /// `Σ f(x_i) μ_i`.
    pub fn pair(&self, f: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, m)| f[i] * m).sum()
    }
}

/// `u·dm` as point masses `u_i w_i`.
pub fn atomize(u: &GridFunction) -> Result<DiscreteSignedMeasure> {
    if !u.is_mean_zero() {
        let (defect, scale) = mean_defect(&u.space, &u.values);
        return Err(Error::NotMeanZero { defect, scale });
    }
    let entries = u
        .values
        .iter()
        .zip(u.space.weights())
        .enumerate()
        .filter(|(_, (v, _))| **v != 0.0)
        .map(|(i, (v, w))| (i, v * w))
        .collect();
    DiscreteSignedMeasure::new(u.space.clone(), entries)
}

/// `u·dm − (∫u dm) δ_{x₀}`: pairs with Lipschitz functions vanishing at the
/// base point exactly as `u` does, so its norm is the dual norm of `u`
/// against that class even when `u` has nonzero mean.
pub fn atomize_based(u: &GridFunction) -> Result<DiscreteSignedMeasure> {
    let base = u.space.base_point();
    let mut dense: Vec<f64> = u
        .values
        .iter()
        .zip(u.space.weights())
        .map(|(v, w)| v * w)
        .collect();
    let total = compensated_sum(dense.iter().copied());
    dense[base] -= total;
    let entries = dense
        .into_iter()
        .enumerate()
        .filter(|(_, m)| *m != 0.0)
        .collect();
    DiscreteSignedMeasure::new(u.space.clone(), entries)
}
