use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Cube,
    Circle,
    ProductCircle,
    Curve,
}

/// Distance on the atoms of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    /// Geodesic distance on the circle.
    Arc,
    /// `2 sin(Δθ/2)`, the distance of the embedded unit circle.
    Chordal,
    /// `max_k ε_k · chord(Δθ_k)` on a product of circles.
    MaxWeighted(Vec<f64>),
    /// Length of the curve between two parameter values.
    CurvePullback,
    /// Straight-line distance between the curve points.
    CurveChord,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Arc => "arc",
            Metric::Chordal => "chordal",
            Metric::MaxWeighted(_) => "max_weighted",
            Metric::CurvePullback => "curve_pullback",
            Metric::CurveChord => "curve_chord",
        }
    }
}

/// Logical grid layout, used for neighbour enumeration and coordinate lookup.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    /// Cells per axis; atom index is `i_1 + n_1 (i_2 + n_2 (...))`.
    pub shape: Vec<usize>,
    pub periodic: bool,
    /// Equal spacing along every axis.
    pub uniform: bool,
}

/// Sampled curve `φ: [0,1] → R^k` at the parameter atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveData {
    /// Ambient dimension of `φ`.
    pub ambient: usize,
    /// `φ(x_i)`, row-major.
    pub positions: Vec<f64>,
    /// `‖φ'(x_i)‖`.
    pub speeds: Vec<f64>,
    /// Arc-length coordinate of each atom (trapezoid rule on the speeds).
    pub arc: Vec<f64>,
}

impl CurveData {
    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.ambient..(i + 1) * self.ambient]
    }
}

/// A finite atomization of a metric-measure space.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMeasureSpace {
    kind: SpaceKind,
    dimension: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    metric: Metric,
    base_point: usize,
    grid: Option<Grid>,
    curve: Option<CurveData>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum CurveSpec {
    /// `φ(x) = (x, 0)`, unit speed.
    Line,
    /// `φ(x) = (x, x²)`.
    Parabola,
    /// Explicit samples at the `resolution` parameter midpoints.
    Samples {
        positions: Vec<Vec<f64>>,
        speeds: Vec<f64>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
}

/// Serializable description of a space; the JSON form used by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    #[serde(default = "one")]
    pub dimension: usize,
    pub resolution: usize,
    #[serde(default)]
    pub metric: Option<String>,
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub curve: Option<CurveSpec>,
}

fn one() -> usize {
    1
}

impl SpaceSpec {
    pub fn cube(dimension: usize, resolution: usize) -> Self {
        SpaceSpec {
            kind: SpaceKind::Cube,
            dimension,
            resolution,
            metric: None,
            eps: None,
            curve: None,
        }
    }
}

/// Builds a space from its description.
pub fn build_space(spec: &SpaceSpec) -> Result<Arc<MetricMeasureSpace>> {
    let metric = spec.metric.as_deref();
    let space = match spec.kind {
        SpaceKind::Cube => {
            if let Some(m) = metric {
                if m != "euclidean" {
                    return invalid(format!("cube spaces use the euclidean metric, got `{m}`"));
                }
            }
            MetricMeasureSpace::cube(spec.dimension, spec.resolution)?
        }
        SpaceKind::Circle => {
            let m = match metric.unwrap_or("chordal") {
                "chordal" => Metric::Chordal,
                "arc" => Metric::Arc,
                other => {
                    return invalid(format!(
                        "circle metric must be arc or chordal, got `{other}`"
                    ))
                }
            };
            MetricMeasureSpace::circle(spec.resolution, m)?
        }
        SpaceKind::ProductCircle => {
            let Some(eps) = spec.eps.as_ref() else {
                return invalid("product_circle needs per-factor eps weights");
            };
            if eps.len() != spec.dimension {
                return invalid(format!(
                    "product_circle has {} factors but {} eps weights",
                    spec.dimension,
                    eps.len()
                ));
            }
            MetricMeasureSpace::product_circle(eps, spec.resolution)?
        }
        SpaceKind::Curve => {
            let chord = match metric.unwrap_or("curve_pullback") {
                "curve_pullback" => false,
                "curve_chord" => true,
                other => return invalid(format!("unknown curve metric `{other}`")),
            };
            let Some(curve) = spec.curve.as_ref() else {
                return invalid("curve space needs a curve description");
            };
            let n = spec.resolution;
            let (positions, speeds, weights) = match curve {
                CurveSpec::Line => {
                    let xs = midpoints(n);
                    (
                        xs.iter().map(|&x| vec![x, 0.0]).collect(),
                        vec![1.0; n],
                        None,
                    )
                }
                CurveSpec::Parabola => parabola_samples(n),
                CurveSpec::Samples {
                    positions,
                    speeds,
                    weights,
                } => (positions.clone(), speeds.clone(), weights.clone()),
            };
            MetricMeasureSpace::curve(&positions, &speeds, weights.as_deref(), chord)?
        }
    };
    Ok(Arc::new(space))
}

/// Samples of `φ(x) = (x, x²)` at the midpoints of `n` cells.
pub fn parabola_samples(n: usize) -> (Vec<Vec<f64>>, Vec<f64>, Option<Vec<f64>>) {
    let xs = midpoints(n);
    let positions = xs.iter().map(|&x| vec![x, x * x]).collect();
    let speeds = xs.iter().map(|&x| (1.0 + 4.0 * x * x).sqrt()).collect();
    (positions, speeds, None)
}

pub(crate) fn midpoints(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

impl MetricMeasureSpace {
    /// Uniform midpoint grid on `[0,1]^d`.
    pub fn cube(dimension: usize, resolution: usize) -> Result<Self> {
        if dimension == 0 {
            return invalid("dimension must be positive");
        }
        check_resolution(resolution)?;
        let count = checked_pow(resolution, dimension)?;
        let xs = midpoints(resolution);
        let mut coords = Vec::with_capacity(count * dimension);
        for idx in 0..count {
            let mut rem = idx;
            for _ in 0..dimension {
                coords.push(xs[rem % resolution]);
                rem /= resolution;
            }
        }
        Ok(MetricMeasureSpace {
            kind: SpaceKind::Cube,
            dimension,
            coords,
            weights: vec![1.0 / count as f64; count],
            metric: Metric::Euclidean,
            base_point: 0,
            grid: Some(Grid {
                shape: vec![resolution; dimension],
                periodic: false,
                uniform: true,
            }),
            curve: None,
        })
    }

    /// The unit interval cut at the given increasing breakpoints
    /// `0 = b_0 < b_1 < ... < b_n = 1`; atoms at cell midpoints, weights equal
    /// to cell lengths.
    pub fn interval_partition(breaks: &[f64]) -> Result<Self> {
        if breaks.len() < 3 {
            return invalid("a partition needs at least two cells");
        }
        if breaks[0] != 0.0 || breaks[breaks.len() - 1] != 1.0 {
            return invalid("partition must start at 0 and end at 1");
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("partition breakpoints must be strictly increasing");
        }
        let lengths: Vec<f64> = breaks.windows(2).map(|w| w[1] - w[0]).collect();
        Self::interval_cells(&lengths)
    }

    /// The unit interval cut into consecutive cells of the given lengths
    /// (summing to 1 within 1e-12). Weights are the lengths exactly as given,
    /// so equal lengths give bit-identical weights wherever the cells sit.
    pub fn interval_cells(lengths: &[f64]) -> Result<Self> {
        if lengths.len() < 2 {
            return invalid("a partition needs at least two cells");
        }
        if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return invalid("cell lengths must be positive");
        }
        let total: f64 = lengths.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("cell lengths sum to {total}, not 1"));
        }
        let mut coords = Vec::with_capacity(lengths.len());
        let mut left = 0.0;
        for &l in lengths {
            coords.push(left + 0.5 * l);
            left += l;
        }
        let weights = lengths.to_vec();
        let n = coords.len();
        Ok(MetricMeasureSpace {
            kind: SpaceKind::Cube,
            dimension: 1,
            coords,
            weights,
            metric: Metric::Euclidean,
            base_point: 0,
            grid: Some(Grid {
                shape: vec![n],
                periodic: false,
                uniform: false,
            }),
            curve: None,
        })
    }

    /// Equispaced angles `2πi/n`.
    pub fn circle(resolution: usize, metric: Metric) -> Result<Self> {
        check_resolution(resolution)?;
        if !matches!(metric, Metric::Arc | Metric::Chordal) {
            return invalid("circle metric must be arc or chordal");
        }
        let coords = (0..resolution)
            .map(|i| TWO_PI * i as f64 / resolution as f64)
            .collect();
        Ok(MetricMeasureSpace {
            kind: SpaceKind::Circle,
            dimension: 1,
            coords,
            weights: vec![1.0 / resolution as f64; resolution],
            metric,
            base_point: 0,
            grid: Some(Grid {
                shape: vec![resolution],
                periodic: true,
                uniform: true,
            }),
            curve: None,
        })
    }

    /// First `eps.len()` factors of the weighted product torus, `resolution`
    /// angles per factor.
    pub fn product_circle(eps: &[f64], resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        if eps.is_empty() {
            return invalid("product_circle needs at least one factor");
        }
        if eps.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return invalid("product_circle eps weights must be positive");
        }
        let m = eps.len();
        let count = checked_pow(resolution, m)?;
        let mut coords = Vec::with_capacity(count * m);
        for idx in 0..count {
            let mut rem = idx;
            for _ in 0..m {
                coords.push(TWO_PI * (rem % resolution) as f64 / resolution as f64);
                rem /= resolution;
            }
        }
        Ok(MetricMeasureSpace {
            kind: SpaceKind::ProductCircle,
            dimension: m,
            coords,
            weights: vec![1.0 / count as f64; count],
            metric: Metric::MaxWeighted(eps.to_vec()),
            base_point: 0,
            grid: Some(Grid {
                shape: vec![resolution; m],
                periodic: true,
                uniform: true,
            }),
            curve: None,
        })
    }

    /// Curve-parametrized interval: parameter atoms at the midpoints of
    /// `positions.len()` uniform cells, with curve samples `φ(x_i)` and speeds
    /// `‖φ'(x_i)‖`. `weights` defaults to Lebesgue measure and is normalized.
    pub fn curve(
        positions: &[Vec<f64>],
        speeds: &[f64],
        weights: Option<&[f64]>,
        chord_metric: bool,
    ) -> Result<Self> {
        let n = positions.len();
        check_resolution(n)?;
        if speeds.len() != n {
            return invalid("curve needs one speed sample per atom");
        }
        if speeds.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return invalid("curve speeds must be nonnegative and finite");
        }
        let ambient = positions[0].len();
        if ambient == 0 || positions.iter().any(|p| p.len() != ambient) {
            return invalid("curve positions must share one positive ambient dimension");
        }
        if positions.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("curve positions must be finite");
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            positions[a]
                .iter()
                .zip(&positions[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if order.windows(2).any(|w| positions[w[0]] == positions[w[1]]) {
            return invalid("curve samples are not injective (duplicate positions)");
        }
        let weights = match weights {
            None => vec![1.0 / n as f64; n],
            Some(w) => {
                if w.len() != n || w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                    return invalid("curve weights must be positive, one per atom");
                }
                let total: f64 = w.iter().sum();
                w.iter().map(|x| x / total).collect()
            }
        };
        let coords = midpoints(n);
        let h = 1.0 / n as f64;
        let mut arc = Vec::with_capacity(n);
        let mut s = speeds[0] * coords[0];
        arc.push(s);
        for i in 1..n {
            s += 0.5 * (speeds[i - 1] + speeds[i]) * h;
            arc.push(s);
        }
        if arc.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("curve speeds vanish on a whole cell; arc length is not injective");
        }
        Ok(MetricMeasureSpace {
            kind: SpaceKind::Curve,
            dimension: 1,
            coords,
            weights,
            metric: if chord_metric {
                Metric::CurveChord
            } else {
                Metric::CurvePullback
            },
            base_point: 0,
            grid: Some(Grid {
                shape: vec![n],
                periodic: false,
                uniform: true,
            }),
            curve: Some(CurveData {
                ambient,
                positions: positions.concat(),
                speeds: speeds.to_vec(),
                arc,
            }),
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    pub fn curve_data(&self) -> Option<&CurveData> {
        self.curve.as_ref()
    }

    /// Resolution per axis for uniform grids.
    pub fn resolution(&self) -> Option<usize> {
        self.grid.as_ref().filter(|g| g.uniform).map(|g| g.shape[0])
    }

    /// Same space with a different metric; the new metric must suit the kind.
    pub fn with_metric(&self, metric: Metric) -> Result<Self> {
        let ok = match self.kind {
            SpaceKind::Cube => matches!(metric, Metric::Euclidean),
            SpaceKind::Circle => matches!(metric, Metric::Arc | Metric::Chordal),
            SpaceKind::ProductCircle => match &metric {
                Metric::MaxWeighted(e) => {
                    e.len() == self.dimension && e.iter().all(|&x| x > 0.0 && x.is_finite())
                }
                _ => false,
            },
            SpaceKind::Curve => matches!(metric, Metric::CurvePullback | Metric::CurveChord),
        };
        if !ok {
            return invalid(format!("metric {} does not suit this space", metric.name()));
        }
        Ok(MetricMeasureSpace {
            metric,
            ..self.clone()
        })
    }

    /// `ρ(atom i, atom j)`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Euclidean => {
                let (a, b) = (self.atom(i), self.atom(j));
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            }
            Metric::Arc => {
                let d = (self.coords[i] - self.coords[j]).abs();
                d.min(TWO_PI - d)
            }
            Metric::Chordal => chord(self.coords[i] - self.coords[j]),
            Metric::MaxWeighted(eps) => {
                let (a, b) = (self.atom(i), self.atom(j));
                eps.iter()
                    .zip(a.iter().zip(b))
                    .map(|(e, (x, y))| e * chord(x - y))
                    .fold(0.0, f64::max)
            }
            Metric::CurvePullback => {
                let arc = &self.curve.as_ref().expect("curve space").arc;
                (arc[i] - arc[j]).abs()
            }
            Metric::CurveChord => {
                let c = self.curve.as_ref().expect("curve space");
                let (a, b) = (c.position(i), c.position(j));
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    /// Largest distance between two atoms.
    pub fn diameter(&self) -> f64 {
        match &self.metric {
            Metric::Euclidean if self.grid.as_ref().is_some_and(|g| g.uniform) => {
                // Opposite corners of the grid.
                let last = self.len() - 1;
                self.distance(0, last)
            }
            _ => {
                let n = self.len();
                let mut best = 0.0f64;
                for i in 0..n {
                    for j in i + 1..n {
                        best = best.max(self.distance(i, j));
                    }
                }
                best
            }
        }
    }

    /// Index of the atom at the given coordinates, if any lies within `tol`
    /// (coordinate-wise).
    pub fn locate(&self, x: &[f64], tol: f64) -> Option<usize> {
        if x.len() != self.dimension {
            return None;
        }
        let candidate = match (&self.grid, self.kind) {
            (Some(g), SpaceKind::Cube | SpaceKind::Curve) if g.uniform => {
                let n = g.shape[0];
                let mut idx = 0usize;
                let mut stride = 1usize;
                for &c in x {
                    let k = (c * n as f64 - 0.5).round();
                    if k < 0.0 || k >= n as f64 {
                        return None;
                    }
                    idx += k as usize * stride;
                    stride *= n;
                }
                Some(idx)
            }
            (Some(g), SpaceKind::Circle | SpaceKind::ProductCircle) => {
                let n = g.shape[0];
                let mut idx = 0usize;
                let mut stride = 1usize;
                for &c in x {
                    let k = (c.rem_euclid(TWO_PI) * n as f64 / TWO_PI).round() as usize % n;
                    idx += k * stride;
                    stride *= n;
                }
                Some(idx)
            }
            _ => {
                let mut best = None;
                let mut best_d = f64::INFINITY;
                for i in 0..self.len() {
                    let d = self
                        .atom(i)
                        .iter()
                        .zip(x)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if d < best_d {
                        best_d = d;
                        best = Some(i);
                    }
                }
                best
            }
        }?;
        let periodic = matches!(self.kind, SpaceKind::Circle | SpaceKind::ProductCircle);
        let close = self.atom(candidate).iter().zip(x).all(|(a, b)| {
            if periodic {
                let d = (a - b).rem_euclid(TWO_PI);
                d.min(TWO_PI - d) <= tol
            } else {
                (a - b).abs() <= tol
            }
        });
        close.then_some(candidate)
    }
}

/// `2 sin(|Δθ|/2)` for any real angle difference.
pub fn chord(delta: f64) -> f64 {
    let d = delta.abs().rem_euclid(TWO_PI);
    2.0 * (0.5 * d).sin()
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return invalid(format!("resolution must be at least 2, got {resolution}"));
    }
    Ok(())
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    const MAX_ATOMS: usize = 1 << 26;
    let mut acc = 1usize;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) if v <= MAX_ATOMS => v,
            _ => return invalid(format!("grid {base}^{exp} exceeds {MAX_ATOMS} atoms")),
        };
    }
    Ok(acc)
}
