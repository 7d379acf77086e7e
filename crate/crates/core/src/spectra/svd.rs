use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_against, symmetric_eigen, Matrix};

pub const MAX_SVD_SIDE: usize = 2048;

/// `A = Σ_k s_k y_k x_kᵗ` with orthonormal `x_k`, `y_k` (Euclidean).
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Nonincreasing, `min(rows, cols)` entries.
    pub s: Vec<f64>,
    /// Right vectors, each of length `cols`.
    pub x: Vec<Vec<f64>>,
    /// Left vectors, each of length `rows`.
    pub y: Vec<Vec<f64>>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `Σ s_k y_k (x_k · v)`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.y.first().map_or(0, Vec::len)];
        for ((s, x), y) in self.s.iter().zip(&self.x).zip(&self.y) {
            let c = s * x.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
            for (o, yi) in out.iter_mut().zip(y) {
                *o += c * yi;
            }
        }
        out
    }
}

/// Singular value decomposition through the eigenvectors of `AᵗA`.
///
/// `s_k` is taken as `‖A x_k‖` rather than the square root of the eigenvalue,
/// which keeps tiny singular values accurate to the rounding of `A` itself.
/// Left vectors are `A x_k / s_k`, re-orthonormalized; where `s_k` vanishes
/// they are completed to an orthonormal system.
pub fn svd(a: &Matrix) -> Result<SchmidtDecomposition> {
    let (m, n) = (a.rows(), a.cols());
    for (what, got) in [("rows", m), ("cols", n)] {
        if got > MAX_SVD_SIDE {
            return Err(Error::SizeLimit {
                what,
                got,
                limit: MAX_SVD_SIDE,
            });
        }
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entries"));
    }
    let r = m.min(n);
    if r == 0 {
        return Ok(SchmidtDecomposition {
            s: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
        });
    }
    let eig = symmetric_eigen(&a.gram())?;
    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..n)
        .rev()
        .map(|j| {
            let x = eig.vectors.column(j);
            let ax = a.matvec(&x);
            let s = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
            (s, x, ax)
        })
        .collect();
    pairs.sort_by(|p, q| q.0.total_cmp(&p.0));
    pairs.truncate(r);

    let smax = pairs[0].0;
    let floor = smax * 1e-13 * (m.max(n) as f64);
    let mut s = Vec::with_capacity(r);
    let mut xs = Vec::with_capacity(r);
    let mut ys: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut next_unit = 0;
    for (sk, x, ax) in pairs {
        let mut y = if sk > floor && sk > 0.0 {
            ax.iter().map(|v| v / sk).collect()
        } else {
            vec![0.0; m]
        };
        if orthonormalize_against(&mut y, &ys) < 0.5 {
            // Null direction: the next coordinate vector with a large
            // component outside the span so far.
            loop {
                let mut e = vec![0.0; m];
                e[next_unit] = 1.0;
                next_unit += 1;
                if orthonormalize_against(&mut e, &ys) > 0.5 || next_unit == m {
                    y = e;
                    break;
                }
            }
        }
        s.push(sk);
        xs.push(x);
        ys.push(y);
    }
    Ok(SchmidtDecomposition { s, x: xs, y: ys })
}
