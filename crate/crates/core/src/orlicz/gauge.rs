use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

type LnPhi = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum GaugeFamily {
    /// `t^p`.
    Power { p: f64 },
    /// `t^{C·ln ln(1/t)}` for `t ≤ e^{-e}`; above that cutoff the exponent is
    /// held at `C`, which keeps the gauge increasing up to `t = 1`.
    LogLog { c: f64 },
    /// `t^{C·(ln 1/t)^α}`.
    LogAlpha { c: f64, alpha: f64 },
    /// `exp(−C / t^β)`.
    Exp { c: f64, beta: f64 },
    /// User-supplied `ln φ` on `(0, 1]`, assumed increasing with `ln φ(1)`
    /// finite.
    Custom { name: String, ln_phi: LnPhi },
}

impl fmt::Debug for GaugeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl GaugeFamily {
    fn label(&self) -> String {
        match self {
            GaugeFamily::Power { p } => format!("power:{p}"),
            GaugeFamily::LogLog { c } => format!("loglog:{c}"),
            GaugeFamily::LogAlpha { c, alpha } => format!("logalpha:{c},{alpha}"),
            GaugeFamily::Exp { c, beta } => format!("exp:{c},{beta}"),
            GaugeFamily::Custom { name, .. } => format!("custom:{name}"),
        }
    }
}

/// An Orlicz measuring function `φ`, increasing with `φ(0) = 0`.
///
/// The families are defined on `(0, 1]`; for `t ≥ 1` the gauge continues as
/// `φ(1)·t`. Evaluation goes through `ln φ` so that terms far below the
/// smallest positive double still carry information.
#[derive(Clone, Debug)]
pub struct OrliczGauge {
    family: GaugeFamily,
}

impl OrliczGauge {
    /// `t^p` for any `p > 0`. [`make_gauge`] restricts `p ≥ 2`; smaller
    /// exponents are used for Schatten probes.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return invalid(format!("power exponent must be positive, got {p}"));
        }
        Ok(OrliczGauge {
            family: GaugeFamily::Power { p },
        })
    }

    pub fn custom(name: &str, ln_phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        OrliczGauge {
            family: GaugeFamily::Custom {
                name: name.to_string(),
                ln_phi: Arc::new(ln_phi),
            },
        }
    }

    pub fn family(&self) -> &GaugeFamily {
        &self.family
    }

    /// Text form accepted by `FromStr`, e.g. `power:2` or `exp:1,0.5`.
    pub fn label(&self) -> String {
        self.family.label()
    }

    /// `ln φ(t)` for `t ∈ (0, 1]`.
    fn ln_unit(&self, t: f64) -> f64 {
        let l = -t.ln();
        match &self.family {
            GaugeFamily::Power { p } => p * t.ln(),
            GaugeFamily::LogLog { c } => -c * l.ln().max(1.0) * l,
            GaugeFamily::LogAlpha { c, alpha } => -c * l.powf(alpha + 1.0),
            GaugeFamily::Exp { c, beta } => -c / t.powf(*beta),
            GaugeFamily::Custom { ln_phi, .. } => ln_phi(t),
        }
    }

    /// `ln φ(t)`; `−∞` at `t = 0`.
    pub fn ln_eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            f64::NEG_INFINITY
        } else if t <= 1.0 {
            self.ln_unit(t)
        } else {
            self.ln_unit(1.0) + t.ln()
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.ln_eval(t).exp()
    }

    /// `max φ(2t)/φ(t)` over `t = 2^{-j}`, `j = 1..=40`, plus points in
    /// `[1, 8]`. Infinite when the ratio overflows.
    pub fn delta2_constant(&self) -> f64 {
        let mut grid: Vec<f64> = (1..=40).map(|j| 0.5f64.powi(j)).collect();
        grid.extend([0.75, 1.0, 2.0, 4.0, 8.0]);
        grid.iter()
            .map(|&t| (self.ln_eval(2.0 * t) - self.ln_eval(t)).exp())
            .fold(0.0, f64::max)
    }

    /// For `power_p`: whether `r(t) = t^{1−2/p}` has nonpositive second
    /// differences on a uniform grid of `(0, 1]`. `None` for other families.
    pub fn r_profile_concave(&self) -> Option<bool> {
        let GaugeFamily::Power { p } = self.family else {
            return None;
        };
        let q = 1.0 - 2.0 / p;
        let n = 1000;
        let r = |i: usize| (i as f64 / n as f64).powf(q);
        Some((1..n).all(|i| r(i - 1) + r(i + 1) - 2.0 * r(i) <= 1e-12))
    }
}

/// Builds a gauge from a family tag and its parameters:
/// `power [p ≥ 2]`, `loglog [C > 0]`, `logalpha [C > 0, α > 1]`,
/// `exp [C > 0, β > 0]`.
pub fn make_gauge(family: &str, params: &[f64]) -> Result<OrliczGauge> {
    let need = |k: usize| -> Result<()> {
        if params.len() != k {
            return invalid(format!(
                "gauge `{family}` takes {k} parameter(s), got {}",
                params.len()
            ));
        }
        if params.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("gauge parameters"));
        }
        Ok(())
    };
    let family = match family {
        "power" => {
            need(1)?;
            if params[0] < 2.0 {
                return invalid("power gauge needs p >= 2");
            }
            GaugeFamily::Power { p: params[0] }
        }
        "loglog" => {
            need(1)?;
            if !(params[0] > 0.0) {
                return invalid("loglog gauge needs C > 0");
            }
            GaugeFamily::LogLog { c: params[0] }
        }
        "logalpha" => {
            need(2)?;
            if !(params[0] > 0.0) || !(params[1] > 1.0) {
                return invalid("logalpha gauge needs C > 0 and alpha > 1");
            }
            GaugeFamily::LogAlpha {
                c: params[0],
                alpha: params[1],
            }
        }
        "exp" => {
            need(2)?;
            if !(params[0] > 0.0) || !(params[1] > 0.0) {
                return invalid("exp gauge needs C > 0 and beta > 0");
            }
            GaugeFamily::Exp {
                c: params[0],
                beta: params[1],
            }
        }
        other => return invalid(format!("unknown gauge family `{other}`")),
    };
    Ok(OrliczGauge { family })
}

impl FromStr for OrliczGauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let params = rest
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .or_else(|_| invalid(format!("bad gauge parameter `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        make_gauge(family.trim(), &params)
    }
}
