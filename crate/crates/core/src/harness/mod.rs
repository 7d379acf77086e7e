//! Experiment registry and reproducible outputs.
//!
//! Each experiment computes tables and a list of assertions. Outputs are
//! plain CSV files plus `summary.json`; equal specs give byte-identical
//! files because every solver is deterministic and tables are emitted in
//! index order.

mod experiments;
mod params;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub use experiments::{family_from_json, report_table, spectrum_table};
pub use params::Params;

/// A registered experiment with its default parameters.
#[derive(Clone, Copy, Debug)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub defaults: &'static [(&'static str, &'static str)],
    pub outputs: &'static [&'static str],
}

pub const REGISTRY: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "sine-1d",
        description: "KR norms of the even sines on [0,1] against sqrt(2)/(pi n); l2 sum of the norms",
        defaults: &[("nmax", "400"), ("grid", "8192"), ("sampling", "cell_average")],
        outputs: &["report.csv", "closed_form.csv"],
    },
    ExperimentInfo {
        name: "sine-nd",
        description: "Products of sines on the d-cube: decay slope of KR norms and l2 / l2.5 verdicts",
        defaults: &[("d", "2"), ("imax", "6"), ("grid", "64"), ("engine", "auto")],
        outputs: &["report.csv", "partial_sums.csv"],
    },
    ExperimentInfo {
        name: "lemma2",
        description: "Disjoint indicator pairs with masses eps_k^2: exact orthonormality and KR lower bound",
        defaults: &[("count", "16"), ("ratio", "0.5"), ("a", "1"), ("grid", "12288"), ("grid_count", "6")],
        outputs: &["report.csv", "sets.csv"],
    },
    ExperimentInfo {
        name: "lemma3-product",
        description: "Coordinate cosines on a weighted product of circles: KR ratio eps_1/eps_2",
        defaults: &[("eps", "1,0.5"), ("resolution", "64"), ("circle_resolution", "1024")],
        outputs: &["report.csv", "circle.csv"],
    },
    ExperimentInfo {
        name: "dilation",
        description: "u(z^n) on the circle with arc metric: KR norm scales like 1/n",
        defaults: &[("resolution", "1024"), ("factors", "1,2,4,8")],
        outputs: &["dilation.csv"],
    },
    ExperimentInfo {
        name: "volterra-spectrum",
        description: "Singular values of the integration operator against 2/((2k+1) pi) and their convergence",
        defaults: &[("sizes", "250,500,1000"), ("kmax", "4"), ("rule", "inclusive")],
        outputs: &["spectrum.csv", "convergence.csv"],
    },
    ExperimentInfo {
        name: "multiplier-spectrum",
        description: "s-numbers 1/|n| of the Fourier multiplier on the d-torus and their Schatten threshold",
        defaults: &[("dims", "1,2,3"), ("count", "100000"), ("rows", "1000")],
        outputs: &["spectrum_d1.csv", "spectrum_d2.csv", "spectrum_d3.csv", "thresholds.csv"],
    },
    ExperimentInfo {
        name: "uncertainty",
        description: "kr * Lip >= ||u||_2^2 across sine, indicator, torus and dilated families",
        defaults: &[],
        outputs: &["report.csv"],
    },
    ExperimentInfo {
        name: "curve",
        description: "KR on the parabola (x, x^2): closed form against exact transport, and the sum bound B^2 C^2",
        defaults: &[("resolution", "512"), ("sine_resolution", "4096"), ("count", "40"), ("tests", "10")],
        outputs: &["crosscheck.csv", "sines.csv"],
    },
    ExperimentInfo {
        name: "schmidt-lower",
        description: "Operator diagonal in the sine basis: enclosure certificate and kr(y_k) >= s_k",
        defaults: &[("resolution", "256"), ("c", "0.17"), ("count", "20")],
        outputs: &["lower_bound.csv"],
    },
    ExperimentInfo {
        name: "orlicz-diagnostics",
        description: "Summability verdicts on sequences with known asymptotics, and gauge sanity checks",
        defaults: &[("length", "4096"), ("a_grid", "1")],
        outputs: &["battery.csv", "gauges.csv"],
    },
    ExperimentInfo {
        name: "crosscheck",
        description: "Closed-form engines against exact transport on random piecewise-constant functions",
        defaults: &[("trials", "100"), ("max_atoms", "128")],
        outputs: &["crosscheck.csv"],
    },
];

pub fn lookup(name: &str) -> Result<&'static ExperimentInfo> {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownExperiment(name.to_string()))
}

/// Name, parameter overrides and seed of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(name: &str) -> Self {
        ExperimentSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|measured − expected| ≤ tol`.
    Eq,
    /// `measured ≤ expected + tol`.
    Le,
    /// `measured ≥ expected − tol`.
    Ge,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Assertion {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        relation: Relation,
        expected: f64,
        tol: f64,
    ) -> Self {
        let pass = match relation {
            Relation::Eq => (measured - expected).abs() <= tol,
            Relation::Le => measured <= expected + tol,
            Relation::Ge => measured >= expected - tol,
        };
        Assertion {
            name: name.into(),
            measured,
            expected,
            tol,
            relation,
            pass,
        }
    }

    pub fn eq(name: impl Into<String>, measured: f64, expected: f64, tol: f64) -> Self {
        Self::new(name, measured, Relation::Eq, expected, tol)
    }

    pub fn le(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, Relation::Le, bound, 0.0)
    }

    pub fn ge(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, Relation::Ge, bound, 0.0)
    }

    /// A yes/no check, recorded as `1` or `0` against `1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::eq(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    /// A step that errored; recorded as a failed assertion.
    pub fn failed(name: impl Into<String>) -> Self {
        Self::eq(name, f64::NAN, 1.0, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
}

impl Summary {
    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }
}

/// One CSV artifact.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Table {
            file: file.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub summary: Summary,
    pub tables: Vec<Table>,
}

impl ExperimentOutput {
    /// Writes every table and `summary.json` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let p = dir.join(&t.file);
            t.write(&p)?;
            written.push(p);
        }
        let p = dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        fs::write(&p, text)?;
        written.push(p);
        Ok(written)
    }
}

/// Runs a registered experiment. Unknown names and invalid parameters are
/// errors; failures inside the experiment become failed assertions.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let info = lookup(&spec.name)?;
    let params = Params::resolve(info, &spec.params)?;
    let (assertions, tables) = experiments::dispatch(info.name, &params, spec.seed)?;
    Ok(ExperimentOutput {
        summary: Summary {
            experiment: info.name.to_string(),
            params: params.to_json(),
            seed: spec.seed,
            assertions,
        },
        tables,
    })
}
