//! `krnorm` command line: single KR solves, family reports, spectra,
//! Orlicz diagnostics and the registered experiments.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use krnorm::domains::io::{read_measure_csv, write_atom_values_csv};
use krnorm::domains::{build_space, SpaceSpec};
use krnorm::families::intermixing_report;
use krnorm::harness::{
    family_from_json, report_table, run_experiment, spectrum_table, ExperimentSpec, Table, REGISTRY,
};
use krnorm::orlicz::{summability_report, OrliczGauge};
use krnorm::transport::{dual_check, kr_measure, Engine};

#[derive(Parser)]
#[command(
    name = "krnorm",
    version,
    about = "Kantorovich-Rubinstein norms of signed measures on finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// KR norm of a signed measure given as CSV (`x1,...,xd,mass`).
    Kr {
        #[arg(long)]
        measure: PathBuf,
        /// Space description as JSON, inline or a file path.
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "auto")]
        engine: Engine,
        /// Write the plan as `src,dst,mass,cost_contrib`.
        #[arg(long)]
        emit_plan: Option<PathBuf>,
        /// Write the dual potential per atom.
        #[arg(long)]
        emit_potential: Option<PathBuf>,
    },
    /// Per-member report for the first `count` members of a family.
    Family {
        /// sine, lemma2, lemma3 or dilated.
        #[arg(long)]
        name: String,
        /// Family parameters as JSON, inline or a file path.
        #[arg(long, default_value = "{}")]
        params: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "auto")]
        engine: Engine,
        #[arg(long, default_value = "report.csv")]
        out: PathBuf,
    },
    /// Singular numbers against their reference values.
    Spectra {
        /// volterra or multiplier.
        #[arg(long)]
        operator: String,
        /// Grid size (volterra) or number of s-numbers (multiplier).
        #[arg(long)]
        size: usize,
        /// Torus dimension for the multiplier.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value = "spectrum.csv")]
        out: PathBuf,
    },
    /// Summability verdict of `Σ φ(a c_k)` for a sequence read from CSV.
    Orlicz {
        /// `power:p`, `loglog:C`, `logalpha:C,alpha` or `exp:C,beta`.
        #[arg(long)]
        gauge: OrliczGauge,
        /// One value per line; a non-numeric first line is a header.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "1", value_delimiter = ',')]
        a_grid: Vec<f64>,
    },
    /// Run a registered experiment and write its tables and summary.json.
    Run {
        experiment: String,
        /// Parameter override `key=value`; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Registered experiments with their default parameters.
    List,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got `{s}`"))
}

/// Inline JSON when it looks like an object, otherwise a file to read.
fn json_arg(text: &str) -> Result<Value, Box<dyn std::error::Error>> {
    let t = text.trim_start();
    let raw = if t.starts_with('{') {
        text.to_string()
    } else {
        fs::read_to_string(text)?
    };
    Ok(serde_json::from_str(&raw)?)
}

fn read_sequence(path: &Path) -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(x) => out.push(x),
            Err(_) if i == 0 => {}
            Err(_) => return Err(format!("line {}: `{field}` is not a number", i + 1).into()),
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Kr {
            measure,
            space,
            engine,
            emit_plan,
            emit_potential,
        } => {
            let spec: SpaceSpec = serde_json::from_value(json_arg(&space)?)?;
            let space = build_space(&spec)?;
            let mu = read_measure_csv(File::open(&measure)?, space.clone())?;
            let res = kr_measure(&mu, engine)?;
            let certified = match res.engine {
                krnorm::transport::EngineTag::Bipartite => Some(dual_check(&res, &mu)?.certified()),
                _ => None,
            };
            if let Some(path) = emit_plan {
                let mut t = Table::new("plan.csv", &["src", "dst", "mass", "cost_contrib"]);
                for f in res.plan.iter().flat_map(|p| &p.flows) {
                    let c = f.mass * space.distance(f.src, f.dst);
                    t.push(vec![
                        f.src.to_string(),
                        f.dst.to_string(),
                        f.mass.to_string(),
                        c.to_string(),
                    ]);
                }
                t.write(&path)?;
            }
            if let Some(path) = emit_potential {
                let f = res
                    .potential
                    .as_ref()
                    .ok_or("engine returned no potential")?;
                write_atom_values_csv(File::create(path)?, &space, "potential", f)?;
            }
            let out = json!({
                "kr": res.value,
                "engine": res.engine.to_string(),
                "duality_gap": res.duality_gap,
                "certified": certified,
                "note": res.discretization_note,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Family {
            name,
            params,
            count,
            engine,
            out,
        } => {
            let family = family_from_json(&name, &json_arg(&params)?, count)?;
            let report = intermixing_report(&family, count, engine, &[], &[1.0])?;
            report_table(&report).write(&out)?;
            let ok = report.all_uncertainty_ok();
            println!(
                "{} members of {} written to {}",
                count,
                family.name,
                out.display()
            );
            if !ok {
                println!("uncertainty inequality violated for some member");
            }
            Ok(ok)
        }
        Command::Spectra {
            operator,
            size,
            dim,
            out,
        } => {
            spectrum_table(&operator, size, dim)?.write(&out)?;
            println!("{operator} spectrum written to {}", out.display());
            Ok(true)
        }
        Command::Orlicz {
            gauge,
            input,
            a_grid,
        } => {
            let c = read_sequence(&input)?;
            let rep = summability_report(&c, &gauge, &a_grid)?;
            for s in &rep.per_scale {
                println!(
                    "a={} partial_sum={} tail_slope={:.4} verdict={}",
                    s.a,
                    s.partial_sums.last().copied().unwrap_or(0.0),
                    s.tail_slope,
                    s.verdict
                );
            }
            println!("gauge={} verdict={}", rep.gauge, rep.verdict);
            Ok(true)
        }
        Command::Run {
            experiment,
            params,
            out,
            seed,
        } => {
            let spec = ExperimentSpec {
                name: experiment,
                params: params.into_iter().collect::<BTreeMap<_, _>>(),
                seed,
            };
            let output = run_experiment(&spec)?;
            output.write(&out)?;
            for a in &output.summary.assertions {
                println!(
                    "{} {}: measured {} expected {} tol {}",
                    if a.pass { "PASS" } else { "FAIL" },
                    a.name,
                    a.measured,
                    a.expected,
                    a.tol
                );
            }
            Ok(output.summary.all_pass())
        }
        Command::List => {
            for e in REGISTRY {
                println!("{}", e.name);
                println!("    {}", e.description);
                if !e.defaults.is_empty() {
                    let d: Vec<String> =
                        e.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    println!("    defaults: {}", d.join(" "));
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
