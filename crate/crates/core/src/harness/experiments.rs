use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::{Assertion, Params, Table};
use crate::domains::{
    atomize, atomize_based, build_space, lipschitz_constant, CurveSpec, GridFunction, Metric,
    MetricMeasureSpace, SpaceKind, SpaceSpec,
};
use crate::error::{invalid, Result};
use crate::families::{
    bessel_bound, dilated_family, gen_lemma2, gen_sine_with, gram_deviation, intermixing_report,
    lemma2_family, lemma2_intervals, lemma3_family, sine_family, Family, IntermixingReport,
    Lemma2Params, Sampling,
};
use crate::orlicz::{ls_slope, make_gauge, summability_report, OrliczGauge, Verdict};
use crate::spectra::{
    diagonal_sine_operator, lip_enclosure_certificate, lower_bound_family, multiplier_reference,
    multiplier_snumbers, schatten_threshold, svd, volterra_operator_with, volterra_reference,
    VolterraRule,
};
use crate::transport::{dual_check, kr, kr_measure, Engine, EngineTag};

type Outcome = (Vec<Assertion>, Vec<Table>);

pub(super) fn dispatch(name: &str, p: &Params, seed: u64) -> Result<Outcome> {
    match name {
        "sine-1d" => sine_1d(p),
        "sine-nd" => sine_nd(p),
        "lemma2" => lemma2(p),
        "lemma3-product" => lemma3_product(p),
        "dilation" => dilation(p),
        "volterra-spectrum" => volterra_spectrum(p),
        "multiplier-spectrum" => multiplier_spectrum(p),
        "uncertainty" => uncertainty(),
        "curve" => curve(p, seed),
        "schmidt-lower" => schmidt_lower(p),
        "orlicz-diagnostics" => orlicz_diagnostics(p),
        "crosscheck" => crosscheck(p, seed),
        other => invalid(format!("experiment {other} has no implementation")),
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn gauge(label: &str) -> OrliczGauge {
    label.parse().expect("built-in gauge label")
}

fn sampling(text: &str) -> Result<Sampling> {
    match text {
        "cell_average" => Ok(Sampling::CellAverage),
        "midpoint" => Ok(Sampling::Midpoint),
        other => invalid(format!(
            "sampling must be cell_average or midpoint, got `{other}`"
        )),
    }
}

fn cube(d: usize, resolution: usize) -> Result<Arc<MetricMeasureSpace>> {
    Ok(Arc::new(MetricMeasureSpace::cube(d, resolution)?))
}

/// The per-member columns `k,kr,lip,l2,kr_lower_bound,uncertainty_ok`.
pub fn report_table(r: &IntermixingReport) -> Table {
    let mut t = Table::new(
        "report.csv",
        &["k", "kr", "lip", "l2", "kr_lower_bound", "uncertainty_ok"],
    );
    for m in &r.members {
        t.push(vec![
            m.k.clone(),
            num(m.kr),
            num(m.lip),
            num(m.l2),
            num(m.kr_lower_bound),
            m.uncertainty_ok.to_string(),
        ]);
    }
    t
}

fn field<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.get(key).filter(|x| !x.is_null())
}

fn usize_field(v: &Value, key: &str, default: usize) -> Result<usize> {
    match field(v, key) {
        None => Ok(default),
        Some(x) => match x.as_u64() {
            Some(n) => Ok(n as usize),
            None => invalid(format!("`{key}` must be a nonnegative integer")),
        },
    }
}

fn f64_list(v: &Value, key: &str) -> Result<Option<Vec<f64>>> {
    match field(v, key) {
        None => Ok(None),
        Some(Value::Array(items)) => items
            .iter()
            .map(|x| match x.as_f64() {
                Some(f) => Ok(f),
                None => invalid(format!("`{key}` must be a list of numbers")),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some),
        Some(_) => invalid(format!("`{key}` must be a list of numbers")),
    }
}

fn truncate(mut family: Family, count: usize) -> Result<Family> {
    if count == 0 || count > family.len() {
        return invalid(format!("count must be in 1..={}", family.len()));
    }
    family.members.truncate(count);
    family.indices.truncate(count);
    Ok(family)
}

/// Builds the first `count` members of a named family from JSON parameters.
///
/// * `sine`: `{d, resolution, sampling}`; indices up to `⌈count^{1/d}⌉` per axis.
/// * `lemma2`: `{eps, a, resolution}`; without `resolution` the sets are
///   single atoms of an adapted partition.
/// * `lemma3`: `{eps, resolution}`.
/// * `dilated`: `{resolution, metric}`; `√2 cos θ` dilated by `1..=count`.
pub fn family_from_json(name: &str, params: &Value, count: usize) -> Result<Family> {
    if count == 0 {
        return invalid("count must be positive");
    }
    match name {
        "sine" => {
            let d = usize_field(params, "d", 1)?;
            let resolution = usize_field(params, "resolution", 1024)?;
            let mode = match field(params, "sampling") {
                None => Sampling::CellAverage,
                Some(Value::String(s)) => sampling(s)?,
                Some(_) => return invalid("`sampling` must be a string"),
            };
            if d == 0 {
                return invalid("`d` must be positive");
            }
            let mut imax: usize = 1;
            while imax.pow(d as u32) < count {
                imax += 1;
            }
            truncate(sine_family(d, imax, cube(d, resolution)?, mode)?, count)
        }
        "lemma2" => {
            let mut lp = Lemma2Params::dyadic(count);
            if let Some(eps) = f64_list(params, "eps")? {
                lp.eps = eps;
            }
            if let Some(a) = field(params, "a") {
                lp.a = a
                    .as_f64()
                    .ok_or_else(|| crate::Error::InvalidParameter("`a` must be a number".into()))?;
            }
            match field(params, "resolution") {
                None => lemma2_family(&lp, count),
                Some(_) => {
                    let resolution = usize_field(params, "resolution", 0)?;
                    gen_lemma2(&lp, count, cube(1, resolution)?)
                }
            }
        }
        "lemma3" => {
            let eps = f64_list(params, "eps")?.unwrap_or_else(|| vec![1.0, 0.5]);
            let resolution = usize_field(params, "resolution", 64)?;
            truncate(lemma3_family(&eps, resolution)?, count)
        }
        "dilated" => {
            let resolution = usize_field(params, "resolution", 1024)?;
            let metric = match field(params, "metric")
                .and_then(Value::as_str)
                .unwrap_or("arc")
            {
                "arc" => Metric::Arc,
                "chordal" => Metric::Chordal,
                other => {
                    return invalid(format!(
                        "circle metric must be arc or chordal, got `{other}`"
                    ))
                }
            };
            let space = Arc::new(MetricMeasureSpace::circle(resolution, metric)?);
            let base = circle_cosine(space)?;
            let factors: Vec<usize> = (1..=count).collect();
            dilated_family(&base, &factors)
        }
        other => invalid(format!(
            "unknown family `{other}` (sine, lemma2, lemma3, dilated)"
        )),
    }
}

fn circle_cosine(space: Arc<MetricMeasureSpace>) -> Result<GridFunction> {
    GridFunction::from_fn(space, |x| SQRT_2 * x[0].cos())
}

fn uncertainty_violations(r: &IntermixingReport) -> f64 {
    r.members.iter().filter(|m| !m.uncertainty_ok).count() as f64
}

fn uncertified(r: &IntermixingReport) -> f64 {
    r.members
        .iter()
        .filter(|m| m.dual.as_ref().is_some_and(|d| !d.certified()))
        .count() as f64
}

fn sine_1d(p: &Params) -> Result<Outcome> {
    let nmax: usize = p.get("nmax")?;
    let grid: usize = p.get("grid")?;
    let mode = sampling(&p.text("sampling")?)?;
    let family = sine_family(1, nmax / 2, cube(1, grid)?, mode)?;
    let report = intermixing_report(
        &family,
        family.len(),
        Engine::Auto,
        &[gauge("power:2")],
        &[1.0],
    )?;

    let mut a = Vec::new();
    let mut closed = Table::new("closed_form.csv", &["n", "kr", "closed_form", "rel_err"]);
    let mut worst_err = 0.0f64;
    let mut worst_lip = 0.0f64;
    for (m, idx) in report.members.iter().zip(&family.indices) {
        let n = idx[0] as f64;
        let exact = SQRT_2 / (PI * n);
        let err = (m.kr - exact).abs() / exact;
        worst_err = worst_err.max(err);
        worst_lip = worst_lip.max(m.lip / (SQRT_2 * PI * n));
        closed.push(vec![idx[0].to_string(), num(m.kr), num(exact), num(err)]);
    }
    let l2_sum = report.partial_sums["power:2"]
        .last()
        .copied()
        .unwrap_or(0.0);
    a.push(Assertion::le("kr_closed_form_max_rel_err", worst_err, 1e-6));
    a.push(Assertion::eq("kr_l2_sum", l2_sum, 0.0833, 0.001));
    a.push(Assertion::le(
        "gram_deviation",
        gram_deviation(&family, family.len())?,
        family.gram_tolerance.unwrap_or(0.0),
    ));
    a.push(Assertion::le(
        "uncertainty_violations",
        uncertainty_violations(&report),
        0.0,
    ));
    a.push(Assertion::le(
        "lip_over_sqrt2_pi_n_max",
        worst_lip,
        1.0 + 1e-12,
    ));
    a.push(Assertion::holds(
        "half_decay_threshold_found",
        report.decay_threshold.is_some(),
    ));
    a.push(Assertion::holds(
        "l2_verdict_converging",
        report.verdicts["power:2"] == Verdict::Converging,
    ));
    Ok((a, vec![report_table(&report), closed]))
}

/// Least-squares slope of `ln kr` against `ln |n|`.
fn decay_slope(family: &Family, kr: &[f64]) -> f64 {
    let xs: Vec<f64> = family.indices[..kr.len()]
        .iter()
        .map(|n| (n.iter().map(|&k| (k * k) as f64).sum::<f64>()).sqrt().ln())
        .collect();
    let ys: Vec<f64> = kr.iter().map(|x| x.ln()).collect();
    ls_slope(&xs, &ys)
}

fn sine_nd(p: &Params) -> Result<Outcome> {
    let d: usize = p.get("d")?;
    let imax: usize = p.get("imax")?;
    let grid: usize = p.get("grid")?;
    let engine: Engine = p.get("engine")?;
    let family = sine_family(d, imax, cube(d, grid)?, Sampling::CellAverage)?;
    let gauges = [gauge("power:2"), gauge("power:2.5")];
    let report = intermixing_report(&family, family.len(), engine, &gauges, &[1.0])?;
    let kr = report.kr_values();

    let lip_ratio = report
        .members
        .iter()
        .zip(&family.indices)
        .map(|(m, n)| {
            let norm = n.iter().map(|&k| (k * k) as f64).sum::<f64>().sqrt();
            m.lip / (2f64.powf(d as f64 / 2.0) * PI * norm)
        })
        .fold(0.0, f64::max);
    let mut a = vec![
        Assertion::eq("kr_decay_slope", decay_slope(&family, &kr), -1.0, 0.15),
        Assertion::holds(
            "l2_verdict_diverging",
            report.verdicts["power:2"] == Verdict::Diverging,
        ),
        Assertion::holds(
            "l2.5_verdict_converging",
            report.verdicts["power:2.5"] == Verdict::Converging,
        ),
        Assertion::le("uncertified_solves", uncertified(&report), 0.0),
        Assertion::le(
            "uncertainty_violations",
            uncertainty_violations(&report),
            0.0,
        ),
        Assertion::le("lip_over_bound_max", lip_ratio, 1.0 + 1e-12),
    ];
    if d == 1 {
        // Only meaningful where the decay is 1/n per member.
        a.retain(|x| x.name != "l2_verdict_diverging" && x.name != "l2.5_verdict_converging");
    }

    let mut sums = Table::new("partial_sums.csv", &["k", "index", "power:2", "power:2.5"]);
    for (k, m) in report.members.iter().enumerate() {
        sums.push(vec![
            (k + 1).to_string(),
            m.k.clone(),
            num(report.partial_sums["power:2"][k]),
            num(report.partial_sums["power:2.5"][k]),
        ]);
    }
    Ok((a, vec![report_table(&report), sums]))
}

fn lemma2(p: &Params) -> Result<Outcome> {
    let count: usize = p.get("count")?;
    let ratio: f64 = p.get("ratio")?;
    let scale: f64 = p.get("a")?;
    let grid: usize = p.get("grid")?;
    let grid_count: usize = p.get("grid_count")?;
    let params = Lemma2Params {
        eps: (1..=count.max(grid_count))
            .map(|k| ratio.powi(k as i32))
            .collect(),
        a: scale,
    };
    let family = lemma2_family(&params, count)?;
    let report = intermixing_report(&family, count, Engine::Auto, &[gauge("power:2")], &[1.0])?;

    let mut bound_ratio = f64::INFINITY;
    let mut closed_err = 0.0f64;
    let mut cross = 0.0f64;
    for (k, (m, u)) in report.members.iter().zip(&family.members).enumerate() {
        let e = params.eps[k];
        bound_ratio = bound_ratio.min(m.kr / (scale * e / (3.0 * SQRT_2)));
        let exact = SQRT_2 * scale * e / 3.0;
        closed_err = closed_err.max((m.kr - exact).abs() / exact);
        let b = kr(u, Engine::Bipartite)?;
        cross = cross.max((b.value - m.kr).abs());
    }
    let grid_family = gen_lemma2(&params, grid_count, cube(1, grid)?)?;
    let a = vec![
        Assertion::le("gram_deviation", gram_deviation(&family, count)?, 1e-12),
        Assertion::ge("kr_over_lower_bound_min", bound_ratio, 1.0),
        Assertion::le("kr_closed_form_max_rel_err", closed_err, 1e-12),
        Assertion::le("interval_vs_bipartite_max_diff", cross, 1e-8),
        Assertion::le(
            "uncertainty_violations",
            uncertainty_violations(&report),
            0.0,
        ),
        Assertion::holds(
            "l2_verdict_converging",
            report.verdicts["power:2"] == Verdict::Converging,
        ),
        Assertion::le(
            "grid_gram_deviation",
            gram_deviation(&grid_family, grid_count)?,
            1e-12,
        ),
    ];

    let mut sets = Table::new(
        "sets.csv",
        &["k", "eps", "mass", "lo1", "hi1", "lo2", "hi2"],
    );
    for (k, pair) in lemma2_intervals(&params, count)?.iter().enumerate() {
        let e = params.eps[k];
        sets.push(vec![
            (k + 1).to_string(),
            num(e),
            num(scale * scale * e * e),
            num(pair[0].0),
            num(pair[0].1),
            num(pair[1].0),
            num(pair[1].1),
        ]);
    }
    Ok((a, vec![report_table(&report), sets]))
}

fn lemma3_product(p: &Params) -> Result<Outcome> {
    let eps: Vec<f64> = p.list("eps")?;
    let resolution: usize = p.get("resolution")?;
    let circle_resolution: usize = p.get("circle_resolution")?;
    let family = lemma3_family(&eps, resolution)?;
    let report = intermixing_report(&family, family.len(), Engine::Bipartite, &[], &[1.0])?;
    let values = report.kr_values();

    let circle = Arc::new(MetricMeasureSpace::circle(
        circle_resolution,
        Metric::Chordal,
    )?);
    let chordal = kr(&circle_cosine(circle)?, Engine::Bipartite)?.value;

    let mut a = vec![
        Assertion::le(
            "gram_deviation",
            gram_deviation(&family, family.len())?,
            1e-10,
        ),
        Assertion::le("uncertified_solves", uncertified(&report), 0.0),
        Assertion::le(
            "uncertainty_violations",
            uncertainty_violations(&report),
            0.0,
        ),
        Assertion::ge("chordal_circle_kr_lower", chordal, 0.35355),
        Assertion::le("chordal_circle_kr_upper", chordal, 0.90032),
    ];
    if eps.len() >= 2 {
        let expected = eps[0] / eps[1];
        a.insert(
            1,
            Assertion::eq(
                "kr_ratio_1_2",
                values[0] / values[1],
                expected,
                0.05 * expected,
            ),
        );
    }
    let mut t = Table::new("circle.csv", &["metric", "resolution", "kr"]);
    t.push(vec![
        "chordal".into(),
        circle_resolution.to_string(),
        num(chordal),
    ]);
    Ok((a, vec![report_table(&report), t]))
}

fn dilation(p: &Params) -> Result<Outcome> {
    let resolution: usize = p.get("resolution")?;
    let factors: Vec<usize> = p.list("factors")?;
    let space = Arc::new(MetricMeasureSpace::circle(resolution, Metric::Arc)?);
    let base = circle_cosine(space)?;
    let family = dilated_family(&base, &factors)?;
    let base_kr = kr(&base, Engine::CircleArc)?.value;

    let mut t = Table::new("dilation.csv", &["n", "kr", "expected", "rel_err"]);
    let mut worst = 0.0f64;
    for (&n, u) in factors.iter().zip(&family.members) {
        let value = kr(u, Engine::CircleArc)?.value;
        let expected = base_kr / n as f64;
        let err = (value - expected).abs() / expected;
        worst = worst.max(err);
        t.push(vec![n.to_string(), num(value), num(expected), num(err)]);
    }
    let continuum = 2.0 * SQRT_2 / PI;
    let a = vec![
        Assertion::le("dilation_max_rel_err", worst, 1e-3),
        Assertion::eq(
            "base_kr_vs_2sqrt2_over_pi",
            base_kr,
            continuum,
            1e-4 * continuum,
        ),
    ];
    Ok((a, vec![t]))
}

fn volterra_rule(text: &str) -> Result<VolterraRule> {
    match text {
        "inclusive" => Ok(VolterraRule::Inclusive),
        "half_cell" => Ok(VolterraRule::HalfCell),
        other => invalid(format!(
            "volterra rule must be inclusive or half_cell, got `{other}`"
        )),
    }
}

/// Rows `k, s_k, reference, rel_err` (1-based `k`) for the Volterra operator.
fn volterra_rows(size: usize, rule: VolterraRule) -> Result<Vec<(usize, f64, f64, f64)>> {
    let op = volterra_operator_with(size, rule)?;
    let dec = svd(&op.matrix)?;
    Ok(dec
        .s
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let r = volterra_reference(k);
            (k + 1, s, r, (s - r).abs() / r)
        })
        .collect())
}

fn multiplier_rows(d: usize, count: usize) -> Result<Vec<(usize, f64, f64, f64)>> {
    Ok(multiplier_snumbers(d, count)?
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let r = multiplier_reference(d, k + 1);
            (k + 1, s, r, (s - r).abs() / r)
        })
        .collect())
}

fn spectrum_rows_table(file: &str, rows: &[(usize, f64, f64, f64)]) -> Table {
    let mut t = Table::new(file, &["k", "s_k", "reference", "rel_err"]);
    for &(k, s, r, e) in rows {
        t.push(vec![k.to_string(), num(s), num(r), num(e)]);
    }
    t
}

/// `k,s_k,reference,rel_err` for `volterra` (an `size × size` grid) or
/// `multiplier` (the `size` largest s-numbers on the `dim`-torus).
pub fn spectrum_table(operator: &str, size: usize, dim: usize) -> Result<Table> {
    let rows = match operator {
        "volterra" => volterra_rows(size, VolterraRule::Inclusive)?,
        "multiplier" => multiplier_rows(dim, size)?,
        other => {
            return invalid(format!(
                "operator must be volterra or multiplier, got `{other}`"
            ))
        }
    };
    Ok(spectrum_rows_table("spectrum.csv", &rows))
}

fn volterra_spectrum(p: &Params) -> Result<Outcome> {
    let sizes: Vec<usize> = p.list("sizes")?;
    let kmax: usize = p.get("kmax")?;
    let rule = volterra_rule(&p.text("rule")?)?;
    if sizes.is_empty() {
        return invalid("sizes must list at least one resolution");
    }
    let mut a = Vec::new();
    let mut conv = Table::new(
        "convergence.csv",
        &["size", "max_rel_err", "ratio_to_previous"],
    );
    let mut spectrum = Table::default();
    let mut prev: Option<f64> = None;
    for (i, &n) in sizes.iter().enumerate() {
        let rows = volterra_rows(n, rule)?;
        if rows.len() <= kmax {
            return invalid(format!(
                "size {n} has fewer than {} singular values",
                kmax + 1
            ));
        }
        let err = rows[..=kmax].iter().map(|r| r.3).fold(0.0, f64::max);
        let ratio = prev.map(|e| e / err);
        conv.push(vec![
            n.to_string(),
            num(err),
            ratio.map(num).unwrap_or_default(),
        ]);
        if let Some(r) = ratio {
            a.push(Assertion::eq(
                format!("error_ratio_{}_{}", sizes[i - 1], n),
                r,
                2.0,
                0.5,
            ));
        }
        prev = Some(err);
        if i + 1 == sizes.len() {
            a.insert(
                0,
                Assertion::le(format!("max_rel_err_k_le_{kmax}_at_{n}"), err, 5e-3),
            );
            let hs: f64 = rows.iter().map(|r| r.1 * r.1).sum();
            a.push(Assertion::eq("hilbert_schmidt_sq", hs, 0.5, 2.0 / n as f64));
            spectrum = spectrum_rows_table("spectrum.csv", &rows);
        }
    }
    Ok((a, vec![spectrum, conv]))
}

fn multiplier_spectrum(p: &Params) -> Result<Outcome> {
    let dims: Vec<usize> = p.list("dims")?;
    let count: usize = p.get("count")?;
    let rows: usize = p.get("rows")?;
    let mut a = Vec::new();
    let mut tables = Vec::new();
    let mut thresholds = Table::new(
        "thresholds.csv",
        &[
            "d",
            "p_estimate",
            "verdict_alpha_d",
            "verdict_alpha_d_plus_1",
        ],
    );
    for &d in &dims {
        let rows_d = multiplier_rows(d, count)?;
        let s: Vec<f64> = rows_d.iter().map(|r| r.1).collect();
        let est = schatten_threshold(&s, &[d as f64, d as f64 + 1.0])?;
        let p_est = est.p_estimate.unwrap_or(f64::NAN);
        a.push(Assertion::eq(
            format!("p_estimate_d{d}"),
            p_est,
            d as f64,
            0.15,
        ));
        a.push(Assertion::holds(
            format!("alpha_d_diverging_d{d}"),
            est.probes[0].1 == Verdict::Diverging,
        ));
        a.push(Assertion::holds(
            format!("alpha_d_plus_1_converging_d{d}"),
            est.probes[1].1 == Verdict::Converging,
        ));
        if d == 1 {
            let head = s.len() >= 4 && s[0] == 1.0 && s[1] == 1.0 && s[2] == 0.5 && s[3] == 0.5;
            a.push(Assertion::holds("d1_leading_values", head));
        }
        thresholds.push(vec![
            d.to_string(),
            num(p_est),
            est.probes[0].1.to_string(),
            est.probes[1].1.to_string(),
        ]);
        let t = spectrum_rows_table(
            &format!("spectrum_d{d}.csv"),
            &rows_d[..rows.min(rows_d.len())],
        );
        tables.push(t);
    }
    tables.push(thresholds);
    Ok((a, tables))
}

fn uncertainty() -> Result<Outcome> {
    let families = vec![
        sine_family(1, 32, cube(1, 1024)?, Sampling::CellAverage)?,
        sine_family(2, 4, cube(2, 32)?, Sampling::CellAverage)?,
        lemma2_family(&Lemma2Params::dyadic(12), 12)?,
        lemma3_family(&[1.0, 0.5], 32)?,
        dilated_family(
            &circle_cosine(Arc::new(MetricMeasureSpace::circle(1024, Metric::Arc)?))?,
            &[1, 2, 4, 8],
        )?,
    ];
    let mut t = Table::new(
        "report.csv",
        &[
            "family",
            "k",
            "kr",
            "lip",
            "l2",
            "kr_lower_bound",
            "uncertainty_ok",
        ],
    );
    let mut total = 0usize;
    let mut violations = 0usize;
    let mut worst_slack = f64::INFINITY;
    for f in &families {
        let r = intermixing_report(f, f.len(), Engine::Auto, &[], &[1.0])?;
        for m in &r.members {
            total += 1;
            violations += usize::from(!m.uncertainty_ok);
            worst_slack = worst_slack.min(m.kr * m.lip - m.l2 * m.l2);
            t.push(vec![
                f.name.clone(),
                m.k.clone(),
                num(m.kr),
                num(m.lip),
                num(m.l2),
                num(m.kr_lower_bound),
                m.uncertainty_ok.to_string(),
            ]);
        }
    }
    let a = vec![
        Assertion::ge("functions_checked", total as f64, 60.0),
        Assertion::le("uncertainty_violations", violations as f64, 0.0),
        Assertion::ge("min_kr_lip_minus_l2_sq", worst_slack, -1e-9),
    ];
    Ok((a, vec![t]))
}

fn parabola(resolution: usize) -> Result<Arc<MetricMeasureSpace>> {
    build_space(&SpaceSpec {
        kind: SpaceKind::Curve,
        dimension: 1,
        resolution,
        metric: Some("curve_pullback".into()),
        eps: None,
        curve: Some(CurveSpec::Parabola),
    })
}

/// Zero-mean piecewise-constant function with `pieces` random levels.
fn random_steps(
    space: Arc<MetricMeasureSpace>,
    pieces: usize,
    rng: &mut ChaCha8Rng,
) -> Result<GridFunction> {
    let n = space.len();
    let levels: Vec<f64> = (0..pieces).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let values = (0..n).map(|i| levels[i * pieces / n]).collect();
    Ok(GridFunction::new(space, values)?.centered())
}

fn curve(p: &Params, seed: u64) -> Result<Outcome> {
    let resolution: usize = p.get("resolution")?;
    let sine_resolution: usize = p.get("sine_resolution")?;
    let count: usize = p.get("count")?;
    let tests: usize = p.get("tests")?;
    let space = parabola(resolution)?;
    let chord_space = Arc::new(space.with_metric(Metric::CurveChord)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut cases = Vec::with_capacity(tests);
    for k in 1..=tests.div_ceil(2) {
        cases.push((
            format!("sine_{}", 2 * k),
            gen_sine_with(&[2 * k], space.clone(), Sampling::Midpoint)?,
        ));
    }
    while cases.len() < tests {
        let pieces = rng.gen_range(2..=16);
        let name = format!("steps_{}", cases.len() + 1);
        cases.push((name, random_steps(space.clone(), pieces, &mut rng)?));
    }

    let mut cross = Table::new(
        "crosscheck.csv",
        &["case", "curve", "bipartite", "chord", "rel_diff"],
    );
    let mut worst = 0.0f64;
    let mut chord_excess = f64::NEG_INFINITY;
    let mut bad = 0usize;
    for (name, u) in &cases {
        let mu = atomize(u)?;
        let c = kr_measure(&mu, Engine::Curve)?.value;
        let b = kr_measure(&mu, Engine::Bipartite)?;
        bad += usize::from(!dual_check(&b, &mu)?.certified());
        let chord_u = GridFunction::new(chord_space.clone(), u.values().to_vec())?;
        let ch = kr(&chord_u, Engine::Bipartite)?.value;
        let diff = (c - b.value).abs() / b.value;
        worst = worst.max(diff);
        chord_excess = chord_excess.max(ch - b.value);
        cross.push(vec![name.clone(), num(c), num(b.value), num(ch), num(diff)]);
    }

    let sine_space = parabola(sine_resolution)?;
    let family = sine_family(1, count, sine_space.clone(), Sampling::Midpoint)?;
    let report = intermixing_report(&family, count, Engine::Curve, &[gauge("power:2")], &[1.0])?;
    let b = bessel_bound(&family, count)?;
    let data = sine_space.curve_data().expect("curve space");
    let h = 1.0 / sine_resolution as f64;
    let length = data.arc[sine_resolution - 1] + 0.5 * h * data.speeds[sine_resolution - 1];
    // C² = ∫ (L − s(x)) dx with s the arc length up to x.
    let c_sq: f64 = (0..sine_resolution)
        .map(|i| sine_space.weight(i) * (length - data.arc[i]))
        .sum();
    let c_sq_exact = (5.0 * 5f64.sqrt() - 1.0) / 12.0;
    let sum = report.partial_sums["power:2"][count - 1];

    let mut sines = Table::new("sines.csv", &["n", "kr", "partial_sum_sq"]);
    for (k, m) in report.members.iter().enumerate() {
        sines.push(vec![
            m.k.clone(),
            num(m.kr),
            num(report.partial_sums["power:2"][k]),
        ]);
    }
    let a = vec![
        Assertion::le("curve_vs_bipartite_max_rel_diff", worst, 1e-3),
        Assertion::le("uncertified_solves", bad as f64, 0.0),
        Assertion::le("chord_minus_pullback_max", chord_excess, 1e-12),
        Assertion::eq("c_sq_vs_closed_form", c_sq, c_sq_exact, 1e-4),
        Assertion::le("kr_sq_sum_over_b2c2", sum / (b * b * c_sq), 1.0),
    ];
    Ok((a, vec![cross, sines]))
}

fn schmidt_lower(p: &Params) -> Result<Outcome> {
    let resolution: usize = p.get("resolution")?;
    let c: f64 = p.get("c")?;
    let count: usize = p.get("count")?;
    let space = cube(1, resolution)?;
    let s: Vec<f64> = (1..=count).map(|k| c / (k * k) as f64).collect();
    let op = diagonal_sine_operator(&space, &s)?;
    let dec = svd(&op.matrix)?;

    let s_err = (0..count)
        .map(|k| (dec.s[k] - s[k]).abs())
        .fold(0.0, f64::max);
    let lips = (0..count)
        .map(|k| {
            let y = GridFunction::new(space.clone(), op.to_function_values(&dec.y[k]))?;
            Ok(lipschitz_constant(&y))
        })
        .collect::<Result<Vec<f64>>>()?;
    let cert = lip_enclosure_certificate(&dec.s[..count], &lips)?;
    // Σ (c/k²)² (√2 π k)² summed to infinity.
    let analytic = c * PI * PI / 3f64.sqrt();
    let lower = lower_bound_family(&op, &dec, space, count, Some(cert))?;

    let mut t = Table::new("lower_bound.csv", &["k", "s_k", "kr", "pairing", "lip_y"]);
    let mut margin = f64::INFINITY;
    let mut pairing_err = 0.0f64;
    for k in 0..count {
        let u = &lower.family.members[k];
        let value = kr_measure(&atomize_based(u)?, Engine::Interval)?.value;
        margin = margin.min(value - lower.claims[k]);
        pairing_err = pairing_err.max((lower.pairings[k] - lower.claims[k]).abs());
        t.push(vec![
            (k + 1).to_string(),
            num(lower.claims[k]),
            num(value),
            num(lower.pairings[k]),
            num(lips[k]),
        ]);
    }
    let a = vec![
        Assertion::le("s_numbers_max_abs_err", s_err, 1e-12),
        Assertion::le("enclosure_certificate", cert, 1.0),
        Assertion::le("enclosure_certificate_continuum", analytic, 1.0),
        Assertion::holds("lower_bound_verified", lower.verified),
        Assertion::ge("min_kr_minus_s_k", margin, 0.0),
        Assertion::le("pairing_max_abs_err", pairing_err, 1e-10),
    ];
    Ok((a, vec![t]))
}

struct BatteryCase {
    name: &'static str,
    gauge: &'static str,
    term: fn(f64) -> f64,
    converging: bool,
}

fn loglog_seq(k: f64) -> f64 {
    let l = k.max(3.0).ln();
    (-l / l.ln()).exp()
}

const BATTERY: &[BatteryCase] = &[
    BatteryCase {
        name: "k^-0.6",
        gauge: "power:2",
        term: |k| k.powf(-0.6),
        converging: true,
    },
    BatteryCase {
        name: "k^-0.5",
        gauge: "power:2",
        term: |k| k.powf(-0.5),
        converging: false,
    },
    BatteryCase {
        name: "k^-0.3",
        gauge: "power:2",
        term: |k| k.powf(-0.3),
        converging: false,
    },
    BatteryCase {
        name: "k^-0.4",
        gauge: "power:3",
        term: |k| k.powf(-0.4),
        converging: true,
    },
    BatteryCase {
        name: "k^-0.3",
        gauge: "power:3",
        term: |k| k.powf(-0.3),
        converging: false,
    },
    BatteryCase {
        name: "0.99^k",
        gauge: "power:2",
        term: |k| 0.99f64.powf(k),
        converging: true,
    },
    BatteryCase {
        name: "exp(-ln k/lnln k)",
        gauge: "loglog:3",
        term: loglog_seq,
        converging: true,
    },
    BatteryCase {
        name: "exp(-ln k/lnln k)",
        gauge: "loglog:0.5",
        term: loglog_seq,
        converging: false,
    },
    BatteryCase {
        name: "exp(-ln(k+1)^0.4)",
        gauge: "logalpha:2,1.5",
        term: |k| (-(k + 1.0).ln().powf(0.4)).exp(),
        converging: true,
    },
    BatteryCase {
        name: "exp(-ln(k+1)^0.4)",
        gauge: "logalpha:0.5,1.5",
        term: |k| (-(k + 1.0).ln().powf(0.4)).exp(),
        converging: false,
    },
    BatteryCase {
        name: "ln(k+2)^-2",
        gauge: "exp:2,0.5",
        term: |k| (k + 2.0).ln().powi(-2),
        converging: true,
    },
    BatteryCase {
        name: "ln(k+2)^-2",
        gauge: "exp:0.5,0.5",
        term: |k| (k + 2.0).ln().powi(-2),
        converging: false,
    },
];

fn orlicz_diagnostics(p: &Params) -> Result<Outcome> {
    let length: usize = p.get("length")?;
    let a_grid: Vec<f64> = p.list("a_grid")?;
    let mut a = Vec::new();
    let mut battery = Table::new(
        "battery.csv",
        &[
            "sequence",
            "gauge",
            "expected",
            "verdict",
            "tail_slope",
            "pass",
        ],
    );
    let mut correct = 0usize;
    for case in BATTERY {
        let c: Vec<f64> = (1..=length).map(|k| (case.term)(k as f64)).collect();
        let rep = summability_report(&c, &gauge(case.gauge), &a_grid)?;
        let expected = if case.converging {
            Verdict::Converging
        } else {
            Verdict::Diverging
        };
        let ok = rep.verdict == expected;
        correct += usize::from(ok);
        battery.push(vec![
            case.name.into(),
            case.gauge.into(),
            expected.to_string(),
            rep.verdict.to_string(),
            num(rep.tail_slope),
            ok.to_string(),
        ]);
    }
    a.push(Assertion::eq(
        "battery_correct",
        correct as f64,
        BATTERY.len() as f64,
        0.0,
    ));

    let checks = [
        ("power:2 at 1/2", gauge("power:2").eval(0.5), 0.25),
        (
            "exp:1,1 at 1/2",
            make_gauge("exp", &[1.0, 1.0])?.eval(0.5),
            (-2.0f64).exp(),
        ),
        ("power:2 delta2", gauge("power:2").delta2_constant(), 4.0),
        (
            "power:4 r-profile concave",
            f64::from(u8::from(gauge("power:4").r_profile_concave() == Some(true))),
            1.0,
        ),
    ];
    let mut gauges = Table::new("gauges.csv", &["check", "measured", "expected"]);
    for (name, measured, expected) in checks {
        a.push(Assertion::eq(name, measured, expected, 1e-12));
        gauges.push(vec![name.into(), num(measured), num(expected)]);
    }
    Ok((a, vec![battery, gauges]))
}

fn crosscheck(p: &Params, seed: u64) -> Result<Outcome> {
    let trials: usize = p.get("trials")?;
    let max_atoms: usize = p.get("max_atoms")?;
    if max_atoms < 2 {
        return invalid("max_atoms must be at least 2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(
        "crosscheck.csv",
        &[
            "trial",
            "space",
            "atoms",
            "closed_form",
            "bipartite",
            "abs_diff",
            "certified",
        ],
    );
    let mut worst = [0.0f64; 3];
    let mut bad = 0usize;
    for trial in 0..trials {
        let n = rng.gen_range(2..=max_atoms);
        let mut breaks: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
        breaks.push(0.0);
        breaks.push(1.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let spaces = [
            (
                "interval",
                Arc::new(MetricMeasureSpace::interval_partition(&breaks)?),
            ),
            (
                "circle",
                Arc::new(MetricMeasureSpace::circle(n, Metric::Arc)?),
            ),
            ("curve", parabola(n)?),
        ];
        for (slot, (label, space)) in spaces.into_iter().enumerate() {
            let values: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = GridFunction::new(space, values)?.centered();
            let mu = atomize(&u)?;
            let closed = kr_measure(&mu, Engine::Auto)?;
            debug_assert!(closed.engine != EngineTag::Bipartite);
            let exact = kr_measure(&mu, Engine::Bipartite)?;
            let ok = dual_check(&exact, &mu)?.certified();
            bad += usize::from(!ok);
            let diff = (closed.value - exact.value).abs();
            worst[slot] = worst[slot].max(diff);
            t.push(vec![
                trial.to_string(),
                label.into(),
                mu.space().len().to_string(),
                num(closed.value),
                num(exact.value),
                num(diff),
                ok.to_string(),
            ]);
        }
    }
    let a = vec![
        Assertion::le("interval_vs_bipartite_max_diff", worst[0], 1e-8),
        Assertion::le("circle_vs_bipartite_max_diff", worst[1], 1e-8),
        Assertion::le("curve_vs_bipartite_max_diff", worst[2], 1e-8),
        Assertion::le("uncertified_solves", bad as f64, 0.0),
    ];
    Ok((a, vec![t]))
}
