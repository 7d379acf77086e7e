//! Acceptance criteria, one line each on stderr. Every criterion is a set
//! of experiment assertions plus, where pinned, a wall-clock limit.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use krnorm::harness::{run_experiment, ExperimentSpec, Summary};

struct Run {
    summary: Summary,
    seconds: f64,
}

fn run(name: &str, params: &[(&str, &str)]) -> Run {
    let mut spec = ExperimentSpec::new(name).seed(2024);
    for (k, v) in params {
        spec = spec.param(k, v);
    }
    let start = Instant::now();
    let out = run_experiment(&spec).unwrap_or_else(|e| panic!("{name}: {e}"));
    Run {
        summary: out.summary,
        seconds: start.elapsed().as_secs_f64(),
    }
}

struct Criterion {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

/// Passes when every named assertion passes and the run fits in `limit`
/// seconds.
fn check(
    id: usize,
    title: &'static str,
    parts: &[(&Run, &[&str])],
    limit: Option<f64>,
) -> Criterion {
    let mut pass = true;
    let mut detail = Vec::new();
    for (run, names) in parts {
        for name in *names {
            match run.summary.get(name) {
                Some(a) => {
                    pass &= a.pass;
                    detail.push(format!(
                        "{name}={}{}",
                        a.measured,
                        if a.pass { "" } else { " (fail)" }
                    ));
                }
                None => {
                    pass = false;
                    detail.push(format!("{name}=missing"));
                }
            }
        }
    }
    if let Some(limit) = limit {
        let t: f64 = parts.iter().map(|(r, _)| r.seconds).sum();
        let ok = t < limit;
        pass &= ok;
        detail.push(format!(
            "time={t:.1}s<{limit}s{}",
            if ok { "" } else { " (fail)" }
        ));
    }
    Criterion {
        id,
        title,
        pass,
        detail: detail.join(" "),
    }
}

#[test]
fn acceptance() {
    let cross = run("crosscheck", &[("trials", "100")]);
    let sine1 = run("sine-1d", &[("nmax", "400"), ("grid", "8192")]);
    let sine2 = run("sine-nd", &[("d", "2"), ("imax", "6"), ("grid", "64")]);
    let lemma2 = run("lemma2", &[("count", "12")]);
    let lemma3 = run("lemma3-product", &[("eps", "1,0.5"), ("resolution", "64")]);
    let dil = run(
        "dilation",
        &[("resolution", "1024"), ("factors", "1,2,4,8")],
    );
    let volt = run(
        "volterra-spectrum",
        &[("sizes", "250,500,1000"), ("kmax", "4")],
    );
    let mult = run(
        "multiplier-spectrum",
        &[("dims", "1,2,3"), ("count", "100000")],
    );
    let unc = run("uncertainty", &[]);
    let curve = run("curve", &[("count", "40"), ("tests", "10")]);
    let schmidt = run("schmidt-lower", &[("c", "0.17"), ("count", "20")]);
    let orlicz = run("orlicz-diagnostics", &[]);

    let criteria = vec![
        check(
            1,
            "interval engine matches exact transport on 100 random 1D functions",
            &[(&cross, &["interval_vs_bipartite_max_diff"])],
            Some(30.0),
        ),
        check(
            2,
            "every exact transport solve is dual-certified",
            &[
                (&cross, &["uncertified_solves"]),
                (&sine2, &["uncertified_solves"]),
                (&lemma3, &["uncertified_solves"]),
                (&curve, &["uncertified_solves"]),
            ],
            None,
        ),
        check(
            3,
            "1D sines: closed form and l2 sum of KR norms",
            &[(&sine1, &["kr_closed_form_max_rel_err", "kr_l2_sum"])],
            Some(60.0),
        ),
        check(
            4,
            "2D sines: decay slope and l2 / l2.5 verdicts",
            &[(
                &sine2,
                &[
                    "kr_decay_slope",
                    "l2_verdict_diverging",
                    "l2.5_verdict_converging",
                ],
            )],
            Some(600.0),
        ),
        check(
            5,
            "indicator pairs: exact Gram and KR lower bound",
            &[(&lemma2, &["gram_deviation", "kr_over_lower_bound_min"])],
            None,
        ),
        check(
            6,
            "weighted product of circles: KR ratio and chordal circle bracket",
            &[(
                &lemma3,
                &[
                    "kr_ratio_1_2",
                    "chordal_circle_kr_lower",
                    "chordal_circle_kr_upper",
                ],
            )],
            None,
        ),
        check(
            7,
            "dilation divides the arc KR norm by n",
            &[(&dil, &["dilation_max_rel_err"])],
            None,
        ),
        check(
            8,
            "integration operator: s-number errors and first-order convergence",
            &[(
                &volt,
                &[
                    "max_rel_err_k_le_4_at_1000",
                    "error_ratio_250_500",
                    "error_ratio_500_1000",
                ],
            )],
            Some(120.0),
        ),
        check(
            9,
            "Fourier multiplier: Schatten threshold near d",
            &[(&mult, &["p_estimate_d1", "p_estimate_d2", "p_estimate_d3"])],
            None,
        ),
        check(
            10,
            "uncertainty inequality on at least 60 functions",
            &[
                (&unc, &["functions_checked", "min_kr_lip_minus_l2_sq"]),
                (&sine1, &["uncertainty_violations"]),
                (&sine2, &["uncertainty_violations"]),
                (&lemma2, &["uncertainty_violations"]),
                (&lemma3, &["uncertainty_violations"]),
            ],
            None,
        ),
        check(
            11,
            "parabola: closed form against exact transport and the sum bound",
            &[(
                &curve,
                &["curve_vs_bipartite_max_rel_diff", "kr_sq_sum_over_b2c2"],
            )],
            None,
        ),
        check(
            12,
            "sine-diagonal operator: certificate, lower bounds and pairings",
            &[(
                &schmidt,
                &[
                    "enclosure_certificate",
                    "min_kr_minus_s_k",
                    "pairing_max_abs_err",
                ],
            )],
            None,
        ),
        check(
            13,
            "Orlicz battery classified",
            &[(&orlicz, &["battery_correct"])],
            None,
        ),
    ];

    let mut err = std::io::stderr().lock();
    let mut failed = BTreeMap::new();
    for c in &criteria {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        writeln!(err, "criterion {:02} {tag} {}: {}", c.id, c.title, c.detail).unwrap();
        if !c.pass {
            failed.insert(c.id, c.title);
        }
    }
    let passed = criteria.len() - failed.len();
    writeln!(err, "acceptance: {passed}/{} criteria pass", criteria.len()).unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
