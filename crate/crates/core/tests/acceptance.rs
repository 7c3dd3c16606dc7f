//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use maxwass::verify::*;

struct Outcome {
    ok: bool,
    detail: String,
}

fn find<'a>(reports: &'a [CheckReport], name: &str) -> &'a CheckReport {
    reports
        .iter()
        .find(|r| r.name == name)
        .unwrap_or_else(|| panic!("missing report {name}"))
}

/// All named reports pass with at least `min` instances each.
fn require(reports: &[CheckReport], wanted: &[(&str, usize)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, min) in wanted {
        let r = find(reports, name);
        let good = r.passed() && r.instances >= *min && r.max_residual == 0.0;
        ok &= good;
        parts.push(format!("{name}: {} instances, {} failures", r.instances, r.failures.len()));
        if !r.passed() {
            eprintln!("{}", serde_json::to_string_pretty(&r.to_json()).unwrap());
        }
    }
    Outcome {
        ok,
        detail: parts.join("; "),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail.push_str(&format!("; {:.2}s", took.as_secs_f64()));
    if let Some(limit) = limit {
        if took >= limit {
            out.ok = false;
            out.detail.push_str(&format!(" exceeds {:.0}s", limit.as_secs_f64()));
        }
    }
    out
}

fn suite(name: &str) -> Vec<CheckReport> {
    run_suite(name, &SuiteConfig::default()).expect("suite runs")
}

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            "W2 table values and t-sweep roots",
            Box::new(|| {
                timed(Some(Duration::from_secs(1)), || {
                    let r = reproduce_w2_table().expect("table runs");
                    Outcome {
                        // the sweep residual is a float root distance, bounded separately
                        ok: r.passed() && r.max_residual < 1e-9,
                        detail: format!("{} checks, root residual {:.1e}", r.instances, r.max_residual),
                    }
                })
            }),
        ),
        (
            "simplex agrees with vertex enumeration",
            Box::new(|| timed(Some(Duration::from_secs(30)), || require(&suite("oracle-agreement"), &[("oracle-agreement", 200)]))),
        ),
        (
            "measure projection optimality",
            Box::new(|| timed(None, || require(&suite("projection"), &[("projection", 100)]))),
        ),
        (
            "distance along the direction allocation",
            Box::new(|| timed(None, || require(&suite("crucial-identity"), &[("crucial-identity", 1000)]))),
        ),
        (
            "symmetric-measure chains and converse forcing",
            Box::new(|| {
                timed(None, || {
                    let mut reports = suite("diag-char");
                    reports.extend(suite("same-diag"));
                    reports.extend(suite("dirac-char"));
                    require(
                        &reports,
                        &[
                            ("diag-char forward", 100),
                            ("diag-char converse", 20),
                            ("same-diag forward", 100),
                            ("same-diag converse", 20),
                            ("dirac-char forward p=2", 100),
                            ("dirac-char converse p=2", 20),
                            ("dirac-char forward p=3", 100),
                            ("dirac-char converse p=3", 20),
                        ],
                    )
                })
            }),
        ),
        (
            "grid perturbation costs and uniqueness",
            Box::new(|| timed(None, || require(&suite("perturbation"), &[("perturbation", 20)]))),
        ),
        (
            "Radon round-trip on the family",
            Box::new(|| timed(None, || require(&suite("radon-roundtrip"), &[("radon-roundtrip", 100)]))),
        ),
        (
            "square: sides, diagonal saturation, corner functional",
            Box::new(|| {
                timed(None, || {
                    let mut reports = suite("q-sides");
                    reports.extend(suite("q-saturation"));
                    reports.extend(suite("q-functional"));
                    let mut out = require(
                        &reports,
                        &[
                            ("q-sides opposite", 50),
                            ("q-sides interior", 50),
                            ("q-saturation", 50),
                            // 50 perturbed measures plus two fixed ones per reference measure
                            ("q-functional p=2", 60),
                            ("q-functional p=3", 60),
                        ],
                    );
                    for p in [2, 3] {
                        let lemma = find(&reports, &format!("scalar-lemma p={p}"));
                        out.ok &= lemma.passed();
                    }
                    out
                })
            }),
        ),
        (
            "unique geodesics from a Dirac",
            Box::new(|| timed(None, || require(&suite("unique-geodesic"), &[("unique-geodesic", 100)]))),
        ),
    ];

    let mut all = true;
    for (k, (title, run)) in criteria.into_iter().enumerate() {
        let out = run();
        all &= out.ok;
        println!("{} criterion {}: {title} ({})", if out.ok { "PASS" } else { "FAIL" }, k + 1, out.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
