//! Property checkers that certify the characterizations and numeric values
//! of the max-metric Wasserstein geometry on desk-scale discrete instances.
//!
//! Every check runs in exact rational arithmetic, so equality assertions have
//! residual zero. Converse directions ("no symmetric measure exists") are
//! certified on a declared finite search grid and each report names it.

mod checks;
mod sample;
mod suites;

pub use checks::*;
pub use sample::Sampler;
pub use suites::*;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Outcome of one statement checked over many instances.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    pub failures: Vec<Value>,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            instances: 0,
            failures: Vec::new(),
            max_residual: 0.0,
            grid: None,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn with_grid(mut self, grid: impl Into<String>) -> Self {
        self.grid = Some(grid.into());
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
    }

    /// Asserts `cond`; on failure stores the payload.
    pub fn expect(&mut self, cond: bool, payload: impl FnOnce() -> Value) -> bool {
        if !cond {
            self.failures.push(payload());
        }
        cond
    }

    /// Asserts `lhs == rhs` exactly and tracks the residual.
    pub fn expect_eq(&mut self, lhs: &Rational, rhs: &Rational, payload: impl FnOnce() -> Value) -> bool {
        let r = lhs.residual(rhs);
        self.max_residual = self.max_residual.max(r);
        self.expect(lhs == rhs, || {
            let mut v = payload();
            if let Value::Object(m) = &mut v {
                m.insert("lhs".into(), lhs.to_json());
                m.insert("rhs".into(), rhs.to_json());
            }
            v
        })
    }

    /// Folds another report for the same statement into this one.
    pub fn absorb(&mut self, other: CheckReport) {
        self.instances += other.instances;
        self.failures.extend(other.failures);
        self.max_residual = self.max_residual.max(other.max_residual);
        if self.grid.is_none() {
            self.grid = other.grid;
        }
        for n in other.notes {
            self.note(n);
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Knobs shared by every suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Subdivisions per unit step of the converse search lattice.
    pub grid_resolution: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            grid_resolution: 2,
        }
    }
}

/// Suite names accepted by [`run_suite`], in execution order of `all`.
pub const SUITES: &[&str] = &[
    "w2-table",
    "oracle-agreement",
    "projection",
    "crucial-identity",
    "diag-char",
    "same-diag",
    "dirac-char",
    "perturbation",
    "radon-roundtrip",
    "q-sides",
    "q-saturation",
    "q-functional",
    "q-corners",
    "unique-geodesic",
];

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    match name {
        "w2-table" => Ok(vec![reproduce_w2_table()?]),
        "oracle-agreement" => suite_oracle_agreement(cfg, 200),
        "projection" => suite_projection(cfg, 100),
        "crucial-identity" => suite_crucial_identity(cfg, 1000),
        "diag-char" => suite_diag_char(cfg, 100, 20),
        "same-diag" => suite_same_diag(cfg, 50, 20),
        "dirac-char" => suite_dirac_char(cfg, 100, 20),
        "perturbation" => suite_perturbation(cfg, 20),
        "radon-roundtrip" => suite_radon(cfg, 100),
        "q-sides" => suite_q_sides(cfg, 50),
        "q-saturation" => suite_q_saturation(cfg, 50),
        "q-functional" => suite_q_functional(cfg, 50),
        "q-corners" => suite_q_corners(cfg),
        "unique-geodesic" => suite_unique_geodesic(cfg, 100),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// One `PASS`/`FAIL` line per report.
pub fn summary_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<6} {:<width$} {:>9} {:>8} {:>12}\n",
        "status", "name", "instances", "failures", "max_residual"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<6} {:<width$} {:>9} {:>8} {:>12.3e}\n",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.instances,
            r.failures.len(),
            r.max_residual
        ));
        if let Some(g) = &r.grid {
            out.push_str(&format!("       grid: {g}\n"));
        }
        for n in &r.notes {
            out.push_str(&format!("       note: {n}\n"));
        }
    }
    out
}

/// Maps `f` over `items` on scoped worker threads; output keeps input order.
pub(crate) fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    if workers <= 1 || items.len() < 2 {
        return items.into_iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let mut buckets: Vec<Vec<T>> = Vec::new();
    let mut iter = items.into_iter().peekable();
    while iter.peek().is_some() {
        buckets.push(iter.by_ref().take(chunk).collect());
    }
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = buckets
            .into_iter()
            .map(|b| s.spawn(move || b.into_iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use serde_json::json;

    #[test]
    fn report_tracks_failures_and_residuals() {
        let mut r = CheckReport::new("demo");
        r.instances = 2;
        assert!(r.expect_eq(&q(1, 2), &q(1, 2), || json!({})));
        assert!(r.passed());
        assert!(!r.expect_eq(&q(1, 2), &q(1, 4), || json!({"case": 1})));
        assert!(!r.passed());
        assert_eq!(r.max_residual, 0.25);
        assert_eq!(r.failures[0]["lhs"], json!("1/2"));
        let v = r.to_json();
        assert_eq!(v["instances"], json!(2));
        assert!(summary_table(&[r]).contains("FAIL   demo"));
    }

    #[test]
    fn par_map_keeps_order() {
        let out = par_map((0..100).collect(), |x: i32| x * 2);
        assert_eq!(out, (0..100).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(
            run_suite("bogus", &SuiteConfig::default()),
            Err(Error::UnknownSuite(_))
        ));
    }
}
