//! `maxwass`: distances, constructions and verification suites for optimal
//! transport under the max metric.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 precondition or square-domain violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use maxwass::geometry::DiagonalLine;
use maxwass::measure::GridMeasure;
use maxwass::verify::{reproduce_w2_table, run_suite, summary_table, suite_q_corners, CheckReport, SuiteConfig};
use maxwass::wgeom::{
    displacement_interpolation, grid_perturbation, project_measure, radon, symmetric_w1, symmetric_wp,
};
use maxwass::{DiscreteMeasure, Domain, Error, Exponent, Point2, Rational, Scalar};

#[derive(Parser, Debug)]
#[command(name = "maxwass", version, about = "Exact optimal transport under the max metric")]
struct Cli {
    #[command(flatten)]
    cfg: Config,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Transport exponent, at least 1.
    #[arg(long, global = true, default_value_t = 2.0)]
    p: f64,
    /// Ambient space.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Plane)]
    mode: Mode,
    /// Exact rational arithmetic (integer p only).
    #[arg(long, global = true)]
    exact: bool,
    /// Seed for the random suites; `MAXWASS_SEED` takes precedence.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Subdivisions of the converse search lattice.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    grid_resolution: u32,
    /// Output format; measures default to JSON, reports and distances to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Plane,
    Square,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug, Clone)]
struct Inputs {
    /// Measure JSON files.
    files: Vec<PathBuf>,
    /// Dirac mass at `x,y`; repeatable, placed after the files.
    #[arg(long = "dirac", value_name = "X,Y")]
    diracs: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wasserstein distance between two measures.
    Dist {
        #[command(flatten)]
        inputs: Inputs,
        /// Write the optimal plan as CSV.
        #[arg(long, value_name = "FILE")]
        plan: Option<PathBuf>,
    },
    /// Metric projection onto a diagonal line.
    Project {
        #[command(flatten)]
        inputs: Inputs,
        /// `+,a` for `x2 = x1 + a`, `-,a` for `x2 = -x1 + a`.
        #[arg(long, allow_hyphen_values = true)]
        line: String,
    },
    /// Projections onto both diagonals through the origin.
    Radon {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Contraction of a diagonal measure toward a corner.
    Interp {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        corner: String,
    },
    /// Measure symmetric to the first about the second.
    Symmetric {
        #[command(flatten)]
        inputs: Inputs,
        /// Diagonal line carrying the first measure (p = 1); inferred if omitted.
        #[arg(long, allow_hyphen_values = true)]
        line: Option<String>,
    },
    /// Perturbation triple of a family member against a grid measure.
    Perturb {
        #[command(flatten)]
        inputs: Inputs,
        /// Grid measure with the same Radon image.
        #[arg(long)]
        xi: PathBuf,
        #[arg(long)]
        a: String,
        /// Point on `L+` next to the perturbed atom.
        #[arg(long, allow_hyphen_values = true)]
        x_prime: String,
    },
    /// Run a verification suite.
    Verify { suite: String },
    /// Recompute the exact values quoted for the W2 table and the corners.
    ReproducePaper,
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn code_of(e: &Error) -> u8 {
    match e {
        Error::OutsideSquare(..)
        | Error::Precondition(_)
        | Error::NegativeSigma(_)
        | Error::MarginalMismatch(_)
        | Error::InstanceTooLarge { .. }
        | Error::RequiresExact(_) => 3,
        Error::NoConvergence(_) => 1,
        _ => 2,
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let code = err.chain().find_map(|c| c.downcast_ref::<Error>()).map_or(2, code_of);
        Failure { code, err }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: code_of(&e),
            err: e.into(),
        }
    }
}

type Out = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Out {
    let cfg = cli.cfg;
    match &cli.cmd {
        Command::Verify { suite } => return verify(&cfg, suite),
        Command::ReproducePaper => return reproduce(&cfg),
        _ => {}
    }
    let p = Exponent::new(cfg.p)?;
    if cfg.exact {
        if p.as_integer().is_none() {
            return Err(Error::ExactNeedsIntegerExponent(cfg.p).into());
        }
        dispatch::<Rational>(&cfg, p, &cli.cmd)
    } else {
        dispatch::<f64>(&cfg, p, &cli.cmd)
    }
}

fn seed(cfg: &Config) -> Result<u64, Failure> {
    match std::env::var("MAXWASS_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("MAXWASS_SEED must be an unsigned integer, got `{v}`").into()),
        Err(_) => Ok(cfg.seed),
    }
}

fn load<S: Scalar>(path: &Path) -> anyhow::Result<DiscreteMeasure<S>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DiscreteMeasure::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn measures<S: Scalar>(cfg: &Config, inputs: &Inputs, count: usize) -> Result<Vec<DiscreteMeasure<S>>, Failure> {
    let mut out = Vec::new();
    for f in &inputs.files {
        out.push(load(f)?);
    }
    for d in &inputs.diracs {
        out.push(DiscreteMeasure::dirac(Point2::parse_pair(d)?));
    }
    if out.len() != count {
        return Err(anyhow!("expected {count} measure(s), got {}", out.len()).into());
    }
    if cfg.mode == Mode::Square {
        for m in &out {
            for x in m.points() {
                x.check_domain(Domain::Square)?;
            }
        }
    }
    Ok(out)
}

fn domain(cfg: &Config) -> Domain {
    match cfg.mode {
        Mode::Plane => Domain::Plane,
        Mode::Square => Domain::Square,
    }
}

fn emit_measure<S: Scalar>(cfg: &Config, m: &DiscreteMeasure<S>) -> anyhow::Result<String> {
    Ok(match cfg.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&m.to_json())?),
        Format::Csv => {
            let mut s = String::from("x1,x2,weight\n");
            for a in m.atoms() {
                s.push_str(&format!("{},{},{}\n", a.point.x1.to_text(), a.point.x2.to_text(), a.weight.to_text()));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for a in m.atoms() {
                s.push_str(&format!("{:>12} {:>12}  {}\n", a.point.x1.to_text(), a.point.x2.to_text(), a.weight.to_text()));
            }
            s
        }
    })
}

fn emit_value(v: Value) -> anyhow::Result<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
}

fn dispatch<S: Scalar>(cfg: &Config, p: Exponent, cmd: &Command) -> Out {
    let text = match cmd {
        Command::Dist { inputs, plan } => {
            let ms = measures::<S>(cfg, inputs, 2)?;
            let t = maxwass::wasserstein(&ms[0], &ms[1], p)?;
            if let Some(path) = plan {
                fs::write(path, t.plan.to_csv(p)?).with_context(|| format!("writing {}", path.display()))?;
            }
            // exact mode reports d^p, which stays rational
            let shown = if S::EXACT { t.cost.to_text() } else { t.distance().to_string() };
            match cfg.format.unwrap_or(Format::Table) {
                Format::Json => emit_value(
                    json!({"p": p.value(), "exact": S::EXACT, "distance": t.distance(), "cost": t.cost.to_json()}),
                )?,
                Format::Csv => t.plan.to_csv(p)?,
                Format::Table => format!("{shown}\n"),
            }
        }
        Command::Project { inputs, line } => {
            let mu = &measures::<S>(cfg, inputs, 1)?[0];
            emit_measure(cfg, &project_measure(&DiagonalLine::parse(line)?, mu))?
        }
        Command::Radon { inputs } => {
            let mu = &measures::<S>(cfg, inputs, 1)?[0];
            let img = radon(mu);
            match cfg.format.unwrap_or(Format::Json) {
                Format::Json => emit_value(img.to_json())?,
                _ => format!("L+\n{}L-\n{}", emit_measure(cfg, &img.plus)?, emit_measure(cfg, &img.minus)?),
            }
        }
        Command::Interp { inputs, s, corner } => {
            let mu = &measures::<S>(cfg, inputs, 1)?[0];
            let out = displacement_interpolation(mu, &Point2::parse_pair(corner)?, &S::parse_scalar(s)?)?;
            emit_measure(cfg, &out)?
        }
        Command::Symmetric { inputs, line } => {
            let ms = measures::<S>(cfg, inputs, 2)?;
            let (mu, nu) = (&ms[0], &ms[1]);
            let eta = if p.is_one() {
                let line = match line {
                    Some(l) => DiagonalLine::parse(l)?,
                    None => infer_line(mu)?,
                };
                symmetric_w1(&line, mu, nu)?
            } else {
                if !mu.is_dirac() {
                    return Err(Error::Precondition("for p > 1 the first measure must be a Dirac mass".into()).into());
                }
                symmetric_wp(&mu.atoms()[0].point, nu, p, domain(cfg))?
            };
            emit_measure(cfg, &eta)?
        }
        Command::Perturb { inputs, xi, a, x_prime } => {
            let mu = measures::<S>(cfg, inputs, 1)?.remove(0);
            let xi = GridMeasure::locate(&mu, &load::<S>(xi)?)?;
            let triple = grid_perturbation(&mu, &xi, &S::parse_scalar(a)?, &Point2::parse_pair(x_prime)?)?;
            let costs = triple.costs(p)?;
            let mut v = triple.to_json();
            v["costs"] = json!(costs.costs.iter().map(Scalar::to_json).collect::<Vec<_>>());
            v["expected"] = costs.expected.to_json();
            v["holds"] = json!(costs.holds());
            emit_value(v)?
        }
        Command::Verify { .. } | Command::ReproducePaper => unreachable!("handled before dispatch"),
    };
    Ok((text, 0))
}

fn infer_line<S: Scalar>(mu: &DiscreteMeasure<S>) -> Result<DiagonalLine<S>, Failure> {
    let first = &mu.atoms()[0].point;
    [maxwass::Slope::Plus, maxwass::Slope::Minus]
        .into_iter()
        .map(|e| DiagonalLine::through(e, first))
        .find(|l| mu.supported_on(l))
        .ok_or_else(|| Error::Precondition("first measure is not supported on a diagonal line".into()).into())
}

fn report_output(cfg: &Config, reports: &[CheckReport]) -> anyhow::Result<(String, u8)> {
    let ok = reports.iter().all(CheckReport::passed);
    let text = match cfg.format.unwrap_or(Format::Table) {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&reports.iter().map(CheckReport::to_json).collect::<Vec<_>>())?
        ),
        Format::Csv => {
            let mut s = String::from("status,name,instances,failures,max_residual\n");
            for r in reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                s.push_str(&format!("{status},{},{},{},{}\n", r.name, r.instances, r.failures.len(), r.max_residual));
            }
            s
        }
        Format::Table => summary_table(reports),
    };
    Ok((text, if ok { 0 } else { 1 }))
}

fn verify(cfg: &Config, suite: &str) -> Out {
    let sc = SuiteConfig {
        seed: seed(cfg)?,
        grid_resolution: cfg.grid_resolution,
    };
    let reports = run_suite(suite, &sc)?;
    Ok(report_output(cfg, &reports)?)
}

fn reproduce(cfg: &Config) -> Out {
    let sc = SuiteConfig {
        seed: seed(cfg)?,
        grid_resolution: cfg.grid_resolution,
    };
    let mut reports = vec![reproduce_w2_table()?];
    reports.extend(suite_q_corners(&sc)?);
    Ok(report_output(cfg, &reports)?)
}
