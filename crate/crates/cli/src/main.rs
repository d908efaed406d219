//! `tpkit`: generate triangles, check total positivity theorems, and export
//! planar networks.
//!
//! Exit codes: 0 verified, 1 counterexample or verification mismatch,
//! 2 usage error (including unknown triangles), 3 theorem hypothesis not met.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use tpkit::catalog::{self, format_rows};
use tpkit::exact::{format_scalar, int, is_real_rooted, parse_scalar};
use tpkit::network::{self, export_dot, path_matrix, PlanarNetwork};
use tpkit::nrec::{verify_prop52, NRecSpec, PRESETS};
use tpkit::production::{left_production, verify_thm_main, verify_thm_main_given, verify_thm_t, Status};
use tpkit::riordan::{ExponentialRiordan, OrdinaryRiordan};
use tpkit::trimat::{
    is_tp_to_order, leading_principal, reversal, toeplitz, FiniteMatrix, RowSequence, TpVerdict,
};
use tpkit::{Error, Poly, PowerSeries, Scalar};

#[derive(Parser)]
#[command(
    name = "tpkit",
    version,
    about = "Exact total-positivity toolkit for combinatorial triangles"
)]
struct Cli {
    /// Truncation order for power series.
    #[arg(long, global = true, env = "TPKIT_ORDER", default_value_t = 16)]
    truncation: usize,
    /// Largest minor size swept in TP checks (default: full size).
    #[arg(long, global = true)]
    minor_cap: Option<usize>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print rows 0..rows-1 of a named triangle.
    Gen {
        triangle: String,
        #[arg(long)]
        rows: usize,
        /// Whitney parameter m (with triangle `whitney`).
        #[arg(long)]
        m: Option<i64>,
        /// Whitney parameter r (with triangle `whitney`).
        #[arg(long)]
        r: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify a property or theorem instance; prints a JSON report.
    Check {
        triangle: String,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Random specs for `random --what prop52`.
        #[arg(long, default_value_t = 25)]
        trials: usize,
    },
    /// Build the composite network of a triangle and emit one of its views.
    Network {
        triangle: String,
        #[arg(long, value_enum)]
        view: View,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, value_enum, default_value_t = Emit::Dot)]
        emit: Emit,
        /// Recompute the path matrix and compare with the algebraic route.
        #[arg(long)]
        verify: bool,
        /// Accept negative weights when Q is not totally positive.
        #[arg(long)]
        allow_negative: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the rows of R[g, f] for named or listed series.
    Riordan {
        /// Series name (exp, expm1, geom, lah_f, log1p, t, one) or comma list.
        #[arg(long)]
        g: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        rows: usize,
        #[arg(long, value_enum, default_value_t = Kind::Exponential)]
        kind: Kind,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare a triangle against its bundled fixture.
    Crosscheck {
        triangle: String,
        #[arg(long, default_value_t = 9)]
        rows: usize,
    },
    /// List registered triangles.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum What {
    Tp,
    ReversalTp,
    Roots,
    ThmMain,
    ThmT,
    Prop52,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum View {
    #[value(name = "A", alias = "a")]
    A,
    Reversal,
    Toeplitz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Exponential,
    Ordinary,
}

/// Terminal failure, carrying its exit code.
enum Failure {
    Usage(String),
    Hypothesis(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = Result<Status, Failure>;

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Verified => 0,
        Status::Counterexample => 1,
        Status::HypothesisFailed => 3,
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn rows_json(rows: &[Vec<Scalar>]) -> Value {
    json!(rows
        .iter()
        .map(|r| r.iter().map(format_scalar).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn render_rows(name: &str, rows: &[Vec<Scalar>], format: Format, extra: Value) -> String {
    match format {
        Format::Text => format_rows(rows),
        Format::Csv => FiniteMatrix::from_lower_rows(rows).to_csv(),
        Format::Json => {
            let mut doc = json!({ "triangle": name, "rows": rows_json(rows) });
            if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
                d.extend(e);
            }
            pretty(&doc)
        }
    }
}

fn gen(
    triangle: &str,
    rows: usize,
    m: Option<i64>,
    r: Option<i64>,
    format: Format,
    output: Option<&PathBuf>,
) -> Run {
    let name = match (triangle, m, r) {
        ("whitney", Some(m), Some(r)) => format!("whitney({m},{r})"),
        ("whitney", _, _) => return Err(Failure::Usage("`gen whitney` needs --m and --r".into())),
        (other, None, None) => other.to_string(),
        _ => return Err(Failure::Usage("--m and --r apply only to `whitney`".into())),
    };
    let t = catalog::get_triangle_rows(&name, rows)?;
    let data = t.rows(rows)?;
    emit(&render_rows(t.name(), &data, format, json!({})), output)?;
    Ok(Status::Verified)
}

fn verdict_status(v: &TpVerdict) -> Status {
    if v.is_tp() {
        Status::Verified
    } else {
        Status::Counterexample
    }
}

fn random_spec(rng: &mut ChaCha8Rng, len: usize) -> NRecSpec {
    let mut seq = |n: usize| (0..n).map(|_| int(rng.gen_range(0..=5))).collect::<Vec<_>>();
    let a = seq(len);
    let b = seq(len);
    let c = seq(len);
    NRecSpec { a, b, c: Some(c) }
}

fn check_prop52(triangle: &str, order: usize, trials: usize, seed: u64) -> Result<(Status, Value), Failure> {
    let specs: Vec<(String, NRecSpec)> = if triangle == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials)
            .map(|i| (format!("random#{i}"), random_spec(&mut rng, order + 1)))
            .collect()
    } else if PRESETS.contains(&triangle) {
        vec![(triangle.to_string(), NRecSpec::preset(triangle, order + 1)?)]
    } else {
        return Err(Failure::Usage(format!(
            "prop52 needs an n-recursive preset ({}) or `random`",
            PRESETS.join(", ")
        )));
    };
    let mut reports = Vec::new();
    let mut all_pass = true;
    for (label, spec) in &specs {
        let report = verify_prop52(spec, order)?;
        all_pass &= report.pass();
        reports.push(json!({ "spec": label, "pass": report.pass(), "report": report }));
    }
    let status = if all_pass {
        Status::Verified
    } else {
        Status::Counterexample
    };
    Ok((
        status,
        json!({ "seed": (triangle == "random").then_some(seed), "cases": reports }),
    ))
}

fn check(triangle: &str, what: What, order: usize, trials: usize, cli: &Cli) -> Run {
    let cap = cli.minor_cap.unwrap_or(order + 1);
    let (status, report) = if what == What::Prop52 {
        check_prop52(triangle, order, trials, cli.seed)?
    } else {
        let a = catalog::get_triangle_rows(triangle, order + 1)?;
        match what {
            What::Tp | What::ReversalTp => {
                let target = if what == What::Tp { a } else { reversal(&a) };
                let v = is_tp_to_order(&leading_principal(&target, order)?, cap);
                (
                    verdict_status(&v),
                    json!({ "minor_cap": cap.min(order + 1), "verdict": v }),
                )
            }
            What::Roots => {
                let rows = a.rows(order + 1)?;
                let failing: Vec<usize> = (0..rows.len())
                    .filter(|&n| !is_real_rooted(&Poly::new(rows[n].clone())))
                    .collect();
                let status = if failing.is_empty() {
                    Status::Verified
                } else {
                    Status::Counterexample
                };
                (
                    status,
                    json!({ "rows_checked": rows.len(), "not_real_rooted": failing }),
                )
            }
            What::ThmMain => {
                let report = match catalog::production_for(triangle, order)? {
                    Some(q) => verify_thm_main_given(&q, &a, order, cap),
                    None => verify_thm_main(&a, order, cap),
                };
                match report {
                    Ok(r) => (r.status(), serde_json::to_value(&r).expect("report serializes")),
                    Err(e @ Error::SingularDiagonal(_)) => {
                        (Status::HypothesisFailed, json!({ "reason": e.to_string() }))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            What::ThmT => match verify_thm_t(&a, order, order) {
                Ok(r) => (r.status(), serde_json::to_value(&r).expect("report serializes")),
                Err(e @ Error::SingularDiagonal(_)) => {
                    (Status::HypothesisFailed, json!({ "reason": e.to_string() }))
                }
                Err(e) => return Err(e.into()),
            },
            What::Prop52 => unreachable!("handled above"),
        }
    };
    let what_name = what
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let doc = json!({
        "triangle": triangle,
        "what": what_name,
        "order": order,
        "status": status,
        "report": report,
    });
    print!("{}", pretty(&doc));
    if status == Status::HypothesisFailed {
        eprintln!("hypothesis not satisfied; conclusions reported above");
    }
    Ok(status)
}

#[allow(clippy::too_many_arguments)]
fn network_cmd(
    triangle: &str,
    view: View,
    m: Option<usize>,
    n: Option<usize>,
    r: Option<usize>,
    emit_as: Emit,
    verify: bool,
    allow_negative: bool,
    output: Option<&PathBuf>,
) -> Run {
    let m = match (view, m, n, r) {
        (View::Toeplitz, _, Some(n), Some(r)) => n + r,
        (View::Toeplitz, ..) => return Err(Failure::Usage("the toeplitz view needs --n and --r".into())),
        (_, Some(m), ..) => m,
        _ => return Err(Failure::Usage("this view needs --m".into())),
    };
    let a = catalog::get_triangle_rows(triangle, m + 1)?;
    let q = match catalog::production_for(triangle, m)? {
        Some(q) => q,
        None => left_production(&a, m).map_err(|e| match e {
            Error::SingularDiagonal(_) => Failure::Hypothesis(e.to_string()),
            other => other.into(),
        })?,
    };
    let composite = network::composite_from_block(&q, m, allow_negative).map_err(|e| match e {
        Error::NotRealizable(why) if allow_negative => Failure::Hypothesis(format!(
            "Q has no bidiagonal factorization without pivoting ({why})"
        )),
        Error::NotRealizable(why) => Failure::Hypothesis(format!(
            "Q is not totally positive ({why}); rerun with --allow-negative"
        )),
        other => other.into(),
    })?;
    let (net, expected): (PlanarNetwork, FiniteMatrix) = match view {
        View::A => (composite, leading_principal(&a, m)?),
        View::Reversal => (
            network::reversal_view(&composite, m)?,
            leading_principal(&reversal(&a), m)?,
        ),
        View::Toeplitz => {
            let (n, r) = (n.unwrap_or(0), r.unwrap_or(0));
            let row = RowSequence::new(a.row(n)?);
            (
                network::toeplitz_view(&composite, n, r)?,
                toeplitz(&row, r).transpose(),
            )
        }
    };
    let text = match emit_as {
        Emit::Dot => export_dot(&net),
        Emit::Json => pretty(&serde_json::to_value(&net).expect("network serializes")),
    };
    emit(&text, output)?;
    if verify {
        let found = path_matrix(&net)?;
        if found != expected {
            return Err(Failure::Mismatch(format!(
                "path matrix differs from the algebraic route\nexpected:\n{}found:\n{}",
                expected.to_csv(),
                found.to_csv()
            )));
        }
        eprintln!(
            "verified: path matrix matches ({}x{})",
            found.rows(),
            found.cols()
        );
    }
    Ok(Status::Verified)
}

fn parse_series(text: &str, order: usize) -> Result<PowerSeries, Failure> {
    if let Ok(s) = PowerSeries::named(text, order) {
        return Ok(s);
    }
    let coeffs = text
        .split(',')
        .map(|c| parse_scalar(c.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            Failure::Usage(format!(
                "`{text}` is neither a series name nor a coefficient list"
            ))
        })?;
    Ok(PowerSeries::new(coeffs, order))
}

fn riordan_cmd(g: &str, f: &str, rows: usize, kind: Kind, format: Format, order: usize) -> Run {
    let (g, f) = (parse_series(g, order)?, parse_series(f, order)?);
    let (label, m) = match kind {
        Kind::Exponential => (
            "exponential_riordan",
            ExponentialRiordan::new(g, f)?.to_finite(rows)?,
        ),
        Kind::Ordinary => ("ordinary_riordan", OrdinaryRiordan::new(g, f)?.to_finite(rows)?),
    };
    let data = m.lower_rows();
    emit(
        &render_rows(label, &data, format, json!({ "order": order })),
        None,
    )?;
    Ok(Status::Verified)
}

fn crosscheck_cmd(triangle: &str, rows: usize) -> Run {
    let report = catalog::crosscheck(triangle, rows)?;
    print!(
        "{}",
        pretty(&serde_json::to_value(&report).expect("report serializes"))
    );
    Ok(if report.pass {
        Status::Verified
    } else {
        Status::Counterexample
    })
}

fn list() -> Run {
    let mut names: Vec<String> = catalog::NAMES
        .iter()
        .filter(|n| **n != "whitney")
        .map(|n| n.to_string())
        .collect();
    names.extend(["whitney(m,r)".to_string(), "bell_iteration(x)".to_string()]);
    let entries: Vec<Value> = names
        .iter()
        .map(|n| match catalog::entry(n) {
            Ok(e) => {
                json!({ "name": e.name, "route": e.route, "index_shift": e.index_shift, "notes": e.notes })
            }
            Err(_) => json!({ "name": n }),
        })
        .collect();
    print!("{}", pretty(&json!(entries)));
    Ok(Status::Verified)
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Gen {
            triangle,
            rows,
            m,
            r,
            format,
            output,
        } => gen(triangle, *rows, *m, *r, *format, output.as_ref()),
        Command::Check {
            triangle,
            what,
            order,
            trials,
        } => check(triangle, *what, *order, *trials, cli),
        Command::Network {
            triangle,
            view,
            m,
            n,
            r,
            emit,
            verify,
            allow_negative,
            output,
        } => network_cmd(
            triangle,
            *view,
            *m,
            *n,
            *r,
            *emit,
            *verify,
            *allow_negative,
            output.as_ref(),
        ),
        Command::Riordan {
            g,
            f,
            rows,
            kind,
            format,
        } => riordan_cmd(g, f, *rows, *kind, *format, cli.truncation),
        Command::Crosscheck { triangle, rows } => crosscheck_cmd(triangle, *rows),
        Command::List => list(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(exit_code(status)),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Hypothesis(msg)) => {
            eprintln!("hypothesis not satisfied: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
