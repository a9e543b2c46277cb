use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use kwise_entropy::ball_spectra::{
    lambda_ball_with, spectra_sweep, BallSolver, SolveOptions, SolverRegistry, SpectraRow,
};
use kwise_entropy::constructions::{ConstructParams, ConstructionRegistry};
use kwise_entropy::entropy_bounds::{
    bound_row, evaluate_with, BoundReport, BoundRow, EvaluateOptions,
};
use kwise_entropy::gf2_codes::{BinaryMatrix, SampleSpace};
use kwise_entropy::kwise::{Distribution, HalfReading};
use kwise_entropy::smoothing::{theorem1_chain, theorem2_chain, ChainReport, InequalityLine};
use kwise_entropy::Error;

use crate::output;
use crate::{
    AnalyzeArgs, BoundArgs, ChainArgs, Cli, Command, ConstructArgs, Format, Reading, SpectraArgs,
    SweepKind, EXIT_FAIL, EXIT_USAGE,
};

/// A command-line mistake caught before any computation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

/// Exit status for an error: unmet preconditions and internal failures
/// count as failed verification, everything else as usage.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Precondition { .. } | Error::Internal(_)) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

impl From<Reading> for HalfReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Floor => HalfReading::Floor,
            Reading::Ceil => HalfReading::Ceil,
        }
    }
}

struct Env<'a> {
    format: Format,
    solver: &'a dyn BallSolver,
    opts: SolveOptions,
}

/// Runs the selected command. `Ok(false)` means a verification failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let registry = SolverRegistry::default();
    let solver = registry.get(&cli.solver)?;
    let opts = match cli.tol {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            return Err(usage(format!("--tol must be positive, got {t}")))
        }
        Some(t) => SolveOptions::with_tol(t),
        None => SolveOptions::default(),
    };
    let env = Env {
        format: cli.format,
        solver,
        opts,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Construct(a) => construct(a, &mut out),
        Command::Analyze(a) => analyze(a, &env, &mut out),
        Command::Bound(a) => bound(a, &env, &mut out),
        Command::Spectra(a) => spectra(a, &env, &mut out),
        Command::Chain(a) => chain(a, &env, &mut out),
        Command::Sweep(a) => sweep(&a.kind, &env, &mut out),
    }
}

fn read_space(path: &Path) -> Result<Distribution> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let space: SampleSpace = text
        .parse()
        .with_context(|| format!("in {}", path.display()))?;
    Ok(Distribution::from_space(space)?)
}

fn construct(a: &ConstructArgs, out: &mut dyn Write) -> Result<bool> {
    let registry = ConstructionRegistry::default();
    let c = registry.get(&a.name)?;
    let matrix = match &a.input {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(
                text.parse::<BinaryMatrix>()
                    .with_context(|| format!("in {}", p.display()))?,
            )
        }
        None => None,
    };
    let params = ConstructParams {
        m: a.m,
        n: a.n,
        matrix,
    };
    let space = c.build(&params).map_err(|e| match e {
        Error::Domain(msg) => usage(msg),
        other => other.into(),
    })?;
    let summary = format!("n={} support={}", space.n(), space.support_size());
    match &a.output {
        Some(p) => {
            fs::write(p, space.to_text()).with_context(|| format!("writing {}", p.display()))?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(space.to_text().as_bytes())?;
            eprintln!("{summary}");
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct Analysis {
    #[serde(flatten)]
    report: BoundReport,
    /// Brute-force marginal order; `None` when over the enumeration guard.
    marginal_order: Option<u32>,
}

fn analyze(a: &AnalyzeArgs, env: &Env<'_>, out: &mut dyn Write) -> Result<bool> {
    let dist = read_space(&a.input)?;
    let opts = EvaluateOptions {
        tol: a.kwise_tol,
        reading: a.reading.into(),
        solver: env.solver,
        solve: env.opts,
    };
    let report = evaluate_with(&dist, &opts)?;
    let marginal_order = match dist.marginal_order(a.kwise_tol) {
        Ok(k) => Some(k),
        Err(Error::ResourceGuard { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let ok = report.all_hold() && marginal_order.is_none_or(|k| k == report.order);
    let marginal = marginal_order.map_or_else(
        || "skipped (enumeration guard)".to_string(),
        |k| k.to_string(),
    );
    match env.format {
        Format::Text => {
            out.write_all(report.to_text().as_bytes())?;
            writeln!(out, "{:<26} = {marginal}", "marginal_order")?;
        }
        Format::Csv => {
            let mut header = BoundReport::csv_header();
            header.push("marginal_order");
            let mut row = report.csv_record();
            row.push(marginal_order.map(|k| k.to_string()).unwrap_or_default());
            output::csv(out, &header, &[row])?;
        }
        Format::Json => output::json(
            out,
            &Analysis {
                report,
                marginal_order,
            },
        )?,
    }
    Ok(ok)
}

fn bound(a: &BoundArgs, env: &Env<'_>, out: &mut dyn Write) -> Result<bool> {
    if a.k == 0 || a.k > a.n + 1 {
        return Err(usage(format!(
            "need 1 <= k <= n+1, got n={} k={}",
            a.n, a.k
        )));
    }
    let row = bound_row(a.n, a.k, env.solver, &env.opts)?;
    emit_rows(
        out,
        env.format,
        &BoundRow::csv_header(),
        &[row],
        BoundRow::csv_record,
        true,
    )?;
    Ok(true)
}

fn spectra(a: &SpectraArgs, env: &Env<'_>, out: &mut dyn Write) -> Result<bool> {
    if a.r > a.n {
        return Err(usage(format!("need r <= n, got n={} r={}", a.n, a.r)));
    }
    let s = lambda_ball_with(env.solver, a.n, a.r, &env.opts)?;
    match env.format {
        Format::Text => {
            let mut pairs = vec![
                ("n", s.n.to_string()),
                ("r", s.r.to_string()),
                ("lambda", s.lambda.to_string()),
                ("ns_bound", s.ns_bound().to_string()),
                ("entropy_bits", s.entropy_bits().to_string()),
                ("solver", s.solver.clone()),
                ("iterations", s.iterations.to_string()),
                ("residual", s.residual.to_string()),
                ("converged", s.converged.to_string()),
            ];
            if a.profile {
                let mass: Vec<String> = s.weight_mass.iter().map(f64::to_string).collect();
                pairs.push(("weight_mass", mass.join(" ")));
            }
            out.write_all(output::kv(&pairs).as_bytes())?;
        }
        Format::Csv => {
            let row = spectra_row(&s);
            output::csv(out, &spectra_header(), &[spectra_record(&row)])?;
        }
        Format::Json => output::json(out, &s)?,
    }
    Ok(s.converged)
}

fn spectra_row(s: &kwise_entropy::ball_spectra::BallSpectrum) -> SpectraRow {
    SpectraRow {
        n: s.n,
        r: s.r,
        lambda: s.lambda,
        ns_bound: s.ns_bound(),
        iterations: s.iterations,
        residual: s.residual,
    }
}

fn spectra_header() -> Vec<&'static str> {
    vec!["n", "r", "lambda", "ns_bound", "iterations", "residual"]
}

fn spectra_record(r: &SpectraRow) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.r.to_string(),
        r.lambda.to_string(),
        r.ns_bound.to_string(),
        r.iterations.to_string(),
        r.residual.to_string(),
    ]
}

fn chain_line_header() -> Vec<&'static str> {
    vec![
        "n", "k", "r", "label", "lhs", "relation", "rhs", "slack", "asserted", "pass",
    ]
}

fn chain_line_record(rep: &ChainReport, l: &InequalityLine) -> Vec<String> {
    let rel = match l.relation {
        kwise_entropy::smoothing::Relation::Le => "<=",
        kwise_entropy::smoothing::Relation::Ge => ">=",
        kwise_entropy::smoothing::Relation::Eq => "==",
    };
    vec![
        rep.n.to_string(),
        rep.k.to_string(),
        rep.r.to_string(),
        l.label.clone(),
        l.lhs.to_string(),
        rel.to_string(),
        l.rhs.to_string(),
        l.slack.to_string(),
        l.asserted.to_string(),
        l.pass.to_string(),
    ]
}

fn chain(a: &ChainArgs, env: &Env<'_>, out: &mut dyn Write) -> Result<bool> {
    let report = match (a.k, a.theorem) {
        (Some(k), None) => {
            let dist = read_space(&a.input)?;
            if k == 0 || k > dist.n() {
                return Err(usage(format!("need 1 <= k <= n={}, got k={k}", dist.n())));
            }
            theorem1_chain(&dist, k, env.solver, &env.opts)?
        }
        (None, Some(2)) => theorem2_chain(&read_space(&a.input)?, a.reading.into())?,
        (None, Some(t)) => {
            return Err(usage(format!(
                "--theorem {t} is not a chain; use --theorem 2 or --k"
            )))
        }
        _ => return Err(usage("chain needs --k or --theorem 2")),
    };
    match env.format {
        Format::Text => out.write_all(report.to_text().as_bytes())?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .lines
                .iter()
                .map(|l| chain_line_record(&report, l))
                .collect();
            output::csv(out, &chain_line_header(), &rows)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Json<'a> {
                #[serde(flatten)]
                report: &'a ChainReport,
                all_pass: bool,
            }
            output::json(
                out,
                &Json {
                    report: &report,
                    all_pass: report.all_pass(),
                },
            )?;
        }
    }
    Ok(report.all_pass())
}

/// Parses `a` or the inclusive range `a..b`.
pub fn parse_range(s: &str) -> Result<Vec<u32>> {
    let bad = || usage(format!("bad range {s:?}; expected N or A..B"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v: u32 = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(usage(format!("empty range {s:?}")));
    }
    Ok((lo..=hi).collect())
}

fn sweep(kind: &SweepKind, env: &Env<'_>, out: &mut dyn Write) -> Result<bool> {
    match kind {
        SweepKind::Spectra { n, r } => {
            let (ns, rs) = (parse_range(n)?, parse_range(r)?);
            let points: Vec<(u32, u32)> = ns
                .iter()
                .flat_map(|&n| rs.iter().filter(move |&&r| r <= n).map(move |&r| (n, r)))
                .collect();
            if points.is_empty() {
                bail!(usage("no (n, r) pair with r <= n in the given ranges"));
            }
            let rows = spectra_sweep(&points, env.solver, &env.opts)?;
            emit_rows(
                out,
                env.format,
                &spectra_header(),
                &rows,
                spectra_record,
                false,
            )?;
        }
        SweepKind::Bounds { n, k } => {
            let (ns, ks) = (parse_range(n)?, parse_range(k)?);
            let points: Vec<(u32, u32)> = ns
                .iter()
                .flat_map(|&n| {
                    ks.iter()
                        .filter(move |&&k| k >= 1 && k <= n + 1)
                        .map(move |&k| (n, k))
                })
                .collect();
            if points.is_empty() {
                bail!(usage(
                    "no (n, k) pair with 1 <= k <= n+1 in the given ranges"
                ));
            }
            let rows = points
                .iter()
                .map(|&(n, k)| bound_row(n, k, env.solver, &env.opts))
                .collect::<kwise_entropy::Result<Vec<_>>>()?;
            emit_rows(
                out,
                env.format,
                &BoundRow::csv_header(),
                &rows,
                BoundRow::csv_record,
                false,
            )?;
        }
    }
    Ok(true)
}

/// Rows as a table (or a `key = value` block when `single`), CSV, or JSON.
fn emit_rows<T: Serialize>(
    out: &mut dyn Write,
    format: Format,
    header: &[&str],
    rows: &[T],
    record: impl Fn(&T) -> Vec<String>,
    single: bool,
) -> Result<()> {
    let records: Vec<Vec<String>> = rows.iter().map(&record).collect();
    match format {
        Format::Text if single && records.len() == 1 => {
            let pairs: Vec<(&str, String)> = header
                .iter()
                .zip(&records[0])
                .map(|(h, v)| {
                    (
                        *h,
                        if v.is_empty() {
                            "n/a".into()
                        } else {
                            v.clone()
                        },
                    )
                })
                .collect();
            out.write_all(output::kv(&pairs).as_bytes())?;
        }
        Format::Text => out.write_all(output::table(header, &records).as_bytes())?,
        Format::Csv => output::csv(out, header, &records)?,
        Format::Json if single && rows.len() == 1 => output::json(out, &rows[0])?,
        Format::Json => output::json(out, rows)?,
    }
    Ok(())
}
