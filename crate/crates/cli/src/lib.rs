//! The `trislice` command line.
//!
//! Exit status: 0 on success, 1 when the mathematics says no (invalid
//! family, failed hypothesis, broken invariant), 2 for usage and input
//! errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use trislice::family::read_families;
use trislice::linalg::{natural_order, read_exact_matrix, read_residue_matrix};
use trislice::profile::{verify_family_with, VerifyOptions};
use trislice::search::certify;
use trislice::tensors::{
    frankl_wilson_matrix, liu_matrix, product_tensor, snevily_matrix, BuildOptions,
};
use trislice::workbench::{
    ledger_load, run_experiment_with, summary_table, ExperimentSpec, LedgerRecord, LedgerWriter,
    TableFormat, SCHEMA_VERSION, TOOL_VERSION,
};
use trislice::{
    bound_report, complement_replace, max_family_with, rank_exact, rank_mod_p, shrink_small,
    slice_decompose, trace, triangularity, Error, GroundSize, IntersectionProfile,
    LiuConfiguration, Prime, SearchBudget, SearchOptions, SetFamily, TriangularityCertificate,
};

#[derive(Parser, Debug)]
#[command(name = "trislice", about = "Verify, bound and search set families with restricted intersections")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Search worker threads (1 = deterministic sequential, 0 = all cores).
    #[arg(long, global = true, env = "TRISLICE_WORKERS", default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every family in a JSONL file against a profile.
    Verify(VerifyArgs),
    /// Report the upper bounds that apply to a profile.
    Bound(BoundArgs),
    /// Rank and triangularity of a matrix dump.
    Rank(RankArgs),
    /// Build a proof matrix for a family.
    Tensor(TensorArgs),
    /// Complement, trace or normalize a family.
    Transform(TransformArgs),
    /// Exhaustive maximum-family search.
    Search(SearchArgs),
    /// Slice decomposition of a product of inner-product factors.
    Decompose(DecomposeArgs),
    /// Batch searches and the results ledger.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Ground size; must match the file when given.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    profile: IntersectionProfile,
    /// Family JSONL file, `-` for stdin.
    #[arg(long)]
    family: PathBuf,
    /// Report every violation instead of the first 32.
    #[arg(long)]
    all: bool,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    profile: String,
}

#[derive(Args, Debug)]
struct RankArgs {
    /// Matrix dump, `-` for stdin.
    #[arg(long)]
    matrix: PathBuf,
    /// A prime, or `q` for the rationals.
    #[arg(long)]
    field: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TensorKind {
    Snevily,
    Fw,
    Liu,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Emit {
    Matrix,
    #[default]
    Certificate,
    Rank,
}

#[derive(Args, Debug)]
struct TensorArgs {
    kind: TensorKind,
    /// Family JSONL (first line used); snevily and fw.
    #[arg(long, required_if_eq_any = [("kind", "snevily"), ("kind", "fw")])]
    family: Option<PathBuf>,
    /// Lower family A for liu.
    #[arg(long, required_if_eq("kind", "liu"))]
    lower: Option<PathBuf>,
    /// Upper family B for liu.
    #[arg(long, required_if_eq("kind", "liu"))]
    upper: Option<PathBuf>,
    /// Modulus (snevily).
    #[arg(long, required_if_eq("kind", "snevily"))]
    p: Option<u32>,
    /// Allowed values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    l: Vec<u64>,
    #[arg(long, value_enum, default_value_t)]
    emit: Emit,
    /// Build even when hypotheses fail.
    #[arg(long)]
    force: bool,
    /// Sort the family into the order the proof needs first.
    #[arg(long)]
    sort: bool,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(subcommand)]
    op: TransformOp,
    #[arg(long, global = true)]
    family: Option<PathBuf>,
    #[arg(long, global = true)]
    profile: Option<IntersectionProfile>,
}

#[derive(Subcommand, Debug)]
enum TransformOp {
    /// Replace one member by its complement.
    Complement {
        /// 1-based member index.
        #[arg(long)]
        index: usize,
    },
    /// Trace the family on one member.
    Trace {
        /// 1-based member index.
        #[arg(long)]
        gamma: usize,
    },
    /// Complement every member larger than n/2.
    Shrink,
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    max_time: Option<f64>,
    /// Fix the first member up to symmetry.
    #[arg(long)]
    canonical: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    profile: IntersectionProfile,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Do not stop early when a bound is met.
    #[arg(long)]
    no_bound_stop: bool,
    /// Include elapsed time in the output.
    #[arg(long)]
    timing: bool,
    /// Append the result to a ledger.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long)]
    l: usize,
    #[arg(long)]
    m: usize,
    /// Constant shifts f_1..f_l, comma separated (default all zero).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    shifts: Vec<i64>,
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Run a grid and append to the ledger.
    Run(ExperimentRunArgs),
    /// Re-verify a ledger.
    Audit {
        #[arg(long)]
        ledger: PathBuf,
        /// Skip bad lines instead of failing.
        #[arg(long)]
        lenient: bool,
    },
}

#[derive(Args, Debug)]
struct ExperimentRunArgs {
    /// Ground sizes: `4,6,8` or `4..8`.
    #[arg(long)]
    n: String,
    /// Moduli substituted for `{p}`: `2,3` or `2..5` (primes only).
    #[arg(long, default_value = "")]
    p: String,
    /// Profile template, repeatable.
    #[arg(long = "profile", required = true)]
    profiles: Vec<String>,
    #[arg(long)]
    ledger: PathBuf,
    #[arg(long, default_value = "csv")]
    format: String,
    #[command(flatten)]
    budget: BudgetArgs,
}

type Out<'a> = &'a mut dyn Write;

/// Outcome of a command that ran to completion: success or a domain "no".
enum Status {
    Ok,
    Fail,
}

fn version_line() -> String {
    format!("{TOOL_VERSION} (ledger schema {SCHEMA_VERSION})")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: Out<'_>, err: Out<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let version: &'static str = Box::leak(version_line().into_boxed_str());
    let matches = match Cli::command().version(version).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(Status::Ok) => 0,
        Ok(Status::Fail) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_domain() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cli: &Cli, out: Out<'_>, err: Out<'_>) -> trislice::Result<Status> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, cli.json, out),
        Command::Bound(a) => cmd_bound(a, cli.json, out),
        Command::Rank(a) => cmd_rank(a, cli.json, out),
        Command::Tensor(a) => cmd_tensor(a, cli.json, out),
        Command::Transform(a) => cmd_transform(a, cli.json, out),
        Command::Search(a) => cmd_search(a, cli.workers, cli.json, out),
        Command::Decompose(a) => cmd_decompose(a, cli.json, out),
        Command::Experiment(ExperimentCommand::Run(a)) => cmd_experiment(a, cli.workers, cli.json, out, err),
        Command::Experiment(ExperimentCommand::Audit { ledger, lenient }) => {
            cmd_audit(ledger, *lenient, cli.json, out, err)
        }
    }
}

fn open_input(path: &Path) -> trislice::Result<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn first_family(path: &Path) -> trislice::Result<SetFamily> {
    read_families(open_input(path)?)?
        .into_iter()
        .next()
        .ok_or(Error::Arity("family file has no families"))
}

fn print_json(out: Out<'_>, v: &Value) -> trislice::Result<()> {
    writeln!(out, "{}", serde_json::to_string(v).expect("json value serializes"))?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, json: bool, out: Out<'_>) -> trislice::Result<Status> {
    let families = read_families(open_input(&a.family)?)?;
    if families.is_empty() {
        return Err(Error::Arity("family file has no families"));
    }
    let opts = if a.all { VerifyOptions::all() } else { VerifyOptions::default() };
    let mut all_valid = true;
    let mut reports = Vec::new();
    for (i, f) in families.iter().enumerate() {
        if let Some(n) = a.n {
            if f.ground().get() != n {
                return Err(Error::Context {
                    left: n,
                    right: f.ground().get(),
                });
            }
        }
        let report = verify_family_with(f, &a.profile, opts);
        all_valid &= report.valid;
        if json {
            reports.push(json!({"family": i + 1, "report": report}));
        } else {
            let prefix = if families.len() > 1 { format!("family {}: ", i + 1) } else { String::new() };
            writeln!(out, "{prefix}{}", if report.valid { "valid" } else { "invalid" })?;
            for v in &report.violations {
                writeln!(out, "  {v}")?;
            }
            if report.truncated {
                writeln!(out, "  ... (more violations; use --all)")?;
            }
        }
    }
    if json {
        print_json(out, &Value::Array(reports))?;
    }
    Ok(if all_valid { Status::Ok } else { Status::Fail })
}

fn cmd_bound(a: &BoundArgs, json: bool, out: Out<'_>) -> trislice::Result<Status> {
    let p = a.p.map(Prime::new).transpose()?;
    let profile = IntersectionProfile::instantiate(&a.profile, a.p)?;
    let report = bound_report(a.n, p, &profile)?;
    if json {
        writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?;
        return Ok(Status::Ok);
    }
    writeln!(out, "n {} profile {}", report.n, report.profile)?;
    for e in &report.entries {
        let status = match e.status {
            trislice::BoundStatus::Theorem => "theorem",
            trislice::BoundStatus::Conjectured => "conjectured",
        };
        writeln!(out, "{:<30} {:>12}  {status}", e.name, e.value.to_string())?;
    }
    for note in &report.notes {
        writeln!(out, "note: {note}")?;
    }
    match (&report.tightest, report.tightest_name()) {
        (Some(t), Some(name)) => writeln!(out, "tightest {t} ({name})")?,
        _ => writeln!(out, "tightest none")?,
    }
    Ok(Status::Ok)
}

fn write_certificate(out: Out<'_>, c: &TriangularityCertificate) -> trislice::Result<()> {
    let shape = serde_json::to_value(c.shape).expect("shape serializes");
    writeln!(out, "shape {}", shape.as_str().unwrap_or("?"))?;
    writeln!(out, "diagonal_nonzero {}", c.diagonal_all_nonzero)?;
    if let Some((r, col)) = c.witness() {
        writeln!(out, "witness ({}, {})", r + 1, col + 1)?;
    }
    Ok(())
}

fn cmd_rank(a: &RankArgs, json: bool, out: Out<'_>) -> trislice::Result<Status> {
    let input = open_input(&a.matrix)?;
    let (dim, rank, cert) = if a.field.eq_ignore_ascii_case("q") {
        let m = read_exact_matrix(input)?;
        let d = trislice::linalg::SquareMatrix::dim(&m);
        (d, rank_exact(&m), triangularity(&m, &natural_order(d))?)
    } else {
        let p: u32 = a
            .field
            .parse()
            .map_err(|_| Error::Parameter(format!("field must be a prime or q, got {:?}", a.field)))?;
        let m = read_residue_matrix(input, Prime::new(p)?)?;
        let d = trislice::linalg::SquareMatrix::dim(&m);
        (d, rank_mod_p(&m), triangularity(&m, &natural_order(d))?)
    };
    if json {
        print_json(out, &json!({"dim": dim, "rank": rank, "certificate": cert}))?;
    } else {
        writeln!(out, "dim {dim}")?;
        writeln!(out, "rank {rank}")?;
        write_certificate(out, &cert)?;
    }
    Ok(Status::Ok)
}

fn cmd_tensor(a: &TensorArgs, json: bool, out: Out<'_>) -> trislice::Result<Status> {
    let l: BTreeSet<u64> = a.l.iter().copied().collect();
    let opts = BuildOptions { force: a.force };
    let (dump, cert, failed, rank) = match a.kind {
        TensorKind::Snevily => {
            let mut f = first_family(a.family.as_deref().expect("clap requires --family"))?;
            if a.sort {
                f = f.sorted_lex();
            }
            let p = Prime::new(a.p.expect("clap requires --p"))?;
            let t = snevily_matrix(&f, &l, p, opts)?;
            let rank = matches!(a.emit, Emit::Rank).then(|| t.rank());
            (t.matrix.to_string(), t.certificate, t.failed_hypotheses, rank)
        }
        TensorKind::Fw => {
            let mut f = first_family(a.family.as_deref().expect("clap requires --family"))?;
            if a.sort {
                f = f.sorted_by_size();
            }
            let t = frankl_wilson_matrix(&f, &l, opts)?;
            let rank = matches!(a.emit, Emit::Rank).then(|| t.rank());
            (t.matrix.to_string(), t.certificate, t.failed_hypotheses, rank)
        }
        TensorKind::Liu => {
            let lower = first_family(a.lower.as_deref().expect("clap requires --lower"))?;
            let upper = first_family(a.upper.as_deref().expect("clap requires --upper"))?;
            let mut cfg = LiuConfiguration::new(lower, upper, l)?;
            if a.sort {
                cfg = cfg.sorted_lex();
            }
            let t = liu_matrix(&cfg, opts)?;
            let rank = matches!(a.emit, Emit::Rank).then(|| t.rank());
            (t.matrix.to_string(), t.certificate, t.failed_hypotheses, rank)
        }
    };
    if json {
        let mut v = json!({"certificate": cert, "failed_hypotheses": failed});
        match a.emit {
            Emit::Matrix => v["matrix"] = Value::String(dump),
            Emit::Rank => v["rank"] = json!(rank),
            Emit::Certificate => {}
        }
        print_json(out, &v)?;
    } else {
        match a.emit {
            Emit::Matrix => write!(out, "{dump}")?,
            Emit::Certificate => write_certificate(out, &cert)?,
            Emit::Rank => writeln!(out, "rank {}", rank.unwrap_or_default())?,
        }
        for h in &failed {
            writeln!(out, "hypothesis failed: {h}")?;
        }
    }
    Ok(Status::Ok)
}

fn cmd_transform(a: &TransformArgs, json: bool, out: Out<'_>) -> trislice::Result<Status> {
    let path = a
        .family
        .as_deref()
        .ok_or_else(|| Error::Parameter("--family is required".into()))?;
    let profile = a
        .profile
        .as_ref()
        .ok_or_else(|| Error::Parameter("--profile is required".into()))?;
    let family = first_family(path)?;
    let one_based = |i: usize, what: &str| {
        i.checked_sub(1)
            .ok_or_else(|| Error::Parameter(format!("{what} is 1-based")))
    };
    match a.op {
        TransformOp::Complement { index } => {
            let f = complement_replace(&family, one_based(index, "--index")?, profile)?;
            writeln!(out, "{}", f.to_json_line())?;
        }
        TransformOp::Shrink => {
            let f = shrink_small(&family, profile)?;
            writeln!(out, "{}", f.to_json_line())?;
        }
        TransformOp::Trace { gamma } => {
            let r = trace(&family, one_based(gamma, "--gamma")?, profile)?;
            if json {
                let fam: Value = serde_json::from_str(&r.family.to_json_line()).expect("family json");
                print_json(
                    out,
                    &json!({"family": fam, "profile": r.profile.to_string(), "relabel": r.relabel}),
                )?;
            } else {
                writeln!(out, "{}", r.family.to_json_line())?;
                writeln!(out, "profile {}", r.profile)?;
                let relabel: Vec<String> = r.relabel.iter().map(usize::to_string).collect();
                writeln!(out, "relabel {}", relabel.join(" "))?;
            }
        }
    }
    Ok(Status::Ok)
}

fn budget(b: &BudgetArgs, workers: usize) -> trislice::Result<SearchBudget> {
    let max_time = b
        .max_time
        .map(|s| {
            Duration::try_from_secs_f64(s)
                .map_err(|_| Error::Parameter(format!("bad --max-time {s}")))
        })
        .transpose()?;
    Ok(SearchBudget {
        max_nodes: b.max_nodes,
        max_time,
        parallel_width: workers,
    })
}

fn cmd_search(a: &SearchArgs, workers: usize, json: bool, out: Out<'_>) -> trislice::Result<Status> {
    let n = GroundSize::new(a.n)?;
    let opts = SearchOptions {
        budget: budget(&a.budget, workers)?,
        canonical: a.budget.canonical,
        seed: None,
        ignore_bounds: a.no_bound_stop,
    };
    let outcome = max_family_with(n, &a.profile, &opts)?;
    if !certify(&outcome, &a.profile) {
        return Err(Error::Invariant("search witness failed certification".into()));
    }
    let report = bound_report(a.n as u64, None, &a.profile)?;
    if let Some(path) = &a.ledger {
        LedgerWriter::open(path)?.append(&LedgerRecord::new(n, &a.profile, &outcome, &report))?;
    }
    let bound_name = report.tightest_name().map(str::to_owned);
    if json {
        let witness = outcome.witness.as_ref().map(SetFamily::to_lists);
        let mut v = json!({
            "n": a.n,
            "profile": a.profile.to_string(),
            "max_size": outcome.max_size,
            "infeasible": outcome.infeasible,
            "exhausted": outcome.exhausted,
            "witness": witness,
            "bound": outcome.bound,
            "bound_name": bound_name,
            "nodes_visited": outcome.nodes_visited,
        });
        if a.timing {
            v["elapsed_ms"] = json!(outcome.elapsed.as_secs_f64() * 1e3);
        }
        print_json(out, &v)?;
        return Ok(Status::Ok);
    }
    if outcome.infeasible {
        writeln!(
            out,
            "infeasible: no family of {} members (largest reached {})",
            a.profile.k(),
            outcome.max_size
        )?;
    } else {
        writeln!(out, "max_size {}", outcome.max_size)?;
    }
    writeln!(out, "exhausted {}", outcome.exhausted)?;
    match (outcome.bound, bound_name) {
        (Some(b), Some(name)) => writeln!(out, "bound {b} ({name})")?,
        _ => writeln!(out, "bound none")?,
    }
    writeln!(out, "nodes {}", outcome.nodes_visited)?;
    if let Some(w) = &outcome.witness {
        writeln!(out, "witness {}", w.to_json_line())?;
    }
    if a.timing {
        writeln!(out, "elapsed {:.3}s", outcome.elapsed.as_secs_f64())?;
    }
    Ok(Status::Ok)
}

fn cmd_decompose(a: &DecomposeArgs, json: bool, out: Out<'_>) -> trislice::Result<Status> {
    if a.m > 16 {
        return Err(Error::Parameter(format!("m = {} is too large to tabulate", a.m)));
    }
    let consts = if a.shifts.is_empty() { vec![0; a.l] } else { a.shifts.clone() };
    if consts.len() != a.l {
        return Err(Error::Parameter(format!(
            "expected {} shifts, got {}",
            a.l,
            consts.len()
        )));
    }
    let rows: Vec<u64> = (0..1u64 << a.m).collect();
    let shifts: Vec<Vec<i64>> = consts.iter().map(|&c| vec![c; rows.len()]).collect();
    let d = slice_decompose(a.l, a.m, &rows, &shifts)?;
    let mut mismatches = 0usize;
    for (r, &x) in rows.iter().enumerate() {
        for y in 0..1u64 << a.m {
            if d.evaluate(r, y) != product_tensor(x, y, consts.iter().copied()) {
                mismatches += 1;
            }
        }
    }
    let within = (d.terms.len() as u128) <= d.term_bound();
    if json {
        print_json(
            out,
            &json!({
                "l": a.l, "m": a.m, "shifts": consts,
                "terms": d.terms.len(), "term_bound": d.term_bound() as u64,
                "reconstructs": mismatches == 0, "within_bound": within,
            }),
        )?;
    } else {
        writeln!(out, "terms {}", d.terms.len())?;
        writeln!(out, "term_bound {}", d.term_bound())?;
        writeln!(out, "reconstructs {}", mismatches == 0)?;
    }
    Ok(if mismatches == 0 && within { Status::Ok } else { Status::Fail })
}

/// `4,6,8`, `4..8` (inclusive) or a mix.
fn parse_list(s: &str, what: &str) -> trislice::Result<Vec<u64>> {
    let bad = || Error::Parameter(format!("bad {what} list {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn cmd_experiment(
    a: &ExperimentRunArgs,
    workers: usize,
    json: bool,
    out: Out<'_>,
    err: Out<'_>,
) -> trislice::Result<Status> {
    let format: TableFormat = if json { TableFormat::Json } else { a.format.parse()? };
    let ps = parse_list(&a.p, "p")?
        .into_iter()
        .filter(|&p| u32::try_from(p).is_ok_and(trislice::family::is_prime))
        .map(|p| p as u32)
        .collect();
    let spec = ExperimentSpec {
        ns: parse_list(&a.n, "n")?.into_iter().map(|n| n as usize).collect(),
        ps,
        profiles: a.profiles.clone(),
        budget: budget(&a.budget, workers)?,
        canonical: a.budget.canonical,
        ledger: a.ledger.clone(),
        format,
    };
    let records = run_experiment_with(&spec, |r| {
        let _ = writeln!(
            err,
            "n={} {} max_size={} exhausted={}",
            r.n, r.profile, r.max_size, r.exhausted
        );
    })?;
    write!(out, "{}", summary_table(&records, format)?)?;
    Ok(Status::Ok)
}

fn cmd_audit(ledger: &Path, lenient: bool, json: bool, out: Out<'_>, err: Out<'_>) -> trislice::Result<Status> {
    let load = ledger_load(ledger, lenient)?;
    for (line, reason) in &load.skipped {
        writeln!(err, "skipped line {line}: {reason}")?;
    }
    if json {
        let skipped: Vec<Value> = load
            .skipped
            .iter()
            .map(|(l, r)| json!({"line": l, "reason": r}))
            .collect();
        print_json(out, &json!({"records": load.records.len(), "skipped": skipped}))?;
    } else {
        writeln!(out, "{} records verified", load.records.len())?;
        if !load.skipped.is_empty() {
            writeln!(out, "{} lines skipped", load.skipped.len())?;
        }
    }
    Ok(if load.skipped.is_empty() { Status::Ok } else { Status::Fail })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("4,6,8", "n").unwrap(), vec![4, 6, 8]);
        assert_eq!(parse_list("4..6, 9", "n").unwrap(), vec![4, 5, 6, 9]);
        assert!(parse_list("4..x", "n").is_err());
        assert!(parse_list("", "n").unwrap().is_empty());
    }

    #[test]
    fn version_mentions_schema() {
        assert!(version_line().contains("schema 1"));
    }
}
