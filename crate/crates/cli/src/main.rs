//! `bsgkit` command-line front end.
//!
//! Exit codes: 0 success, 1 error, 2 some bound check failed (output still
//! written), 64 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bsgkit::exact::{fmt_rational, parse_rational};
use bsgkit::extraction::{almost_all_extract, bsg_extract, dense_extract};
use bsgkit::octopus::{octopus_count_exact, octopus_count_relaxed};
use bsgkit::report::{canonical_json, check_bounds, BoundReport};
use bsgkit::sumset::{iterated_sumset, sum_stats};
use bsgkit::{
    gen_instance, measure_instance, Caps, Disjointness, ElemSet, Error, ExtractionResult, Family, GenConfig, GroupElem,
    GroupSpec, Instance, Mode, Param, PivotOrder, Rational, Settings,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 2;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "bsgkit", version, about = "Constructive hypergraph Balog-Szemeredi-Gowers extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Measure K, C and sumset sizes of an instance.
    Measure(InstanceArg),
    /// Count octopuses on one support tuple.
    Count(CountArgs),
    /// Run an extraction pipeline and check its bounds.
    Extract(ExtractArgs),
    /// Recheck a stored extraction result against its instance.
    Verify(VerifyArgs),
    /// Print the bound report of a stored extraction as JSON or CSV.
    Report(ReportArgs),
    /// Size, doubling constant and additive energy of a set.
    Energy(SetArgs),
    /// Sumset of one or more sets, with the statistics of the first.
    Sumset(SumsetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Complete,
    RandomDensity,
    Planted,
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    General,
    Dense,
    AlmostAll,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::General => Mode::General,
            ModeArg::Dense => Mode::Dense,
            ModeArg::AlmostAll => Mode::AlmostAll,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactArg {
    Full,
    NamedOnly,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// `p/q` or `measured`.
fn param_arg(s: &str) -> Result<Param, String> {
    if s == "measured" {
        Ok(Param::Measured)
    } else {
        rational_arg(s).map(Param::Given)
    }
}

#[derive(Clone)]
enum Delta {
    Auto,
    Given(Rational),
}

impl Delta {
    fn as_option(&self) -> Option<&Rational> {
        match self {
            Delta::Auto => None,
            Delta::Given(d) => Some(d),
        }
    }
}

/// `p/q` or `auto`.
fn delta_arg(s: &str) -> Result<Delta, String> {
    if s == "auto" {
        Ok(Delta::Auto)
    } else {
        rational_arg(s).map(Delta::Given)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Size of every part.
    #[arg(long, required_unless_present = "sizes")]
    n: Option<usize>,
    /// Comma-separated part sizes, instead of --r/--n.
    #[arg(long, value_delimiter = ',', conflicts_with = "n")]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated moduli, 0 for a copy of Z.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    group: Vec<u64>,
    /// Target K for random-density.
    #[arg(long = "K", value_parser = rational_arg, default_value = "2")]
    k: Rational,
    #[arg(long, value_parser = rational_arg, default_value = "1/2")]
    ap_fraction: Rational,
    #[arg(long = "target-C", value_parser = rational_arg, default_value = "2")]
    target_c: Rational,
    #[arg(long, value_parser = rational_arg, default_value = "1/100")]
    delta: Rational,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArg {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated positions, one per part.
    #[arg(long, value_delimiter = ',', required = true)]
    support: Vec<usize>,
    #[arg(long, value_enum)]
    exact: Option<ExactArg>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Seed for sampled support verification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scan pivots in a seeded random order instead of by degree.
    #[arg(long, value_name = "SEED")]
    random_pivots: Option<u64>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "general")]
    mode: ModeArg,
    #[arg(long = "K", value_parser = param_arg, default_value = "measured")]
    k: Param,
    #[arg(long = "C", value_parser = param_arg, default_value = "measured")]
    c: Param,
    #[arg(long, value_parser = rational_arg)]
    eps: Option<Rational>,
    #[arg(long, value_parser = delta_arg, default_value = "auto")]
    delta: Delta,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// An extraction output or a bare result.
    #[arg(long)]
    result: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Support sampling seed; defaults to the one recorded in the result.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// An extraction or verification output.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SetArgs {
    /// JSON file `{"group": {"moduli": [...]}, "elements": [[...], ...]}`.
    #[arg(long)]
    set: PathBuf,
}

#[derive(Args)]
struct SumsetArgs {
    #[arg(long = "set", required = true)]
    sets: Vec<PathBuf>,
}

enum Outcome {
    Ok,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("bsgkit: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Error> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Error> {
    Instance::from_json(&read(path)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json(v: &Value, out: Option<&Path>) -> Result<(), Error> {
    emit(&canonical_json(v), out)
}

fn verdict(report: &BoundReport) -> Outcome {
    if report.overall {
        Outcome::Ok
    } else {
        for i in report.inequalities.iter().filter(|i| !i.pass) {
            eprintln!("FAIL {}: {} {} {}", i.name, i.lhs, i.relation.symbol(), i.rhs);
        }
        Outcome::Fail
    }
}

fn load_set(path: &Path) -> Result<ElemSet, Error> {
    let doc = read_json(path)?;
    let bad = |e: serde_json::Error| Error::Parse(format!("{}: {e}", path.display()));
    let group: GroupSpec = serde_json::from_value(doc.get("group").cloned().unwrap_or(Value::Null)).map_err(bad)?;
    let elements: Vec<GroupElem> =
        serde_json::from_value(doc.get("elements").cloned().unwrap_or(Value::Null)).map_err(bad)?;
    let elems = elements
        .iter()
        .map(|e| group.canonicalize(e))
        .collect::<Result<Vec<_>, _>>()?;
    ElemSet::new(&group, elems)
}

fn stats_json(set: &ElemSet) -> Result<Value, Error> {
    let s = sum_stats(set)?;
    Ok(json!({
        "size": s.size,
        "sumset_size": s.sumset_size,
        "doubling": fmt_rational(&s.doubling),
        "energy": s.energy.to_string(),
    }))
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let caps = Caps::from_env()?;
    match cli.command {
        Command::Gen(a) => {
            let sizes = match (a.sizes, a.n) {
                (Some(s), _) => s,
                (None, Some(n)) => vec![n; a.r],
                (None, None) => unreachable!("clap requires one of them"),
            };
            let family = match a.family {
                FamilyName::Complete => Family::Complete,
                FamilyName::RandomDensity => Family::RandomDensity { k: a.k },
                FamilyName::Planted => Family::Planted {
                    ap_fraction: a.ap_fraction,
                    target_c: a.target_c,
                },
                FamilyName::Dense => Family::Dense { delta: a.delta },
            };
            let cfg = GenConfig {
                sizes,
                group: GroupSpec::new(a.group)?,
                seed: a.seed,
                family,
            };
            emit(&gen_instance(&cfg)?.to_json(), a.out.as_deref())?;
        }
        Command::Measure(a) => {
            let m = measure_instance(&load_instance(&a.instance)?)?;
            emit_json(&serde_json::to_value(m).expect("serializes"), a.out.as_deref())?;
        }
        Command::Count(a) => {
            let inst = load_instance(&a.instance)?;
            let h = inst.hypergraph();
            let mut out = json!({ "relaxed": octopus_count_relaxed(h, &a.support)?.to_string() });
            if let Some(mode) = a.exact {
                let mode = match mode {
                    ExactArg::Full => Disjointness::Full,
                    ExactArg::NamedOnly => Disjointness::NamedOnly,
                };
                out["exact"] = json!(octopus_count_exact(h, &a.support, mode, caps.enumeration)?.to_string());
                out["disjointness"] = serde_json::to_value(mode).expect("serializes");
            }
            emit_json(&out, None)?;
        }
        Command::Extract(a) => {
            let inst = load_instance(&a.instance)?;
            let settings = Settings {
                caps,
                workers: a.run.workers,
                seed: a.run.seed,
                pivots: match a.run.random_pivots {
                    Some(seed) => PivotOrder::Random { seed },
                    None => PivotOrder::DegreeScan,
                },
            };
            let need_eps = || {
                a.eps
                    .clone()
                    .ok_or_else(|| Error::ConfigInvalid("--eps is required for this mode".into()))
            };
            let (result, report) = match a.mode {
                ModeArg::General => bsg_extract(&inst, &a.k, &a.c, &settings)?,
                ModeArg::Dense => {
                    let result = dense_extract(&inst, &need_eps()?, a.delta.as_option(), &settings)?;
                    let report = check_bounds(&result, &inst, Mode::Dense, &settings)?;
                    (result, report)
                }
                ModeArg::AlmostAll => almost_all_extract(&inst, &a.c, &need_eps()?, a.delta.as_option(), &settings)?,
            };
            let doc = json!({
                "result": result.to_json_value(),
                "report": serde_json::to_value(&report).expect("serializes"),
            });
            emit_json(&doc, a.out.as_deref())?;
            return Ok(verdict(&report));
        }
        Command::Verify(a) => {
            let inst = load_instance(&a.instance)?;
            let mut doc = read_json(&a.result)?;
            let raw = match doc.get_mut("result") {
                Some(r) => r.take(),
                None => doc,
            };
            let result = ExtractionResult::from_json_value(raw)?;
            let settings = Settings {
                caps,
                workers: a.workers,
                seed: a.seed.unwrap_or(result.supports.seed),
                pivots: result.pivots,
            };
            let report = check_bounds(&result, &inst, a.mode.into(), &settings)?;
            emit_json(&json!({ "report": serde_json::to_value(&report).expect("serializes") }), a.out.as_deref())?;
            return Ok(verdict(&report));
        }
        Command::Report(a) => {
            let doc = read_json(&a.input)?;
            let raw = doc
                .get("report")
                .cloned()
                .ok_or_else(|| Error::Parse(format!("{}: no report field", a.input.display())))?;
            let report: BoundReport =
                serde_json::from_value(raw).map_err(|e| Error::Parse(format!("report: {e}")))?;
            if a.csv {
                print!("{}", report.to_csv());
            } else {
                emit_json(&serde_json::to_value(&report).expect("serializes"), None)?;
            }
            return Ok(verdict(&report));
        }
        Command::Energy(a) => {
            emit_json(&stats_json(&load_set(&a.set)?)?, None)?;
        }
        Command::Sumset(a) => {
            let sets = a.sets.iter().map(|p| load_set(p)).collect::<Result<Vec<_>, _>>()?;
            let mut out = stats_json(&sets[0])?;
            let total = iterated_sumset(&sets)?;
            out["sumset"] = serde_json::to_value(total.elems()).expect("serializes");
            out["sumset_size"] = json!(total.len());
            emit_json(&out, None)?;
        }
    }
    Ok(Outcome::Ok)
}
