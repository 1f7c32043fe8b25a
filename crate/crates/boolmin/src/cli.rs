//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 unreadable or unusable input,
//! 3 an optimizer output failed the equivalence oracle.

use std::fmt::Write as _;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use boolmin_core::datagen::{gen_comparison_formula, gen_dataset, ComparisonSpec, Family};
use boolmin_core::formula::oracle::{
    check_auto, check_equivalence, TruthSource, DEFAULT_EXHAUSTIVE_BOUND, DEFAULT_SAMPLES,
};
use boolmin_core::rewrite::{apply, find_defactorization_sites, find_factorization_sites, SiteTarget};
use boolmin_core::{
    Algorithm, CostModel, EquivalenceMode, Formula, GenSpec, HeuristicParams, KeygenBasis, OracleError, RewriteSite,
    Verdict,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::abe::{run_abe, AbeConfig, AbePoint};
use crate::bench::{render_csv, render_json, render_table, run_bench, BenchConfig, Dataset};
use crate::io::{parse_input, read_dataset, write_dataset, Input};
use crate::report::{optimize_report, saved_percent, ReportOptions};

/// Minimize monotone Boolean formulas under the path-count cost.
#[derive(Parser, Debug)]
#[command(name = "boolmin", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Check every run's output with the equivalence oracle, not only the
    /// best one.
    #[arg(long, global = true)]
    check: bool,
    /// Optimizer parameters as `key=value,...` (t_max, t_min, cooling_rate,
    /// inner_iters, defact_prob, k_max, restarts, acceptance).
    #[arg(long, global = true)]
    params: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

/// Output encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable text.
    Table,
    /// JSON.
    Json,
    /// CSV with a header line.
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize one formula or circuit.
    Optimize(OptimizeArgs),
    /// Run algorithms over dataset files, or the key generation and decryption sweep.
    Bench(BenchArgs),
    /// Check equivalence, or list and apply single rewrites.
    Verify(VerifyArgs),
    /// Generate datasets.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    /// Input file (formula or circuit); stdin when absent or `-`.
    input: Option<PathBuf>,
    /// Algorithm: hc, sa, ch, ihc, isa or ich.
    #[arg(long, default_value = "hc")]
    alg: String,
    /// Independent runs; the cheapest result is printed.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Per-run time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct BenchArgs {
    #[command(subcommand)]
    sub: Option<BenchSub>,
    /// Dataset files, one formula per line.
    datasets: Vec<PathBuf>,
    /// Comma-separated algorithms (default: all six).
    #[arg(long)]
    algs: Option<String>,
    /// Runs per formula and algorithm.
    #[arg(long, default_value_t = 16)]
    reps: usize,
    /// Per-run time limit in seconds; runs over it count as failed.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum BenchSub {
    /// Modeled key generation and decryption times over policy sizes.
    Abe(AbeArgs),
}

#[derive(Args, Debug)]
struct AbeArgs {
    /// Comma-separated policy sizes in literals.
    #[arg(long, default_value = "50,100,150,200,250")]
    sizes: String,
    /// Comma-separated optimizers; `none` is the baseline.
    #[arg(long, default_value = "none,hc,ch,isa")]
    optimizers: String,
    /// Fresh policies per size.
    #[arg(long, default_value_t = 30)]
    repeats: usize,
    /// Milliseconds per pairing.
    #[arg(long, default_value_t = 1.3)]
    pairing_ms: f64,
    /// Milliseconds per generated share.
    #[arg(long, default_value_t = 1.3)]
    share_gen_ms: f64,
    /// Policy charged for key generation.
    #[arg(long, value_enum, default_value_t = Basis::Original)]
    keygen_basis: Basis,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Basis {
    Original,
    Optimized,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// First formula or circuit.
    a: PathBuf,
    /// Second formula or circuit.
    b: Option<PathBuf>,
    /// Comparison mode.
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    /// Assignments tried in sampled mode.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    /// Largest universe enumerated exhaustively.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_BOUND)]
    bound: usize,
    /// List the single-step rewrites of the first input.
    #[arg(long, conflicts_with = "b")]
    sites: bool,
    /// Apply the listed rewrite with this index and check the result.
    #[arg(long, conflicts_with_all = ["b", "sites"])]
    apply: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    /// Exhaustive up to the bound, sampled beyond it.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Preset family 1 to 4.
    #[arg(long, conflicts_with_all = ["family", "k"])]
    dataset: Option<usize>,
    /// Generator family.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Distinct attribute range `lo:hi`.
    #[arg(long, default_value = "20:25")]
    vars: String,
    /// Literal range `lo:hi`.
    #[arg(long, default_value = "20:40")]
    lits: String,
    /// Number of formulas.
    #[arg(short = 'n', long, default_value_t = 1)]
    count: usize,
    /// Clause size range `lo:hi` for random policies.
    #[arg(long, default_value = "2:6")]
    clause_size: String,
    /// Bits per numeric attribute.
    #[arg(long, default_value_t = 5)]
    bits: u32,
    /// Emit the single comparison `A >= k` instead of a dataset.
    #[arg(long)]
    k: Option<u64>,
    /// Clause count range `lo:hi` for comparison policies.
    #[arg(long, default_value = "10:10")]
    clauses: String,
    /// Numeric attributes for comparison policies.
    #[arg(long, default_value_t = 5)]
    numeric: usize,
    /// Distinct comparisons per comparison policy.
    #[arg(long, default_value_t = 5)]
    pool: usize,
    /// Comparisons per clause `lo:hi`.
    #[arg(long, default_value = "1:2")]
    arity: String,
    /// Percentage of linking gates that are OR in comparison policies.
    #[arg(long, default_value_t = 90)]
    or_percent: u32,
    /// Attempts per formula before giving up.
    #[arg(long)]
    max_retries: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Random,
    Comparison,
}

/// A failed command, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or arguments.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or unusable input.
    #[error("{0}")]
    Input(String),
    /// Optimizer output not equivalent to its input.
    #[error("{0}")]
    Oracle(String),
}

impl CliError {
    /// Process exit code.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Oracle(_) => 3,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn input_err(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses arguments from the environment, runs, prints and returns the
/// exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// Runs a parsed command and returns its standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        // Fails only if a pool already exists, as in repeated in-process calls.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Optimize(a) => optimize(cli, a),
        Command::Bench(a) => match &a.sub {
            Some(BenchSub::Abe(abe)) => bench_abe(cli, abe),
            None => bench(cli, a),
        },
        Command::Verify(a) => verify(cli, a),
        Command::Gen(a) => gen(cli, a),
    }
}

fn params(cli: &Cli) -> Result<HeuristicParams, CliError> {
    let mut p = HeuristicParams::default();
    if let Some(text) = &cli.params {
        for pair in text.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, got `{pair}`")))?;
            if k.trim() == "seed" {
                return Err(usage("set the seed with --seed"));
            }
            p.set(k, v).map_err(usage)?;
        }
    }
    p.seed = cli.seed;
    p.validate().map_err(usage)?;
    Ok(p)
}

fn read_text(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => std::fs::read_to_string(p).map_err(|e| input_err(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, CliError> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| input_err(format!("stdin: {e}")))?;
    Ok(s)
}

fn load(path: Option<&Path>) -> Result<Input, CliError> {
    let name = path.map_or("stdin".into(), |p| p.display().to_string());
    parse_input(&read_text(path)?).map_err(|e| input_err(format!("{name}: {e}")))
}

fn load_formula(path: Option<&Path>) -> Result<Formula, CliError> {
    load(path)?.into_formula().map_err(input_err)
}

fn time_limit(secs: Option<f64>) -> Result<Option<Duration>, CliError> {
    secs.map(|s| Duration::try_from_secs_f64(s).map_err(|_| usage("--time-limit must be a non-negative number")))
        .transpose()
}

fn csv_line<S: Serialize>(rows: &[S]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("serializable");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

fn json<S: Serialize + ?Sized>(v: &S) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

#[derive(Serialize)]
struct OptimizeRow {
    algorithm: &'static str,
    seed: u64,
    original_cost: usize,
    cost: usize,
    percent: f64,
    check: &'static str,
    formula: String,
    time_s: f64,
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Equivalent => "equivalent",
        Verdict::SampledAgree { .. } => "sampled-ok",
        Verdict::NotEquivalent { .. } => "not-equivalent",
    }
}

fn optimize(cli: &Cli, a: &OptimizeArgs) -> Result<String, CliError> {
    let alg: Algorithm = a.alg.parse().map_err(usage)?;
    if a.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let p = params(cli)?;
    let f = load_formula(a.input.as_deref())?;
    let options = ReportOptions {
        repetitions: a.reps,
        check_every_run: cli.check,
        time_limit: time_limit(a.time_limit)?,
    };
    let start = Instant::now();
    let report = optimize_report(alg, &f, &p, &options).ok_or_else(|| input_err("every run hit the time limit"))?;
    let elapsed = start.elapsed().as_secs_f64();
    let out = report.best_formula.clone();
    if !report.sound() {
        return Err(CliError::Oracle(format!(
            "{alg} produced a formula that is not equivalent to its input: {}",
            out.to_text()
        )));
    }
    let row = OptimizeRow {
        algorithm: alg.name(),
        seed: p.seed,
        original_cost: f.cost(),
        cost: out.cost(),
        percent: saved_percent(f.cost(), out.cost()),
        check: verdict_name(&report.verdict),
        formula: out.to_text(),
        time_s: elapsed,
    };
    Ok(match cli.format {
        Format::Table => {
            format!(
                "{}\ncost {} -> {} ({:.1}%) {} check: {} time {:.6} s\n",
                row.formula, row.original_cost, row.cost, row.percent, row.algorithm, row.check, row.time_s
            )
        }
        Format::Json => json(&row),
        Format::Csv => csv_line(&[row]),
    })
}

fn algorithms(list: Option<&str>) -> Result<Vec<Algorithm>, CliError> {
    match list {
        None => Ok(Algorithm::ALL.to_vec()),
        Some(s) => {
            let algs: Vec<Algorithm> = s
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse().map_err(usage))
                .collect::<Result<_, _>>()?;
            if algs.is_empty() {
                return Err(usage("no algorithms selected"));
            }
            Ok(algs)
        }
    }
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<String, CliError> {
    if a.datasets.is_empty() {
        return Err(usage("bench needs at least one dataset file (or `bench abe`)"));
    }
    let algs = algorithms(a.algs.as_deref())?;
    if a.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let p = params(cli)?;
    let mut datasets = Vec::new();
    for path in &a.datasets {
        let text = read_text(Some(path))?;
        let formulas = read_dataset(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        datasets.push(Dataset { name, formulas });
    }
    let config = BenchConfig {
        datasets,
        algorithms: algs,
        repetitions: a.reps,
        params: p,
        time_limit: time_limit(a.time_limit)?,
        check: cli.check,
    };
    let report = run_bench(&config).map_err(usage)?;
    for s in report.summary.iter().filter(|s| s.failed > 0) {
        eprintln!(
            "warning: {} {}: {} formulas excluded after timing out",
            s.dataset, s.algorithm, s.failed
        );
    }
    if let Some(bad) = report.unsound().next() {
        return Err(CliError::Oracle(format!(
            "{} on formula {} of {} produced a non-equivalent formula",
            bad.algorithm, bad.index, bad.dataset
        )));
    }
    Ok(match cli.format {
        Format::Table => render_table(&config, &report),
        Format::Json => render_json(&config, &report),
        Format::Csv => render_csv(&config, &report),
    })
}

fn comma_list<T>(s: &str, parse: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| parse(x.trim()))
        .collect()
}

fn bench_abe(cli: &Cli, a: &AbeArgs) -> Result<String, CliError> {
    let sizes = comma_list(&a.sizes, |x| {
        x.parse::<usize>()
            .ok()
            .filter(|&n| n >= 2)
            .ok_or_else(|| usage(format!("bad size `{x}`")))
    })?;
    let optimizers = comma_list(&a.optimizers, |x| {
        if x.eq_ignore_ascii_case("none") {
            Ok(None)
        } else {
            x.parse().map(Some).map_err(usage)
        }
    })?;
    if sizes.is_empty() || optimizers.is_empty() || a.repeats == 0 {
        return Err(usage("need at least one size, one optimizer and one repeat"));
    }
    if !(a.pairing_ms >= 0.0 && a.share_gen_ms >= 0.0) {
        return Err(usage("times must be non-negative"));
    }
    let config = AbeConfig {
        sizes,
        optimizers: optimizers.clone(),
        repeats: a.repeats,
        model: CostModel {
            pairing_ms: a.pairing_ms,
            share_gen_ms: a.share_gen_ms,
            keygen_basis: match a.keygen_basis {
                Basis::Original => KeygenBasis::Original,
                Basis::Optimized => KeygenBasis::Optimized,
            },
        },
        params: params(cli)?,
    };
    let points = run_abe(&config).map_err(input_err)?;
    if cli.check {
        // Pipeline outputs are not kept; re-run a policy per cell and check it.
        check_abe_sample(&config)?;
    }
    Ok(match cli.format {
        Format::Table => abe_table(&points),
        Format::Json => json(&points),
        Format::Csv => csv_line(&points),
    })
}

fn check_abe_sample(config: &AbeConfig) -> Result<(), CliError> {
    use boolmin_core::datagen::generate;
    use boolmin_core::derive_seed;
    for (i, &size) in config.sizes.iter().enumerate() {
        let seed = derive_seed(derive_seed(config.params.seed, i as u64), 0);
        let f = generate(&crate::abe::pipeline_spec(size, seed)).map_err(input_err)?;
        let params = HeuristicParams {
            seed,
            ..config.params.clone()
        };
        for &o in config.optimizers.iter().flatten() {
            let g = o.run(&f, &params);
            if !check_auto(&f, &g, DEFAULT_EXHAUSTIVE_BOUND, seed).holds() {
                return Err(CliError::Oracle(format!(
                    "{o} broke equivalence on a size-{size} policy"
                )));
            }
        }
    }
    Ok(())
}

fn abe_table(points: &[AbePoint]) -> String {
    let mut out = format!(
        "{:<6}{:<10}{:>12}{:>12}{:>12}{:>12}{:>14}\n",
        "size", "optimizer", "orig_shares", "opt_shares", "decrypt_ms", "keygen_ms", "optimizer_ms"
    );
    for p in points {
        let _ = writeln!(
            out,
            "{:<6}{:<10}{:>12.1}{:>12.1}{:>12.1}{:>12.1}{:>14.3}",
            p.size, p.optimizer, p.orig_shares, p.opt_shares, p.decrypt_ms, p.keygen_ms, p.optimizer_ms
        );
    }
    out
}

#[derive(Serialize)]
struct VerifyOut {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<std::collections::BTreeMap<String, bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<String, CliError> {
    if a.sites {
        return list_sites(cli, &load_formula(Some(&a.a))?);
    }
    if let Some(index) = a.apply {
        return apply_site(cli, &load_formula(Some(&a.a))?, index);
    }
    let Some(b_path) = &a.b else {
        return Err(usage("verify needs two inputs, or --sites / --apply"));
    };
    let x = load(Some(&a.a))?;
    let y = load(Some(b_path))?;
    let (x, y) = (source(&x), source(&y));
    let sampled = EquivalenceMode::Sampled {
        samples: a.samples,
        seed: cli.seed,
    };
    let verdict = match a.mode {
        Mode::Exhaustive => check_equivalence(x, y, EquivalenceMode::Exhaustive, a.bound).map_err(|e| match e {
            OracleError::UniverseTooLarge { .. } => input_err(format!("{e} (`--mode sampled`)")),
        })?,
        Mode::Sampled => check_equivalence(x, y, sampled, a.bound).expect("sampled mode has no bound"),
        Mode::Auto => match check_equivalence(x, y, EquivalenceMode::Exhaustive, a.bound) {
            Ok(v) => v,
            Err(OracleError::UniverseTooLarge { .. }) => {
                check_equivalence(x, y, sampled, a.bound).expect("sampled mode has no bound")
            }
        },
    };
    let out = match &verdict {
        Verdict::Equivalent => VerifyOut {
            verdict: "EQUIVALENT",
            witness: None,
            samples: None,
        },
        Verdict::NotEquivalent { witness } => VerifyOut {
            verdict: "NOT-EQUIVALENT",
            witness: Some(witness.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
            samples: None,
        },
        Verdict::SampledAgree { samples } => VerifyOut {
            verdict: "UNKNOWN-SAMPLED-OK",
            witness: None,
            samples: Some(*samples),
        },
    };
    Ok(match cli.format {
        Format::Json => json(&out),
        Format::Table | Format::Csv => {
            let mut s = out.verdict.to_string();
            if let Some(w) = &out.witness {
                let parts: Vec<String> = w.iter().map(|(k, v)| format!("{k}={}", u8::from(*v))).collect();
                let _ = write!(s, "\nwitness: {}", parts.join(" "));
            }
            if let Some(n) = out.samples {
                let _ = write!(s, " ({n} samples)");
            }
            s + "\n"
        }
    })
}

fn source(i: &Input) -> &dyn TruthSource {
    match i {
        Input::Formula(f) => f,
        Input::Circuit(c) => c,
    }
}

fn all_sites(f: &Formula) -> Vec<RewriteSite> {
    let mut sites = find_factorization_sites(f);
    sites.extend(find_defactorization_sites(f));
    sites
}

#[derive(Serialize)]
struct SiteRow {
    index: usize,
    kind: &'static str,
    at: String,
    first: String,
    second: String,
    delta: i64,
}

fn path_text(p: &boolmin_core::NodePath) -> String {
    let parts: Vec<String> = p.as_slice().iter().map(usize::to_string).collect();
    format!("/{}", parts.join("/"))
}

fn list_sites(cli: &Cli, f: &Formula) -> Result<String, CliError> {
    let rows: Vec<SiteRow> = all_sites(f)
        .iter()
        .enumerate()
        .map(|(index, s)| match &s.target {
            SiteTarget::Factorization { .. } => {
                let (p1, p2) = s.pair().expect("factorization pair");
                SiteRow {
                    index,
                    kind: "factorization",
                    at: path_text(s.grandparent()),
                    first: path_text(&p1),
                    second: path_text(&p2),
                    delta: s.delta,
                }
            }
            SiteTarget::Defactorization { gate, child } => SiteRow {
                index,
                kind: "defactorization",
                at: path_text(gate),
                first: path_text(&gate.child(*child)),
                second: String::new(),
                delta: s.delta,
            },
        })
        .collect();
    Ok(match cli.format {
        Format::Json => json(&rows),
        Format::Csv => csv_line(&rows),
        Format::Table => {
            let mut out = format!("{}\ncost {}\n", f.to_text(), f.cost());
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{:>4}  {:<16}{:<12}{:<14}{:<14}{:+}",
                    r.index, r.kind, r.at, r.first, r.second, r.delta
                );
            }
            out
        }
    })
}

fn apply_site(cli: &Cli, f: &Formula, index: usize) -> Result<String, CliError> {
    let sites = all_sites(f);
    let site = sites
        .get(index)
        .ok_or_else(|| usage(format!("site {index} does not exist ({} sites)", sites.len())))?;
    let g = apply(f, site).expect("freshly enumerated site");
    let verdict = check_auto(f, &g, DEFAULT_EXHAUSTIVE_BOUND, cli.seed);
    if !verdict.holds() {
        return Err(CliError::Oracle(format!(
            "rewrite {index} broke equivalence: {}",
            g.to_text()
        )));
    }
    #[derive(Serialize)]
    struct Applied {
        index: usize,
        original_cost: usize,
        cost: usize,
        check: &'static str,
        formula: String,
    }
    let out = Applied {
        index,
        original_cost: f.cost(),
        cost: g.cost(),
        check: verdict_name(&verdict),
        formula: g.to_text(),
    };
    Ok(match cli.format {
        Format::Json => json(&out),
        Format::Csv => csv_line(&[out]),
        Format::Table => format!(
            "{}\ncost {} -> {} check: {}\n",
            out.formula, out.original_cost, out.cost, out.check
        ),
    })
}

fn range(flag: &str, s: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || usage(format!("--{flag} expects `lo:hi` or `n`, got `{s}`"));
    let (lo, hi) = match s.split_once(':') {
        Some((lo, hi)) => (
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn show(r: &std::ops::RangeInclusive<usize>) -> String {
    format!("{}:{}", r.start(), r.end())
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<String, CliError> {
    let text = if let Some(k) = a.k {
        let f = gen_comparison_formula(k, a.bits, "A").map_err(usage)?;
        let header = [format!("boolmin gen comparison A >= {k} bits={}", a.bits)];
        write_dataset(&header, &[f])
    } else {
        let mut spec = match (a.dataset, a.family) {
            (Some(d), _) => GenSpec::dataset(d, cli.seed).ok_or_else(|| usage("--dataset must be 1, 2, 3 or 4"))?,
            (None, Some(FamilyArg::Random)) => {
                let mut s = GenSpec::random(range("vars", &a.vars)?, range("lits", &a.lits)?, cli.seed);
                s.clause_size = range("clause-size", &a.clause_size)?;
                s
            }
            (None, Some(FamilyArg::Comparison)) => GenSpec::comparison(
                range("vars", &a.vars)?,
                range("lits", &a.lits)?,
                ComparisonSpec {
                    bit_width: a.bits,
                    num_clauses: range("clauses", &a.clauses)?,
                    numeric_attributes: a.numeric,
                    pool: a.pool,
                    clause_arity: range("arity", &a.arity)?,
                    or_percent: a.or_percent,
                },
                cli.seed,
            ),
            (None, None) => return Err(usage("gen needs --dataset, --family or --k")),
        };
        if let Some(r) = a.max_retries {
            spec.max_retries = r;
        }
        let formulas = gen_dataset(&spec, a.count).map_err(|e| match e {
            boolmin_core::GenError::InvalidSpec(_) => usage(e),
            _ => input_err(e),
        })?;
        write_dataset(&[header(&spec, a.count)], &formulas)
    };
    match &a.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn header(spec: &GenSpec, count: usize) -> String {
    let mut h = format!(
        "boolmin gen family={} vars={} lits={} seed={} count={count} max-retries={}",
        match spec.family {
            Family::RandomPolicy => "random",
            Family::ComparisonQuery => "comparison",
        },
        show(&spec.variables),
        show(&spec.literals),
        spec.seed,
        spec.max_retries,
    );
    match (&spec.family, &spec.comparison) {
        (Family::ComparisonQuery, Some(c)) => {
            let _ = write!(
                h,
                " bits={} clauses={} numeric={} pool={} arity={} or-percent={}",
                c.bit_width,
                show(&c.num_clauses),
                c.numeric_attributes,
                c.pool,
                show(&c.clause_arity),
                c.or_percent
            );
        }
        _ => {
            let _ = write!(h, " clause-size={}", show(&spec.clause_size));
        }
    }
    h
}
