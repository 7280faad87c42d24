//! `misminer` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 verification
//! mismatch.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use misminer::dataset::parse_fraction;
use misminer::oracle::{
    normalize_itemsets, normalize_sets, normalize_tuples, oracle_filter, oracle_q0, oracle_q3,
    sort_sets, OracleLimit,
};
use misminer::queries::build_model_with_offset;
use misminer::synth::{random_instance, Lcg};
use misminer::{
    assign_mis, build_model, parse_fimi, read_mis, search, serialize_fimi, solve_all, write_mis,
    Heuristic, MiningError, MisMin, MisProfile, Q3Mode, QueryKind, QuerySpec, Rounding,
    SearchConfig, TransactionDataset,
};

#[derive(Parser)]
#[command(
    name = "misminer",
    version,
    about = "Itemset mining under multiple minimum supports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dataset characteristics.
    Stats { dataset: PathBuf },
    /// Derive a MIS profile from item frequencies and print it.
    GenMis {
        dataset: PathBuf,
        #[command(flatten)]
        mis: MisArgs,
    },
    /// Enumerate the solutions of a query.
    Mine(MineArgs),
    /// Compare the engine with brute-force enumeration on random instances.
    Verify(VerifyArgs),
    /// Measure propagation cost on synthetic datasets.
    Bench(BenchArgs),
}

#[derive(Args)]
struct MisArgs {
    /// Scale factor applied to item frequencies, in [0, 1].
    #[arg(long, default_value = "0")]
    beta: String,
    /// Lowest support any item may get (a count, or a fraction with --relative).
    #[arg(long)]
    mis_min: Option<String>,
    /// Read --mis-min as a fraction of the transaction count.
    #[arg(long)]
    relative: bool,
    /// ceil, floor or half-up.
    #[arg(long, default_value = "ceil")]
    rounding: String,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long, default_value = "q0")]
    query: String,
    /// Largest allowed support distance between two items.
    #[arg(long)]
    ub: Option<u64>,
    /// Minimum itemset size.
    #[arg(long)]
    card: Option<usize>,
    /// Number of patterns (q3).
    #[arg(short)]
    k: Option<usize>,
    /// disjoint or distinct (q3).
    #[arg(long)]
    mode: Option<String>,
    /// minmis or lex.
    #[arg(long, default_value = "minmis")]
    order: String,
    /// Report every permutation of disjoint q3 pattern sets.
    #[arg(long)]
    no_symbreak: bool,
}

#[derive(Args)]
struct MineArgs {
    dataset: PathBuf,
    /// MIS file with one `item support` pair per line.
    #[arg(long, conflicts_with_all = ["beta", "mis_min", "relative"])]
    mis: Option<PathBuf>,
    #[command(flatten)]
    assign: MisArgs,
    #[command(flatten)]
    query: QueryArgs,
    /// Only print the report.
    #[arg(long)]
    count_only: bool,
    /// Write solutions here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    items: usize,
    #[arg(long, default_value_t = 30)]
    transactions: usize,
    /// Probability that a cell is present.
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, hide = true)]
    inject_off_by_one: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Run the geometric sweep 1x, 2x, 4x in both n and m.
    #[arg(long)]
    scale_sweep: bool,
    #[arg(long, default_value_t = 40)]
    items: usize,
    #[arg(long, default_value_t = 2500)]
    transactions: usize,
    /// Node cap for the Q0 search at each point.
    #[arg(long, default_value_t = 2000)]
    max_nodes: u64,
    /// Timing budget per point, in milliseconds.
    #[arg(long, default_value_t = 200)]
    budget_ms: u64,
}

enum Failure {
    Usage(String),
    Input(String),
    Mismatch,
}

impl From<MiningError> for Failure {
    fn from(e: MiningError) -> Self {
        match e {
            MiningError::InvalidArgument(_)
            | MiningError::InvalidQuery(_)
            | MiningError::GuardExceeded { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Stats { dataset } => cmd_stats(&dataset),
        Command::GenMis { dataset, mis } => cmd_gen_mis(&dataset, &mis),
        Command::Mine(args) => cmd_mine(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch) => ExitCode::from(3),
    }
}

fn load_dataset(path: &Path) -> Result<TransactionDataset, Failure> {
    let file = File::open(path)
        .map_err(|e| Failure::Input(format!("cannot open {}: {e}", path.display())))?;
    parse_fimi(BufReader::new(file)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_stats(path: &Path) -> CmdResult {
    let stats = load_dataset(path)?.stats();
    println!("{stats}");
    println!("avg transaction size {:.2}", stats.avg_size());
    Ok(())
}

fn profile_from_args(ds: &TransactionDataset, args: &MisArgs) -> Result<MisProfile, Failure> {
    let beta = parse_fraction(&args.beta).map_err(|_| {
        Failure::Usage(format!(
            "--beta expects a number in [0, 1], got `{}`",
            args.beta
        ))
    })?;
    let rounding: Rounding = args.rounding.parse()?;
    let Some(raw) = &args.mis_min else {
        return Err(Failure::Usage("--mis-min is required".into()));
    };
    let mis_min = if args.relative {
        MisMin::Relative(parse_fraction(raw)?)
    } else {
        MisMin::Absolute(raw.parse().map_err(|_| {
            Failure::Usage(format!(
                "--mis-min expects a transaction count, got `{raw}`"
            ))
        })?)
    };
    Ok(assign_mis(ds, beta, mis_min, rounding)?)
}

fn cmd_gen_mis(path: &Path, args: &MisArgs) -> CmdResult {
    let ds = load_dataset(path)?;
    let profile = profile_from_args(&ds, args)?;
    let stdout = io::stdout();
    write_mis(stdout.lock(), &ds, &profile).map_err(|e| Failure::Input(e.to_string()))
}

fn query_spec(args: &QueryArgs) -> Result<QuerySpec, Failure> {
    let kind: QueryKind = args.query.parse()?;
    let heuristic: Heuristic = args.order.parse()?;
    let reject = |flag: &str| Err(Failure::Usage(format!("{flag} does not apply to {kind}")));
    if kind == QueryKind::Q0 && args.ub.is_some() {
        return reject("--ub");
    }
    if matches!(kind, QueryKind::Q0 | QueryKind::Q1) && args.card.is_some() {
        return reject("--card");
    }
    if kind != QueryKind::Q3 {
        if args.k.is_some() {
            return reject("-k");
        }
        if args.mode.is_some() {
            return reject("--mode");
        }
        if args.no_symbreak {
            return reject("--no-symbreak");
        }
    }
    let mode: Q3Mode = match &args.mode {
        Some(m) => m.parse()?,
        None => Q3Mode::default(),
    };
    if args.no_symbreak && mode == Q3Mode::Distinct {
        return reject("--no-symbreak with --mode distinct");
    }
    let spec = QuerySpec {
        kind,
        ub: args.ub,
        card: args.card,
        k: args.k,
        mode,
        symmetry_breaking: !args.no_symbreak,
        heuristic,
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_mine(args: &MineArgs) -> CmdResult {
    let spec = query_spec(&args.query)?;
    if args.mis.is_none() && args.assign.mis_min.is_none() {
        return Err(Failure::Usage("give either --mis FILE or --mis-min".into()));
    }
    let ds = load_dataset(&args.dataset)?;
    let profile = match &args.mis {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| Failure::Input(format!("cannot open {}: {e}", path.display())))?;
            read_mis(BufReader::new(file), &ds)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
        None => profile_from_args(&ds, &args.assign)?,
    };
    let model = build_model(&ds, &profile, &spec)?;

    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Failure::Input(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut write_error = None;
    let stats = search(&model, SearchConfig::default(), |a| {
        if args.count_only {
            return ControlFlow::Continue(());
        }
        match writeln!(out, "{}", a.to_solution()) {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                write_error = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = write_error.or_else(|| out.flush().err()) {
        return Err(Failure::Input(format!("cannot write solutions: {e}")));
    }
    let target = args
        .out
        .as_ref()
        .map_or("stdout".into(), |p| p.display().to_string());
    eprintln!("{spec} -> {target}");
    eprintln!("{stats}");
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let spec = query_spec(&args.query)?;
    let limit = OracleLimit::default();
    let guard = if spec.kind == QueryKind::Q3 {
        limit.max_items_q3
    } else {
        limit.max_items
    };
    if args.items > guard {
        return Err(Failure::Usage(format!(
            "--items {} exceeds the brute-force limit of {guard} for {}",
            args.items, spec.kind
        )));
    }
    if spec.kind == QueryKind::Q3 && spec.k.unwrap_or(0) > limit.max_k {
        return Err(Failure::Usage(format!(
            "-k exceeds the brute-force limit of {}",
            limit.max_k
        )));
    }
    if args.items == 0 || args.transactions == 0 {
        return Err(Failure::Usage(
            "--items and --transactions must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&args.density) {
        return Err(Failure::Usage("--density must lie in [0, 1]".into()));
    }
    let offset = u64::from(args.inject_off_by_one);

    let mut rng = Lcg::new(args.seed);
    for trial in 0..args.trials {
        let (ds, profile) = random_instance(&mut rng, args.items, args.transactions, args.density);
        let model = build_model_with_offset(&ds, &profile, &spec, offset)?;
        let (sols, _) = solve_all(&model);
        let (got, want) = if spec.kind == QueryKind::Q3 {
            let ordered = spec.mode == Q3Mode::Disjoint && !spec.symmetry_breaking;
            let want = oracle_q3(
                &ds,
                &profile,
                spec.k.unwrap_or(2),
                spec.ub.unwrap_or(u64::MAX),
                spec.card.unwrap_or(0),
                spec.mode,
                ordered,
                limit,
            )?;
            let (got, want) = if ordered {
                (normalize_tuples(&sols), want)
            } else {
                (normalize_sets(&sols), sort_sets(want))
            };
            (render_sets(&got), render_sets(&want))
        } else {
            let base = oracle_q0(&ds, &profile, limit)?;
            let want = oracle_filter(&ds, &base, &profile, spec.ub, spec.card);
            (render(&normalize_itemsets(&sols)), render(&want))
        };
        if got != want {
            println!("trial {trial}: MISMATCH for {spec}");
            print_counterexample(&ds, &profile, &got, &want);
            return Err(Failure::Mismatch);
        }
    }
    println!("{} trials, {spec}: all match", args.trials);
    Ok(())
}

fn render(sets: &[Vec<u64>]) -> Vec<String> {
    sets.iter()
        .map(|s| s.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
        .collect()
}

fn render_sets(tuples: &[Vec<Vec<u64>>]) -> Vec<String> {
    let mut rows: Vec<String> = tuples.iter().map(|t| render(t).join(" | ")).collect();
    rows.sort();
    rows
}

fn print_counterexample(
    ds: &TransactionDataset,
    profile: &MisProfile,
    got: &[String],
    want: &[String],
) {
    println!("dataset:");
    print!("{}", serialize_fimi(ds));
    println!("mis:");
    let _ = write_mis(io::stdout().lock(), ds, profile);
    let missing: Vec<&String> = want.iter().filter(|w| !got.contains(w)).collect();
    let extra: Vec<&String> = got.iter().filter(|g| !want.contains(g)).collect();
    println!("engine {} solutions, oracle {}", got.len(), want.len());
    for m in missing.iter().take(10) {
        println!("missing: {m}");
    }
    for e in extra.iter().take(10) {
        println!("extra: {e}");
    }
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    if args.items == 0 || args.transactions == 0 {
        return Err(Failure::Usage(
            "--items and --transactions must be positive".into(),
        ));
    }
    let budget = Duration::from_millis(args.budget_ms.max(1));
    let factors: &[usize] = if args.scale_sweep { &[1, 2, 4] } else { &[1] };
    println!(
        "{:>6} {:>8} {:>12} {:>12} {:>8} {:>14}",
        "n", "m", "n*m", "root_ns", "nodes", "per_node_ns"
    );
    let mut first: Option<(f64, f64)> = None;
    for &f in factors {
        let p = misminer::scaling::measure_point(
            args.items * f,
            args.transactions * f,
            42,
            args.max_nodes,
            budget,
        );
        let nm = (p.n * p.m) as f64;
        println!(
            "{:>6} {:>8} {:>12} {:>12.0} {:>8} {:>14.0}",
            p.n,
            p.m,
            p.n * p.m,
            p.root_ns,
            p.nodes,
            p.per_node_ns
        );
        match first {
            None => first = Some((nm, p.root_ns)),
            Some((nm0, t0)) => eprintln!("n*m x{:.1}: root cost x{:.2}", nm / nm0, p.root_ns / t0),
        }
    }
    Ok(())
}
