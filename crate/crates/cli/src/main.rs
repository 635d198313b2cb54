//! `cbkit`: ordinal arithmetic, Cantor–Bendixson characteristics, realization
//! of compact countable sets on the rational line, and their verification.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 domain
//! error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cbkit::oracle::{verify_forest, VerifyOptions, VerifyReport, DEFAULT_STAGE_CAP};
use cbkit::realize::{materialize_forest, realize_multi};
use cbkit::space::{census, class_count, CensusBudget};
use cbkit::{
    parse_ordinal, AmbientDescriptor, CbChar, ClusterTree, Ordinal, OrdinalError, ParseMode,
    Rational, RealizationConfig, TreeFile,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "cbkit",
    version,
    about = "Cantor-Bendixson toolkit for compact countable spaces"
)]
struct Cli {
    /// Reject ordinal text that is not already in Cantor normal form
    /// (also enabled by CBKIT_STRICT=1).
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ordinal arithmetic.
    Ord {
        #[command(subcommand)]
        op: OrdOp,
    },
    /// Characteristic calculus.
    Space {
        #[command(subcommand)]
        op: SpaceOp,
    },
    /// Build clusters with characteristic (rank, count) and write them out.
    Realize(RealizeArgs),
    /// Check a tree file (or every .json file in a directory).
    Verify(VerifyArgs),
    /// List the classes with rank below a bound and bounded count.
    Census(CensusArgs),
    /// Number of compact-subset classes of a Polish space:
    /// finite:<n>, countable or uncountable.
    Classcount { descriptor: String },
}

#[derive(Subcommand)]
enum OrdOp {
    /// a + b
    Add { a: String, b: String },
    /// a · b
    Mul { a: String, b: String },
    /// Prints less, equal or greater.
    Cmp { a: String, b: String },
    /// The unique c with b + c = a.
    Sub { b: String, a: String },
    /// n-th element of the fundamental sequence of a limit ordinal.
    Fs { lambda: String, n: u64 },
    /// ω^a
    Pow { a: String },
    /// Canonical form of an expression.
    Parse { a: String },
}

#[derive(Args)]
struct CharArgs {
    #[arg(long)]
    rank: String,
    #[arg(long)]
    count: u64,
}

#[derive(Subcommand)]
enum SpaceOp {
    /// Characteristic of the derived set.
    Derive(CharArgs),
    /// Characteristic of the beta-th derivative.
    Steps {
        #[command(flatten)]
        ch: CharArgs,
        #[arg(long)]
        beta: String,
    },
    /// Characteristic of a disjoint union. Arguments are JSON files or inline
    /// JSON objects.
    Union { a: String, b: String },
    /// Whether two characteristics describe homeomorphic spaces.
    Homeo { a: String, b: String },
}

#[derive(Args)]
struct RealizeArgs {
    #[arg(long)]
    rank: String,
    #[arg(long)]
    count: usize,
    /// Key-value config file (children_per_node, depth, radius_schedule, side_rule).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    children: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// Tree JSON output.
    #[arg(long)]
    out: PathBuf,
    /// Point CSV output; defaults to the tree path with a .csv extension.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Levels walked when dumping points (default: the tree depth).
    #[arg(long)]
    point_depth: Option<usize>,
    /// Children per node when dumping points (default: children_per_node).
    #[arg(long)]
    point_width: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    path: PathBuf,
    /// Also write the report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STAGE_CAP)]
    stage_cap: u32,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    rank_bound: String,
    #[arg(long)]
    count_bound: u64,
    /// Truncate the rank enumeration (required for infinite bounds).
    #[arg(long)]
    max_ranks: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
}

enum Failure {
    Verification,
    Input(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Input(_) => 2,
            Failure::Domain(_) => 3,
        }
    }
}

impl From<OrdinalError> for Failure {
    fn from(e: OrdinalError) -> Self {
        match e {
            OrdinalError::Syntax { .. } | OrdinalError::NotCanonical { .. } => {
                Failure::Input(e.to_string())
            }
            OrdinalError::Undefined { .. } | OrdinalError::NotLimit(_) => {
                Failure::Domain(e.to_string())
            }
        }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    mode: ParseMode,
}

impl Ctx {
    fn ordinal(&self, text: &str) -> Result<Ordinal, Failure> {
        Ok(parse_ordinal(text, self.mode)?)
    }

    fn characteristic(&self, ch: &CharArgs) -> Result<CbChar, Failure> {
        CbChar::new(self.ordinal(&ch.rank)?, ch.count).map_err(|e| Failure::Input(e.to_string()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict_env = std::env::var("CBKIT_STRICT").is_ok_and(|v| v == "1");
    let ctx = Ctx {
        mode: if cli.strict || strict_env {
            ParseMode::Strict
        } else {
            ParseMode::Normalizing
        },
    };
    let outcome = match cli.command {
        Command::Ord { op } => run_ord(&ctx, op),
        Command::Space { op } => run_space(&ctx, op),
        Command::Realize(args) => run_realize(&ctx, args),
        Command::Verify(args) => run_verify(args),
        Command::Census(args) => run_census(&ctx, args),
        Command::Classcount { descriptor } => run_classcount(&descriptor),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Input(msg) | Failure::Domain(msg) => eprintln!("error: {msg}"),
                Failure::Verification => {}
            }
            ExitCode::from(failure.code())
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string(value).expect("output serializes")
    );
}

fn run_ord(ctx: &Ctx, op: OrdOp) -> Outcome {
    let out = match op {
        OrdOp::Add { a, b } => (&ctx.ordinal(&a)? + &ctx.ordinal(&b)?).to_string(),
        OrdOp::Mul { a, b } => (&ctx.ordinal(&a)? * &ctx.ordinal(&b)?).to_string(),
        OrdOp::Cmp { a, b } => match ctx.ordinal(&a)?.cmp(&ctx.ordinal(&b)?) {
            std::cmp::Ordering::Less => "less".to_string(),
            std::cmp::Ordering::Equal => "equal".to_string(),
            std::cmp::Ordering::Greater => "greater".to_string(),
        },
        OrdOp::Sub { b, a } => ctx.ordinal(&a)?.left_sub(&ctx.ordinal(&b)?)?.to_string(),
        OrdOp::Fs { lambda, n } => ctx.ordinal(&lambda)?.fundamental(n)?.to_string(),
        OrdOp::Pow { a } => Ordinal::omega_pow(ctx.ordinal(&a)?).to_string(),
        OrdOp::Parse { a } => ctx.ordinal(&a)?.to_string(),
    };
    println!("{out}");
    Ok(())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_char(arg: &str) -> Result<CbChar, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_input(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{arg}: {e}")))
}

fn run_space(ctx: &Ctx, op: SpaceOp) -> Outcome {
    match op {
        SpaceOp::Derive(ch) => print_json(&ctx.characteristic(&ch)?.derivative()),
        SpaceOp::Steps { ch, beta } => print_json(
            &ctx.characteristic(&ch)?
                .derivative_steps(&ctx.ordinal(&beta)?),
        ),
        SpaceOp::Union { a, b } => print_json(&load_char(&a)?.union(&load_char(&b)?)),
        SpaceOp::Homeo { a, b } => println!("{}", load_char(&a)?.homeomorphic(&load_char(&b)?)),
    }
    Ok(())
}

/// Writes through a sibling temporary file so readers never see partial output.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn run_realize(ctx: &Ctx, args: RealizeArgs) -> Outcome {
    let rank = ctx.ordinal(&args.rank)?;
    if args.count == 0 {
        return Err(Failure::Input("--count must be at least 1".into()));
    }
    let mut cfg = match &args.config {
        Some(path) => RealizationConfig::from_kv_str(&read_input(path)?)
            .map_err(|e| Failure::Input(e.to_string()))?,
        None => RealizationConfig::default(),
    };
    if let Some(m) = args.children {
        cfg.children_per_node = m;
    }
    if let Some(d) = args.depth {
        cfg.depth = d;
    }
    cfg.validate().map_err(|e| Failure::Input(e.to_string()))?;
    let points_path = args
        .points
        .clone()
        .unwrap_or_else(|| args.out.with_extension("csv"));
    if points_path == args.out {
        return Err(Failure::Input("tree and point outputs must differ".into()));
    }
    let forest: Vec<ClusterTree> =
        realize_multi(&rank, args.count, &cfg).map_err(|e| Failure::Domain(e.to_string()))?;
    let cloud = materialize_forest(
        &forest,
        args.point_depth.unwrap_or(cfg.depth).max(1),
        args.point_width.unwrap_or(cfg.children_per_node).max(1),
    );
    write_atomic(
        &args.out,
        &(TreeFile::from_forest(forest).to_json_pretty() + "\n"),
    )?;
    write_atomic(&points_path, &cloud.to_csv())?;
    Ok(())
}

#[derive(Serialize)]
struct FileReport {
    tree: String,
    #[serde(flatten)]
    report: VerifyReport<Rational>,
}

fn verify_file(path: &Path, opts: &VerifyOptions) -> Result<FileReport, Failure> {
    let text = read_input(path)?;
    let forest = TreeFile::parse(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        .into_forest();
    Ok(FileReport {
        tree: path.display().to_string(),
        report: verify_forest(&forest, opts),
    })
}

fn run_verify(args: VerifyArgs) -> Outcome {
    let opts = VerifyOptions {
        stage_cap: args.stage_cap,
        ..VerifyOptions::default()
    };
    let (json, ok) = if args.path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(&args.path)
            .map_err(|e| Failure::Input(format!("{}: {e}", args.path.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        let reports = std::thread::scope(|scope| {
            let handles: Vec<_> = files
                .iter()
                .map(|f| scope.spawn(|| verify_file(f, &opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("verification thread panicked"))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let ok = reports.iter().all(|r| r.report.ok);
        (serde_json::to_string_pretty(&reports), ok)
    } else {
        let report = verify_file(&args.path, &opts)?;
        let ok = report.report.ok;
        (serde_json::to_string_pretty(&report), ok)
    };
    let json = json.expect("reports serialize") + "\n";
    if let Some(out) = &args.report {
        write_atomic(out, &json)?;
    }
    print!("{json}");
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run_census(ctx: &Ctx, args: CensusArgs) -> Outcome {
    let budget = CensusBudget {
        max_ranks: args.max_ranks,
        max_classes: args.cap,
    };
    let classes = census(&ctx.ordinal(&args.rank_bound)?, args.count_bound, &budget)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    print_json(&classes);
    Ok(())
}

fn run_classcount(descriptor: &str) -> Outcome {
    let ambient: AmbientDescriptor = descriptor
        .parse()
        .map_err(|e: cbkit::SpaceError| Failure::Input(e.to_string()))?;
    print_json(&class_count(ambient));
    Ok(())
}
