//! Command-line front end: `solve`, `score`, `gen` and `bench`.
//!
//! Exit codes: 0 on success, 1 for malformed input or flags, 2 when the input
//! is well formed but the request is infeasible (non-tree for `tree-exact`,
//! brute force above its size limit, exhausted work budget).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{gen_greedy_tight, gen_random_graph, gen_random_tree, WeightRange};
use crate::greedy::Start;
use crate::io::{format_value, parse_table, read_instance, read_layout, serialize_instance, serialize_layout, Instance};
use crate::model::{score, Algorithm, Discount, DiscountKind, Graph, SolveReport};
use crate::oracle::{brute_force_opt_with, OracleConfig};
use crate::solve::{solve, SolveOptions};
use crate::tree_exact::DEFAULT_BUDGET;

#[derive(Debug, Parser)]
#[command(name = "exttsp", version, about = "Vertex sequencing for the Extended-TSP objective")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a solver on one instance.
    Solve(SolveArgs),
    /// Score a layout file against an instance.
    Score(ScoreArgs),
    /// Generate an instance.
    Gen(GenArgs),
    /// Run solvers over a directory of instances and write CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DiscountArgs {
    /// Window size; inferred from the table with `table:<file>`.
    #[arg(long)]
    pub k: Option<usize>,
    /// `step`, `linear` or `table:<file>`.
    #[arg(long, default_value = "step")]
    pub discount: String,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Subset size for local search; defaults to min(2k, n).
    #[arg(long)]
    pub ell: Option<usize>,
    /// Relative improvement threshold for local search.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Greedy start vertex, or `auto`.
    #[arg(long, default_value = "auto")]
    pub start: String,
    /// Largest vertex count for brute force.
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    /// Work budget for tree-exact, compared against n^(2k+3).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub algo: Algorithm,
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub discount: DiscountArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the layout to this file.
    #[arg(long)]
    pub layout_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub layout: PathBuf,
    #[command(flatten)]
    pub discount: DiscountArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenType {
    GreedyTight,
    RandomTree,
    RandomGraph,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long = "type", value_enum)]
    pub kind: GenType,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub wmin: u64,
    #[arg(long, default_value_t = 10)]
    pub wmax: u64,
    /// Output file; stdout when absent. Greedy-tight also writes `<out>.meta.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of `*.ext` instance files.
    #[arg(long)]
    pub dir: PathBuf,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',', default_value = "greedy,cycle-cover")]
    pub algos: Vec<Algorithm>,
    #[command(flatten)]
    pub discount: DiscountArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Fill the millis column (makes the output run dependent).
    #[arg(long)]
    pub timing: bool,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_infeasible() {
        2
    } else {
        1
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve(a) => cmd_solve(&a, out).map(|_| 0),
        Command::Score(a) => cmd_score(&a, out).map(|_| 0),
        Command::Gen(a) => cmd_gen(&a, out).map(|_| 0),
        Command::Bench(a) => cmd_bench(&a, out, err),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {}", path.display(), e))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(Error::from)
}

/// Builds the discount named by the flags.
pub fn make_discount(args: &DiscountArgs) -> Result<Discount> {
    if let Some(file) = args.discount.strip_prefix("table:") {
        let path = Path::new(file);
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let table = parse_table(&text)?;
        if let Some(k) = args.k {
            return Discount::new(DiscountKind::Table(table), k);
        }
        return Discount::from_table(table);
    }
    let k = args
        .k
        .ok_or_else(|| Error::InvalidParameter("--k is required unless --discount table:<file> is used".into()))?;
    match args.discount.as_str() {
        "step" => Discount::step(k),
        "linear" => Discount::linear(k),
        other => Err(Error::InvalidDiscount(format!(
            "unknown discount '{}'; use step, linear or table:<file>",
            other
        ))),
    }
}

/// Runs one algorithm with the given settings.
pub fn run_algorithm(algo: Algorithm, g: &Graph, f: &Discount, s: &SolverArgs) -> Result<SolveReport> {
    let start = match s.start.as_str() {
        "auto" => Start::Auto,
        v => Start::Vertex(
            v.parse()
                .map_err(|_| Error::InvalidParameter(format!("--start '{}' is not a vertex", v)))?,
        ),
    };
    let opts = SolveOptions {
        start,
        ell: s.ell,
        delta: s.delta,
        brute_force_limit: s.limit,
        budget: s.budget,
    };
    solve(algo, g, f, &opts)
}

#[derive(Serialize)]
struct JsonReport<'a> {
    algorithm: &'a str,
    value: f64,
    value_text: String,
    layout: Vec<u64>,
    stats: &'a std::collections::BTreeMap<String, u64>,
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let f = make_discount(&a.discount)?;
    let report = run_algorithm(a.algo, &inst.graph, &f, &a.solver)?;
    let layout_text = serialize_layout(&report.layout, &inst);
    if let Some(path) = &a.layout_out {
        fs::write(path, &layout_text).map_err(|e| io_err(path, e))?;
    }
    let text = match a.format {
        Format::Text => {
            let mut s = format!(
                "algorithm {}\nvalue {}\nlayout {}",
                report.algorithm,
                format_value(report.value),
                layout_text
            );
            for (name, v) in &report.stats {
                s.push_str(&format!("stat {} {}\n", name, v));
            }
            s
        }
        Format::Json => {
            let json = JsonReport {
                algorithm: report.algorithm.name(),
                value: report.value,
                value_text: format_value(report.value),
                layout: report.layout.order().iter().map(|&v| inst.ids[v]).collect(),
                stats: &report.stats,
            };
            serde_json::to_string_pretty(&json).map_err(|e| Error::Internal(e.to_string()))? + "\n"
        }
    };
    write_out(out, &text)
}

fn cmd_score(a: &ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let layout = read_layout(&a.layout, &inst)?;
    let f = make_discount(&a.discount)?;
    let value = score(&inst.graph, &layout, &f)?;
    write_out(out, &format!("{}\n", format_value(value)))
}

fn required<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{} is required for --type {}", flag, kind)))
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let weights = WeightRange::new(a.wmin, a.wmax)?;
    let (inst, sidecar) = match a.kind {
        GenType::GreedyTight => {
            let k = required(a.k, "k", "greedy-tight")?;
            let ell = required(a.ell, "ell", "greedy-tight")?;
            let t = gen_greedy_tight(k, ell)?;
            let list = |xs: &[usize]| xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
            let inst = Instance::new(t.graph.clone())
                .with_comment("generator greedy-tight")
                .with_comment(format!("k {}", t.k))
                .with_comment(format!("ell {}", t.ell))
                .with_comment(format!("opt {}", t.opt_value))
                .with_comment(format!("greedy {}", t.greedy_value))
                .with_comment(format!("start {}", t.adversarial_start))
                .with_comment(format!("optimal-layout {}", list(&t.optimal_order)))
                .with_comment(format!("preference {}", list(&t.adversarial_preference)));
            let meta = serde_json::to_string_pretty(&t).map_err(|e| Error::Internal(e.to_string()))? + "\n";
            (inst, Some(meta))
        }
        GenType::RandomTree => {
            let n = required(a.n, "n", "random-tree")?;
            let t = gen_random_tree(n, a.seed, weights)?;
            let inst = Instance::new(t.graph().clone())
                .with_comment("generator random-tree")
                .with_comment(format!("seed {}", a.seed))
                .with_comment(format!("weights {} {}", a.wmin, a.wmax));
            (inst, None)
        }
        GenType::RandomGraph => {
            let n = required(a.n, "n", "random-graph")?;
            let m = required(a.m, "m", "random-graph")?;
            let g = gen_random_graph(n, m, a.seed, weights)?;
            let inst = Instance::new(g)
                .with_comment("generator random-graph")
                .with_comment(format!("seed {}", a.seed))
                .with_comment(format!("weights {} {}", a.wmin, a.wmax));
            (inst, None)
        }
    };
    let text = serialize_instance(&inst);
    match &a.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| io_err(path, e))?;
            if let Some(meta) = sidecar {
                let mut side = path.clone().into_os_string();
                side.push(".meta.json");
                let side = PathBuf::from(side);
                fs::write(&side, meta).map_err(|e| io_err(&side, e))?;
            }
            Ok(())
        }
        None => write_out(out, &text),
    }
}

const BENCH_HEADER: [&str; 9] = ["instance", "algo", "k", "discount", "value", "opt", "ratio", "millis", "seed"];

/// Instance files of a bench directory, sorted by name.
pub fn bench_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "ext") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn bench_instance(path: &Path, algos: &[Algorithm], f: &Discount, a: &BenchArgs) -> Vec<std::result::Result<[String; 9], String>> {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let base = |algo: Algorithm| (name.clone(), algo.name().to_string());
    let inst = match read_instance(path) {
        Ok(inst) => inst,
        Err(e) => {
            return algos
                .iter()
                .map(|&algo| {
                    let (n, al) = base(algo);
                    Err(format!("{},{},{}", n, al, e))
                })
                .collect()
        }
    };
    let g = &inst.graph;
    let opt = if g.n() <= a.solver.limit {
        let cfg = OracleConfig {
            max_vertices: a.solver.limit,
            ..OracleConfig::default()
        };
        brute_force_opt_with(g, f, &cfg).ok().map(|(_, v)| v)
    } else {
        None
    };
    let seed = inst.meta("seed").unwrap_or("").to_string();
    algos
        .iter()
        .map(|&algo| {
            let started = Instant::now();
            let (n, al) = base(algo);
            match run_algorithm(algo, g, f, &a.solver) {
                Ok(report) => {
                    let millis = started.elapsed().as_millis();
                    let ratio = opt.map(|o| if o > 0.0 { report.value / o } else { 1.0 });
                    Ok([
                        n,
                        al,
                        f.k().to_string(),
                        a.discount.discount.clone(),
                        format_value(report.value),
                        opt.map(format_value).unwrap_or_default(),
                        ratio.map(format_value).unwrap_or_default(),
                        if a.timing { millis.to_string() } else { String::new() },
                        seed.clone(),
                    ])
                }
                Err(e) => Err(format!("{},{},{}", n, al, e)),
            }
        })
        .collect()
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if a.parallel == 0 {
        return Err(Error::InvalidParameter("--parallel must be at least 1".into()));
    }
    let f = make_discount(&a.discount)?;
    let files = bench_files(&a.dir)?;
    let mut algos = a.algos.clone();
    algos.sort_by_key(|a| a.name());
    algos.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.parallel)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let results: Vec<_> = pool.install(|| {
        files
            .par_iter()
            .map(|p| bench_instance(p, &algos, &f, a))
            .collect::<Vec<_>>()
    });

    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    writer.write_record(BENCH_HEADER).map_err(csv_err)?;
    let mut failed = 0;
    for (path, rows) in files.iter().zip(results) {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        for (algo, row) in algos.iter().zip(rows) {
            match row {
                Ok(fields) => writer.write_record(&fields).map_err(csv_err)?,
                Err(msg) => {
                    failed += 1;
                    let _ = writeln!(err, "error: {}", msg);
                    writer
                        .write_record([
                            name.as_str(),
                            algo.name(),
                            &f.k().to_string(),
                            &a.discount.discount,
                            "ERROR",
                            "",
                            "",
                            "",
                            "",
                        ])
                        .map_err(csv_err)?;
                }
            }
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    match &a.csv {
        Some(path) => fs::write(path, bytes).map_err(|e| io_err(path, e))?,
        None => out.write_all(&bytes)?,
    }
    Ok(if failed > 0 { 1 } else { 0 })
}
