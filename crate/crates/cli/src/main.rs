use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dpcolor::audit::{
    audit_mechanism, make_neighbor_pair, AuditConfig, AuditReport, EdgeRevealingOracle, MechanismId, Projection,
    DEFAULT_MIN_COUNT,
};
use dpcolor::coloring::{
    color_control, color_unctr, greedy_coloring, random_coloring, read_coloring, streams, write_coloring,
    ColoringHeader, PrivatePalette,
};
use dpcolor::graph::{degeneracy_ordering, dump_edge_list, gen_barabasi_albert, gen_erdos_renyi, load_edge_list};
use dpcolor::harness::{run_grid, summarize, write_summary, Algorithm, ExperimentConfig, COMPOSITION_NOTICE};
use dpcolor::metrics::{verify_coloring, BoundReport};
use dpcolor::{AlgoParams, Coloring, Graph, IdRemap, OrderingMode, PrivacyBudget, RandomSource};

#[derive(Parser)]
#[command(name = "dpcolor", version, about = "Edge-private defective graph coloring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a synthetic edge list.
    Gen(GenArgs),
    /// Color one graph and report its defects.
    Color(ColorArgs),
    /// Run an experiment grid and write one CSV row per trial.
    Bench(BenchArgs),
    /// Aggregate a benchmark CSV per (dataset, algorithm, epsilon).
    Summarize(SummarizeArgs),
    /// Estimate the empirical privacy loss on a neighboring graph pair.
    Audit(AuditArgs),
    /// Print the theoretical defect bounds.
    Bounds(BoundsArgs),
    /// Check a coloring file against a graph.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Er,
    Ba,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    /// Edge probability (er).
    #[arg(long, required_if_eq("model", "er"))]
    p: Option<f64>,
    /// Edges per new vertex (ba).
    #[arg(long, required_if_eq("model", "ba"))]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ColorArgs {
    /// Edge list (`u v` per line, `#` comments).
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "unctr")]
    algorithm: Algorithm,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "input")]
    ordering: OrderingMode,
    #[arg(long, default_value_t = 1.0)]
    threshold_scale: f64,
    /// Coloring file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Key-value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset spec, e.g. `er:n=2000,p=0.05,seed=1` or `file:path=g.txt`. Repeatable.
    #[arg(long = "dataset")]
    datasets: Vec<String>,
    /// Comma-separated subset of unctr,control,crsv,greedy.
    #[arg(long)]
    algorithms: Option<String>,
    /// Comma-separated epsilon grid.
    #[arg(long)]
    epsilons: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ordering: Option<String>,
    #[arg(long)]
    threshold_scale_real: Option<String>,
    #[arg(long)]
    threshold_scale_synthetic: Option<String>,
    /// Write 0 in runtime_ms so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// CSV path, appended to when it exists; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditTarget {
    Unctr,
    Control,
    Oracle,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, value_enum, default_value = "unctr")]
    mechanism: AuditTarget,
    /// Base graph; defaults to the 4-vertex graph {0-1, 2-3}.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Edge absent from the base graph and present in the variant, as `u,v`
    /// in the graph's own ids.
    #[arg(long, default_value = "1,2")]
    toggle: String,
    #[arg(long, default_value_t = 3)]
    palette: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 200_000)]
    trials: usize,
    #[arg(long, default_value = "full")]
    projection: Projection,
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    threshold_scale: f64,
    /// Per-outcome counts as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: f64,
    /// Maximum degree.
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    epsilon: f64,
    /// Palette size.
    #[arg(long)]
    palette: f64,
    #[arg(long)]
    degeneracy: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    coloring: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => gen(args)?,
        Command::Color(args) => color(args)?,
        Command::Bench(args) => bench(args)?,
        Command::Summarize(args) => summarize_cmd(args)?,
        Command::Audit(args) => audit(args)?,
        Command::Bounds(args) => println!(
            "{}",
            BoundReport::new(args.n, args.delta, args.epsilon, args.palette, args.degeneracy)?
        ),
        Command::Verify(args) => return verify(args),
    }
    Ok(ExitCode::SUCCESS)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(path: &Path) -> Result<(Graph, IdRemap)> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_edge_list(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn gen(args: GenArgs) -> Result<()> {
    let g = match args.model {
        Model::Er => gen_erdos_renyi(args.n, args.p.context("--p is required")?, args.seed)?,
        Model::Ba => gen_barabasi_albert(args.n, args.m.context("--m is required")?, args.seed)?,
    };
    dump_edge_list(&g, output(args.output.as_deref())?)?;
    Ok(())
}

fn color(args: ColorArgs) -> Result<()> {
    let (g, remap) = load_graph(&args.graph)?;
    let eps = PrivacyBudget::new(args.epsilon)?;
    let params = AlgoParams::new(eps, args.seed)
        .with_ordering(args.ordering)
        .with_threshold_scale(args.threshold_scale);
    let (coloring, recolored): (Coloring, Option<usize>) = match args.algorithm {
        Algorithm::Unctr => (color_unctr(&g, &params)?.coloring, None),
        Algorithm::Control => {
            let out = color_control(&g, &params)?;
            let count = out.recolored.len();
            (out.coloring, Some(count))
        }
        Algorithm::Crsv | Algorithm::Greedy => {
            // Same palette and initial draw as the private mechanisms.
            let src = RandomSource::new(args.seed);
            let palette = PrivatePalette::draw(&g, eps, src.derive(streams::NOISY_DELTA));
            let c = if args.algorithm == Algorithm::Crsv {
                random_coloring(&g, palette.size, &mut src.derive(streams::INITIAL).rng())?
            } else {
                greedy_coloring(&g, palette.size)?
            };
            (c, None)
        }
    };
    let report = verify_coloring(&g, &coloring).map_err(|v| anyhow::anyhow!("invalid coloring: {v:?}"))?;
    let header = ColoringHeader {
        n: g.n(),
        palette: coloring.palette(),
        algorithm: args.algorithm.to_string(),
        epsilon: args.epsilon,
        seed: args.seed,
    };
    write_coloring(output(args.output.as_deref())?, &header, &coloring, &remap)?;
    eprintln!(
        "n={} m={} max_degree={} palette={} avg_defect={:.4} max_defect={}",
        g.n(),
        g.m(),
        g.max_degree(),
        coloring.palette(),
        report.average,
        report.maximum
    );
    if let Some(count) = recolored {
        eprintln!("recolored={count}");
    }
    Ok(())
}

fn bench_config(args: &BenchArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            ExperimentConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    for d in &args.datasets {
        cfg.apply("dataset", d)?;
    }
    let overrides = [
        ("algorithms", args.algorithms.clone()),
        ("epsilons", args.epsilons.clone()),
        ("trials", args.trials.map(|t| t.to_string())),
        ("seed", args.seed.map(|s| s.to_string())),
        ("ordering", args.ordering.clone()),
        ("threshold_scale_real", args.threshold_scale_real.clone()),
        ("threshold_scale_synthetic", args.threshold_scale_synthetic.clone()),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            cfg.apply(key, &value).with_context(|| format!("--{}", key.replace('_', "-")))?;
        }
    }
    if args.no_timing {
        cfg.timing = false;
    }
    if let Some(out) = &args.output {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn bench(args: BenchArgs) -> Result<()> {
    let cfg = bench_config(&args)?;
    eprintln!("{COMPOSITION_NOTICE}");
    let outcome = match &cfg.output {
        Some(path) => {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("cannot open {}", path.display()))?;
            let fresh = file.metadata()?.len() == 0;
            run_grid(&cfg, BufWriter::new(file), fresh)?
        }
        None => run_grid(&cfg, BufWriter::new(io::stdout().lock()), true)?,
    };
    for (dataset, message) in &outcome.errors {
        eprintln!("warning: dataset `{dataset}` skipped: {message}");
    }
    eprintln!("wrote {} rows", outcome.rows);
    Ok(())
}

fn summarize_cmd(args: SummarizeArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("cannot open {}", args.input.display()))?;
    let rows = summarize(BufReader::new(file)).with_context(|| format!("summarizing {}", args.input.display()))?;
    write_summary(&rows, output(args.output.as_deref())?)?;
    Ok(())
}

fn parse_pair(text: &str) -> Result<(u64, u64)> {
    let Some((u, v)) = text.split_once(',') else {
        bail!("expected `u,v`, found `{text}`");
    };
    Ok((u.trim().parse()?, v.trim().parse()?))
}

fn audit(args: AuditArgs) -> Result<()> {
    let (u, v) = parse_pair(&args.toggle).context("--toggle")?;
    let (n, edges, toggled) = match &args.graph {
        Some(path) => {
            let (g, remap) = load_graph(path)?;
            let dense = |id: u64| {
                remap
                    .dense(id)
                    .with_context(|| format!("vertex {id} does not appear in {}", path.display()))
            };
            (g.n(), g.edges().collect::<Vec<_>>(), (dense(u)?, dense(v)?))
        }
        None => (4, vec![(0, 1), (2, 3)], (u as usize, v as usize)),
    };
    let pair = make_neighbor_pair(n, &edges, toggled)?;
    let mut cfg = AuditConfig::new(args.palette, PrivacyBudget::new(args.epsilon)?, args.trials);
    cfg.projection = args.projection;
    cfg.min_count = args.min_count;
    cfg.seed = args.seed;
    cfg.threshold_scale = args.threshold_scale;
    let report: AuditReport = match args.mechanism {
        AuditTarget::Unctr => audit_mechanism(&MechanismId::Unctr, &pair, &cfg)?,
        AuditTarget::Control => audit_mechanism(&MechanismId::Control, &pair, &cfg)?,
        AuditTarget::Oracle => audit_mechanism(&EdgeRevealingOracle { edge: toggled }, &pair, &cfg)?,
    };
    print!("{report}");
    if let Some(path) = &args.csv {
        report.write_csv(output(Some(path))?)?;
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let (g, remap) = load_graph(&args.graph)?;
    let file = File::open(&args.coloring).with_context(|| format!("cannot open {}", args.coloring.display()))?;
    let parsed = read_coloring(BufReader::new(file)).with_context(|| format!("reading {}", args.coloring.display()))?;
    let coloring = parsed.to_coloring(&remap)?;
    match verify_coloring(&g, &coloring) {
        Ok(report) => {
            println!(
                "valid: palette={} avg_defect={:.4} max_defect={} monochromatic_edges={}",
                coloring.palette(),
                report.average,
                report.maximum,
                report.monochromatic_edges()
            );
            let d = degeneracy_ordering(&g).d;
            println!("degeneracy={d}");
            Ok(ExitCode::SUCCESS)
        }
        Err(violations) => {
            for v in &violations {
                println!("violation: {v}");
            }
            Ok(ExitCode::from(2))
        }
    }
}
