use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use qap_lon::experiment::{run_batch, write_report_files, BatchConfig, CellStatus};
use qap_lon::format::{read_instance, write_atomic, write_instance};
use qap_lon::generate::{self, DistanceMode, GeneratorConfig, GeneratorParams};
use qap_lon::landscape::{map_basins, BasinMap};
use qap_lon::metrics::{compute_report, MetricsReport};
use qap_lon::{LocalOptimaNetwork, QapInstance};

/// Local optima networks of small QAP instances.
#[derive(Parser)]
#[command(name = "qap-lon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Generate(GenerateArgs),
    /// Map basins, build the LON and compute metrics for one instance.
    Analyze(AnalyzeArgs),
    /// Run many seeded instances per (class, dimension) and aggregate.
    Batch(BatchArgs),
    /// Convert cached artifacts (owner dumps, metrics JSON) to other formats.
    Export(ExportArgs),
}

#[derive(Args)]
struct GeneratorFlags {
    /// Maximum distance (uniform class): disc radius or integer bound.
    #[arg(long)]
    d_max: Option<f64>,
    /// Maximum flow (uniform class).
    #[arg(long)]
    f_max: Option<i64>,
    /// Radius of the disc holding cluster centers (real-like class, M).
    #[arg(long)]
    outer_radius: Option<f64>,
    /// Maximum points per cluster (real-like class, K).
    #[arg(long)]
    max_cluster: Option<u32>,
    /// Cluster radius (real-like class, m).
    #[arg(long)]
    cluster_radius: Option<f64>,
    /// Lower flow exponent (real-like class, A).
    #[arg(long, allow_hyphen_values = true)]
    flow_exp_low: Option<f64>,
    /// Upper flow exponent (real-like class, B).
    #[arg(long, allow_hyphen_values = true)]
    flow_exp_high: Option<f64>,
    /// Distance construction for the uniform class: euclidean-points or uniform-integers.
    #[arg(long)]
    distance_mode: Option<DistanceMode>,
}

impl GeneratorFlags {
    fn apply(&self, params: &mut GeneratorParams) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    params.$field = v;
                }
            )*};
        }
        set!(d_max, f_max, outer_radius, max_cluster, cluster_radius, flow_exp_low, flow_exp_high, distance_mode);
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Instance class (uniform, real-like).
    #[arg(long)]
    class: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    params: GeneratorFlags,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Instance file.
    #[arg(short, long)]
    input: PathBuf,
    /// Metrics JSON output; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the LON edge list (CSV) here.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Write the LON as GraphML here.
    #[arg(long)]
    graphml: Option<PathBuf>,
    /// Directory for the strength/disparity degree tables.
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Binary owner dump: reused when present, written otherwise.
    #[arg(long)]
    owner_cache: Option<PathBuf>,
    /// Relative cost band for the near-optimal basin mass.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
}

#[derive(Args)]
struct BatchArgs {
    /// TOML config (`key = value` lines); flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated dimensions, e.g. 5,6,7,8.
    #[arg(long, value_delimiter = ',')]
    dimensions: Option<Vec<usize>>,
    #[arg(long)]
    instances_per_cell: Option<usize>,
    /// Comma-separated class names.
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Also persist every LON edge list.
    #[arg(long)]
    write_edges: bool,
    #[command(flatten)]
    params: GeneratorFlags,
}

#[derive(Args)]
struct ExportArgs {
    /// Instance file (needed for LON and owner-dump conversions).
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Owner dump to read instead of re-mapping the basins.
    #[arg(long)]
    owner_cache: Option<PathBuf>,
    /// Write the owner dump here.
    #[arg(long)]
    owner_dump: Option<PathBuf>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    graphml: Option<PathBuf>,
    /// Metrics JSON files to convert into one CSV.
    #[arg(long, num_args = 1..)]
    metrics_json: Vec<PathBuf>,
    /// CSV output for --metrics-json.
    #[arg(long)]
    metrics_csv: Option<PathBuf>,
}

fn metrics_help() -> String {
    let mut s = String::from(
        "Metrics CSV columns (also the metrics JSON key order; empty = undefined):\n",
    );
    for (i, col) in MetricsReport::CSV_COLUMNS.iter().enumerate() {
        s.push_str(&format!("  {:>2}. {col}\n", i + 1));
    }
    s.push_str(
        "\nAggregate CSV columns: schema_version,class,n,metric,mean,ci_low,ci_high,sample_count,undefined_count\n\
         Batch layout: <output_dir>/<class>/n<NN>/i<II>/{instance.dat,metrics.json,...}, \
         <output_dir>/metrics.csv, <output_dir>/aggregate.csv",
    );
    s
}

fn main() -> ExitCode {
    let help = metrics_help();
    let cmd = Cli::command()
        .after_long_help(help.clone())
        .mut_subcommand("analyze", |c| c.after_long_help(help.clone()))
        .mut_subcommand("batch", |c| c.after_long_help(help.clone()))
        .mut_subcommand("export", |c| c.after_long_help(help.clone()));
    let cli = match Cli::from_arg_matches(&cmd.get_matches()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Batch(args) => cmd_batch(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let mut params = GeneratorParams::default();
    args.params.apply(&mut params);
    let cfg = GeneratorConfig::new(args.class, args.n, args.seed).with_params(params);
    let inst = generate::generate(&cfg)?;
    match &args.output {
        Some(path) => write_instance(path, &inst)?,
        None => emit(None, &qap_lon::format::serialize_instance(&inst))?,
    }
    Ok(())
}

fn load_or_map(inst: &QapInstance, cache: Option<&Path>, write_cache: bool) -> Result<BasinMap> {
    if let Some(path) = cache.filter(|p| p.exists()) {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        return BasinMap::read_owner_dump(inst, BufReader::new(file))
            .with_context(|| format!("reading owner dump {}", path.display()));
    }
    let bm = map_basins(inst)?;
    if let (Some(path), true) = (cache, write_cache) {
        write_owner_dump(&bm, path)?;
    }
    Ok(bm)
}

fn write_owner_dump(bm: &BasinMap, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    bm.write_owner_dump(BufWriter::new(&mut buf))?;
    write_atomic(path, &buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_lon_exports(lon: &LocalOptimaNetwork, edges: Option<&Path>, graphml: Option<&Path>) -> Result<()> {
    if let Some(path) = edges {
        write_atomic(path, lon.export_edges().as_bytes())?;
    }
    if let Some(path) = graphml {
        write_atomic(path, lon.export_graphml().as_bytes())?;
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let inst = read_instance(&args.input)?;
    let bm = load_or_map(&inst, args.owner_cache.as_deref(), true)?;
    let lon = LocalOptimaNetwork::build(&inst, &bm)?;
    let report = compute_report(&inst, &bm, &lon, args.eps);
    write_lon_exports(&lon, args.edges.as_deref(), args.graphml.as_deref())?;
    if let Some(dir) = &args.tables {
        write_report_files(dir, &report)?;
    }
    emit(args.output.as_deref(), &report.to_json())
}

fn cmd_batch(args: BatchArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            BatchConfig::from_toml_str(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => BatchConfig::default(),
    };
    if let Some(v) = args.dimensions {
        cfg.dimensions = v;
    }
    if let Some(v) = args.instances_per_cell {
        cfg.instances_per_cell = v;
    }
    if let Some(v) = args.classes {
        cfg.classes = v;
    }
    if let Some(v) = args.base_seed {
        cfg.base_seed = v;
    }
    if let Some(v) = args.output_dir {
        cfg.output_dir = v;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    cfg.write_edges |= args.write_edges;
    args.params.apply(&mut cfg.params);

    let outcome = run_batch(&cfg, generate::builtin())?;
    let mut failed = 0;
    for r in outcome.failures() {
        failed += 1;
        let why = match &r.status {
            CellStatus::Skipped(why) => format!("skipped: {why}"),
            CellStatus::Failed(why) => format!("failed: {why}"),
            CellStatus::Done(_) => unreachable!(),
        };
        eprintln!("{} n={} i={}: {why}", r.cell.class, r.cell.n, r.cell.index);
    }
    eprintln!(
        "{} cells, {} failed; aggregate written to {}",
        outcome.results.len(),
        failed,
        cfg.output_dir.join("aggregate.csv").display()
    );
    if failed > 0 {
        bail!("{failed} cell(s) did not complete");
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let mut did_something = false;
    if !args.metrics_json.is_empty() {
        let reports = args
            .metrics_json
            .iter()
            .map(|path| {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                MetricsReport::from_json(&text).with_context(|| format!("parsing {}", path.display()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut buf = Vec::new();
        MetricsReport::write_csv(&mut buf, &reports)?;
        match &args.metrics_csv {
            Some(path) => write_atomic(path, &buf)?,
            None => std::io::stdout().write_all(&buf)?,
        }
        did_something = true;
    }
    if args.edges.is_some() || args.graphml.is_some() || args.owner_dump.is_some() {
        let Some(input) = &args.input else {
            bail!("--input is required for --edges, --graphml and --owner-dump");
        };
        let inst = read_instance(input)?;
        let bm = load_or_map(&inst, args.owner_cache.as_deref(), false)?;
        if let Some(path) = &args.owner_dump {
            write_owner_dump(&bm, path)?;
        }
        if args.edges.is_some() || args.graphml.is_some() {
            let lon = LocalOptimaNetwork::build(&inst, &bm)?;
            write_lon_exports(&lon, args.edges.as_deref(), args.graphml.as_deref())?;
        }
        did_something = true;
    }
    if !did_something {
        bail!("nothing to export: give --metrics-json, or --input with --edges/--graphml/--owner-dump");
    }
    Ok(())
}
