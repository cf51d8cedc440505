//! `railway`: optimize block layouts, run experiment sweeps, export ILP
//! models and manage layout catalogs.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use railway_core::exact::{build_ilp_nov, build_ilp_ov, export_lp, import_assignment, parse_solution};
use railway_core::experiment::{
    plot_script, run_optimize, run_sweep, sweep_config_from_str, write_csv_file, write_summary_file, Algorithm,
    ResultRow, SweepConfig, SweepKind,
};
use railway_core::format::{self, LayoutCatalog};
use railway_core::simulate::{generate, WorkloadSpec};
use railway_core::{CostModel, Instance, OptimizerConfig};

#[derive(Parser)]
#[command(name = "railway", version, about = "Workload-aware railway layouts for temporal graph blocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the layout of one block.
    Optimize(OptimizeArgs),
    /// Run a parameter sweep and write per-run and summary CSV files.
    Sweep(SweepArgs),
    /// Write the ILP model of one block in LP format.
    ExportLp(ExportArgs),
    /// Decode a solver's solution file for an exported ILP model.
    DecodeSolution(DecodeArgs),
    /// Generate a random instance file.
    Generate(GenerateArgs),
    /// Inspect or extend a layout catalog.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

/// Workload generator settings. Flags override `--spec`, which overrides
/// the built-in defaults.
#[derive(Args, Clone, Default)]
struct WorkloadArgs {
    /// Workload spec file (TOML, `[workload]` table).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of attributes.
    #[arg(long)]
    attributes: Option<usize>,
    /// Number of query kinds.
    #[arg(long)]
    query_kinds: Option<usize>,
    /// Storage overhead threshold.
    #[arg(long)]
    alpha: Option<f64>,
    /// Attribute size choices in bytes, most likely first.
    #[arg(long, value_delimiter = ',')]
    attr_sizes: Option<Vec<u64>>,
    #[arg(long)]
    attr_size_zipf: Option<f64>,
    #[arg(long)]
    query_len_mean: Option<f64>,
    #[arg(long)]
    query_len_stddev: Option<f64>,
    #[arg(long)]
    query_freq_zipf: Option<f64>,
    /// Edges in the block.
    #[arg(long)]
    edges: Option<u64>,
    /// Neighbor lists in the block.
    #[arg(long)]
    neighbor_lists: Option<u64>,
    /// Number of query kinds placed outside the block's time range.
    #[arg(long)]
    time_disjoint: Option<usize>,
}

impl WorkloadArgs {
    fn base(&self) -> Result<WorkloadSpec> {
        match &self.spec {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(format::spec_from_str(&text, path)?)
            }
            None => Ok(WorkloadSpec::default()),
        }
    }

    fn apply(&self, mut spec: WorkloadSpec) -> WorkloadSpec {
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag.clone() {
                    spec.$field = v;
                }
            };
        }
        set!(seed => seed);
        set!(attributes => n_attributes);
        set!(query_kinds => n_query_kinds);
        set!(alpha => alpha);
        set!(attr_sizes => attr_size_choices);
        set!(attr_size_zipf => attr_size_zipf_z);
        set!(query_len_mean => query_len_mean);
        set!(query_len_stddev => query_len_stddev);
        set!(query_freq_zipf => query_freq_zipf_z);
        set!(edges => block_c_e);
        set!(neighbor_lists => block_c_n);
        set!(time_disjoint => time_disjoint_queries);
        spec
    }

    fn spec(&self) -> Result<WorkloadSpec> {
        let spec = self.apply(self.base()?);
        spec.validate()?;
        Ok(spec)
    }
}

/// Where the block comes from: an instance file, or the generator.
#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance file (TOML). Without it, an instance is generated.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    workload: WorkloadArgs,
}

impl InstanceArgs {
    /// The instance and the threshold to optimize for.
    fn load(&self) -> Result<(Instance, f64)> {
        match &self.instance {
            Some(path) => {
                let instance = format::load_instance(path)?;
                let alpha = self.workload.alpha.unwrap_or(WorkloadSpec::default().alpha);
                Ok((instance, alpha))
            }
            None => {
                let spec = self.workload.spec()?;
                Ok((generate(&spec)?, spec.alpha))
            }
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    source: InstanceArgs,
    /// Algorithms to run.
    #[arg(long, value_delimiter = ',', default_value = "greedy_nov,greedy_ov,single,per_attribute")]
    algorithms: Vec<Algorithm>,
    /// Wall-clock budget per exact solve, in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_budget: f64,
    /// Search-node budget per exact solve.
    #[arg(long)]
    node_budget: Option<u64>,
    /// Write result rows as CSV to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config file (TOML, `[sweep]` and `[workload]` tables).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<SweepKind>,
    /// Sweep values; defaults to the standard values of the sweep kind.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    node_budget: Option<u64>,
    /// Node budgets only and zero runtimes, for byte-identical output.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for results.csv, summary.csv and plot.py.
    #[arg(long, default_value = "sweep-out")]
    out: PathBuf,
    #[command(flatten)]
    workload: WorkloadArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Nov,
    Ov,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: InstanceArgs,
    #[arg(long, value_enum, default_value = "nov")]
    flavor: FlavorArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    source: InstanceArgs,
    #[arg(long, value_enum, default_value = "nov")]
    flavor: FlavorArg,
    /// Solution file of `name value` lines.
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum CatalogCommand {
    /// Print every entry of a catalog.
    Show { path: PathBuf },
    /// Optimize a block and store its layout under the block's time range.
    /// Creates the catalog if it does not exist.
    Add {
        path: PathBuf,
        #[command(flatten)]
        source: InstanceArgs,
        #[arg(long, default_value = "greedy_ov")]
        algorithm: Algorithm,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Optimize(args) => optimize(args),
        Command::Sweep(args) => sweep(args),
        Command::ExportLp(args) => export(args),
        Command::DecodeSolution(args) => decode(args),
        Command::Generate(args) => generate_instance(args),
        Command::Catalog(cmd) => catalog(cmd),
    }
}

fn optimizer(alpha: f64, time_budget: f64, node_budget: Option<u64>) -> Result<OptimizerConfig> {
    if !(time_budget.is_finite() && time_budget > 0.0) {
        bail!("--time-budget must be positive");
    }
    let mut config = OptimizerConfig::new(alpha)?.with_time_limit(Duration::from_secs_f64(time_budget));
    if let Some(n) = node_budget {
        config = config.with_node_limit(n);
    }
    Ok(config)
}

fn optimize(args: OptimizeArgs) -> Result<()> {
    let (instance, alpha) = args.source.load()?;
    let config = optimizer(alpha, args.time_budget, args.node_budget)?;
    let mut rows = Vec::new();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for &algorithm in &args.algorithms {
        let run = run_optimize(&instance, algorithm, &config);
        match &run.layout {
            Some(layout) => {
                writeln!(
                    out,
                    "{algorithm}: {}  query_io={}  overhead={:.6}  runtime={:.6}s{}",
                    layout.display(&instance.schema),
                    run.query_io,
                    run.storage_overhead,
                    run.runtime.as_secs_f64(),
                    if run.optimal { "  optimal" } else { "" }
                )?;
                if let Some(objective) = run.objective {
                    writeln!(out, "  solver objective={objective}")?;
                }
            }
            None => writeln!(out, "{algorithm}: failed: {}", run.error.as_deref().unwrap_or("unknown error"))?,
        }
        rows.push(ResultRow {
            sweep_value: alpha,
            algorithm,
            run_seed: 0,
            query_io: run.query_io,
            storage_overhead: run.storage_overhead,
            runtime_seconds: run.runtime.as_secs_f64(),
            optimal: run.optimal,
            run: 0,
        });
    }
    if let Some(path) = args.out {
        write_csv_file(&rows, &path)?;
    }
    Ok(())
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            sweep_config_from_str(&text, path)?
        }
        None => SweepConfig::default(),
    };
    if args.workload.spec.is_some() {
        config.base_spec = args.workload.base()?;
    }
    config.base_spec = args.workload.apply(config.base_spec);
    if let Some(kind) = args.kind {
        config.kind = kind;
        if args.values.is_none() {
            config.values = kind.default_values();
        }
    }
    if let Some(values) = &args.values {
        config.values = values.clone();
    }
    if let Some(runs) = args.runs {
        config.runs_per_point = runs;
    }
    if let Some(algorithms) = &args.algorithms {
        config.algorithms = algorithms.clone();
    }
    if let Some(t) = args.time_budget {
        config.time_budget_seconds = t;
    }
    if args.node_budget.is_some() {
        config.node_budget = args.node_budget;
    }
    config.deterministic |= args.deterministic;
    config.validate()?;
    Ok(config)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let config = sweep_config(&args)?;
    let rows = run_sweep(&config, args.jobs)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv_file(&rows, &args.out.join("results.csv"))?;
    write_summary_file(&rows, &args.out.join("summary.csv"))?;
    let plot = args.out.join("plot.py");
    fs::write(&plot, plot_script("summary.csv", config.kind)).with_context(|| format!("writing {}", plot.display()))?;
    eprintln!("{} rows written to {}", rows.len(), args.out.display());
    Ok(())
}

fn ilp_for(source: &InstanceArgs, flavor: FlavorArg) -> Result<(Instance, railway_core::exact::IlpModel)> {
    let (instance, alpha) = source.load()?;
    let config = OptimizerConfig::new(alpha)?;
    let model = match flavor {
        FlavorArg::Nov => build_ilp_nov(&instance, &config),
        FlavorArg::Ov => build_ilp_ov(&instance, &config),
    };
    Ok((instance, model))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn export(args: ExportArgs) -> Result<()> {
    let (_, model) = ilp_for(&args.source, args.flavor)?;
    emit(&export_lp(&model), args.out.as_deref())
}

fn decode(args: DecodeArgs) -> Result<()> {
    let (instance, model) = ilp_for(&args.source, args.flavor)?;
    let text = fs::read_to_string(&args.solution).with_context(|| format!("reading {}", args.solution.display()))?;
    let values = parse_solution(&text).with_context(|| args.solution.display().to_string())?;
    let layout = import_assignment(&model, &values, &instance.schema)?;
    let report = CostModel::for_instance(&instance).query_io(&layout, &instance.workload);
    println!("{}  query_io={}  overhead={:.6}", layout.display(&instance.schema), report.query_io, report.overhead);
    Ok(())
}

fn generate_instance(args: GenerateArgs) -> Result<()> {
    let instance = generate(&args.workload.spec()?)?;
    emit(&format::instance_to_string(&instance)?, args.out.as_deref())
}

fn catalog(cmd: CatalogCommand) -> Result<()> {
    match cmd {
        CatalogCommand::Show { path } => {
            let catalog = format::load_catalog(&path)?;
            let schema = catalog.schema();
            println!("{} attributes, {} entries", schema.len(), catalog.entries().len());
            for (range, layout) in catalog.entries() {
                println!("[{}, {}] {} {}", range.start(), range.end(), layout.flavor(), layout.display(schema));
            }
            Ok(())
        }
        CatalogCommand::Add { path, source, algorithm } => {
            let (instance, alpha) = source.load()?;
            let mut catalog =
                if path.exists() { format::load_catalog(&path)? } else { LayoutCatalog::new(instance.schema.clone()) };
            if catalog.schema() != &instance.schema {
                bail!("{}: catalog schema differs from the instance schema", path.display());
            }
            let run = run_optimize(&instance, algorithm, &OptimizerConfig::new(alpha)?);
            let Some(layout) = run.layout else {
                bail!("{algorithm} failed: {}", run.error.unwrap_or_default());
            };
            catalog.insert(instance.stats.time(), layout)?;
            format::save_catalog(&catalog, &path)?;
            Ok(())
        }
    }
}
