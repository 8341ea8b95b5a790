use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qcolor::experiment::{self, GraphSet, TrainOverrides, RESOURCES_HEADER};
use qcolor::graph::Connectivity;
use qcolor::EncodingKind;

#[derive(Parser)]
#[command(name = "qcolor", version, about = "Qubit and qutrit QAOA for graph 3-coloring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graph sets
    #[command(subcommand)]
    Gen(GenCommand),
    /// Gate counts and depths per graph and encoding
    Resources(ResourcesArgs),
    /// Train one graph
    Train(TrainArgs),
    /// Train every graph in one or more sets
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Non-isomorphic connected 3-colorable graphs
    Enum(EnumArgs),
    /// Random tripartite graphs
    Tripartite(TripartiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Qubit,
    Qutrit,
    Both,
}

impl EncodingArg {
    fn kinds(self) -> Vec<EncodingKind> {
        match self {
            EncodingArg::Qubit => vec![EncodingKind::QubitSpaceEfficient],
            EncodingArg::Qutrit => vec![EncodingKind::Qutrit],
            EncodingArg::Both => vec![EncodingKind::Qutrit, EncodingKind::QubitSpaceEfficient],
        }
    }
}

#[derive(Args)]
struct EnumArgs {
    #[arg(long)]
    nodes: usize,
    /// Exact edge count (overrides --min-edges/--max-edges)
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long, default_value_t = 0)]
    min_edges: usize,
    #[arg(long)]
    max_edges: Option<usize>,
    /// Maximum number of graphs
    #[arg(long, default_value_t = 20)]
    max: usize,
    #[arg(long, default_value = "graphs")]
    out: PathBuf,
}

#[derive(Args)]
struct TripartiteArgs {
    #[arg(long)]
    nodes: usize,
    /// low, high or highest
    #[arg(long, default_value = "low")]
    connectivity: Connectivity,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "graphs")]
    out: PathBuf,
}

#[derive(Args)]
struct ResourcesArgs {
    /// Graph set manifest (repeatable)
    #[arg(long, required = true)]
    manifest: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    encoding: EncodingArg,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Output CSV file
    #[arg(long, default_value = "resources.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainFlags {
    #[arg(long, value_enum, default_value = "qutrit")]
    encoding: EncodingArg,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Estimate success probabilities from N samples instead of exactly
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    min_steps: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    init_scale: Option<f64>,
}

impl TrainFlags {
    fn overrides(&self) -> TrainOverrides {
        TrainOverrides {
            alpha: self.alpha,
            learning_rate: self.lr,
            max_steps: self.max_steps,
            min_steps: self.min_steps,
            cost_tolerance: self.tolerance,
            init_scale: self.init_scale,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Graph file
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[command(flatten)]
    flags: TrainFlags,
    /// Output directory for the record and trace
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Graph set manifest (repeatable)
    #[arg(long, required = true)]
    manifest: Vec<PathBuf>,
    /// Comma-separated layer counts
    #[arg(long, value_delimiter = ',', default_value = "3")]
    layers: Vec<usize>,
    #[command(flatten)]
    flags: TrainFlags,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(GenCommand::Enum(a)) => gen_enum(a),
        Command::Gen(GenCommand::Tripartite(a)) => gen_tripartite(a),
        Command::Resources(a) => resources(a),
        Command::Train(a) => train(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn gen_enum(a: EnumArgs) -> Result<()> {
    let (min, max) = match a.edges {
        Some(e) => (e, e),
        None => (
            a.min_edges,
            a.max_edges.unwrap_or(a.nodes * a.nodes.saturating_sub(1) / 2),
        ),
    };
    let report = experiment::gen_enumerated(a.nodes, min, max, a.max, &a.out)?;
    if report.files.is_empty() {
        println!(
            "no connected 3-colorable graphs with {} nodes and {}..={} edges; wrote empty manifest {}",
            a.nodes,
            min,
            max,
            report.manifest.display()
        );
    } else {
        println!(
            "wrote {} graphs, manifest {}",
            report.files.len(),
            report.manifest.display()
        );
    }
    Ok(())
}

fn gen_tripartite(a: TripartiteArgs) -> Result<()> {
    let report = experiment::gen_tripartite(a.nodes, a.connectivity, a.count, a.seed, &a.out)?;
    if report.files.len() < a.count {
        println!(
            "only {} distinct graphs found (requested {})",
            report.files.len(),
            a.count
        );
    }
    println!(
        "wrote {} graphs, manifest {}",
        report.files.len(),
        report.manifest.display()
    );
    Ok(())
}

fn load_sets(manifests: &[PathBuf]) -> Result<Vec<GraphSet>> {
    manifests
        .iter()
        .map(|m| GraphSet::load(m).with_context(|| format!("loading {}", m.display())))
        .collect()
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn resources(a: ResourcesArgs) -> Result<()> {
    let sets = load_sets(&a.manifest)?;
    let mut rows = Vec::new();
    for set in &sets {
        rows.extend(experiment::resources(set, &a.encoding.kinds(), a.layers, a.alpha)?);
    }
    ensure_parent(&a.out)?;
    experiment::write_csv_file(&a.out, RESOURCES_HEADER, &rows)?;
    println!("wrote {} rows to {}", rows.len(), a.out.display());
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let ng = experiment::load_named(&a.graph)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let overrides = a.flags.overrides();
    for enc in a.flags.encoding.kinds() {
        let config = overrides.config(enc, a.layers, a.flags.seed);
        config.validate()?;
        let (record, result) = experiment::run_training(&ng, &config, a.flags.shots)?;
        let stem = format!("{}_{}_p{}", ng.name, enc, a.layers);
        let record_path = a.out.join(format!("{stem}.json"));
        let trace_path = a.out.join(format!("{stem}_trace.csv"));
        let json = serde_json::to_string_pretty(&record)?;
        fs::write(&record_path, json + "\n").with_context(|| format!("writing {}", record_path.display()))?;
        result.write_trace_csv(&trace_path)?;
        println!(
            "{} {}: steps={} converged={} cost={:.6} success_raw={:.6} success_postselected={:.6}",
            ng.name,
            enc,
            record.steps,
            record.converged,
            record.final_cost,
            record.success_prob_raw,
            record.success_prob_postselected
        );
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    if a.layers.is_empty() {
        bail!("--layers needs at least one value");
    }
    let sets = load_sets(&a.manifest)?;
    let output = experiment::sweep(
        &sets,
        &a.flags.encoding.kinds(),
        &a.layers,
        &a.flags.overrides(),
        a.flags.seed,
        a.flags.shots,
    )?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let (graphs, summary) = output.write(&a.out)?;
    for row in &output.summary {
        println!(
            "{} {} p={}: mean_raw={:.4} std_raw={:.4} mean_post={:.4}",
            row.set, row.encoding, row.layers, row.mean_success_raw, row.std_success_raw, row.mean_success_postselected
        );
    }
    println!("wrote {} and {}", graphs.display(), summary.display());
    Ok(())
}
