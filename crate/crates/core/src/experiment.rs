//! Batch experiments behind the `qcolor` CLI: graph-set generation, resource
//! tables, single training runs and multi-graph sweeps. All outputs are CSV
//! (or JSON for single runs) and reproducible from inputs and seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{build_qaoa, layer_depth};
use crate::encodings::{sampled_success, EncodingKind, SuccessProbability};
use crate::error::{Error, Result};
use crate::graph::{self, enumerate_3colorable, random_tripartite, Connectivity, Graph};
use crate::train::{train, QaoaObjective, TrainConfig, TrainResult};

/// Largest graph (in nodes) accepted for training runs.
pub const MAX_TRAIN_NODES: usize = 7;

pub const RESOURCES_HEADER: &str = "# qcolor resources v1";
pub const SWEEP_GRAPHS_HEADER: &str = "# qcolor sweep-graphs v1";
pub const SWEEP_SUMMARY_HEADER: &str = "# qcolor sweep-summary v1";

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-job seed from the master seed and a job identifier.
pub fn derive_seed(master: u64, id: &str) -> u64 {
    // FNV-1a over the id, then mixed with the master seed
    let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    mix(master ^ mix(h))
}

/// A named graph, usually loaded from a manifest entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedGraph {
    pub name: String,
    pub graph: Graph,
}

/// Graphs listed in one manifest; the set name is the manifest's file stem.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSet {
    pub name: String,
    pub graphs: Vec<NamedGraph>,
}

impl GraphSet {
    pub fn load(manifest: &Path) -> Result<Self> {
        let name = manifest
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "set".into());
        let graphs = graph::read_manifest(manifest)?
            .into_iter()
            .map(|p| {
                Ok(NamedGraph {
                    name: p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    graph: graph::read_graph(&p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GraphSet { name, graphs })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenReport {
    pub manifest: PathBuf,
    pub files: Vec<PathBuf>,
}

fn write_set(out_dir: &Path, prefix: &str, graphs: &[Graph]) -> Result<GenReport> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let name = format!("{prefix}_{i:03}.txt");
        let path = out_dir.join(&name);
        graph::write_graph(g, &path)?;
        files.push(path);
        entries.push(PathBuf::from(name));
    }
    let manifest = out_dir.join(format!("{prefix}.manifest"));
    graph::write_manifest(&manifest, &entries)?;
    Ok(GenReport { manifest, files })
}

/// Writes up to `limit` non-isomorphic connected 3-colorable graphs.
pub fn gen_enumerated(
    nodes: usize,
    min_edges: usize,
    max_edges: usize,
    limit: usize,
    out_dir: &Path,
) -> Result<GenReport> {
    let graphs = enumerate_3colorable(nodes, min_edges, max_edges, limit)?;
    write_set(out_dir, &format!("enum_n{nodes}"), &graphs)
}

/// Writes `count` distinct random tripartite graphs.
pub fn gen_tripartite(
    nodes: usize,
    connectivity: Connectivity,
    count: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<GenReport> {
    let mut graphs: Vec<Graph> = Vec::new();
    let mut attempt = 0u64;
    // duplicates are skipped; bounded so tiny n cannot loop forever
    while graphs.len() < count && attempt < 100 * count as u64 + 100 {
        let g = random_tripartite(nodes, connectivity, derive_seed(seed, &format!("tripartite/{attempt}")))?;
        attempt += 1;
        if !graphs.contains(&g) {
            graphs.push(g);
        }
    }
    let tag = match connectivity {
        Connectivity::Low => "low",
        Connectivity::High => "high",
        Connectivity::Highest => "highest",
    };
    write_set(out_dir, &format!("tri_n{nodes}_{tag}"), &graphs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceRow {
    pub set: String,
    pub graph: String,
    pub encoding: EncodingKind,
    pub layers: usize,
    pub nodes: f64,
    pub edges: f64,
    pub max_degree: f64,
    pub sites: f64,
    pub params: f64,
    pub entangling: f64,
    pub depth: f64,
    pub layer_depth: f64,
}

/// Resource counts per graph and encoding, followed by one `mean` row per
/// encoding for the set.
pub fn resources(set: &GraphSet, encodings: &[EncodingKind], layers: usize, alpha: f64) -> Result<Vec<ResourceRow>> {
    let mut rows = Vec::new();
    for &enc in encodings {
        let mut per_graph = Vec::new();
        for ng in &set.graphs {
            let g = &ng.graph;
            let c = build_qaoa(g, enc, layers, alpha)?;
            per_graph.push(ResourceRow {
                set: set.name.clone(),
                graph: ng.name.clone(),
                encoding: enc,
                layers,
                nodes: g.num_nodes() as f64,
                edges: g.num_edges() as f64,
                max_degree: g.max_degree() as f64,
                sites: c.num_sites() as f64,
                params: c.num_params() as f64,
                entangling: c.entangling_count() as f64,
                depth: c.depth() as f64,
                layer_depth: layer_depth(g, enc, alpha)? as f64,
            });
        }
        if !per_graph.is_empty() {
            let n = per_graph.len() as f64;
            let avg = |f: fn(&ResourceRow) -> f64| per_graph.iter().map(f).sum::<f64>() / n;
            let mean = ResourceRow {
                set: set.name.clone(),
                graph: "mean".into(),
                encoding: enc,
                layers,
                nodes: avg(|r| r.nodes),
                edges: avg(|r| r.edges),
                max_degree: avg(|r| r.max_degree),
                sites: avg(|r| r.sites),
                params: avg(|r| r.params),
                entangling: avg(|r| r.entangling),
                depth: avg(|r| r.depth),
                layer_depth: avg(|r| r.layer_depth),
            };
            rows.extend(per_graph);
            rows.push(mean);
        }
    }
    Ok(rows)
}

/// Writes `header` as a comment line followed by CSV rows.
pub fn write_csv<T: Serialize>(mut out: impl Write, header: &str, rows: &[T]) -> Result<()> {
    writeln!(out, "{header}").map_err(|e| Error::io("<csv>", e))?;
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Command-line overrides applied on top of an encoding's training profile.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainOverrides {
    pub alpha: Option<f64>,
    pub learning_rate: Option<f64>,
    pub max_steps: Option<usize>,
    pub min_steps: Option<usize>,
    pub cost_tolerance: Option<f64>,
    pub init_scale: Option<f64>,
}

impl TrainOverrides {
    pub fn config(&self, encoding: EncodingKind, layers: usize, seed: u64) -> TrainConfig {
        let mut c = TrainConfig::for_encoding(encoding, layers).with_seed(seed);
        if let Some(a) = self.alpha {
            c.alpha = a;
        }
        if let Some(lr) = self.learning_rate {
            c.learning_rate = lr;
        }
        if let Some(m) = self.max_steps {
            c.max_steps = m;
            c.min_steps = c.min_steps.min(m);
        }
        if let Some(m) = self.min_steps {
            c.min_steps = m;
        }
        if let Some(t) = self.cost_tolerance {
            c.cost_tolerance = t;
        }
        if let Some(s) = self.init_scale {
            c.init_scale = s;
        }
        c
    }
}

/// Serializable summary of one training run (wall time excluded so records are reproducible).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainRecord {
    pub graph: String,
    pub nodes: usize,
    pub edges: usize,
    pub encoding: EncodingKind,
    pub layers: usize,
    pub seed: u64,
    pub steps: usize,
    pub converged: bool,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub success_prob_raw: f64,
    pub success_prob_postselected: f64,
    /// `None` for exact probabilities.
    pub shots: Option<usize>,
    pub circuit_evaluations: usize,
    pub params: Vec<f64>,
}

fn check_train_size(g: &Graph) -> Result<()> {
    if g.num_nodes() > MAX_TRAIN_NODES {
        return Err(Error::InvalidArgument(format!(
            "training is limited to {MAX_TRAIN_NODES} nodes, graph has {}",
            g.num_nodes()
        )));
    }
    Ok(())
}

/// Trains one graph and summarizes the run. With `shots`, success
/// probabilities are estimated from samples drawn with the run's seed.
pub fn run_training(ng: &NamedGraph, config: &TrainConfig, shots: Option<usize>) -> Result<(TrainRecord, TrainResult)> {
    check_train_size(&ng.graph)?;
    let result = train(&ng.graph, config)?;
    let success = match shots {
        None => result.success,
        Some(n) => {
            let obj = QaoaObjective::new(&ng.graph, config.encoding, config.layers, config.alpha)?;
            let samples = obj.state(&result.params)?.sample_indices(n, config.seed);
            sampled_success(&ng.graph, config.encoding, &samples)
        }
    };
    let record = TrainRecord {
        graph: ng.name.clone(),
        nodes: ng.graph.num_nodes(),
        edges: ng.graph.num_edges(),
        encoding: config.encoding,
        layers: config.layers,
        seed: config.seed,
        steps: result.steps_taken,
        converged: result.converged,
        initial_cost: result.trace[0].cost,
        final_cost: result.final_cost(),
        success_prob_raw: success.raw,
        success_prob_postselected: success.postselected,
        shots,
        circuit_evaluations: result.circuit_evaluations(),
        params: result.params.clone(),
    };
    Ok((record, result))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub set: String,
    pub graph: String,
    pub nodes: usize,
    pub edges: usize,
    pub encoding: EncodingKind,
    pub layers: usize,
    pub seed: u64,
    pub steps: usize,
    pub converged: bool,
    pub final_cost: f64,
    pub success_raw: f64,
    pub success_postselected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub set: String,
    pub encoding: EncodingKind,
    pub layers: usize,
    pub graphs: usize,
    pub mean_edges_per_node: f64,
    pub mean_success_raw: f64,
    pub std_success_raw: f64,
    pub mean_success_postselected: f64,
    pub std_success_postselected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
}

impl SweepOutput {
    pub fn write(&self, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let graphs = out_dir.join("sweep_graphs.csv");
        let summary = out_dir.join("sweep_summary.csv");
        write_csv_file(&graphs, SWEEP_GRAPHS_HEADER, &self.rows)?;
        write_csv_file(&summary, SWEEP_SUMMARY_HEADER, &self.summary)?;
        Ok((graphs, summary))
    }

    /// Summary row for one (set, encoding, layers) triple.
    pub fn summary_for(&self, set: &str, encoding: EncodingKind, layers: usize) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.set == set && r.encoding == encoding && r.layers == layers)
    }
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Trains every graph of every set for each encoding and layer count.
///
/// Jobs run in parallel; each job's seed is derived from `master_seed` and the
/// set and graph names, and results are collected in input order.
pub fn sweep(
    sets: &[GraphSet],
    encodings: &[EncodingKind],
    layer_values: &[usize],
    overrides: &TrainOverrides,
    master_seed: u64,
    shots: Option<usize>,
) -> Result<SweepOutput> {
    if sets.iter().all(|s| s.graphs.is_empty()) {
        return Err(Error::InvalidArgument("sweep needs at least one graph".into()));
    }
    for s in sets {
        for g in &s.graphs {
            check_train_size(&g.graph)?;
        }
    }
    let mut jobs = Vec::new();
    for set in sets {
        for &enc in encodings {
            for &p in layer_values {
                for ng in &set.graphs {
                    jobs.push((set, enc, p, ng));
                }
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(set, enc, p, ng)| {
            let seed = derive_seed(master_seed, &format!("{}/{}", set.name, ng.name));
            let config = overrides.config(enc, p, seed);
            let (rec, _) = run_training(ng, &config, shots)?;
            Ok(SweepRow {
                set: set.name.clone(),
                graph: ng.name.clone(),
                nodes: rec.nodes,
                edges: rec.edges,
                encoding: enc,
                layers: p,
                seed,
                steps: rec.steps,
                converged: rec.converged,
                final_cost: rec.final_cost,
                success_raw: rec.success_prob_raw,
                success_postselected: rec.success_prob_postselected,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = Vec::new();
    for set in sets {
        for &enc in encodings {
            for &p in layer_values {
                let group: Vec<&SweepRow> = rows
                    .iter()
                    .filter(|r| r.set == set.name && r.encoding == enc && r.layers == p)
                    .collect();
                let raw: Vec<f64> = group.iter().map(|r| r.success_raw).collect();
                let post: Vec<f64> = group.iter().map(|r| r.success_postselected).collect();
                let (mean_raw, std_raw) = mean_std(&raw);
                let (mean_post, std_post) = mean_std(&post);
                let epn: Vec<f64> = set
                    .graphs
                    .iter()
                    .map(|g| g.graph.num_edges() as f64 / g.graph.num_nodes() as f64)
                    .collect();
                summary.push(SummaryRow {
                    set: set.name.clone(),
                    encoding: enc,
                    layers: p,
                    graphs: group.len(),
                    mean_edges_per_node: mean_std(&epn).0,
                    mean_success_raw: mean_raw,
                    std_success_raw: std_raw,
                    mean_success_postselected: mean_post,
                    std_success_postselected: std_post,
                });
            }
        }
    }
    Ok(SweepOutput { rows, summary })
}

/// Loads one graph file as a single-graph set entry.
pub fn load_named(path: &Path) -> Result<NamedGraph> {
    Ok(NamedGraph {
        name: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        graph: graph::read_graph(path)?,
    })
}

/// Success probabilities of the untrained (all-zero parameter) circuit.
pub fn baseline_success(g: &Graph, encoding: EncodingKind, layers: usize, alpha: f64) -> Result<SuccessProbability> {
    let obj = QaoaObjective::new(g, encoding, layers, alpha)?;
    obj.success(&vec![0.0; encoding.params_per_layer() * layers])
}
