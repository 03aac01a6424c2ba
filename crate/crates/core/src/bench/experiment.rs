use std::path::PathBuf;

use super::planted::planted_partition_graph;
use crate::clustering::{LabeledPartition, Partition};
use crate::error::{Error, Result};
use crate::graph::{giant_component, read_edge_list, Graph};
use crate::metrics::{modularity, nmi, permanence, MetricsReport};
use crate::pipeline::{run_pipeline, Algorithm, PipelineOptions};
use crate::timing::PhaseTimings;

#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    /// Edge-list file, optionally with a `vertex_id community_id` ground truth.
    File {
        path: PathBuf,
        ground_truth: Option<PathBuf>,
    },
    /// Planted-partition graph generated in memory; its blocks are the
    /// ground truth.
    Planted {
        n: usize,
        k: usize,
        p_in: f64,
        p_out: f64,
        seed: u64,
    },
}

impl Dataset {
    pub fn name(&self) -> String {
        match self {
            Dataset::File { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            Dataset::Planted {
                n,
                k,
                p_in,
                p_out,
                seed,
            } => format!("planted-n{n}-k{k}-pin{p_in}-pout{p_out}-s{seed}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub algorithm: Algorithm,
    /// Required for the fixed-k algorithms, forbidden for auto-k.
    pub k: Option<usize>,
    pub seed: u64,
    /// Restrict the graph to its largest connected component first.
    pub giant_component: bool,
    pub pipeline: PipelineOptions,
}

impl ExperimentConfig {
    pub fn new(dataset: Dataset, algorithm: Algorithm, k: Option<usize>) -> Self {
        ExperimentConfig {
            dataset,
            algorithm,
            k,
            seed: 0,
            giant_component: false,
            pipeline: PipelineOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub report: MetricsReport,
    pub graph: Graph,
    pub partition: Partition,
}

/// Loads the dataset, runs the pipeline and scores the partition. Timed
/// phases: `parse`, `cliques`, `matrices`, `tfidf`, `clustering`, `auto-k`
/// and `metrics`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let name = cfg.dataset.name();
    run(cfg).map_err(|e| e.context(format!("dataset {name}")))
}

fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let method = cfg.algorithm.method(cfg.k)?;
    let mut timings = PhaseTimings::new();

    let (graph, truth) = timings.time("parse", || -> Result<(Graph, Option<Partition>)> {
        let (graph, truth) = match &cfg.dataset {
            Dataset::File { path, ground_truth } => {
                let g = read_edge_list(path)?;
                let truth = ground_truth.as_ref().map(LabeledPartition::read).transpose()?;
                (g, truth)
            }
            Dataset::Planted {
                n,
                k,
                p_in,
                p_out,
                seed,
            } => {
                let (g, truth) = planted_partition_graph(*n, *k, *p_in, *p_out, *seed)?;
                let ids = (0..*n as u64).collect();
                (g, Some(LabeledPartition { ids, partition: truth }))
            }
        };
        let graph = if cfg.giant_component { giant_component(&graph).0 } else { graph };
        let truth = truth.map(|t| align_truth(&t, &graph, cfg.giant_component)).transpose()?;
        Ok((graph, truth))
    })?;

    let mut opts = cfg.pipeline;
    opts.seed = cfg.seed;
    let out = run_pipeline(&graph, method, &opts)?;
    timings.merge(&out.timings);

    let (perm, score) = timings.time("metrics", || -> Result<(f64, Option<f64>)> {
        let perm = permanence(&graph, &out.partition)?;
        let score = truth.as_ref().map(|t| nmi(&out.partition, t)).transpose()?;
        Ok((perm, score))
    })?;
    debug_assert_eq!(out.modularity, modularity(&graph, &out.partition)?);

    let report = MetricsReport {
        dataset: cfg.dataset.name(),
        algorithm: method.name().to_string(),
        k: out.partition.k(),
        modularity: out.modularity,
        permanence: perm,
        nmi: score,
        seed: cfg.seed,
        n: graph.n(),
        m: graph.m(),
        cliques: out.cliques.d(),
        timings,
    };
    Ok(ExperimentResult {
        report,
        graph,
        partition: out.partition,
    })
}

/// After restricting to a component the ground truth may list more vertices
/// than the graph has; those are dropped.
fn align_truth(truth: &LabeledPartition, g: &Graph, allow_extra: bool) -> Result<Partition> {
    if !allow_extra {
        return truth.align(g);
    }
    let map = g.vertex_map();
    let (ids, labels): (Vec<u64>, Vec<usize>) = truth
        .ids
        .iter()
        .enumerate()
        .filter(|(_, id)| map.to_compact(**id).is_some())
        .map(|(pos, &id)| (id, truth.partition.block_of(pos)))
        .unzip();
    if ids.len() != g.n() {
        return Err(Error::PartitionMismatch(format!(
            "ground truth covers {} of {} vertices",
            ids.len(),
            g.n()
        )));
    }
    LabeledPartition {
        ids,
        partition: Partition::from_labels(&labels),
    }
    .align(g)
}
