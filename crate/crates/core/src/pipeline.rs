//! End-to-end partitioning: embed the graph, cluster the rows, score the
//! result.

use std::fmt;
use std::str::FromStr;

use crate::cliques::{CliqueSet, EnumerationOptions};
use crate::clustering::{
    auto_k, embedding_hierarchy, kmeans_with, AutoK, KMeansOptions, Partition, DEFAULT_MEMORY_BUDGET,
};
use crate::embedding::{embed_with, Embedding};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::modularity;
use crate::timing::PhaseTimings;

/// Clustering strategy applied to the embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Average-linkage hierarchy cut at `k` clusters.
    Aggl(usize),
    /// Lloyd k-means with `k` centroids.
    KMeans(usize),
    /// Average-linkage hierarchy cut at the level found by the modularity search.
    AutoK,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Aggl(_) => "aggl",
            Method::KMeans(_) => "kmeans",
            Method::AutoK => "auto-k",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Aggl(k) | Method::KMeans(k) => write!(f, "{}(k={k})", self.name()),
            Method::AutoK => f.write_str(self.name()),
        }
    }
}

/// Algorithm family as named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Aggl,
    KMeans,
    AutoK,
}

impl Algorithm {
    /// Combines the family with an optional block count.
    pub fn method(self, k: Option<usize>) -> Result<Method> {
        match (self, k) {
            (Algorithm::Aggl, Some(k)) => Ok(Method::Aggl(k)),
            (Algorithm::KMeans, Some(k)) => Ok(Method::KMeans(k)),
            (Algorithm::AutoK, None) => Ok(Method::AutoK),
            (Algorithm::AutoK, Some(_)) => Err(Error::InvalidParameter("auto-k takes no k".into())),
            (_, None) => Err(Error::InvalidParameter(format!("{self:?} requires k"))),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aggl" => Ok(Algorithm::Aggl),
            "kmeans" => Ok(Algorithm::KMeans),
            "auto-k" | "autok" => Ok(Algorithm::AutoK),
            other => Err(Error::InvalidParameter(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub seed: u64,
    pub max_cliques: Option<usize>,
    /// Largest dense distance matrix the agglomerative path may allocate.
    pub memory_budget: usize,
    pub kmeans: KMeansOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            seed: 0,
            max_cliques: None,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            kmeans: KMeansOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub partition: Partition,
    pub modularity: f64,
    pub cliques: CliqueSet,
    pub embedding: Embedding,
    pub auto_k: Option<AutoK>,
    /// `cliques`, `matrices`, `tfidf`, `clustering`, `auto-k`, `metrics`.
    pub timings: PhaseTimings,
}

/// Runs the full pipeline. For the fixed-k methods `k` counts clusters among
/// the embedded vertices; isolated vertices are added as singleton blocks.
pub fn run_pipeline(g: &Graph, method: Method, opts: &PipelineOptions) -> Result<PipelineOutput> {
    let enum_opts = EnumerationOptions {
        max_cliques: opts.max_cliques,
    };
    let embedded = embed_with(g, enum_opts)?;
    let mut timings = embedded.timings;
    let embedding = embedded.embedding;

    let mut found = None;
    let partition = match method {
        Method::Aggl(k) => timings.time("clustering", || -> Result<Partition> {
            embedding_hierarchy(&embedding, opts.memory_budget)?.cut(k)
        })?,
        Method::KMeans(k) => timings.time("clustering", || {
            kmeans_with(&embedding, k, opts.seed, opts.kmeans).map(|r| r.partition)
        })?,
        Method::AutoK => {
            let dg = timings.time("clustering", || embedding_hierarchy(&embedding, opts.memory_budget))?;
            let result = timings.time("auto-k", || auto_k(&dg, g))?;
            let partition = result.partition.clone();
            found = Some(result);
            partition
        }
    };
    let q = match &found {
        Some(r) => r.modularity,
        None => timings.time("metrics", || modularity(g, &partition))?,
    };

    Ok(PipelineOutput {
        partition,
        modularity: q,
        cliques: embedded.cliques,
        embedding,
        auto_k: found,
        timings,
    })
}
