use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::{Args, Parser, Subcommand};

use cliquetf::bench::{
    emit_report, lfr_parameter_grid, paper_grid, parse_ratio, render_report, run_experiment, write_grid_csv, Dataset,
    ExperimentConfig, ReportFormat, ReportOptions, PAPER_ALPHA, PAPER_BETA, PAPER_MU, PAPER_N, PAPER_REPLICATES,
};
use cliquetf::cliques::{clique_size_distribution, enumerate_maximal_cliques_with, EnumerationOptions};
use cliquetf::clustering::{LabeledPartition, DEFAULT_MEMORY_BUDGET};
use cliquetf::embedding::embed_with;
use cliquetf::graph::{giant_component, read_edge_list, Graph};
use cliquetf::metrics::{modularity, nmi, permanence, MetricsReport};
use cliquetf::pipeline::{run_pipeline, Algorithm, Method, PipelineOptions};
use cliquetf::timing::PhaseTimings;
use cliquetf::Error;

#[derive(Parser, Debug)]
#[command(name = "cliquetf", version, about = "Graph partitioning with maximal-clique TF-IDF embeddings")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CLIQUETF_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    /// Edge list, one "u v" pair per line.
    edges: PathBuf,

    /// Keep only the largest connected component.
    #[arg(long)]
    giant: bool,

    /// Abort when the graph has more maximal cliques than this.
    #[arg(long)]
    max_cliques: Option<usize>,
}

impl GraphArgs {
    fn load(&self) -> cliquetf::Result<Graph> {
        let g = read_edge_list(&self.edges)?;
        Ok(if self.giant { giant_component(&g).0 } else { g })
    }

    fn enumeration(&self) -> EnumerationOptions {
        EnumerationOptions {
            max_cliques: self.max_cliques,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate maximal cliques and print a size histogram.
    Cliques {
        #[command(flatten)]
        graph: GraphArgs,
        /// Write the cliques, one per line, to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Compute the vertex embedding.
    Embed {
        #[command(flatten)]
        graph: GraphArgs,
        /// Embedding as "row col value" triplets.
        #[arg(long)]
        out: PathBuf,
        /// Row to vertex id mapping (default: <out>.map).
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Partition the graph.
    Partition {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_parser = ["aggl", "kmeans"], default_value = "aggl")]
        method: String,
        #[arg(long, required_unless_present = "auto_k", conflicts_with = "auto_k")]
        k: Option<usize>,
        /// Pick k by maximizing modularity along the hierarchy.
        #[arg(long)]
        auto_k: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Partition file, "vertex block" per line.
        #[arg(long)]
        out: PathBuf,
        /// Largest dense distance matrix to allocate, in bytes.
        #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
        memory_budget: usize,
    },
    /// Score a partition file; prints a JSON report.
    Eval {
        #[command(flatten)]
        graph: GraphArgs,
        /// Partition file, "vertex block" per line.
        partition: PathBuf,
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        /// Echoed in the report.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit LFR generator parameter rows as CSV.
    LfrGrid {
        /// Vertex counts (default: 100,250,500,1000,2000).
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Max-degree fractions such as 1/20 (default: 1/20,1/15,1/10,1/5,1/3).
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<String>,
        /// Average-degree factors (default: 30,35,40).
        #[arg(long, value_delimiter = ',')]
        beta: Vec<String>,
        /// Mixing parameters (default: 0.1,0.2,0.3,0.4,0.5).
        #[arg(long, value_delimiter = ',')]
        mu: Vec<f64>,
        #[arg(long, default_value_t = PAPER_REPLICATES)]
        replicates: usize,
        /// Seed of the first row; row i gets seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run experiments over datasets and write a report.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Edge-list datasets.
    datasets: Vec<PathBuf>,
    /// Ground-truth files, matched to the datasets in order.
    #[arg(long)]
    ground_truth: Vec<PathBuf>,
    /// Planted-partition dataset "n,k,p_in,p_out"; one graph per replicate.
    #[arg(long)]
    planted: Vec<String>,
    #[arg(long, value_parser = ["aggl", "kmeans", "auto-k"], default_value = "auto-k")]
    algorithm: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Runs per dataset, with seeds seed, seed + 1, ...
    #[arg(long, default_value_t = 1)]
    replicates: u64,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add to an existing report instead of replacing it.
    #[arg(long, requires = "out")]
    append: bool,
    /// Include wall-clock columns.
    #[arg(long)]
    timings: bool,
    /// Add a mean row per algorithm.
    #[arg(long)]
    aggregate: bool,
    #[arg(long)]
    giant: bool,
    #[arg(long)]
    max_cliques: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: usize,
}

/// Input problems exit with 1, everything else that fails at run time with 2.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let usage = e
            .downcast_ref::<Error>()
            .is_some_and(|e| matches!(e.root(), Error::Parse { .. } | Error::EmptyInput));
        if usage {
            Failure::Usage(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| anyhow!("cannot create {}: {e}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn print_timings(t: &PhaseTimings) {
    for (phase, secs) in t.iter() {
        eprintln!("time {phase} {secs:.6}s");
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Cliques { graph, dump } => {
            let mut t = PhaseTimings::new();
            let g = t.time("parse", || graph.load())?;
            let cs = t.time("cliques", || enumerate_maximal_cliques_with(&g, graph.enumeration()))?;
            let mut out = io::stdout().lock();
            writeln!(out, "n={}", g.n()).map_err(anyhow::Error::from)?;
            writeln!(out, "m={}", g.m()).map_err(anyhow::Error::from)?;
            writeln!(out, "d={}", cs.d()).map_err(anyhow::Error::from)?;
            for (size, count) in clique_size_distribution(&cs) {
                writeln!(out, "{size}:{count}").map_err(anyhow::Error::from)?;
            }
            if let Some(path) = dump {
                let mut w = create(&path)?;
                cs.write_dump(&g, &mut w).and_then(|_| w.flush()).map_err(anyhow::Error::from)?;
            }
            print_timings(&t);
        }
        Command::Embed { graph, out, map } => {
            let g = graph.load()?;
            let embedded = embed_with(&g, graph.enumeration())?;
            let e = &embedded.embedding;
            let mut w = create(&out)?;
            e.write_triplets(&mut w).and_then(|_| w.flush()).map_err(anyhow::Error::from)?;
            let map = map.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".map");
                p.into()
            });
            let mut w = create(&map)?;
            e.write_vertex_map(&g, &mut w).and_then(|_| w.flush()).map_err(anyhow::Error::from)?;
            eprintln!("n={} d={} nnz={}", e.n(), e.d(), e.z.nnz());
            print_timings(&embedded.timings);
        }
        Command::Partition {
            graph,
            method,
            k,
            auto_k,
            seed,
            out,
            memory_budget,
        } => {
            let method = match (method.as_str(), k, auto_k) {
                ("kmeans", _, true) => {
                    return Err(Failure::Usage(anyhow!("--auto-k uses the agglomerative method only")))
                }
                (_, None, true) => Method::AutoK,
                ("aggl", Some(k), false) => Method::Aggl(k),
                ("kmeans", Some(k), false) => Method::KMeans(k),
                _ => return Err(Failure::Usage(anyhow!("exactly one of --k and --auto-k is required"))),
            };
            let mut t = PhaseTimings::new();
            let g = t.time("parse", || graph.load())?;
            let opts = PipelineOptions {
                seed,
                max_cliques: graph.max_cliques,
                memory_budget,
                ..PipelineOptions::default()
            };
            let result = run_pipeline(&g, method, &opts)?;
            t.merge(&result.timings);
            let mut w = create(&out)?;
            result
                .partition
                .write(&g, &mut w)
                .and_then(|_| w.flush())
                .map_err(anyhow::Error::from)?;
            eprintln!(
                "method={} k={} modularity={} seed={}",
                method.name(),
                result.partition.k(),
                result.modularity,
                seed
            );
            print_timings(&t);
        }
        Command::Eval {
            graph,
            partition,
            ground_truth,
            seed,
        } => {
            let mut t = PhaseTimings::new();
            let g = t.time("parse", || graph.load())?;
            let p = LabeledPartition::read(&partition)?.align(&g)?;
            let truth = ground_truth
                .as_ref()
                .map(|path| LabeledPartition::read(path).and_then(|l| l.align(&g)))
                .transpose()?;
            let cs = t.time("cliques", || enumerate_maximal_cliques_with(&g, graph.enumeration()))?;
            let (q, perm, score) = t.time("metrics", || -> cliquetf::Result<_> {
                let score = truth.as_ref().map(|tr| nmi(&p, tr)).transpose()?;
                Ok((modularity(&g, &p)?, permanence(&g, &p)?, score))
            })?;
            let report = MetricsReport {
                dataset: dataset_name(&graph.edges),
                algorithm: "eval".into(),
                k: p.k(),
                modularity: q,
                permanence: perm,
                nmi: score,
                seed,
                n: g.n(),
                m: g.m(),
                cliques: cs.d(),
                timings: t,
            };
            let text = serde_json_pretty(&report);
            io::stdout().lock().write_all(text.as_bytes()).map_err(anyhow::Error::from)?;
            print_timings(&report.timings);
        }
        Command::LfrGrid {
            n,
            alpha,
            beta,
            mu,
            replicates,
            seed,
            out,
        } => {
            let default = n.is_empty() && alpha.is_empty() && beta.is_empty() && mu.is_empty();
            let rows = if default && replicates == PAPER_REPLICATES {
                paper_grid(seed)
            } else {
                let n = if n.is_empty() { PAPER_N.to_vec() } else { n };
                let alpha = if alpha.is_empty() {
                    PAPER_ALPHA.iter().map(|(a, b)| parse_ratio(&format!("{a}/{b}"))).collect::<Result<Vec<_>, _>>()?
                } else {
                    alpha.iter().map(|s| parse_ratio(s)).collect::<Result<Vec<_>, _>>().map_err(|e| Failure::Usage(e.into()))?
                };
                let beta = if beta.is_empty() {
                    PAPER_BETA.iter().map(|b| parse_ratio(&b.to_string())).collect::<Result<Vec<_>, _>>()?
                } else {
                    beta.iter().map(|s| parse_ratio(s)).collect::<Result<Vec<_>, _>>().map_err(|e| Failure::Usage(e.into()))?
                };
                let mu = if mu.is_empty() { PAPER_MU.to_vec() } else { mu };
                lfr_parameter_grid(&n, &alpha, &beta, &mu, replicates, seed).map_err(|e| Failure::Usage(e.into()))?
            };
            match out {
                Some(path) => {
                    let mut w = create(&path)?;
                    write_grid_csv(&rows, &mut w).and_then(|_| w.flush()).map_err(anyhow::Error::from)?;
                }
                None => write_grid_csv(&rows, io::stdout().lock()).map_err(anyhow::Error::from)?,
            }
            eprintln!("rows={}", rows.len());
        }
        Command::Bench(args) => bench(args)?,
    }
    Ok(())
}

fn dataset_name(path: &Path) -> String {
    Dataset::File {
        path: path.to_path_buf(),
        ground_truth: None,
    }
    .name()
}

fn serde_json_pretty(report: &MetricsReport) -> String {
    let mut out = serde_json::to_string_pretty(&report.to_json(false)).expect("serializable");
    out.push('\n');
    out
}

fn parse_planted(spec: &str) -> anyhow::Result<(usize, usize, f64, f64)> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("--planted expects n,k,p_in,p_out, got {spec:?}");
    }
    let bad = || anyhow!("--planted expects n,k,p_in,p_out, got {spec:?}");
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
        parts[3].parse().map_err(|_| bad())?,
    ))
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let algorithm: Algorithm = args.algorithm.parse()?;
    if let Err(e) = algorithm.method(args.k) {
        return Err(Failure::Usage(e.into()));
    }
    if !args.ground_truth.is_empty() && args.ground_truth.len() != args.datasets.len() {
        return Err(Failure::Usage(anyhow!(
            "{} ground-truth files for {} datasets",
            args.ground_truth.len(),
            args.datasets.len()
        )));
    }
    if args.datasets.is_empty() && args.planted.is_empty() {
        return Err(Failure::Usage(anyhow!("no datasets given")));
    }
    let mut datasets = Vec::new();
    for (i, path) in args.datasets.iter().enumerate() {
        datasets.push(Dataset::File {
            path: path.clone(),
            ground_truth: args.ground_truth.get(i).cloned(),
        });
    }
    let mut planted = Vec::new();
    for spec in &args.planted {
        planted.push(parse_planted(spec).map_err(Failure::Usage)?);
    }

    let mut reports = Vec::new();
    for r in 0..args.replicates {
        let seed = args.seed + r;
        let mut round = datasets.clone();
        round.extend(planted.iter().map(|&(n, k, p_in, p_out)| Dataset::Planted {
            n,
            k,
            p_in,
            p_out,
            seed,
        }));
        for dataset in round {
            let mut cfg = ExperimentConfig::new(dataset, algorithm, args.k);
            cfg.seed = seed;
            cfg.giant_component = args.giant;
            cfg.pipeline.max_cliques = args.max_cliques;
            cfg.pipeline.memory_budget = args.memory_budget;
            let result = run_experiment(&cfg)?;
            let rep = &result.report;
            eprintln!(
                "{} {} seed={} k={} modularity={} total={:.3}s",
                rep.dataset,
                rep.algorithm,
                rep.seed,
                rep.k,
                rep.modularity,
                rep.timings.total()
            );
            reports.push(result.report);
        }
    }

    let format: ReportFormat = args.format.parse()?;
    let opts = ReportOptions {
        format,
        with_timings: args.timings,
        aggregate: args.aggregate,
    };
    match &args.out {
        Some(path) => emit_report(&reports, &opts, path, args.append)?,
        None => io::stdout()
            .lock()
            .write_all(render_report(&reports, &opts).as_bytes())
            .map_err(anyhow::Error::from)?,
    }
    Ok(())
}
