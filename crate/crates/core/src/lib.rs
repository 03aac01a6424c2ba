//! Graph partitioning from maximal-clique vertex embeddings.
//!
//! Vertices are described by the maximal cliques around them, weighted like
//! terms in a TF-IDF document model, and the resulting unit vectors are
//! clustered either into a given number of blocks (average-linkage
//! hierarchy or k-means) or into the number of blocks that maximizes
//! modularity along the hierarchy.
//!
//! ```
//! use cliquetf::graph::parse_edge_list_str;
//! use cliquetf::pipeline::{run_pipeline, Method, PipelineOptions};
//!
//! let g = parse_edge_list_str("1 2\n1 3\n2 3\n2 4\n3 4\n5 6\n5 7\n6 7\n").unwrap();
//! let out = run_pipeline(&g, Method::AutoK, &PipelineOptions::default()).unwrap();
//! assert_eq!(out.partition.k(), 2);
//! assert_eq!(out.modularity, 0.46875);
//! ```

pub mod bench;
pub mod cliques;
pub mod clustering;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod pipeline;
pub mod sparse;
pub mod timing;

pub use error::{Error, Result};
