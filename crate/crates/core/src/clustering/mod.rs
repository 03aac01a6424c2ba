//! Turning embedding rows into vertex partitions.

mod autok;
mod distance;
mod hierarchy;
mod kmeans;
mod partition;

pub use autok::{auto_k, AutoK, REFINE_WINDOW};
pub use distance::{cosine_distance_matrix, CondensedMatrix, DEFAULT_MEMORY_BUDGET};
pub use hierarchy::{agglomerative_hierarchy, Dendrogram, Merge};
pub use kmeans::{kmeans, kmeans_with, KMeansOptions, KMeansResult};
pub use partition::{LabeledPartition, Partition};

use crate::embedding::Embedding;
use crate::error::Result;

/// Average-linkage dendrogram over the active rows of `e`, with leaves mapped
/// back to graph vertices.
pub fn embedding_hierarchy(e: &Embedding, memory_budget: usize) -> Result<Dendrogram> {
    let (dist, ids) = cosine_distance_matrix(e, memory_budget)?;
    Ok(agglomerative_hierarchy(dist).with_vertices(ids, e.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed;
    use crate::graph::{parse_edge_list_str, Graph};
    use crate::metrics::modularity;

    fn toy_dendrogram() -> (Graph, Dendrogram) {
        let g = parse_edge_list_str(include_str!("../../data/toy.edges")).unwrap();
        let e = embed(&g).unwrap().embedding;
        let dg = embedding_hierarchy(&e, DEFAULT_MEMORY_BUDGET).unwrap();
        (g, dg)
    }

    #[test]
    fn toy_zero_distance_merges_come_first() {
        let (_, dg) = toy_dendrogram();
        let zero: Vec<(usize, usize)> = dg
            .merges()
            .iter()
            .take_while(|m| m.distance == 0.0)
            .map(|m| (m.a, m.b))
            .collect();
        // {v2,v3}, {v5,v6}, then {v5,v6} + v7.
        assert_eq!(zero, vec![(1, 2), (4, 5), (6, 8)]);
        assert_eq!(dg.merges().last().unwrap().distance, 1.0);
    }

    #[test]
    fn toy_cut_two() {
        let (_, dg) = toy_dendrogram();
        assert_eq!(dg.cut(2).unwrap().assignment(), &[0, 0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn toy_auto_k() {
        let (g, dg) = toy_dendrogram();
        let r = auto_k(&dg, &g).unwrap();
        assert_eq!(r.k, 2);
        assert_eq!(r.modularity, 0.46875);
        assert_eq!(r.modularity, modularity(&g, &r.partition).unwrap());
    }

    #[test]
    fn two_disjoint_cliques() {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        let g = Graph::from_edges(10, edges);
        let e = embed(&g).unwrap().embedding;
        let dg = embedding_hierarchy(&e, DEFAULT_MEMORY_BUDGET).unwrap();
        let r = auto_k(&dg, &g).unwrap();
        assert_eq!((r.k, r.modularity), (2, 0.5));
    }

    #[test]
    fn one_clique_gives_nonpositive_modularity() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let e = embed(&g).unwrap().embedding;
        let dg = embedding_hierarchy(&e, DEFAULT_MEMORY_BUDGET).unwrap();
        let r = auto_k(&dg, &g).unwrap();
        let sweep = (1..=4)
            .map(|k| modularity(&g, &dg.cut(k).unwrap()).unwrap())
            .filter(|q| q.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(r.k <= 2 && r.modularity <= 0.0);
        assert!(r.modularity <= sweep);
    }
}
