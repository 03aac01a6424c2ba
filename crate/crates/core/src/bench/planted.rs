use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Planted-partition random graph: `k` equal blocks of consecutive vertices,
/// each pair joined with probability `p_in` inside a block and `p_out`
/// across blocks. Pairs are visited in lexicographic order from a single
/// ChaCha8 stream, so a seed fixes the graph.
pub fn planted_partition_graph(n: usize, k: usize, p_in: f64, p_out: f64, seed: u64) -> Result<(Graph, Partition)> {
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!("k = {k} must divide n = {n}")));
    }
    let valid = |p: f64| (0.0..=1.0).contains(&p);
    if !valid(p_in) || !valid(p_out) || p_out > p_in {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= p_out <= p_in <= 1, got p_in = {p_in}, p_out = {p_out}"
        )));
    }
    let size = n / k;
    let block = |v: usize| v / size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block(u) == block(v) { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(block).collect();
    Ok((Graph::from_edges(n, edges), Partition::from_labels(&labels)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::modularity;

    #[test]
    fn disjoint_cliques() {
        let (g, truth) = planted_partition_graph(10, 2, 1.0, 0.0, 3).unwrap();
        assert_eq!(g.m(), 2 * 10);
        assert_eq!(modularity(&g, &truth).unwrap(), 0.5);
    }

    #[test]
    fn seeded() {
        let a = planted_partition_graph(60, 3, 0.5, 0.1, 42).unwrap();
        let b = planted_partition_graph(60, 3, 0.5, 0.1, 42).unwrap();
        let c = planted_partition_graph(60, 3, 0.5, 0.1, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(planted_partition_graph(10, 3, 0.5, 0.1, 0).is_err());
        assert!(planted_partition_graph(10, 2, 0.1, 0.2, 0).is_err());
        assert!(planted_partition_graph(10, 2, 0.1, 0.1, 0).is_ok());
        assert!(planted_partition_graph(10, 2, 1.5, 0.1, 0).is_err());
        assert!(planted_partition_graph(10, 2, 0.5, -0.1, 0).is_err());
    }
}
