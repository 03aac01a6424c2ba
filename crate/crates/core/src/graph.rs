//! Simple undirected graphs in compressed adjacency form, edge-list ingestion
//! and the preprocessing applied before clique enumeration (simplification and
//! largest-component extraction).

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Simple undirected graph with sorted adjacency lists.
///
/// Vertices are dense ids `0..n`. When the graph was built from an external
/// source, `labels` holds the original identifier of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    m: usize,
    labels: Option<Vec<u64>>,
}

/// Bijection between original vertex identifiers and compact ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexMap {
    forward: HashMap<u64, u32>,
    backward: Vec<u64>,
}

impl VertexMap {
    /// Builds the map from the list of original ids indexed by compact id.
    ///
    /// Panics if `backward` contains a duplicate id.
    pub fn new(backward: Vec<u64>) -> Self {
        let mut forward = HashMap::with_capacity(backward.len());
        for (compact, &orig) in backward.iter().enumerate() {
            let prev = forward.insert(orig, compact as u32);
            assert!(prev.is_none(), "duplicate original id {orig}");
        }
        VertexMap { forward, backward }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n as u64).collect())
    }

    pub fn len(&self) -> usize {
        self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backward.is_empty()
    }

    pub fn to_compact(&self, original: u64) -> Option<u32> {
        self.forward.get(&original).copied()
    }

    pub fn to_original(&self, compact: u32) -> u64 {
        self.backward[compact as usize]
    }

    pub fn originals(&self) -> &[u64] {
        &self.backward
    }
}

/// Normalizes an undirected edge list: loops are dropped, every edge is
/// oriented as `(min, max)` and duplicates (including reversed ones) collapse.
pub fn simplify_edges(edges: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl Graph {
    /// Builds a simple graph on `n` vertices. Loops and duplicate edges are
    /// discarded. Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if u == v {
                continue;
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        Self::from_adjacency(adj)
    }

    fn from_adjacency(mut adj: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        let m = targets.len() / 2;
        Graph {
            offsets,
            targets,
            m,
            labels: None,
        }
    }

    /// Attaches original identifiers, one per vertex.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Self {
        assert_eq!(labels.len(), self.n(), "label count must equal n");
        self.labels = Some(labels);
        self
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Original identifier of `v` (the compact id itself when unlabeled).
    pub fn label(&self, v: usize) -> u64 {
        match &self.labels {
            Some(labels) => labels[v],
            None => v as u64,
        }
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    pub fn vertex_map(&self) -> VertexMap {
        VertexMap::new((0..self.n()).map(|v| self.label(v)).collect())
    }

    /// Iterates every undirected edge once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Subgraph induced by `vertices`, with the compact ids of `self` as the
    /// mapping domain. Labels are carried over.
    pub fn induced_subgraph(&self, vertices: &[u32]) -> (Graph, VertexMap) {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let map = VertexMap::new(sorted.iter().map(|&v| v as u64).collect());
        let adj = sorted
            .iter()
            .map(|&v| {
                self.neighbors(v as usize)
                    .iter()
                    .filter_map(|&w| map.to_compact(w as u64))
                    .collect()
            })
            .collect();
        let sub = Graph::from_adjacency(adj)
            .with_labels(sorted.iter().map(|&v| self.label(v as usize)).collect());
        (sub, map)
    }

    /// Connected components, each sorted ascending, in order of their
    /// smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u as u32);
                for &w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w as usize);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Writes one `u v` line per edge using original identifiers.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.label(u), self.label(v))?;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` or `%` and blank lines are skipped. Only the first
/// two columns are read; anything after them is ignored. Original ids are
/// compacted to `0..n` in ascending order, so compact order agrees with
/// original order.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut endpoint = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected two vertex ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid vertex id {tok:?}"),
            })
        };
        let u = endpoint()?;
        let v = endpoint()?;
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let map = VertexMap::new(ids);
    let edges = simplify_edges(&raw);
    let graph = Graph::from_edges(
        map.len(),
        edges.iter().map(|&(u, v)| {
            (
                map.to_compact(u).unwrap() as usize,
                map.to_compact(v).unwrap() as usize,
            )
        }),
    );
    Ok(graph.with_labels(map.backward))
}

pub fn parse_edge_list_str(text: &str) -> Result<Graph> {
    parse_edge_list(text.as_bytes())
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file)).map_err(|e| e.context(path.display().to_string()))
}

/// Largest connected component. Among components of equal size the one
/// holding the smallest original id wins. The returned map goes from the
/// component's compact ids to the compact ids of `g`.
pub fn giant_component(g: &Graph) -> (Graph, VertexMap) {
    let components = g.connected_components();
    let best = components
        .iter()
        .max_by(|a, b| {
            let min_a = a.iter().map(|&v| g.label(v as usize)).min();
            let min_b = b.iter().map(|&v| g.label(v as usize)).min();
            a.len().cmp(&b.len()).then(min_b.cmp(&min_a))
        })
        .cloned()
        .unwrap_or_default();
    g.induced_subgraph(&best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    /// Exact mean degree `2m / n`.
    pub mean: Ratio<usize>,
}

impl DegreeStats {
    pub fn mean_f64(&self) -> f64 {
        *self.mean.numer() as f64 / *self.mean.denom() as f64
    }
}

/// Minimum, maximum and mean vertex degree. Panics on the empty graph.
pub fn degree_stats(g: &Graph) -> DegreeStats {
    assert!(g.n() > 0, "degree statistics of an empty graph");
    let degrees = (0..g.n()).map(|v| g.degree(v));
    DegreeStats {
        min: degrees.clone().min().unwrap(),
        max: degrees.max().unwrap(),
        mean: Ratio::new(2 * g.m(), g.n()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TOY: &str = include_str!("../data/toy.edges");

    #[test]
    fn triangle() {
        let g = parse_edge_list_str("0 1\n1 2\n2 0").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        let s = degree_stats(&g);
        assert_eq!((s.min, s.max, s.mean), (2, 2, Ratio::from_integer(2)));
    }

    #[test]
    fn loops_and_duplicates_removed() {
        let g = parse_edge_list_str("0 0\n0 1\n1 0").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn comments_and_sparse_ids() {
        let g = parse_edge_list_str("# header\n% konect\n\n10 200\n200 3000\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.labels().unwrap(), &[10, 200, 3000]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
        let map = g.vertex_map();
        assert_eq!(map.to_compact(3000), Some(2));
        assert_eq!(map.to_original(1), 200);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_edge_list_str("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list_str("0 1\n7\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list_str("-1 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list_str(""), Err(Error::EmptyInput)));
        assert!(matches!(parse_edge_list_str("# only\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn toy_graph_degrees() {
        let g = parse_edge_list_str(TOY).unwrap();
        assert_eq!((g.n(), g.m()), (7, 8));
        let degrees: Vec<_> = (0..7).map(|v| g.degree(v)).collect();
        assert_eq!(degrees, vec![2, 3, 3, 2, 2, 2, 2]);
        let s = degree_stats(&g);
        assert_eq!(s.max, 3);
        assert_eq!(s.mean, Ratio::new(16, 7));
    }

    #[test]
    fn star_degrees() {
        let g = Graph::from_edges(5, (1..5).map(|v| (0, v)));
        let s = degree_stats(&g);
        assert_eq!((s.min, s.max, s.mean), (1, 4, Ratio::new(8, 5)));
    }

    #[test]
    fn toy_giant_component() {
        let g = parse_edge_list_str(TOY).unwrap();
        let (gc, map) = giant_component(&g);
        assert_eq!((gc.n(), gc.m()), (4, 5));
        assert_eq!(gc.labels().unwrap(), &[1, 2, 3, 4]);
        assert_eq!(map.originals(), &[0, 1, 2, 3]);
        assert!(gc.is_connected());
    }

    #[test]
    fn connected_graph_component_is_identity() {
        let g = parse_edge_list_str("0 1\n1 2\n2 3\n").unwrap();
        let (gc, map) = giant_component(&g);
        assert_eq!(gc, g);
        assert_eq!(map, VertexMap::identity(4));
    }

    #[test]
    fn equal_components_tie_on_smallest_original_id() {
        // Components {5,6,7} and {2,8,9}: same size, the second holds id 2.
        let g = parse_edge_list_str("5 6\n6 7\n8 9\n2 8\n").unwrap();
        let (gc, _) = giant_component(&g);
        assert_eq!(gc.labels().unwrap(), &[2, 8, 9]);
    }

    #[test]
    fn single_vertex_component() {
        let g = Graph::from_edges(1, []);
        let (gc, map) = giant_component(&g);
        assert_eq!(gc.n(), 1);
        assert_eq!(map.len(), 1);
    }

    #[test]
    fn write_then_parse_preserves_adjacency() {
        let g = parse_edge_list_str(TOY).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = parse_edge_list(&buf[..]).unwrap();
        assert_eq!(back, g);
    }
}
