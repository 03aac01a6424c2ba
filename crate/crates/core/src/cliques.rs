//! Maximal clique enumeration.
//!
//! Bron–Kerbosch with Tomita pivoting, driven by an outer loop over a
//! degeneracy ordering (Eppstein, Löffler and Strash). Each outer vertex `v`
//! seeds the search with its later neighbors as candidates and its earlier
//! neighbors as the exclusion set, so every maximal clique is reported exactly
//! once, from its earliest vertex in the ordering.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// All maximal cliques of a graph, in canonical order: size descending, then
/// lexicographic on the sorted member lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueSet {
    offsets: Vec<usize>,
    members: Vec<u32>,
    n: usize,
}

impl CliqueSet {
    /// Builds a canonical clique set from arbitrary vertex lists over `n`
    /// vertices. Member lists are sorted; duplicate cliques are removed.
    pub fn from_cliques(n: usize, mut cliques: Vec<Vec<u32>>) -> Self {
        for c in cliques.iter_mut() {
            c.sort_unstable();
        }
        cliques.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        cliques.dedup();
        let mut offsets = Vec::with_capacity(cliques.len() + 1);
        offsets.push(0);
        let mut members = Vec::with_capacity(cliques.iter().map(Vec::len).sum());
        for c in &cliques {
            members.extend_from_slice(c);
            offsets.push(members.len());
        }
        CliqueSet { offsets, members, n }
    }

    /// Number of maximal cliques.
    pub fn d(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Vertex count of the graph the cliques were taken from.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clique(&self, idx: usize) -> &[u32] {
        &self.members[self.offsets[idx]..self.offsets[idx + 1]]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        (0..self.d()).map(move |i| self.clique(i))
    }

    /// Edge count `|c|(|c|-1)/2` of clique `idx`.
    pub fn weight(&self, idx: usize) -> u64 {
        let s = self.clique(idx).len() as u64;
        s * s.saturating_sub(1) / 2
    }

    pub fn weights(&self) -> Vec<u64> {
        (0..self.d()).map(|i| self.weight(i)).collect()
    }

    /// Number of cliques each vertex belongs to.
    pub fn memberships(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for &v in &self.members {
            counts[v as usize] += 1;
        }
        counts
    }

    /// Writes `d=<count>` followed by one clique per line in original ids.
    pub fn write_dump<W: Write>(&self, g: &Graph, mut out: W) -> std::io::Result<()> {
        writeln!(out, "d={}", self.d())?;
        for c in self.iter() {
            let line: Vec<String> = c.iter().map(|&v| g.label(v as usize).to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Histogram clique size -> number of maximal cliques of that size.
pub fn clique_size_distribution(cs: &CliqueSet) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for c in cs.iter() {
        *hist.entry(c.len()).or_insert(0) += 1;
    }
    hist
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerationOptions {
    /// Fail with [`Error::CliqueBudgetExceeded`] once more than this many
    /// cliques have been found.
    pub max_cliques: Option<usize>,
}

pub fn enumerate_maximal_cliques(g: &Graph) -> Result<CliqueSet> {
    enumerate_maximal_cliques_with(g, EnumerationOptions::default())
}

pub fn enumerate_maximal_cliques_with(g: &Graph, opts: EnumerationOptions) -> Result<CliqueSet> {
    let order = degeneracy_order(g);
    let mut position = vec![0usize; g.n()];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i;
    }

    let budget = Budget {
        limit: opts.max_cliques.unwrap_or(usize::MAX),
        found: AtomicUsize::new(0),
        exceeded: AtomicBool::new(false),
    };

    let per_vertex: Vec<Vec<Vec<u32>>> = order
        .par_iter()
        .map(|&v| {
            let v = v as usize;
            let (mut later, mut earlier) = (Vec::new(), Vec::new());
            for &w in g.neighbors(v) {
                if position[w as usize] > position[v] {
                    later.push(w);
                } else {
                    earlier.push(w);
                }
            }
            let mut search = Search {
                g,
                budget: &budget,
                out: Vec::new(),
                clique: vec![v as u32],
            };
            search.expand(later, earlier);
            search.out
        })
        .collect();

    if budget.exceeded.load(Ordering::Relaxed) {
        return Err(Error::CliqueBudgetExceeded(budget.limit));
    }
    let cliques = per_vertex.into_iter().flatten().collect();
    Ok(CliqueSet::from_cliques(g.n(), cliques))
}

struct Budget {
    limit: usize,
    found: AtomicUsize,
    exceeded: AtomicBool,
}

struct Search<'a> {
    g: &'a Graph,
    budget: &'a Budget,
    out: Vec<Vec<u32>>,
    clique: Vec<u32>,
}

impl Search<'_> {
    /// `cand` and `excl` are sorted vertex lists, both fully adjacent to the
    /// current clique.
    fn expand(&mut self, mut cand: Vec<u32>, mut excl: Vec<u32>) {
        if self.budget.exceeded.load(Ordering::Relaxed) {
            return;
        }
        if cand.is_empty() {
            if excl.is_empty() {
                if self.budget.found.fetch_add(1, Ordering::Relaxed) >= self.budget.limit {
                    self.budget.exceeded.store(true, Ordering::Relaxed);
                    return;
                }
                self.out.push(self.clique.clone());
            }
            return;
        }

        let pivot = cand
            .iter()
            .chain(excl.iter())
            .copied()
            .max_by_key(|&u| intersection_len(&cand, self.g.neighbors(u as usize)))
            .unwrap();
        let pivot_nbrs = self.g.neighbors(pivot as usize);
        let branches: Vec<u32> = cand
            .iter()
            .copied()
            .filter(|v| pivot_nbrs.binary_search(v).is_err())
            .collect();

        for v in branches {
            let nbrs = self.g.neighbors(v as usize);
            let next_cand = intersect(&cand, nbrs);
            let next_excl = intersect(&excl, nbrs);
            self.clique.push(v);
            self.expand(next_cand, next_excl);
            self.clique.pop();

            let at = cand.binary_search(&v).unwrap();
            cand.remove(at);
            let at = excl.binary_search(&v).unwrap_err();
            excl.insert(at, v);
        }
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Vertices in order of repeated minimum-degree removal (bucket queue, ties
/// by smallest id).
pub fn degeneracy_order(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<std::collections::BTreeSet<u32>> = vec![Default::default(); max_deg + 1];
    for v in 0..n {
        buckets[degree[v]].insert(v as u32);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut lowest = 0;
    for _ in 0..n {
        while buckets[lowest].is_empty() {
            lowest += 1;
        }
        let v = buckets[lowest].pop_first().unwrap();
        removed[v as usize] = true;
        order.push(v);
        for &w in g.neighbors(v as usize) {
            let w = w as usize;
            if !removed[w] {
                buckets[degree[w]].remove(&(w as u32));
                degree[w] -= 1;
                buckets[degree[w]].insert(w as u32);
            }
        }
        lowest = lowest.saturating_sub(1);
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list_str;

    #[test]
    fn toy_cliques() {
        let g = parse_edge_list_str(include_str!("../data/toy.edges")).unwrap();
        let cs = enumerate_maximal_cliques(&g).unwrap();
        assert_eq!(cs.d(), 3);
        let got: Vec<&[u32]> = cs.iter().collect();
        assert_eq!(got, vec![&[0, 1, 2][..], &[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(cs.weights(), vec![3, 3, 3]);
        assert_eq!(clique_size_distribution(&cs), BTreeMap::from([(3, 3)]));
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let g = Graph::from_edges(3, []);
        let cs = enumerate_maximal_cliques(&g).unwrap();
        assert_eq!(cs.d(), 3);
        assert_eq!(cs.weights(), vec![0, 0, 0]);
        assert_eq!(cs.memberships(), vec![1, 1, 1]);
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, [(0, 1)]);
        let cs = enumerate_maximal_cliques(&g).unwrap();
        assert_eq!(clique_size_distribution(&cs), BTreeMap::from([(2, 1)]));
        assert_eq!(cs.weight(0), 1);
    }

    #[test]
    fn budget_is_enforced() {
        // Three disjoint edges: three maximal cliques.
        let g = Graph::from_edges(6, [(0, 1), (2, 3), (4, 5)]);
        let opts = EnumerationOptions { max_cliques: Some(2) };
        assert!(matches!(
            enumerate_maximal_cliques_with(&g, opts),
            Err(Error::CliqueBudgetExceeded(2))
        ));
        let opts = EnumerationOptions { max_cliques: Some(3) };
        assert_eq!(enumerate_maximal_cliques_with(&g, opts).unwrap().d(), 3);
    }

    #[test]
    fn degeneracy_order_is_a_permutation() {
        let g = parse_edge_list_str(include_str!("../data/karate.edges")).unwrap();
        let mut order = degeneracy_order(&g);
        order.sort_unstable();
        assert_eq!(order, (0..34).collect::<Vec<u32>>());
    }

    #[test]
    fn dump_format() {
        let g = parse_edge_list_str(include_str!("../data/toy.edges")).unwrap();
        let cs = enumerate_maximal_cliques(&g).unwrap();
        let mut buf = Vec::new();
        cs.write_dump(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "d=3\n1 2 3\n2 3 4\n5 6 7\n");
    }
}
