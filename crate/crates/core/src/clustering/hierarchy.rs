//! Average-linkage (UPGMA) agglomerative clustering.
//!
//! The hierarchy is built with the nearest-neighbor chain algorithm and
//! Lance–Williams updates for average linkage, which is exact for this
//! (reducible) linkage in O(n²) time over a condensed distance matrix. Merges
//! are then ordered by distance and relabeled scipy-style: leaves are
//! `0..n`, the cluster created by the `t`-th merge is `n + t`.

use super::distance::CondensedMatrix;
use super::partition::Partition;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    /// Smaller of the two merged cluster ids.
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    /// Id of the cluster formed by this merge.
    pub id: usize,
    pub size: usize,
}

/// Full merge history over `leaves.len()` points.
#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    merges: Vec<Merge>,
    /// A leaf of each side of every merge.
    reps: Vec<(usize, usize)>,
    /// Graph vertex represented by each leaf.
    leaves: Vec<usize>,
    /// Vertex count of the underlying graph; vertices that are not leaves
    /// become singleton blocks when cutting.
    n_vertices: usize,
}

impl Dendrogram {
    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Assigns the leaves to points of a larger vertex set.
    pub fn with_vertices(mut self, leaves: Vec<usize>, n_vertices: usize) -> Self {
        assert_eq!(leaves.len(), self.leaf_count());
        assert!(leaves.iter().all(|&v| v < n_vertices));
        self.leaves = leaves;
        self.n_vertices = n_vertices;
        self
    }

    /// Partition of the vertices obtained by stopping after `leaf_count - k`
    /// merges. Vertices that are not leaves form extra singleton blocks.
    pub fn cut(&self, k: usize) -> Result<Partition> {
        let n = self.leaf_count();
        if k < 1 || k > n {
            return Err(Error::KOutOfRange { k, min: 1, max: n });
        }
        let mut dsu = DisjointSets::new(n);
        for &(a, b) in &self.reps[..n - k] {
            dsu.union(a, b);
        }
        let mut labels: Vec<usize> = (0..self.n_vertices).map(|v| n + v).collect();
        for (leaf, &v) in self.leaves.iter().enumerate() {
            labels[v] = dsu.find(leaf);
        }
        Ok(Partition::from_labels(&labels))
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        lo
    }
}

/// Average-linkage hierarchy over the points of `dist`.
///
/// The nearest neighbor of the chain tip is the closest active cluster; on
/// equal distances the previous chain element wins, then the smallest slot.
/// Slots coincide with leaf ids, so ties resolve towards the lowest ids.
/// The matrix is consumed as working storage.
pub fn agglomerative_hierarchy(mut dist: CondensedMatrix) -> Dendrogram {
    let n = dist.n();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut active_list: Vec<usize> = (0..n).collect();
    // (slot a, slot b, distance); slot ids are leaf ids contained in the cluster.
    let mut raw: Vec<(usize, usize, f64)> = Vec::with_capacity(n.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::new();

    while raw.len() + 1 < n {
        if chain.is_empty() {
            chain.push(active_list[0]);
        }
        loop {
            let tip = *chain.last().unwrap();
            let prev = if chain.len() >= 2 { Some(chain[chain.len() - 2]) } else { None };
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            if let Some(p) = prev {
                best = p;
                best_d = dist.get(tip, p);
            }
            for &c in &active_list {
                if c == tip {
                    continue;
                }
                let d = dist.get(tip, c);
                if d < best_d || (d == best_d && Some(best) != prev && c < best) {
                    best = c;
                    best_d = d;
                }
            }
            if Some(best) == prev {
                chain.pop();
                chain.pop();
                let (a, b) = (tip.min(best), tip.max(best));
                raw.push((a, b, best_d));
                // Lance–Williams update for average linkage; the merged
                // cluster lives on in slot `a`.
                let (sa, sb) = (size[a] as f64, size[b] as f64);
                active[b] = false;
                for &c in &active_list {
                    if c == a || c == b {
                        continue;
                    }
                    let d = (sa * dist.get(a, c) + sb * dist.get(b, c)) / (sa + sb);
                    dist.set(a, c, d);
                }
                size[a] += size[b];
                active_list.retain(|&c| active[c]);
                break;
            }
            chain.push(best);
        }
    }

    build_dendrogram(n, raw)
}

/// Orders raw merges by distance (stable) and assigns cluster ids.
fn build_dendrogram(n: usize, mut raw: Vec<(usize, usize, f64)>) -> Dendrogram {
    raw.sort_by(|x, y| x.2.total_cmp(&y.2));
    let mut dsu = DisjointSets::new(n);
    // Current cluster id of every disjoint-set root.
    let mut cluster_of: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<usize> = vec![1; n];
    let reps = raw.iter().map(|&(x, y, _)| (x, y)).collect();
    let merges = raw
        .into_iter()
        .enumerate()
        .map(|(t, (x, y, distance))| {
            let (rx, ry) = (dsu.find(x), dsu.find(y));
            let (cx, cy) = (cluster_of[rx], cluster_of[ry]);
            let size = sizes[rx] + sizes[ry];
            let root = dsu.union(rx, ry);
            cluster_of[root] = n + t;
            sizes[root] = size;
            Merge {
                a: cx.min(cy),
                b: cx.max(cy),
                distance,
                id: n + t,
                size,
            }
        })
        .collect();
    Dendrogram {
        merges,
        reps,
        leaves: (0..n).collect(),
        n_vertices: n,
    }
}
