use rayon::prelude::*;

use crate::embedding::{clique_pair_sums, Embedding, GramFactors};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Default ceiling on the memory used by a dense distance matrix (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: usize = 2 << 30;

/// Symmetric matrix with zero diagonal, stored as its strict upper triangle
/// in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CondensedMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CondensedMatrix {
    pub fn bytes_for(n: usize) -> usize {
        n * n.saturating_sub(1) / 2 * std::mem::size_of::<f64>()
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                data.push(f(i, j));
            }
        }
        CondensedMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        self.n * i - i * (i + 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.data[self.index(i, j)],
            std::cmp::Ordering::Greater => self.data[self.index(j, i)],
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        let at = if i < j { self.index(i, j) } else { self.index(j, i) };
        self.data[at] = value;
    }
}

/// Rows per accumulation block, chosen so that a block's dense scratch stays
/// near 32 MiB, with at least 8 blocks for parallelism. Independent of the
/// thread count.
fn block_rows(n: usize) -> usize {
    ((4 << 20) / n.max(1)).min(n.div_ceil(8)).max(1)
}

/// Cosine distances `1 - <z_i, z_j>` between the active (nonzero) rows of
/// the embedding, clamped to `[0, 2]`. Distances below `1e-12` are snapped to
/// zero so that numerically identical rows coincide.
///
/// Returns the matrix together with the vertex id of each point.
pub fn cosine_distance_matrix(e: &Embedding, memory_budget: usize) -> Result<(CondensedMatrix, Vec<usize>)> {
    let active = e.active_rows();
    let n = active.len();
    let bytes = CondensedMatrix::bytes_for(n);
    if bytes > memory_budget {
        return Err(Error::MemoryBudget {
            n,
            bytes,
            budget: memory_budget,
        });
    }

    let data = match &e.factors {
        Some(f) => factored_distances(e, f, &active)?,
        None => generic_distances(e, &active),
    };
    Ok((CondensedMatrix { n, data }, active))
}

#[inline]
fn to_distance(dot: f64) -> f64 {
    let d = (1.0 - dot).clamp(0.0, 2.0);
    if d < 1e-12 {
        0.0
    } else {
        d
    }
}

/// Splits a condensed buffer into the per-row pieces `(i, i+1..n)`.
fn row_slices(data: &mut [f64], n: usize) -> Vec<&mut [f64]> {
    let mut slices = Vec::with_capacity(n);
    let mut rest = data;
    for i in 0..n {
        let (head, tail) = rest.split_at_mut(n - i - 1);
        slices.push(head);
        rest = tail;
    }
    slices
}

/// Inner products through the factors: `G = X · M · X` with `M = Y Γ² Yᵀ`
/// for weighted rows and `M = Y Yᵀ` among unweighted rows. A weighted and an
/// unweighted row never share a column with nonzero weight, so their inner
/// product is zero.
fn factored_distances(e: &Embedding, f: &GramFactors, active: &[usize]) -> Result<Vec<f64>> {
    let n = active.len();
    let mut unweighted = vec![false; e.n()];
    for &v in &e.unweighted_rows {
        unweighted[v] = true;
    }
    let xm_w = f.x.matmul(&clique_pair_sums(&f.y, &f.cliques, |l| e.gamma[l] * e.gamma[l]))?;
    let xm_u = if e.unweighted_rows.is_empty() {
        None
    } else {
        Some(f.x.matmul(&clique_pair_sums(&f.y, &f.cliques, |_| 1.0))?)
    };
    let xm = |v: usize| if unweighted[v] { xm_u.as_ref().unwrap() } else { &xm_w };

    let diag: Vec<f64> = (0..e.n()).map(|v| sparse_dot(xm(v).row(v), f.x.row(v))).collect();

    let mut data = vec![0.0; n * n.saturating_sub(1) / 2];
    row_slices(&mut data, n).into_par_iter().enumerate().for_each_init(
        || vec![0.0f64; e.n()],
        |acc, (i, out)| {
            let v = active[i];
            let (ks, coefs) = xm(v).row(v);
            for (&k, &c) in ks.iter().zip(coefs) {
                let (js, xs) = f.x.row(k as usize);
                for (&j, &x) in js.iter().zip(xs) {
                    acc[j as usize] += c * x;
                }
            }
            for (slot, &w) in out.iter_mut().zip(&active[i + 1..]) {
                let dot = if unweighted[v] == unweighted[w] {
                    acc[w] / (diag[v] * diag[w]).sqrt()
                } else {
                    0.0
                };
                *slot = to_distance(dot);
            }
            for &k in ks {
                for &j in f.x.row(k as usize).0 {
                    acc[j as usize] = 0.0;
                }
            }
        },
    );
    Ok(data)
}

fn sparse_dot((ca, va): (&[u32], &[f64]), (cb, vb): (&[u32], &[f64])) -> f64 {
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < ca.len() && j < cb.len() {
        match ca[i].cmp(&cb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += va[i] * vb[j];
                i += 1;
                j += 1;
            }
        }
    }
    dot
}

/// Inner products straight from the stored rows, accumulated column by
/// column over blocks of rows.
fn generic_distances(e: &Embedding, active: &[usize]) -> Vec<f64> {
    let n = active.len();
    let columns = if n == e.n() {
        e.z.transpose()
    } else {
        let rows: Vec<Vec<(u32, f64)>> = active
            .iter()
            .map(|&v| {
                let (cols, vals) = e.z.row(v);
                cols.iter().copied().zip(vals.iter().copied()).collect()
            })
            .collect();
        SparseMatrix::from_rows(e.d(), rows).transpose()
    };

    let mut data = vec![0.0; n * n.saturating_sub(1) / 2];
    let mut blocks: Vec<(usize, &mut [f64])> = Vec::new();
    let mut rest = data.as_mut_slice();
    let mut r0 = 0;
    while r0 < n {
        let r1 = (r0 + block_rows(n)).min(n);
        let len: usize = (r0..r1).map(|i| n - i - 1).sum();
        let (head, tail) = rest.split_at_mut(len);
        blocks.push((r0, head));
        rest = tail;
        r0 = r1;
    }

    // Each block of rows streams the columns once and accumulates its part
    // of the Gram matrix; every entry sums over columns in ascending order.
    blocks.into_par_iter().for_each(|(r0, out)| {
        let r1 = (r0 + block_rows(n)).min(n);
        let mut dots = vec![0.0f64; (r1 - r0) * n];
        for l in 0..columns.nrows() {
            let (members, weights) = columns.row(l);
            let lo = members.partition_point(|&j| (j as usize) < r0);
            let hi = members.partition_point(|&j| (j as usize) < r1);
            for a in lo..hi {
                let (i, za) = (members[a] as usize, weights[a]);
                let row = &mut dots[(i - r0) * n..(i - r0 + 1) * n];
                for (&j, &zb) in members[a + 1..].iter().zip(&weights[a + 1..]) {
                    row[j as usize] += za * zb;
                }
            }
        }
        let mut at = 0;
        for i in r0..r1 {
            let row = &dots[(i - r0) * n..(i - r0 + 1) * n];
            for &dot in &row[i + 1..] {
                out[at] = to_distance(dot);
                at += 1;
            }
        }
    });

    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed;
    use crate::graph::{parse_edge_list_str, Graph};

    #[test]
    fn condensed_indexing() {
        let m = CondensedMatrix::from_fn(4, |i, j| (10 * i + j) as f64);
        assert_eq!(m.get(1, 3), 13.0);
        assert_eq!(m.get(3, 1), 13.0);
        assert_eq!(m.get(2, 2), 0.0);
        assert_eq!(m.data.len(), 6);
    }

    #[test]
    fn toy_distances() {
        let g = parse_edge_list_str(include_str!("../../data/toy.edges")).unwrap();
        let e = embed(&g).unwrap().embedding;
        let (d, ids) = cosine_distance_matrix(&e, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(ids, (0..7).collect::<Vec<_>>());
        assert_eq!(d.get(1, 2), 0.0);
        assert_eq!(d.get(4, 6), 0.0);
        assert_eq!(d.get(0, 4), 1.0);
        let v1_v4 = 1.0 - 108.0 / 117.0;
        assert!((d.get(0, 3) - v1_v4).abs() < 1e-12);
    }

    fn both_paths(g: &Graph) -> (CondensedMatrix, CondensedMatrix) {
        let mut e = embed(g).unwrap().embedding;
        let fast = cosine_distance_matrix(&e, DEFAULT_MEMORY_BUDGET).unwrap().0;
        e.factors = None;
        let slow = cosine_distance_matrix(&e, DEFAULT_MEMORY_BUDGET).unwrap().0;
        (fast, slow)
    }

    #[test]
    fn factored_matches_rows() {
        let karate = parse_edge_list_str(include_str!("../../data/karate.edges")).unwrap();
        // A triangle (all IDF weights zero) next to a path, plus an isolated vertex.
        let mixed = Graph::from_edges(8, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (5, 6)]);
        for g in [karate, mixed] {
            let (fast, slow) = both_paths(&g);
            assert_eq!(fast.n(), slow.n());
            for (a, b) in fast.data.iter().zip(&slow.data) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_rows_are_excluded() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 2)]);
        let e = embed(&g).unwrap().embedding;
        let (d, ids) = cosine_distance_matrix(&e, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(ids, vec![0, 1, 2, 3]);
        assert_eq!(d.n(), 4);
    }

    #[test]
    fn memory_budget() {
        let g = parse_edge_list_str(include_str!("../../data/karate.edges")).unwrap();
        let e = embed(&g).unwrap().embedding;
        let err = cosine_distance_matrix(&e, 1000).unwrap_err();
        assert!(matches!(err, Error::MemoryBudget { n: 34, .. }));
        assert!(err.to_string().contains("k-means"));
    }
}
