//! Clique-based vertex embedding.
//!
//! Every vertex becomes a row over the maximal cliques of the graph:
//!
//! - `Y` (n × d) is the 0/1 clique-incidence matrix;
//! - `X` (n × n) is the co-participation matrix, `X_ij` being the summed edge
//!   counts `w_l` of the cliques holding both `i` and `j` (diagonal included);
//! - `Z = X · Y` mixes direct membership (`|c_l| · w_l`) with involvement
//!   through clique neighbors.
//!
//! Columns of `Z` are then reweighted by an inverse-document-frequency factor
//! `log2(n / nnz(column))` and each row is scaled to unit length.

use std::io::Write;

use rayon::prelude::*;

use crate::cliques::{enumerate_maximal_cliques_with, CliqueSet, EnumerationOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sparse::SparseMatrix;
use crate::timing::PhaseTimings;

/// Unit-length vertex rows plus the IDF vector that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub z: SparseMatrix,
    pub gamma: Vec<f64>,
    /// Vertices whose row is structurally empty (isolated vertices).
    pub zero_rows: Vec<usize>,
    /// Vertices whose every clique has zero IDF weight; their rows hold the
    /// normalized unweighted profile instead.
    pub unweighted_rows: Vec<usize>,
    /// Present when the rows came from [`embed`]; lets row inner products be
    /// formed without touching `z`.
    pub factors: Option<GramFactors>,
}

/// The factors of the unweighted rows, `Z = X · Y`. Inner products of IDF
/// weighted rows are `(X · Y Γ² Yᵀ · X)_ij`, which costs the sum of squared
/// clique sizes instead of the sum of squared column counts of `Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramFactors {
    pub x: SparseMatrix,
    pub y: SparseMatrix,
    pub cliques: CliqueSet,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn d(&self) -> usize {
        self.z.ncols()
    }

    /// Vertices that take part in clustering, ascending.
    pub fn active_rows(&self) -> Vec<usize> {
        let mut zero = self.zero_rows.iter().peekable();
        (0..self.n())
            .filter(|&v| {
                if zero.peek() == Some(&&v) {
                    zero.next();
                    false
                } else {
                    true
                }
            })
            .collect()
    }

    /// Writes the rows as `n d nnz` followed by `row col value` triplets.
    pub fn write_triplets<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.z.write_triplets(out)
    }

    /// Sidecar for [`Embedding::write_triplets`]: `row original_id` per line.
    pub fn write_vertex_map<W: Write>(&self, g: &Graph, mut out: W) -> std::io::Result<()> {
        for v in 0..self.n() {
            writeln!(out, "{} {}", v, g.label(v))?;
        }
        Ok(())
    }
}

fn check_dims(g: &Graph, cs: &CliqueSet) -> Result<()> {
    if g.n() != cs.n() {
        return Err(Error::Dimension(format!(
            "graph has {} vertices but cliques were enumerated over {}",
            g.n(),
            cs.n()
        )));
    }
    Ok(())
}

/// `Y_il = 1` iff vertex `i` belongs to clique `l`.
pub fn incidence_matrix(g: &Graph, cs: &CliqueSet) -> Result<SparseMatrix> {
    check_dims(g, cs)?;
    let mut indptr = vec![0usize; g.n() + 1];
    for (v, count) in cs.memberships().into_iter().enumerate() {
        indptr[v + 1] = indptr[v] + count;
    }
    let mut next = indptr.clone();
    let mut indices = vec![0u32; indptr[g.n()]];
    for (l, clique) in cs.iter().enumerate() {
        for &v in clique {
            indices[next[v as usize]] = l as u32;
            next[v as usize] += 1;
        }
    }
    let values = vec![1.0; indices.len()];
    Ok(SparseMatrix::from_csr(cs.d(), indptr, indices, values))
}

/// `X = Y · diag(w) · Yᵀ`; zero entries (size-1 cliques) are not stored.
pub fn coparticipation_matrix(g: &Graph, cs: &CliqueSet) -> Result<SparseMatrix> {
    let y = incidence_matrix(g, cs)?;
    Ok(coparticipation_from(&y, cs))
}

fn coparticipation_from(y: &SparseMatrix, cs: &CliqueSet) -> SparseMatrix {
    clique_pair_sums(y, cs, |l| cs.weight(l) as f64)
}

/// `Y · diag(weight) · Yᵀ` straight from the clique lists. Weights must be
/// non-negative; entries that only receive zero weight are not stored.
pub(crate) fn clique_pair_sums(y: &SparseMatrix, cs: &CliqueSet, weight: impl Fn(usize) -> f64 + Sync) -> SparseMatrix {
    let n = cs.n();
    let rows = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n], Vec::new()),
            |(acc, touched), i| {
                for &l in y.row(i).0 {
                    let w = weight(l as usize);
                    if w == 0.0 {
                        continue;
                    }
                    for &j in cs.clique(l as usize) {
                        if acc[j as usize] == 0.0 {
                            touched.push(j);
                        }
                        acc[j as usize] += w;
                    }
                }
                touched.sort_unstable();
                let vals = touched.iter().map(|&j| std::mem::take(&mut acc[j as usize])).collect();
                (std::mem::take(touched), vals)
            },
        )
        .collect();
    SparseMatrix::from_row_parts(n, rows)
}

/// `Z = X · Y`.
pub fn vertex_community_matrix(x: &SparseMatrix, y: &SparseMatrix) -> Result<SparseMatrix> {
    if x.nrows() != x.ncols() || x.ncols() != y.nrows() {
        return Err(Error::Dimension(format!(
            "X is {}x{}, Y is {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    x.matmul(y)
}

/// `γ_l = log2(n / δ_l)` with `δ_l` the nonzero count of column `l`.
///
/// Columns without any nonzero (size-1 cliques of isolated vertices) get
/// `γ_l = 0`; they carry no entries to weight.
pub fn idf_vector(z: &SparseMatrix) -> Result<Vec<f64>> {
    if z.nrows() == 0 || z.ncols() == 0 || z.nnz() == 0 {
        return Err(Error::EmptyColumn(format!(
            "matrix is {}x{} with {} nonzeros",
            z.nrows(),
            z.ncols(),
            z.nnz()
        )));
    }
    let n = z.nrows() as f64;
    Ok(z
        .column_nnz()
        .into_iter()
        .map(|delta| if delta == 0 { 0.0 } else { (n / delta as f64).log2() })
        .collect())
}

/// Hadamard product of every row with `gamma`.
pub fn apply_tfidf(z: &SparseMatrix, gamma: &[f64]) -> Result<SparseMatrix> {
    z.scale_columns(gamma)
}

/// Scales each row of `weighted` to unit L2 norm.
///
/// A row with stored entries whose weighted values are all zero would have no
/// direction; it is replaced by the normalized row of `unweighted` and listed
/// in `unweighted_rows`. Rows without stored entries stay empty and are listed
/// in `zero_rows`.
pub fn normalize_rows(weighted: SparseMatrix, unweighted: &SparseMatrix, gamma: Vec<f64>) -> Embedding {
    assert_eq!(weighted.nrows(), unweighted.nrows());
    let mut z = weighted;
    let mut zero_rows = Vec::new();
    let mut unweighted_rows = Vec::new();
    let mut replacement: Vec<(usize, Vec<f64>)> = Vec::new();
    for i in 0..z.nrows() {
        let (_, vals) = z.row(i);
        if vals.is_empty() {
            zero_rows.push(i);
            continue;
        }
        let norm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            continue;
        }
        let (_, raw) = unweighted.row(i);
        let raw_norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        unweighted_rows.push(i);
        replacement.push((i, raw.iter().map(|v| v / raw_norm).collect()));
    }

    let indptr = z.indptr().to_vec();
    let values = z.values_mut();
    for i in 0..indptr.len() - 1 {
        let span = indptr[i]..indptr[i + 1];
        let norm = values[span.clone()].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values[span] {
                *v /= norm;
            }
        }
    }
    for (i, vals) in replacement {
        values[indptr[i]..indptr[i + 1]].copy_from_slice(&vals);
    }

    Embedding {
        z,
        gamma,
        zero_rows,
        unweighted_rows,
        factors: None,
    }
}

/// Intermediate matrices of the embedding pipeline, kept for inspection.
#[derive(Clone, Debug)]
pub struct EmbeddingStages {
    pub y: SparseMatrix,
    pub x: SparseMatrix,
    pub z: SparseMatrix,
}

#[derive(Clone, Debug)]
pub struct EmbedOutput {
    pub embedding: Embedding,
    pub cliques: CliqueSet,
    pub timings: PhaseTimings,
}

pub fn embed(g: &Graph) -> Result<EmbedOutput> {
    embed_with(g, EnumerationOptions::default())
}

/// Enumerates cliques, builds `Y`, `X`, `Z`, applies IDF weighting and
/// normalizes rows. Phases are timed as `cliques`, `matrices` and `tfidf`.
pub fn embed_with(g: &Graph, opts: EnumerationOptions) -> Result<EmbedOutput> {
    let mut timings = PhaseTimings::new();
    let cliques = timings.time("cliques", || enumerate_maximal_cliques_with(g, opts))?;
    let stages = timings.time("matrices", || build_stages(g, &cliques))?;
    let embedding = timings.time("tfidf", || -> Result<Embedding> {
        let gamma = idf_vector(&stages.z)?;
        let weighted = apply_tfidf(&stages.z, &gamma)?;
        let mut e = normalize_rows(weighted, &stages.z, gamma);
        e.factors = Some(GramFactors {
            x: stages.x,
            y: stages.y,
            cliques: cliques.clone(),
        });
        Ok(e)
    })?;
    Ok(EmbedOutput {
        embedding,
        cliques,
        timings,
    })
}

pub fn build_stages(g: &Graph, cs: &CliqueSet) -> Result<EmbeddingStages> {
    let y = incidence_matrix(g, cs)?;
    let x = coparticipation_from(&y, cs);
    let z = vertex_community_matrix(&x, &y)?;
    Ok(EmbeddingStages { y, x, z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::enumerate_maximal_cliques;
    use crate::graph::parse_edge_list_str;

    fn toy() -> (Graph, CliqueSet) {
        let g = parse_edge_list_str(include_str!("../data/toy.edges")).unwrap();
        let cs = enumerate_maximal_cliques(&g).unwrap();
        (g, cs)
    }

    fn dense(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn toy_incidence() {
        let (g, cs) = toy();
        let y = incidence_matrix(&g, &cs).unwrap();
        let expected = dense(&[
            &[1., 0., 0.],
            &[1., 1., 0.],
            &[1., 1., 0.],
            &[0., 1., 0.],
            &[0., 0., 1.],
            &[0., 0., 1.],
            &[0., 0., 1.],
        ]);
        assert_eq!(y.to_dense(), expected);
        let row_sums: Vec<usize> = (0..7).map(|i| y.row_nnz(i)).collect();
        assert_eq!(row_sums, cs.memberships());
    }

    #[test]
    fn toy_coparticipation() {
        let (g, cs) = toy();
        let x = coparticipation_matrix(&g, &cs).unwrap();
        let expected = dense(&[
            &[3., 3., 3., 0., 0., 0., 0.],
            &[3., 6., 6., 3., 0., 0., 0.],
            &[3., 6., 6., 3., 0., 0., 0.],
            &[0., 3., 3., 3., 0., 0., 0.],
            &[0., 0., 0., 0., 3., 3., 3.],
            &[0., 0., 0., 0., 3., 3., 3.],
            &[0., 0., 0., 0., 3., 3., 3.],
        ]);
        assert_eq!(x.to_dense(), expected);
        assert_eq!(x.get(1, 2), 6.0);
        assert_eq!(x.transpose(), x);
    }

    #[test]
    fn toy_vertex_community() {
        let (g, cs) = toy();
        let st = build_stages(&g, &cs).unwrap();
        let expected = dense(&[
            &[9., 6., 0.],
            &[15., 15., 0.],
            &[15., 15., 0.],
            &[6., 9., 0.],
            &[0., 0., 9.],
            &[0., 0., 9.],
            &[0., 0., 9.],
        ]);
        assert_eq!(st.z.to_dense(), expected);
        assert_eq!(st.z.get(3, 1), 9.0);
        assert_eq!(st.z.get(3, 0), 6.0);
    }

    #[test]
    fn isolated_vertex_coparticipation_is_empty() {
        let g = Graph::from_edges(1, []);
        let cs = enumerate_maximal_cliques(&g).unwrap();
        let x = coparticipation_matrix(&g, &cs).unwrap();
        assert_eq!((x.nrows(), x.ncols(), x.nnz()), (1, 1, 0));
    }

    #[test]
    fn dimension_mismatch() {
        let (g, _) = toy();
        let other = enumerate_maximal_cliques(&Graph::from_edges(3, [(0, 1)])).unwrap();
        assert!(matches!(incidence_matrix(&g, &other), Err(Error::Dimension(_))));
        let y = SparseMatrix::zeros(3, 2);
        let x = SparseMatrix::zeros(4, 4);
        assert!(vertex_community_matrix(&x, &y).is_err());
    }

    #[test]
    fn toy_idf() {
        let (g, cs) = toy();
        let z = build_stages(&g, &cs).unwrap().z;
        let gamma = idf_vector(&z).unwrap();
        let expect = [(7f64 / 4.).log2(), (7f64 / 4.).log2(), (7f64 / 3.).log2()];
        for (a, b) in gamma.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((gamma[0] - 0.807).abs() < 1e-3 && (gamma[2] - 1.222).abs() < 1e-3);
    }

    #[test]
    fn idf_edge_cases() {
        let dense_col = SparseMatrix::from_triplets(4, 1, &[(0, 0, 1.), (1, 0, 2.), (2, 0, 1.), (3, 0, 5.)]);
        assert_eq!(idf_vector(&dense_col).unwrap(), vec![0.0]);
        let single = SparseMatrix::from_triplets(8, 1, &[(5, 0, 2.)]);
        assert_eq!(idf_vector(&single).unwrap(), vec![3.0]);
        assert!(idf_vector(&SparseMatrix::zeros(3, 0)).is_err());
    }

    #[test]
    fn tfidf_worked_value() {
        let (g, cs) = toy();
        let z = build_stages(&g, &cs).unwrap().z;
        let gamma = idf_vector(&z).unwrap();
        let w = apply_tfidf(&z, &gamma).unwrap();
        assert!((w.get(0, 1) - 6.0 * (7f64 / 4.).log2()).abs() < 1e-12);
        assert!((w.get(0, 1) - 4.84).abs() < 0.05);
        assert_eq!(apply_tfidf(&z, &[1.0; 3]).unwrap(), z);
        assert!(apply_tfidf(&z, &[0.0; 3]).unwrap().iter().all(|(_, _, v)| v == 0.0));
        assert!(apply_tfidf(&z, &[1.0; 2]).is_err());
    }

    #[test]
    fn toy_embedding_rows() {
        let (g, _) = toy();
        let out = embed(&g).unwrap();
        let e = &out.embedding;
        assert!(e.zero_rows.is_empty() && e.unweighted_rows.is_empty());
        assert_eq!(e.z.row(4).1, &[1.0]);
        assert_eq!(e.z.row(4), e.z.row(5));
        assert_eq!(e.z.row(5), e.z.row(6));
        assert_eq!(e.z.row(1), e.z.row(2));
        for i in 0..7 {
            let norm: f64 = e.z.row(i).1.iter().map(|v| v * v).sum();
            assert!((norm.sqrt() - 1.0).abs() < 1e-9);
        }
        assert!(out.timings.get("cliques").is_some());
        assert!(out.timings.get("matrices").is_some());
        assert!(out.timings.get("tfidf").is_some());
    }

    #[test]
    fn isolated_vertex_is_a_zero_row() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2)]);
        let e = embed(&g).unwrap().embedding;
        assert_eq!(e.zero_rows, vec![3]);
        assert_eq!(e.active_rows(), vec![0, 1, 2]);
        assert_eq!(e.z.row_nnz(3), 0);
    }

    #[test]
    fn single_clique_falls_back_to_unweighted_rows() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let cs = enumerate_maximal_cliques(&g).unwrap();
        let st = build_stages(&g, &cs).unwrap();
        assert_eq!(st.z.to_dense(), vec![vec![9.0]; 3]);
        let e = embed(&g).unwrap().embedding;
        assert_eq!(e.gamma, vec![0.0]);
        assert_eq!(e.unweighted_rows, vec![0, 1, 2]);
        for i in 0..3 {
            assert_eq!(e.z.row(i).1, &[1.0]);
        }
    }

    #[test]
    fn single_nonzero_row_becomes_one() {
        let w = SparseMatrix::from_triplets(2, 3, &[(0, 2, 4.2), (1, 0, 3.0), (1, 1, 4.0)]);
        let e = normalize_rows(w.clone(), &w, vec![1.0; 3]);
        assert_eq!(e.z.row(0).1, &[1.0]);
        assert_eq!(e.z.row(1).1, &[0.6, 0.8]);
    }

    #[test]
    fn karate_shape() {
        let g = parse_edge_list_str(include_str!("../data/karate.edges")).unwrap();
        let e = embed(&g).unwrap().embedding;
        assert_eq!((e.n(), e.d()), (34, 36));
    }

    #[test]
    fn export_formats() {
        let g = Graph::from_edges(2, [(0, 1)]).with_labels(vec![10, 20]);
        let e = embed(&g).unwrap().embedding;
        let mut buf = Vec::new();
        e.write_vertex_map(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 10\n1 20\n");
        let mut buf = Vec::new();
        e.write_triplets(&mut buf).unwrap();
        // Both rows fall back to the unweighted (single) column.
        assert_eq!(String::from_utf8(buf).unwrap(), "2 1 2\n0 0 1\n1 0 1\n");
    }
}
