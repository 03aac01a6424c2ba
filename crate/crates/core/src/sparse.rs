//! Compressed sparse row matrices with the handful of kernels the embedding
//! pipeline needs: transpose, Gustavson sparse-sparse product and column
//! scaling.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// CSR matrix of `f64` values. Column indices are strictly increasing within
/// each row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from per-row entry lists, each sorted by column with no repeats.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let nrows = rows.len();
        let mut indptr = Vec::with_capacity(nrows + 1);
        indptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (c, v) in row {
                debug_assert!((c as usize) < ncols);
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        SparseMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    /// Builds from `(row, col, value)` triplets in any order. Duplicates are
    /// summed and resulting zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            rows[r].push((c as u32, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *row = merged;
        }
        Self::from_rows(ncols, rows)
    }

    pub fn from_dense(dense: &[Vec<f64>], ncols: usize) -> Self {
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(c, &v)| (c as u32, v))
                    .collect()
            })
            .collect();
        Self::from_rows(ncols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let span = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(at) => vals[at],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c as usize, v))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            out[i][j] = v;
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c as usize + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c as usize];
                indices[slot] = i as u32;
                values[slot] = v;
                next[c as usize] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr,
            indices,
            values,
        }
    }

    /// Sparse-sparse product `self · rhs` (Gustavson's row-by-row scheme).
    ///
    /// Every output row accumulates its terms in a fixed order, so the result
    /// does not depend on the number of worker threads.
    pub fn matmul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != rhs.nrows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let ncols = rhs.ncols;
        let rows: Vec<(Vec<u32>, Vec<f64>)> = (0..self.nrows)
            .into_par_iter()
            .map_init(
                || (vec![0.0f64; ncols], vec![false; ncols], Vec::new()),
                |(acc, seen, touched), i| {
                    let (lcols, lvals) = self.row(i);
                    for (&k, &a) in lcols.iter().zip(lvals) {
                        let (rcols, rvals) = rhs.row(k as usize);
                        for (&j, &b) in rcols.iter().zip(rvals) {
                            let j = j as usize;
                            if !seen[j] {
                                seen[j] = true;
                                touched.push(j as u32);
                            }
                            acc[j] += a * b;
                        }
                    }
                    // Dense rows are cheaper to collect by scanning than by sorting.
                    if touched.len() > ncols / 16 {
                        touched.clear();
                        touched.extend((0..ncols as u32).filter(|&j| seen[j as usize]));
                    } else {
                        touched.sort_unstable();
                    }
                    let mut vals = Vec::with_capacity(touched.len());
                    for &j in touched.iter() {
                        vals.push(acc[j as usize]);
                        acc[j as usize] = 0.0;
                        seen[j as usize] = false;
                    }
                    let cols = std::mem::take(touched);
                    (cols, vals)
                },
            )
            .collect();
        Ok(SparseMatrix::from_row_parts(ncols, rows))
    }

    pub(crate) fn from_row_parts(ncols: usize, rows: Vec<(Vec<u32>, Vec<f64>)>) -> Self {
        let nrows = rows.len();
        let nnz = rows.iter().map(|r| r.0.len()).sum();
        let mut indptr = Vec::with_capacity(nrows + 1);
        indptr.push(0);
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for (cols, vals) in rows {
            indices.extend_from_slice(&cols);
            values.extend_from_slice(&vals);
            indptr.push(indices.len());
        }
        SparseMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    /// Structural nonzero count of every column.
    pub fn column_nnz(&self) -> Vec<usize> {
        let mut counts = vec![0; self.ncols];
        for &c in &self.indices {
            counts[c as usize] += 1;
        }
        counts
    }

    /// Multiplies every stored entry of column `j` by `factors[j]`. The
    /// sparsity pattern is kept even where a factor is zero.
    pub fn scale_columns(&self, factors: &[f64]) -> Result<SparseMatrix> {
        if factors.len() != self.ncols {
            return Err(Error::Dimension(format!(
                "{} column factors for a matrix with {} columns",
                factors.len(),
                self.ncols
            )));
        }
        let mut out = self.clone();
        for (v, &c) in out.values.iter_mut().zip(&self.indices) {
            *v *= factors[c as usize];
        }
        Ok(out)
    }

    /// Takes raw CSR arrays; column indices must be increasing within rows.
    pub(crate) fn from_csr(ncols: usize, indptr: Vec<usize>, indices: Vec<u32>, values: Vec<f64>) -> Self {
        debug_assert_eq!(*indptr.last().unwrap(), indices.len());
        debug_assert_eq!(indices.len(), values.len());
        SparseMatrix {
            nrows: indptr.len() - 1,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    /// Writes the coordinate-triplet text form: a `nrows ncols nnz` header
    /// followed by one `row col value` line per stored entry.
    pub fn write_triplets<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.iter() {
            writeln!(out, "{i} {j} {v}")?;
        }
        Ok(())
    }
}
