//! Seeded Lloyd k-means over the sparse unit rows of an embedding.
//!
//! Points stay sparse; centroids are dense. Initialization is k-means++ and
//! the whole procedure is restarted `restarts` times from one ChaCha stream,
//! keeping the run with the lowest inertia.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::partition::Partition;
use crate::embedding::Embedding;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansOptions {
    pub max_iterations: usize,
    /// Stop once no centroid moves farther than this (L2).
    pub tolerance: f64,
    pub restarts: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            max_iterations: 300,
            tolerance: 1e-4,
            restarts: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub partition: Partition,
    /// Sum of squared distances of the clustered points to their centroids.
    pub inertia: f64,
    pub iterations: usize,
}

struct Points<'a> {
    e: &'a Embedding,
    ids: Vec<usize>,
    sq_norms: Vec<f64>,
}

impl Points<'_> {
    fn len(&self) -> usize {
        self.ids.len()
    }

    fn row(&self, p: usize) -> (&[u32], &[f64]) {
        self.e.z.row(self.ids[p])
    }

    fn sq_dist(&self, p: usize, centroid: &[f64], centroid_sq: f64) -> f64 {
        let (cols, vals) = self.row(p);
        let dot: f64 = cols.iter().zip(vals).map(|(&c, &v)| v * centroid[c as usize]).sum();
        (self.sq_norms[p] - 2.0 * dot + centroid_sq).max(0.0)
    }

    fn sq_dist_points(&self, p: usize, q: usize) -> f64 {
        let (ca, va) = self.row(p);
        let (cb, vb) = self.row(q);
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
        (self.sq_norms[p] + self.sq_norms[q] - 2.0 * dot).max(0.0)
    }

    fn dense(&self, p: usize, d: usize) -> Vec<f64> {
        let mut out = vec![0.0; d];
        let (cols, vals) = self.row(p);
        for (&c, &v) in cols.iter().zip(vals) {
            out[c as usize] = v;
        }
        out
    }
}

/// k-way partition of the embedding rows. Zero rows are left out of the
/// clustering and returned as extra singleton blocks.
pub fn kmeans(e: &Embedding, k: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_with(e, k, seed, KMeansOptions::default())
}

pub fn kmeans_with(e: &Embedding, k: usize, seed: u64, opts: KMeansOptions) -> Result<KMeansResult> {
    let ids = e.active_rows();
    if k < 2 || k > ids.len() {
        return Err(Error::KOutOfRange {
            k,
            min: 2,
            max: ids.len(),
        });
    }
    let sq_norms = ids
        .iter()
        .map(|&v| e.z.row(v).1.iter().map(|x| x * x).sum())
        .collect();
    let points = Points { e, ids, sq_norms };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, f64, usize)> = None;
    for _ in 0..opts.restarts.max(1) {
        let init = plus_plus_init(&points, k, &mut rng);
        let run = lloyd(&points, init, &opts);
        if best.as_ref().is_none_or(|b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (labels, inertia, iterations) = best.unwrap();

    let mut full: Vec<usize> = (0..e.n()).map(|v| k + v).collect();
    for (p, &v) in points.ids.iter().enumerate() {
        full[v] = labels[p];
    }
    Ok(KMeansResult {
        partition: Partition::from_labels(&full),
        inertia,
        iterations,
    })
}

/// k-means++ seeding: first center uniform, then proportional to squared
/// distance to the nearest chosen center. Returns point indices.
fn plus_plus_init(points: &Points, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.len();
    let mut centers = vec![rng.gen_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|p| points.sq_dist_points(p, centers[0])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total <= 0.0 {
            // All points coincide with a center: take the first unused one.
            (0..n).find(|p| !centers.contains(p)).unwrap()
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (p, &w) in nearest.iter().enumerate() {
                if target < w {
                    pick = p;
                    break;
                }
                target -= w;
            }
            pick
        };
        centers.push(next);
        for (p, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(points.sq_dist_points(p, next));
        }
    }
    centers
}

fn lloyd(points: &Points, init: Vec<usize>, opts: &KMeansOptions) -> (Vec<usize>, f64, usize) {
    let d = points.e.d();
    let k = init.len();
    let mut centroids: Vec<Vec<f64>> = init.iter().map(|&p| points.dense(p, d)).collect();
    let mut labels = vec![0usize; points.len()];
    let mut dists = vec![0.0; points.len()];
    let mut iterations = 0;

    loop {
        assign(points, &centroids, &mut labels, &mut dists);
        iterations += 1;
        if iterations > opts.max_iterations {
            break;
        }

        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            let (cols, vals) = points.row(p);
            for (&col, &v) in cols.iter().zip(vals) {
                sums[c][col as usize] += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                sums[c].iter_mut().for_each(|x| *x *= inv);
            }
        }
        repair_empty(points, &mut labels, &mut dists, &mut counts, &mut sums);

        let shift = centroids
            .iter()
            .zip(&sums)
            .map(|(old, new)| old.iter().zip(new).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        centroids = sums;
        if shift < opts.tolerance {
            assign(points, &centroids, &mut labels, &mut dists);
            break;
        }
    }
    // Coincident points can leave clusters empty after the last assignment.
    let mut counts = vec![0usize; k];
    labels.iter().for_each(|&c| counts[c] += 1);
    repair_empty(points, &mut labels, &mut dists, &mut counts, &mut centroids);
    let inertia = dists.iter().sum();
    (labels, inertia, iterations)
}

fn assign(points: &Points, centroids: &[Vec<f64>], labels: &mut [usize], dists: &mut [f64]) {
    let sq: Vec<f64> = centroids.iter().map(|c| c.iter().map(|x| x * x).sum()).collect();
    for p in 0..points.len() {
        let (mut best, mut best_d) = (0, f64::INFINITY);
        for (c, centroid) in centroids.iter().enumerate() {
            let dist = points.sq_dist(p, centroid, sq[c]);
            if dist < best_d {
                best = c;
                best_d = dist;
            }
        }
        labels[p] = best;
        dists[p] = best_d;
    }
}

/// Gives every empty cluster the point farthest from its centroid within the
/// currently largest cluster.
fn repair_empty(
    points: &Points,
    labels: &mut [usize],
    dists: &mut [f64],
    counts: &mut [usize],
    centroids: &mut [Vec<f64>],
) {
    let d = points.e.d();
    for empty in 0..counts.len() {
        if counts[empty] > 0 {
            continue;
        }
        let largest = (0..counts.len()).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a))).unwrap();
        let far = (0..points.len())
            .filter(|&p| labels[p] == largest)
            .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
            .unwrap();
        labels[far] = empty;
        dists[far] = 0.0;
        counts[largest] -= 1;
        counts[empty] = 1;
        centroids[empty] = points.dense(far, d);
    }
}
