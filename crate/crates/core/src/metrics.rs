//! Partition quality: modularity, permanence and normalized mutual
//! information.

use std::collections::HashMap;

use serde_json::{Map, Value};

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::timing::PhaseTimings;

fn check_cover(g: &Graph, p: &Partition) -> Result<()> {
    if g.n() != p.n() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} vertices, graph has {}",
            p.n(),
            g.n()
        )));
    }
    Ok(())
}

/// Newman–Girvan modularity, summed block by block as
/// `Σ_c [ 2·l_c / 2m − (vol_c / 2m)² ]`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    check_cover(g, p)?;
    if g.m() == 0 {
        return Err(Error::ModularityUndefined);
    }
    let two_m = 2.0 * g.m() as f64;
    let mut internal = vec![0usize; p.k()];
    let mut volume = vec![0usize; p.k()];
    for u in 0..g.n() {
        let b = p.block_of(u);
        volume[b] += g.degree(u);
        internal[b] += g
            .neighbors(u)
            .iter()
            .filter(|&&v| p.block_of(v as usize) == b)
            .count();
    }
    Ok(internal
        .iter()
        .zip(&volume)
        .map(|(&l, &vol)| {
            let a = vol as f64 / two_m;
            l as f64 / two_m - a * a
        })
        .sum())
}

/// Fraction of realized edges among the neighbors of `v` that share its
/// block; 0 when fewer than two such neighbors exist.
pub fn internal_clustering_coefficient(g: &Graph, p: &Partition, v: usize) -> f64 {
    let b = p.block_of(v);
    let inside: Vec<u32> = g
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&w| p.block_of(w as usize) == b)
        .collect();
    let t = inside.len();
    if t < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in inside.iter().enumerate() {
        let nbrs = g.neighbors(a as usize);
        links += inside[i + 1..]
            .iter()
            .filter(|&&c| nbrs.binary_search(&c).is_ok())
            .count();
    }
    links as f64 / (t * (t - 1) / 2) as f64
}

/// `P(v) = I(v) / max(1, E_max(v)) / δ(v) − (1 − c_in(v))`, where `I(v)`
/// counts neighbors in the block of `v` and `E_max(v)` is the largest count
/// of neighbors in any single other block. Isolated vertices score 0.
pub fn permanence_vertex(g: &Graph, p: &Partition, v: usize) -> f64 {
    let degree = g.degree(v);
    if degree == 0 {
        return 0.0;
    }
    let own = p.block_of(v);
    let mut internal = 0usize;
    let mut external: HashMap<usize, usize> = HashMap::new();
    for &w in g.neighbors(v) {
        let b = p.block_of(w as usize);
        if b == own {
            internal += 1;
        } else {
            *external.entry(b).or_insert(0) += 1;
        }
    }
    let e_max = external.values().copied().max().unwrap_or(0).max(1);
    let pull = internal as f64 / e_max as f64 / degree as f64;
    pull - (1.0 - internal_clustering_coefficient(g, p, v))
}

/// Mean of [`permanence_vertex`] over all vertices.
pub fn permanence(g: &Graph, p: &Partition) -> Result<f64> {
    check_cover(g, p)?;
    if g.n() == 0 {
        return Ok(0.0);
    }
    let total: f64 = (0..g.n()).map(|v| permanence_vertex(g, p, v)).sum();
    Ok(total / g.n() as f64)
}

/// `2·I(a;b) / (H(a) + H(b))` with natural-log entropies. Two partitions with
/// zero entropy (both a single block) score 1.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::PartitionMismatch(format!(
            "partitions cover {} and {} vertices",
            a.n(),
            b.n()
        )));
    }
    let n = a.n() as f64;
    if a.n() == 0 {
        return Ok(1.0);
    }
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for v in 0..a.n() {
        *joint.entry((a.block_of(v), b.block_of(v))).or_insert(0) += 1;
    }
    let size_a: Vec<f64> = a.blocks().iter().map(|x| x.len() as f64).collect();
    let size_b: Vec<f64> = b.blocks().iter().map(|x| x.len() as f64).collect();
    let entropy = |sizes: &[f64]| -> f64 { sizes.iter().map(|&s| -(s / n) * (s / n).ln()).sum() };
    let (ha, hb) = (entropy(&size_a), entropy(&size_b));
    if ha + hb == 0.0 || a.assignment() == b.assignment() {
        return Ok(1.0);
    }
    // Terms are summed in value order so that nmi(a, b) == nmi(b, a) exactly.
    let mut terms: Vec<f64> = joint
        .iter()
        .map(|(&(i, j), &c)| {
            let c = c as f64;
            (c / n) * (n * c / (size_a[i] * size_b[j])).ln()
        })
        .collect();
    terms.sort_unstable_by(f64::total_cmp);
    let mutual: f64 = terms.iter().sum();
    Ok((2.0 * mutual / (ha + hb)).clamp(0.0, 1.0))
}

/// Phases reported in per-phase timing columns, in column order.
pub const PHASES: [&str; 7] = ["parse", "cliques", "matrices", "tfidf", "clustering", "auto-k", "metrics"];

/// Outcome of one partitioning run on one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub dataset: String,
    pub algorithm: String,
    pub k: usize,
    pub modularity: f64,
    pub permanence: f64,
    pub nmi: Option<f64>,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub cliques: usize,
    pub timings: PhaseTimings,
}

impl MetricsReport {
    /// Column names; timing columns are included on request.
    pub fn csv_header(with_timings: bool) -> Vec<String> {
        let mut cols: Vec<String> = [
            "dataset",
            "algorithm",
            "k",
            "modularity",
            "permanence",
            "nmi",
            "seed",
            "n",
            "m",
            "cliques",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        if with_timings {
            cols.push("seconds_total".into());
            cols.extend(PHASES.iter().map(|p| format!("seconds_{}", p.replace('-', "_"))));
        }
        cols
    }

    /// Flat JSON object with keys in [`MetricsReport::csv_header`] order.
    pub fn to_json(&self, with_timings: bool) -> Value {
        let mut obj = Map::new();
        obj.insert("dataset".into(), Value::from(self.dataset.clone()));
        obj.insert("algorithm".into(), Value::from(self.algorithm.clone()));
        obj.insert("k".into(), Value::from(self.k));
        obj.insert("modularity".into(), Value::from(self.modularity));
        obj.insert("permanence".into(), Value::from(self.permanence));
        obj.insert("nmi".into(), self.nmi.map_or(Value::Null, Value::from));
        obj.insert("seed".into(), Value::from(self.seed));
        obj.insert("n".into(), Value::from(self.n));
        obj.insert("m".into(), Value::from(self.m));
        obj.insert("cliques".into(), Value::from(self.cliques));
        if with_timings {
            let header = Self::csv_header(true);
            obj.insert("seconds_total".into(), Value::from(self.timings.total()));
            for (phase, key) in PHASES.iter().zip(&header[header.len() - PHASES.len()..]) {
                obj.insert(key.clone(), Value::from(self.timings.get(phase).unwrap_or(0.0)));
            }
        }
        Value::Object(obj)
    }

    pub fn csv_row(&self, with_timings: bool) -> Vec<String> {
        match self.to_json(with_timings) {
            Value::Object(obj) => obj.values().map(csv_cell).collect(),
            _ => unreachable!(),
        }
    }
}

pub(crate) fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list_str;

    fn toy() -> (Graph, Partition) {
        let g = parse_edge_list_str(include_str!("../data/toy.edges")).unwrap();
        (g, Partition::from_labels(&[0, 0, 0, 0, 1, 1, 1]))
    }

    #[test]
    fn toy_modularity() {
        let (g, p) = toy();
        assert_eq!(modularity(&g, &p).unwrap(), 0.46875);
        assert_eq!(modularity(&g, &Partition::single_block(7)).unwrap(), 0.0);
    }

    #[test]
    fn two_triangles() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(modularity(&g, &p).unwrap(), 0.5);
        assert_eq!(permanence(&g, &p).unwrap(), 1.0);
        for v in 0..6 {
            assert_eq!(permanence_vertex(&g, &p, v), 1.0);
        }
    }

    #[test]
    fn modularity_errors() {
        let g = Graph::from_edges(3, []);
        assert!(matches!(modularity(&g, &Partition::single_block(3)), Err(Error::ModularityUndefined)));
        let (g, _) = toy();
        assert!(matches!(modularity(&g, &Partition::single_block(6)), Err(Error::PartitionMismatch(_))));
    }

    #[test]
    fn toy_permanence() {
        let (g, p) = toy();
        assert!((internal_clustering_coefficient(&g, &p, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((permanence_vertex(&g, &p, 1) - 2.0 / 3.0).abs() < 1e-15);
        let expected = [1.0, 2.0 / 3.0, 2.0 / 3.0, 1.0, 1.0, 1.0, 1.0];
        for (v, want) in expected.iter().enumerate() {
            assert!((permanence_vertex(&g, &p, v) - want).abs() < 1e-15, "vertex {v}");
        }
        assert!((permanence(&g, &p).unwrap() - 19.0 / 21.0).abs() < 1e-12);
    }

    #[test]
    fn permanence_extremes() {
        // Star center 0 in its own block, leaves in another: I(0) = 0, c_in = 0.
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        let p = Partition::from_labels(&[0, 1, 1, 1]);
        assert_eq!(permanence_vertex(&g, &p, 0), -1.0);
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(permanence(&tri, &Partition::singletons(3)).unwrap(), -1.0);
        assert_eq!(permanence_vertex(&Graph::from_edges(2, []), &Partition::singletons(2), 0), 0.0);
    }

    #[test]
    fn clustering_coefficient_cases() {
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(internal_clustering_coefficient(&k4, &Partition::single_block(4), 0), 1.0);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let p = Partition::from_labels(&[0, 0, 1]);
        assert_eq!(internal_clustering_coefficient(&path, &p, 1), 0.0);
    }

    #[test]
    fn nmi_cases() {
        let a = Partition::from_labels(&[0, 0, 1, 1]);
        assert_eq!(nmi(&a, &a).unwrap(), 1.0);
        assert_eq!(nmi(&Partition::singletons(4), &Partition::single_block(4)).unwrap(), 0.0);
        let b = Partition::from_labels(&[0, 1, 0, 1]);
        assert!(nmi(&a, &b).unwrap().abs() < 1e-15);
        assert_eq!(nmi(&Partition::single_block(3), &Partition::single_block(3)).unwrap(), 1.0);
        assert!(nmi(&a, &Partition::single_block(3)).is_err());
    }

    #[test]
    fn report_serialization() {
        let mut timings = PhaseTimings::new();
        timings.add("cliques", 0.5);
        let r = MetricsReport {
            dataset: "toy".into(),
            algorithm: "aggl".into(),
            k: 2,
            modularity: 0.46875,
            permanence: 0.5,
            nmi: None,
            seed: 0,
            n: 7,
            m: 8,
            cliques: 3,
            timings,
        };
        assert_eq!(r.csv_row(false).join(","), "toy,aggl,2,0.46875,0.5,,0,7,8,3");
        let json = serde_json::to_string(&r.to_json(false)).unwrap();
        assert_eq!(
            json,
            r#"{"dataset":"toy","algorithm":"aggl","k":2,"modularity":0.46875,"permanence":0.5,"nmi":null,"seed":0,"n":7,"m":8,"cliques":3}"#
        );
        let header = MetricsReport::csv_header(true);
        assert_eq!(header.len(), r.csv_row(true).len());
        assert_eq!(r.to_json(true)["seconds_cliques"], 0.5);
        assert_eq!(r.to_json(true)["seconds_auto_k"], 0.0);
    }
}
