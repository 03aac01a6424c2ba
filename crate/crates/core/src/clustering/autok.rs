//! Choice of the block count when it is not given.
//!
//! Modularity of the dendrogram cuts is close to bitonic in `k`, so a ternary
//! search over `k ∈ [2, leaves]` finds the peak in a logarithmic number of
//! cuts. The curve is only approximately bitonic, so the neighborhood of the
//! ternary optimum (±[`REFINE_WINDOW`]) is then scanned exhaustively.

use std::collections::BTreeMap;

use super::hierarchy::Dendrogram;
use super::partition::Partition;
use crate::error::Result;
use crate::graph::Graph;
use crate::metrics::modularity;

pub const REFINE_WINDOW: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct AutoK {
    /// Cut level (clusters among the dendrogram leaves).
    pub k: usize,
    pub partition: Partition,
    pub modularity: f64,
    /// Every cut level evaluated, with its modularity.
    pub probes: BTreeMap<usize, f64>,
}

pub fn auto_k(dg: &Dendrogram, g: &Graph) -> Result<AutoK> {
    let leaves = dg.leaf_count();
    let mut probes = BTreeMap::new();
    if leaves < 2 {
        let partition = if leaves == 1 { dg.cut(1)? } else { Partition::singletons(g.n()) };
        let q = modularity(g, &partition)?;
        probes.insert(leaves, q);
        return Ok(AutoK {
            k: leaves,
            partition,
            modularity: q,
            probes,
        });
    }

    let eval = |probes: &mut BTreeMap<usize, f64>, k: usize| -> Result<f64> {
        if let Some(&q) = probes.get(&k) {
            return Ok(q);
        }
        let q = modularity(g, &dg.cut(k)?)?;
        probes.insert(k, q);
        Ok(q)
    };

    let (mut lo, mut hi) = (2, leaves);
    while hi - lo > 2 {
        let third = (hi - lo) / 3;
        let (m1, m2) = (lo + third, hi - third);
        if eval(&mut probes, m1)? < eval(&mut probes, m2)? {
            lo = m1 + 1;
        } else {
            hi = m2;
        }
    }
    for k in lo..=hi {
        eval(&mut probes, k)?;
    }
    let peak = best_of(&probes, 2..=leaves);
    let from = peak.saturating_sub(REFINE_WINDOW).max(2);
    let to = (peak + REFINE_WINDOW).min(leaves);
    for k in from..=to {
        eval(&mut probes, k)?;
    }

    let k = best_of(&probes, 2..=leaves);
    let partition = dg.cut(k)?;
    Ok(AutoK {
        k,
        modularity: probes[&k],
        partition,
        probes,
    })
}

/// Highest-modularity probed level within `range`; smallest `k` on ties.
fn best_of(probes: &BTreeMap<usize, f64>, range: std::ops::RangeInclusive<usize>) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (&k, &q) in probes.range(range) {
        if best.is_none_or(|(_, bq)| q > bq) {
            best = Some((k, q));
        }
    }
    best.expect("at least one probe").0
}
