use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Disjoint cover of the vertices `0..n` by nonempty blocks.
///
/// Block ids are canonical: blocks are numbered in order of their smallest
/// vertex, so two partitions with the same blocks compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary per-vertex labels.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut ids: HashMap<L, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let assignment = labels
            .iter()
            .enumerate()
            .map(|(v, l)| {
                let next = blocks.len();
                let id = *ids.entry(*l).or_insert(next);
                if id == next {
                    blocks.push(Vec::new());
                }
                blocks[id].push(v);
                id
            })
            .collect();
        Partition { assignment, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn single_block(n: usize) -> Self {
        Self::from_labels(&vec![0usize; n])
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Block count.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// True when every block of `self` lies inside one block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n() == coarser.n()
            && self.blocks.iter().all(|b| {
                let target = coarser.block_of(b[0]);
                b.iter().all(|&v| coarser.block_of(v) == target)
            })
    }

    /// Writes `original_vertex_id block_id` lines sorted by original id.
    pub fn write<W: Write>(&self, g: &Graph, mut out: W) -> std::io::Result<()> {
        assert_eq!(g.n(), self.n(), "partition does not match graph");
        let mut rows: Vec<(u64, usize)> = (0..self.n()).map(|v| (g.label(v), self.block_of(v))).collect();
        rows.sort_unstable();
        for (id, block) in rows {
            writeln!(out, "{id} {block}")?;
        }
        Ok(())
    }
}

/// A partition read from a `vertex_id community_id` file, over the vertex ids
/// listed in the file (ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPartition {
    pub ids: Vec<u64>,
    pub partition: Partition,
}

impl LabeledPartition {
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<(u64, u64)> = Vec::new();
        let mut seen: HashMap<u64, usize> = HashMap::new();
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
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "expected `vertex_id community_id`".into(),
                });
            }
            let parse = |tok: &str| {
                tok.parse::<u64>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid id {tok:?}"),
                })
            };
            let (v, c) = (parse(tokens[0])?, parse(tokens[1])?);
            if let Some(first) = seen.insert(v, lineno) {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("vertex {v} already assigned on line {first}"),
                });
            }
            rows.push((v, c));
        }
        rows.sort_unstable();
        let labels: Vec<u64> = rows.iter().map(|&(_, c)| c).collect();
        Ok(LabeledPartition {
            ids: rows.iter().map(|&(v, _)| v).collect(),
            partition: Partition::from_labels(&labels),
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file)).map_err(|e| e.context(path.display().to_string()))
    }

    /// Re-indexes the partition by the compact ids of `g`. Every vertex of
    /// `g` must be listed, and nothing else.
    pub fn align(&self, g: &Graph) -> Result<Partition> {
        let map = g.vertex_map();
        let mut labels: Vec<Option<usize>> = vec![None; g.n()];
        for (pos, &id) in self.ids.iter().enumerate() {
            let v = map.to_compact(id).ok_or_else(|| {
                Error::PartitionMismatch(format!("vertex {id} is not in the graph"))
            })?;
            labels[v as usize] = Some(self.partition.block_of(pos));
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(v, l)| {
                l.ok_or_else(|| {
                    Error::PartitionMismatch(format!("vertex {} has no block", g.label(v)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition::from_labels(&labels))
    }
}
