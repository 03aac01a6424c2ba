//! Experiment harness: LFR parameter grids, ground-truth files, planted
//! partition graphs, experiment runs and report files.

mod experiment;
mod lfr;
mod planted;
mod report;

pub use experiment::{run_experiment, Dataset, ExperimentConfig, ExperimentResult};
pub use lfr::{
    lfr_parameter_grid, paper_grid, parse_ratio, write_grid_csv, LfrGridRow, GRID_COLUMNS, PAPER_ALPHA, PAPER_BETA,
    PAPER_MU, PAPER_N, PAPER_REPLICATES,
};
pub use planted::planted_partition_graph;
pub use report::{emit_report, render_report, ReportFormat, ReportOptions};

use std::path::Path;

use crate::clustering::LabeledPartition;
use crate::error::Result;

/// Reads an LFR-style `vertex_id community_id` file.
pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<LabeledPartition> {
    LabeledPartition::read(path)
}
