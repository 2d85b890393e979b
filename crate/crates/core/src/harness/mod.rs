//! Experiment plumbing: datasets, configuration, orchestration and the
//! CSV outputs.

mod config;
mod experiment;

pub use config::{DatasetChoice, ExperimentConfig, LawKind, COMPARE_PRESET, T_AV_LABEL};
pub use experiment::{
    estimate_temperature_files, read_traces, run_experiment, summarize, summary_csv, ExperimentOutput, JobResult,
    SummaryRow,
};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Largest side for exhaustive bars-and-stripes generation.
pub const MAX_BAS_SIDE: usize = 5;

/// All distinct `n x n` bars-and-stripes images, flattened row-major.
/// Row patterns come first, then column patterns that are not already
/// present (the two uniform images).
pub fn generate_bas(n: usize) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("image side must be at least 1"));
    }
    if n > MAX_BAS_SIDE {
        return Err(Error::Capacity {
            what: "bars-and-stripes side",
            got: n,
            limit: MAX_BAS_SIDE,
        });
    }
    let spin = |bit: bool| if bit { 1i8 } else { -1 };
    let mut images: Vec<Vec<i8>> = Vec::with_capacity(2 << n);
    for mask in 0u32..1 << n {
        images.push((0..n * n).map(|p| spin(mask >> (p / n) & 1 == 1)).collect());
    }
    for mask in 0u32..1 << n {
        let image: Vec<i8> = (0..n * n).map(|p| spin(mask >> (p % n) & 1 == 1)).collect();
        if !images.contains(&image) {
            images.push(image);
        }
    }
    Dataset::new(format!("bas{n}"), images)
}
