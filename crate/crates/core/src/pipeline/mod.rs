//! Config-driven experiments: build the model, sample realizations, compute
//! both counting functions, compare them, and write an artifact bundle.

mod config;
mod output;
mod run;

use std::path::Path;

pub use config::{DisorderLaws, EnergyGrid, ExperimentConfig, GraphSpec, OverlaySpec, PaperScale, RegionSpec, TailSpec};
pub use output::{
    write_bundle, write_curves_csv, write_graph_file, write_manifest, CURVES_FILE, ENSEMBLE_FILE, GRAPH_FILE,
    MANIFEST_FILE, OVERLAY_FILE, PLOT_FILE, REPORT_FILE,
};
pub use run::{execute, Check, Overlay, Realization, RunResult, StageTime, Stages};

use crate::error::Result;

/// Runs `cfg` and writes its bundle to `out`. The graph file is written as
/// soon as the model exists.
pub fn run(cfg: &ExperimentConfig, out: &Path, stages: Stages) -> Result<RunResult> {
    let region = cfg.build_region().map_err(|e| e.in_stage("gen"))?;
    write_graph_file(region.graph(), out).map_err(|e| e.in_stage("write"))?;
    let res = execute(cfg, Some(region), stages)?;
    write_bundle(&res, out).map_err(|e| e.in_stage("write"))?;
    Ok(res)
}
