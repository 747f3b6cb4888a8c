//! Configuration-driven experiment runs: TOML configs, named presets, and
//! CSV/JSON output.

mod config;
mod emit;
mod presets;
mod run;

pub use config::{
    default_output_dir, DecayConfig, ExperimentConfig, ExperimentKind, OneQubitParams, OutputConfig,
    Parameters, PrepareParams, TwoQubitBasis, TwoQubitConfig, VerifyParams, OUTPUT_DIR_ENV,
};
pub use emit::{emit, summary_json, trace_csv, Emitted};
pub use presets::{preset, preset_literal, FIG5_STEP_FACTOR, LIFETIME_US, PRESET_NAMES};
pub use run::{
    execute, holonomy_grid, DerivedSummary, ExitStatus, GridSummary, PreparationSummary, PulseSummary,
    RunReport, Summary,
};

use std::path::Path;

use crate::error::Result;

/// Runs `cfg` and writes its outputs, resolving relative paths against `dir`.
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<(RunReport, Emitted)> {
    let report = execute(cfg)?;
    let (trace_path, summary_path) = cfg.resolve_outputs(dir);
    let emitted = emit(&report, &trace_path, &summary_path)?;
    Ok((report, emitted))
}
