//! Experiment harness: configuration, theorem-keyed presets, the
//! replica-parallel Monte Carlo runner, and report emission.

pub mod config;
pub mod presets;
pub mod report;
pub mod runner;
pub mod svg;

pub use config::{CellConfig, ExperimentConfig, Format, ScalingRule};
pub use presets::{preset, preset_names};
pub use report::{KsStat, MeanStat, Meta, MomentStat, NormStat, RunReport, SizeResult};
pub use runner::{emit, run, RunOutput, SampleSet};
