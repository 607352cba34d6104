//! Single runs, replicated sweeps and the preset catalog.

mod catalog;
mod run;
mod sweep;

pub use catalog::{experiment_catalog, preset, Preset, LONG_BUDGET_OH3};
pub use run::{run_simulation, DeltaMkSummary, Milestones, RunOptions, RunOutput, StopRule, SATURATION};
pub use sweep::{
    derive_seed, run_sweep, CellAggregate, RunSummary, Stat, SweepAxis, SweepParam, SweepResult,
    SweepSpec,
};
