//! Config-driven experiment sweeps, exponent fits, reports and plot data.

mod config;
mod fit;
mod report;
mod runner;

pub use config::{ExperimentConfig, ExperimentKind, GeneratorKind, Overrides};
pub use fit::{fit_exponent, ExponentFit};
pub use report::{emit_plot_data, Report};
pub use runner::{figure3_directions, random_st_instance, run_experiment, run_scale, ExperimentOutput, ScaleOutput};
