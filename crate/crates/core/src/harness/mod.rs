//! Running experiments and sweeps, and writing their results.

pub mod experiment;
pub mod output;
pub mod sweep;

pub use experiment::{allows_parallel, run_experiment, run_session, RunOptions, RunOutput, SessionOutput};
pub use output::{
    load_config_file, parse_config_text, write_summary_csv, write_trace_csv, Manifest, ManifestRun, SummaryRow,
    SweepTable,
};
pub use sweep::{run_sweep, SweepCell, SweepParam, SweepResult, SweepSpec};
