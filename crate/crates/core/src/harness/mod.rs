//! Experiment harness: configs, the online protocol loop, guarantees,
//! traces, sweeps and the verification suites.

pub mod bounds;
pub mod config;
pub mod csv;
pub mod run;
pub mod slope;
pub mod sweep;
pub mod verify;

pub use bounds::{gap_bound, theorem_bound, BoundModel, Guarantee};
pub use config::{parse_config, Algo, ExperimentSpec, LossDescriptor, SetDescriptor};
pub use csv::{emit_csv, parse_csv, CSV_HEADER};
pub use run::{run_experiment, RegretTrace, TraceRow, TraceSummary, Violation};
pub use slope::loglog_slope;
pub use sweep::{sweep, SweepReport};
pub use verify::{verify_suite, Scope, VerifyReport};
