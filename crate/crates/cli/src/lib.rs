//! Library half of the `phasesim` command-line tool.
//!
//! [`sweep`] expands a grid of (policy, M, K) points into ensemble runs and
//! writes CSV or JSON rows; [`verify`] hosts the built-in verification
//! suite (analytic oracles, enumeration agreement, scaling-law fits, and
//! bootstrap calibration). Both are plain functions over writers so they can
//! be driven from tests as easily as from `main`.

pub mod sweep;
pub mod verify;

pub use sweep::{
    run_sweep, OutputFormat, Row, SweepError, SweepPoint, SweepSpec, VisibilityArg, CSV_HEADER,
    SCHEMA_VERSION,
};
pub use verify::{run_verify, Check, VerifyLevel};
