//! Scenario runner, batch sweeps and verification suites behind the `muskat` binary.

pub mod scenario;
pub mod suites;
pub mod sweep;

pub use scenario::{load_scenario, run_scenario, snapshot_at, RunOutcome, BUILTINS};
pub use suites::{run_suite, Check, SuiteReport, SUITES};
pub use sweep::{run_batch, Batch, SweepRow};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const MONITOR_FAIL: i32 = 2;
    pub const DIVERGED: i32 = 3;
}
