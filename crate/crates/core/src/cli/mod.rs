//! Benchmark cases, the JSON case format and the `wg` driver.

pub mod cases;
pub mod config;
pub mod reference;
pub mod run;

pub use cases::{case_spec, CaseSpec, Exact, MeshFamily, MeshSchedule, CASE_IDS};
pub use config::parse_case_config;
pub use run::{emit_csv, run_case, RunOptions};
