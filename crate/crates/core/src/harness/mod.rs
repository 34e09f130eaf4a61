//! Monte-Carlo experiments: configuration, scheme design, baselines, the
//! outer code, sweeps and reports.

pub mod config;
pub mod design;
pub mod ofdma;
pub mod outer;
pub mod report;
pub mod sweep;

pub use config::SimConfig;
pub use design::{design_lc_tcm, design_tcm, Design};
pub use report::{crossovers, read_csv, summary, write_branch_cdf, write_csv};
pub use sweep::{run_sweep, wilson, BerRecord, PointResult, Scheme, Simulator};
