//! Sweeps of the spectral parameter and the sector, resolvent-set and decay
//! witnesses built on them.

pub mod estimates;
pub mod region;
pub mod sweep;

pub use estimates::{lemma_estimate_checks, EstimateDiagnostics, EstimateRow};
pub use region::{classify_direct, classify_lambda, lemma45_angle_check, AngleCheck, Region};
pub use sweep::{resolvent_norm, run_sweep, SweepGrid, SweepRecord, SweepReport, TREND_EXCESS, TREND_SLOPE};
