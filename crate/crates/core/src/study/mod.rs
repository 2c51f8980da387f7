//! Configured runs: ε sweeps, rate fits, property checks and their reports.

mod config;
mod export;
mod fit;
mod run;

pub use config::{
    default_bands, Band, CharacteristicSettings, KernelSettings, MilneSettings, MilneStudySettings, NamedData,
    OracleSettings, RefinementSettings, Study, StudyConfig,
};
pub use export::{write_mask, write_milne, write_path};
pub use fit::{fit_rate, RateFit};
pub use run::{
    run_study, write_report, BandCheck, Check, ConvergenceReport, GridMeta, MilneSummary, SlopeFit, REPORT_SCHEMA,
};
