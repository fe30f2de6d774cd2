//! Configuration, provenance and file formats.

mod config;
mod tables;
mod provenance;
mod report;
pub mod svg;

pub use tables::{boundaries_csv, convergence_csv, orbit_csv, scan_csv, SCAN_HEADER};
pub use config::{
    CeSection, IterateSection, LyapunovSection, MisiurewiczSection, PlotSection, RotationSection, RunConfig,
    ScanSection, SingularLimitSection, SuperstableSection,
};
pub use provenance::{config_hash, Provenance, TOOL, VERSION};
pub use report::{Report, REPORT_SCHEMA};
