//! Meta-analysis of standardized mean differences across every combination of
//! experimental conditions found in a study table.
//!
//! The pipeline is `ingest` → `subgrouping` → `engine` → `report`, with `cli`
//! wiring the stages together for the `metacond` binary.

pub mod cli;
pub mod domain;
pub mod engine;
pub mod ingest;
pub mod report;
pub mod subgrouping;

pub use domain::{
    AnalysisConfig, DomainError, EffectSizeKind, GroupStats, MetaResult, Model, RawRecord,
    StudyEffect, StudyRecord, Subgroup, SubgroupKey,
};
pub use engine::{analyze_subgroup, EngineError, HeterogeneityStats};
pub use ingest::{parse_input, summarize_table, IngestError, IngestErrorKind, InputTable};
pub use report::{
    write_outputs, write_outputs_with, Manifest, OutputOptions, ReportError, SubgroupReport,
};
pub use subgrouping::{
    enumerate_subgroups, folder_name, MembershipPolicy, SkipReason, SubgroupSet,
};
