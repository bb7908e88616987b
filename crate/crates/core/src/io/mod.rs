//! Files: run configuration, ensemble summaries, trajectory datasets and fit reports.

mod config;
mod dataset;
mod report;
mod summary;

pub use config::{CodeChoice, NoiseOverrides, NoisePreset, OutputPaths, ReadoutModel, RunConfig};
pub use dataset::{
    bit_to_wire, read_dataset, write_dataset, Dataset, DatasetHeader, DatasetRecord, ANCILLA_ORDER, BIT_CONVENTION, DATASET_FORMAT,
    DATASET_VERSION,
};
pub use report::{FitPoint, FitReport, FIT_FORMAT, FIT_VERSION};
pub use summary::{read_summary, write_summary, SummaryFile, SummaryMeta, SUMMARY_TAG};
