//! Dataset, model, instance and report files.

mod dataset_csv;
mod model;
mod report;
pub mod svg;

pub use dataset_csv::{load_dataset, read_dataset, save_dataset, write_dataset};
pub use model::{load_model, read_model, save_model, write_model, MODEL_FORMAT_VERSION};
pub use report::{
    algorithm_report_toml, emit_kde_comparison, emit_report, emit_solve_result,
    emit_training_trace, load_instance, parse_instance, write_algorithm_report,
    write_breakdown_csv, write_simulation_csv, ReportFormat,
};
