//! Input schema, batch runner, reports, corpus statistics, synthetic
//! corpora and the theorem-oracle suite.

pub mod batch;
pub mod oracle;
pub mod report;
pub mod schema;
pub mod summary;
pub mod synth;

pub use batch::{process_record, run_batch, run_records, BatchOptions, BatchOutput};
pub use oracle::{format_table, run_oracle_suite, ConformanceRow};
pub use report::{emit_report, tsv_header, ErrorKind, Format, ReportRecord, Status};
pub use schema::{parse_curve_record, CurveRecord, SchemaError};
pub use summary::Summary;
