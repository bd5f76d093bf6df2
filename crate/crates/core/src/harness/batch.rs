use std::collections::HashSet;
use std::io;
use std::time::Instant;

use crate::certifier::{certify_unique_with, unique_primitive_direct, CertifyError, LtMode};
use crate::exec::Executor;
use crate::grouptab::GroupError;
use crate::primitive::enumerate_primitive_points;

use super::report::{ErrorKind, LevelCount, ReportRecord, StageRuntime, Status};
use super::schema::{label_hint, parse_curve_record, CurveRecord, SchemaError};
use super::summary::Summary;

/// Records are parsed, dispatched and written back in chunks of this size.
pub const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchOptions {
    pub lt_mode: LtMode,
    /// Per-stage runtimes in the reports. Off gives byte-identical output
    /// across runs and worker counts.
    pub timings: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            lt_mode: LtMode::Top,
            timings: true,
        }
    }
}

fn error_kind(e: &CertifyError) -> ErrorKind {
    match e {
        CertifyError::Group(GroupError::TooLarge { .. }) => ErrorKind::Limit,
        _ => ErrorKind::Internal,
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Certificate, direct oracle, primitive points and bounds for one record.
pub fn process_record(record: &CurveRecord, opts: &BatchOptions) -> ReportRecord {
    match try_process(record, opts) {
        Ok(r) => r,
        Err(e) => {
            let mut r = ReportRecord::error(&record.label, error_kind(&e), e.to_string());
            r.m0 = Some(record.m0);
            r.adelic_index = record.adelic_index;
            r
        }
    }
}

fn try_process(record: &CurveRecord, opts: &BatchOptions) -> Result<ReportRecord, CertifyError> {
    let spec = record.spec();
    let cert = certify_unique_with(&spec, opts.lt_mode)?;
    let unique = unique_primitive_direct(&spec)?;
    let start = Instant::now();
    let report = enumerate_primitive_points(&spec, record.adelic_index)?;
    let enumeration = ms(start);

    let mut out = ReportRecord {
        label: record.label.clone(),
        status: Status::Ok,
        verdict: Some(cert.verdict),
        fail_stage: cert.fail_stage,
        witness: cert.witness,
        m0: Some(record.m0),
        adelic_index: record.adelic_index,
        level_of_image: report.bounds.finite.as_ref().map(|f| f.level_of_image),
        unique_direct: Some(unique),
        r_n: report
            .levels
            .iter()
            .map(|l| LevelCount { n: l.n, r: l.r })
            .collect(),
        primitive_count: Some(report.primitive_count),
        primitive_degrees: report.primitive_points().map(|p| p.degree).collect(),
        bounds: Some(report.bounds),
        runtime_ms: opts.timings.then_some(StageRuntime {
            lt: cert.timings.lt_ms,
            ef: cert.timings.ef_ms,
            enumeration,
        }),
        error_kind: None,
        error: None,
    };
    // The direct oracle and the enumeration decide uniqueness independently.
    if (report.primitive_count == 1) != unique {
        out.status = Status::Error;
        out.error_kind = Some(ErrorKind::Internal);
        out.error = Some(format!(
            "primitive_count = {} disagrees with direct transitivity = {unique}",
            report.primitive_count
        ));
    }
    Ok(out)
}

enum Slot {
    Ready(ReportRecord),
    Pending(usize),
}

/// Streams `lines` through the pipeline, handing reports to `sink` in input
/// order. Blank lines are skipped. Only I/O errors from the sink abort.
pub fn run_batch<I, F>(lines: I, exec: &Executor, opts: &BatchOptions, mut sink: F) -> io::Result<Summary>
where
    I: IntoIterator<Item = io::Result<String>>,
    F: FnMut(&ReportRecord) -> io::Result<()>,
{
    let mut summary = Summary::default();
    let mut seen: HashSet<String> = HashSet::new();
    let mut line_no = 0usize;
    let mut lines = lines.into_iter().peekable();
    while lines.peek().is_some() {
        let mut slots = Vec::with_capacity(CHUNK);
        let mut work: Vec<CurveRecord> = Vec::new();
        for line in lines.by_ref() {
            let line = line?;
            line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let slot = match parse_curve_record(&line) {
                Ok(rec) if !seen.insert(rec.label.clone()) => {
                    let e = SchemaError::DuplicateLabel(rec.label.clone());
                    Slot::Ready(ReportRecord::error(rec.label, ErrorKind::Schema, e.to_string()))
                }
                Ok(rec) => {
                    work.push(rec);
                    Slot::Pending(work.len() - 1)
                }
                Err(e) => {
                    let label = label_hint(&line).unwrap_or_else(|| format!("line:{line_no}"));
                    Slot::Ready(ReportRecord::error(label, ErrorKind::Schema, e.to_string()))
                }
            };
            slots.push(slot);
            if slots.len() == CHUNK {
                break;
            }
        }
        let mut done: Vec<Option<ReportRecord>> = exec
            .map(&work, |rec| process_record(rec, opts))
            .into_iter()
            .map(Some)
            .collect();
        for slot in slots {
            let report = match slot {
                Slot::Ready(r) => r,
                Slot::Pending(i) => done[i].take().expect("each result used once"),
            };
            summary.observe(&report);
            sink(&report)?;
        }
    }
    Ok(summary)
}

pub struct BatchOutput {
    pub reports: Vec<ReportRecord>,
    pub summary: Summary,
}

/// In-memory batch over already-validated records.
pub fn run_records(records: &[CurveRecord], exec: &Executor, opts: &BatchOptions) -> BatchOutput {
    let lines = records.iter().map(|r| Ok(r.to_json()));
    let mut reports = Vec::with_capacity(records.len());
    let summary = run_batch(lines, exec, opts, |r| {
        reports.push(r.clone());
        Ok(())
    })
    .expect("in-memory sink cannot fail");
    BatchOutput { reports, summary }
}
