//! Per-record output and its JSONL / TSV serializations.
//!
//! TSV columns, in order:
//! `label status verdict fail_stage witness m0 adelic_index level_of_image
//! unique_direct r_n primitive_count primitive_degrees bound_min lt_ms ef_ms
//! enum_ms error`. Absent values are written as `-`. `r_n` is `n:r` pairs
//! joined by commas; witnesses use the `(ell,k)` and `((a,b),side)` notation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certifier::{FailStage, Verdict, Witness};
use crate::grouptab::Side;
use crate::primitive::BoundRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    /// Malformed line, invalid field, or duplicate label.
    Schema,
    /// Enumeration ceiling exceeded.
    Limit,
    /// Goursat audit or cross-check failure; these should never occur.
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub n: u32,
    pub r: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageRuntime {
    pub lt: f64,
    pub ef: f64,
    pub enumeration: f64,
}

impl StageRuntime {
    pub fn total(&self) -> f64 {
        self.lt + self.ef + self.enumeration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub label: String,
    pub status: Status,
    pub verdict: Option<Verdict>,
    pub fail_stage: Option<FailStage>,
    pub witness: Option<Witness>,
    pub m0: Option<u32>,
    pub adelic_index: Option<u64>,
    pub level_of_image: Option<u32>,
    /// ⟨G(m₀), −I⟩ transitive on V_{m₀}, decided directly.
    pub unique_direct: Option<bool>,
    pub r_n: Vec<LevelCount>,
    pub primitive_count: Option<usize>,
    pub primitive_degrees: Vec<u64>,
    pub bounds: Option<BoundRecord>,
    pub runtime_ms: Option<StageRuntime>,
    pub error_kind: Option<ErrorKind>,
    pub error: Option<String>,
}

impl ReportRecord {
    pub fn error(label: impl Into<String>, kind: ErrorKind, message: impl Into<String>) -> Self {
        ReportRecord {
            label: label.into(),
            status: Status::Error,
            verdict: None,
            fail_stage: None,
            witness: None,
            m0: None,
            adelic_index: None,
            level_of_image: None,
            unique_direct: None,
            r_n: Vec::new(),
            primitive_count: None,
            primitive_degrees: Vec::new(),
            bounds: None,
            runtime_ms: None,
            error_kind: Some(kind),
            error: Some(message.into()),
        }
    }

    /// PASS while the direct oracle says the primitive point is not unique.
    pub fn is_false_positive(&self) -> bool {
        self.verdict == Some(Verdict::Pass)
            && (self.unique_direct == Some(false) || self.primitive_count.is_some_and(|c| c > 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Jsonl,
    Tsv,
}

pub const TSV_COLUMNS: [&str; 17] = [
    "label",
    "status",
    "verdict",
    "fail_stage",
    "witness",
    "m0",
    "adelic_index",
    "level_of_image",
    "unique_direct",
    "r_n",
    "primitive_count",
    "primitive_degrees",
    "bound_min",
    "lt_ms",
    "ef_ms",
    "enum_ms",
    "error",
];

pub fn tsv_header() -> String {
    TSV_COLUMNS.join("\t")
}

/// Compact witness text: `(3,1)` for LT, `((2,3),A)` for EF.
pub fn witness_key(w: &Witness) -> String {
    match w {
        Witness::Lt(w) => format!("({},{})", w.ell, w.k),
        Witness::Ef(w) => {
            let side = match w.side {
                Side::A => "A",
                Side::B => "B",
            };
            format!("(({},{}),{})", w.a, w.b, side)
        }
    }
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn tsv_escape(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// One line, without the trailing newline.
pub fn emit_report(r: &ReportRecord, format: Format) -> String {
    match format {
        Format::Jsonl => serde_json::to_string(r).expect("report serializes"),
        Format::Tsv => {
            let verdict = r.verdict.map(|v| match v {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            });
            let stage = r.fail_stage.map(|s| match s {
                FailStage::Lt => "LT",
                FailStage::Ef => "EF",
            });
            let status = match r.status {
                Status::Ok => "ok",
                Status::Error => "error",
            };
            let mut r_n = String::new();
            for (i, l) in r.r_n.iter().enumerate() {
                if i > 0 {
                    r_n.push(',');
                }
                let _ = write!(r_n, "{}:{}", l.n, l.r);
            }
            let degrees: Vec<String> = r.primitive_degrees.iter().map(u64::to_string).collect();
            let ms = |f: fn(&StageRuntime) -> f64| cell(r.runtime_ms.as_ref().map(|t| format!("{:.3}", f(t))));
            let fields = [
                tsv_escape(&r.label),
                status.to_string(),
                cell(verdict),
                cell(stage),
                cell(r.witness.as_ref().map(witness_key)),
                cell(r.m0),
                cell(r.adelic_index),
                cell(r.level_of_image),
                cell(r.unique_direct),
                if r_n.is_empty() { "-".into() } else { r_n },
                cell(r.primitive_count),
                if degrees.is_empty() { "-".into() } else { degrees.join(",") },
                cell(r.bounds.as_ref().map(BoundRecord::best)),
                ms(|t| t.lt),
                ms(|t| t.ef),
                ms(|t| t.enumeration),
                cell(r.error.as_deref().map(tsv_escape)),
            ];
            fields.join("\t")
        }
    }
}
