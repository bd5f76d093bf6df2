use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::certifier::{Verdict, Witness};

use super::report::{witness_key, ErrorKind, ReportRecord, Status};

/// Batch statistics. [`Summary::merge`] is associative and commutative, so
/// partial summaries from any split of the input combine to the same value.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub records: u64,
    pub ok: u64,
    pub errors: BTreeMap<ErrorKind, u64>,
    pub pass: u64,
    pub fail: u64,
    /// Records whose primitive point is unique by the direct oracle.
    pub unique: u64,
    /// PASS among the unique records.
    pub pass_and_unique: u64,
    pub false_positives: u64,
    /// Fail counts keyed `(ell,k)`.
    pub lt_witnesses: BTreeMap<String, u64>,
    /// Fail counts keyed `((a,b),side)`.
    pub ef_witnesses: BTreeMap<String, u64>,
    #[serde(serialize_with = "quantiles", rename = "runtime_ms")]
    runtimes: Vec<f64>,
}

#[derive(Serialize)]
struct Quantiles {
    count: usize,
    median: Option<f64>,
    p90: Option<f64>,
    p95: Option<f64>,
}

fn quantiles<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    Quantiles {
        count: v.len(),
        median: quantile_of(v, 0.5),
        p90: quantile_of(v, 0.9),
        p95: quantile_of(v, 0.95),
    }
    .serialize(s)
}

// Nearest-rank on an ascending slice.
fn quantile_of(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Summary {
    pub fn observe(&mut self, r: &ReportRecord) {
        self.records += 1;
        if r.status == Status::Error {
            let kind = r.error_kind.unwrap_or(ErrorKind::Internal);
            *self.errors.entry(kind).or_default() += 1;
            return;
        }
        self.ok += 1;
        match r.verdict {
            Some(Verdict::Pass) => self.pass += 1,
            Some(Verdict::Fail) => self.fail += 1,
            None => {}
        }
        let unique = r.unique_direct == Some(true);
        if unique {
            self.unique += 1;
            if r.verdict == Some(Verdict::Pass) {
                self.pass_and_unique += 1;
            }
        }
        if r.is_false_positive() {
            self.false_positives += 1;
        }
        match &r.witness {
            Some(w @ Witness::Lt(_)) => *self.lt_witnesses.entry(witness_key(w)).or_default() += 1,
            Some(w @ Witness::Ef(_)) => *self.ef_witnesses.entry(witness_key(w)).or_default() += 1,
            None => {}
        }
        if let Some(t) = &r.runtime_ms {
            let x = t.total();
            let at = self.runtimes.partition_point(|&y| y <= x);
            self.runtimes.insert(at, x);
        }
    }

    pub fn merge(&mut self, other: &Summary) {
        self.records += other.records;
        self.ok += other.ok;
        for (k, v) in &other.errors {
            *self.errors.entry(*k).or_default() += v;
        }
        self.pass += other.pass;
        self.fail += other.fail;
        self.unique += other.unique;
        self.pass_and_unique += other.pass_and_unique;
        self.false_positives += other.false_positives;
        for (k, v) in &other.lt_witnesses {
            *self.lt_witnesses.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.ef_witnesses {
            *self.ef_witnesses.entry(k.clone()).or_default() += v;
        }
        let mut merged = Vec::with_capacity(self.runtimes.len() + other.runtimes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.runtimes.len() && j < other.runtimes.len() {
            if self.runtimes[i] <= other.runtimes[j] {
                merged.push(self.runtimes[i]);
                i += 1;
            } else {
                merged.push(other.runtimes[j]);
                j += 1;
            }
        }
        merged.extend_from_slice(&self.runtimes[i..]);
        merged.extend_from_slice(&other.runtimes[j..]);
        self.runtimes = merged;
    }

    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a ReportRecord>) -> Self {
        let mut s = Summary::default();
        for r in reports {
            s.observe(r);
        }
        s
    }

    pub fn error_count(&self, kind: ErrorKind) -> u64 {
        self.errors.get(&kind).copied().unwrap_or(0)
    }

    pub fn pass_rate(&self) -> Option<f64> {
        ratio(self.pass, self.ok)
    }

    pub fn unique_rate(&self) -> Option<f64> {
        ratio(self.unique, self.ok)
    }

    /// Share of the unique class certified by PASS.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.pass_and_unique, self.unique)
    }

    pub fn runtime_quantile(&self, q: f64) -> Option<f64> {
        quantile_of(&self.runtimes, q)
    }

    /// 0 when the batch completed cleanly, 1 on schema or limit errors,
    /// 2 on any internal violation or false positive.
    pub fn exit_code(&self) -> i32 {
        if self.false_positives > 0 || self.error_count(ErrorKind::Internal) > 0 {
            2
        } else if self.error_count(ErrorKind::Schema) + self.error_count(ErrorKind::Limit) > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("summary serializes");
        let obj = v.as_object_mut().expect("object");
        obj.insert("pass_rate".into(), serde_json::json!(self.pass_rate()));
        obj.insert("unique_rate".into(), serde_json::json!(self.unique_rate()));
        obj.insert("recall".into(), serde_json::json!(self.recall()));
        serde_json::to_string_pretty(&v).expect("summary serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::report::{LevelCount, StageRuntime};

    fn ok(verdict: Verdict, unique: bool, ms: f64) -> ReportRecord {
        let mut r = ReportRecord::error("x", ErrorKind::Internal, "");
        r.status = Status::Ok;
        r.error_kind = None;
        r.error = None;
        r.verdict = Some(verdict);
        r.unique_direct = Some(unique);
        r.primitive_count = Some(if unique { 1 } else { 2 });
        r.r_n = vec![LevelCount { n: 1, r: 1 }];
        r.runtime_ms = Some(StageRuntime { lt: ms, ef: 0.0, enumeration: 0.0 });
        r
    }

    #[test]
    fn rates_and_quantiles() {
        let reports: Vec<_> = (1..=10)
            .map(|i| ok(if i <= 3 { Verdict::Pass } else { Verdict::Fail }, i <= 4, i as f64))
            .collect();
        let s = Summary::from_reports(&reports);
        assert_eq!((s.pass, s.fail, s.unique, s.false_positives), (3, 7, 4, 0));
        assert_eq!(s.recall(), Some(0.75));
        assert_eq!(s.runtime_quantile(0.5), Some(5.0));
        assert_eq!(s.runtime_quantile(0.9), Some(9.0));
        assert_eq!(s.runtime_quantile(0.95), Some(10.0));
        assert_eq!(s.exit_code(), 0);
    }

    #[test]
    fn merge_matches_single_pass() {
        let reports: Vec<_> = (0..9)
            .map(|i| ok(if i % 2 == 0 { Verdict::Pass } else { Verdict::Fail }, i % 2 == 0, (7 * i % 5) as f64))
            .collect();
        let whole = Summary::from_reports(&reports);
        let mut left = Summary::from_reports(&reports[..4]);
        let right = Summary::from_reports(&reports[4..]);
        let mut swapped = right.clone();
        left.merge(&right);
        swapped.merge(&Summary::from_reports(&reports[..4]));
        assert_eq!(left, whole);
        assert_eq!(swapped, whole);
    }

    #[test]
    fn exit_codes() {
        let mut s = Summary::from_reports(&[ReportRecord::error("a", ErrorKind::Schema, "bad")]);
        assert_eq!(s.exit_code(), 1);
        s.observe(&ok(Verdict::Pass, false, 1.0));
        assert_eq!(s.false_positives, 1);
        assert_eq!(s.exit_code(), 2);
    }
}
