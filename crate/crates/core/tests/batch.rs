use proptest::prelude::*;

use ppcert_core::exec::Executor;
use ppcert_core::harness::{
    emit_report, parse_curve_record, run_records, synth, BatchOptions, Format, ReportRecord, Summary,
};

fn stream(reports: &[ReportRecord]) -> String {
    reports
        .iter()
        .map(|r| emit_report(r, Format::Jsonl) + "\n")
        .collect()
}

#[test]
fn reports_are_identical_for_any_worker_count() {
    let records = synth::mixed_corpus(11, 24, 300);
    let opts = BatchOptions {
        timings: false,
        ..BatchOptions::default()
    };
    let one = run_records(&records, &Executor::sequential(), &opts);
    let four = run_records(&records, &Executor::with_jobs(4), &opts);
    assert_eq!(stream(&one.reports), stream(&four.reports));
    assert_eq!(one.summary, four.summary);
    let labels: Vec<_> = one.reports.iter().map(|r| r.label.as_str()).collect();
    let expected: Vec<_> = records.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, expected);
}

#[test]
fn no_pass_without_unique_point() {
    let records = synth::mixed_corpus(12, 24, 400);
    let out = run_records(&records, &Executor::with_jobs(2), &BatchOptions::default());
    assert_eq!(out.summary.false_positives, 0);
    assert_eq!(out.summary.exit_code(), 0);
    for r in &out.reports {
        assert!(!r.is_false_positive(), "{}", r.label);
        let r_sum: usize = r.r_n.iter().map(|l| l.r).sum();
        assert!(r.primitive_count.unwrap() <= r_sum);
        assert_eq!(r.primitive_degrees.len(), r.primitive_count.unwrap());
    }
}

#[test]
fn jsonl_reports_round_trip() {
    let records = synth::mixed_corpus(13, 12, 50);
    let out = run_records(&records, &Executor::sequential(), &BatchOptions::default());
    for r in &out.reports {
        let back: ReportRecord = serde_json::from_str(&emit_report(r, Format::Jsonl)).unwrap();
        assert_eq!(&back, r);
    }
    for r in &records {
        assert_eq!(&parse_curve_record(&r.to_json()).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn summary_merge_is_split_independent(seed in any::<u64>(), cut1 in 0usize..40, cut2 in 0usize..40) {
        let records = synth::mixed_corpus(seed, 12, 40);
        let reports = run_records(&records, &Executor::sequential(), &BatchOptions::default()).reports;
        let (i, j) = (cut1.min(cut2), cut1.max(cut2));
        let whole = Summary::from_reports(&reports);
        let parts = [&reports[..i], &reports[i..j], &reports[j..]].map(Summary::from_reports);
        let mut left = parts[0].clone();
        left.merge(&parts[1]);
        left.merge(&parts[2]);
        let mut right = parts[1].clone();
        right.merge(&parts[2]);
        let mut right_first = parts[0].clone();
        right_first.merge(&right);
        prop_assert_eq!(&left, &whole);
        prop_assert_eq!(&right_first, &whole);
    }
}
