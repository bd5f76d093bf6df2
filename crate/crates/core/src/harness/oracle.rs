//! Theorem-level conformance checks, run by `ppcert oracle-suite`.

use serde::Serialize;

use crate::grouptab::{commutator_subgroup, SubgroupSpec};
use crate::modarith::Modulus;
use crate::orbitcalc::is_transitive;
use crate::primitive::{bounds, deg_natural_map};

/// Levels at which the commutator subgroup is checked for transitivity.
pub const COMMUTATOR_LEVELS: [u32; 10] = [2, 3, 4, 5, 6, 8, 9, 12, 16, 24];

/// (m₀, m₀², 1 + 2σ₀(m₀)/2) for the index-2 bounds.
pub const SERRE_TABLE: [(u32, u64, u64); 8] = [
    (1, 1, 2),
    (2, 4, 3),
    (3, 9, 3),
    (4, 16, 4),
    (6, 36, 5),
    (8, 64, 5),
    (12, 144, 7),
    (24, 576, 9),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformanceRow {
    pub suite: &'static str,
    pub case: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn row(suite: &'static str, case: String, expected: String, observed: String) -> ConformanceRow {
    let pass = expected == observed;
    ConformanceRow {
        suite,
        case,
        expected,
        observed,
        pass,
    }
}

fn modulus(n: u32) -> Modulus {
    Modulus::new(n).expect("small level")
}

pub fn run_oracle_suite(max_n: u32) -> Vec<ConformanceRow> {
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let t = is_transitive(&SubgroupSpec::full_gl2(modulus(n)));
        rows.push(row("gl2-transitive", format!("n={n}"), "true".into(), t.to_string()));
    }
    for n in 1..=max_n {
        let t = is_transitive(&SubgroupSpec::sl2(modulus(n)));
        rows.push(row("sl2-transitive", format!("n={n}"), "true".into(), t.to_string()));
    }
    for n in COMMUTATOR_LEVELS.into_iter().filter(|&n| n <= max_n) {
        let observed = match commutator_subgroup(n) {
            Ok(c) => is_transitive(&c).to_string(),
            Err(e) => format!("error: {e}"),
        };
        rows.push(row("commutator-transitive", format!("n={n}"), "true".into(), observed));
    }
    for (m0, square, index_bound) in SERRE_TABLE {
        let b = bounds(m0, Some(2), None).expect("valid level");
        rows.push(row(
            "serre-bounds",
            format!("m0={m0},I=2"),
            format!("{square} {index_bound}"),
            format!("{} {}", b.crude, b.index_bound.unwrap_or(0)),
        ));
    }
    for n in 1..=max_n {
        let divisors = modulus(n).divisors();
        let mut bad = 0;
        let mut chains = 0;
        for &b in &divisors {
            for &a in divisors.iter().filter(|&&a| b % a == 0) {
                chains += 1;
                let whole = deg_natural_map(a, n / a).degree;
                let split = deg_natural_map(b, n / b).degree * deg_natural_map(a, b / a).degree;
                if whole != split {
                    bad += 1;
                }
            }
        }
        rows.push(row(
            "degree-multiplicativity",
            format!("n={n} ({chains} chains)"),
            "0 mismatches".into(),
            format!("{bad} mismatches"),
        ));
    }
    rows
}

pub fn format_table(rows: &[ConformanceRow]) -> String {
    let w_suite = rows.iter().map(|r| r.suite.len()).max().unwrap_or(5).max(5);
    let w_case = rows.iter().map(|r| r.case.len()).max().unwrap_or(4).max(4);
    let w_exp = rows.iter().map(|r| r.expected.len()).max().unwrap_or(8).max(8);
    let mut out = format!(
        "{:<w_suite$}  {:<w_case$}  {:<w_exp$}  {}\n",
        "suite", "case", "expected", "observed"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<w_suite$}  {:<w_case$}  {:<w_exp$}  {}  {}\n",
            r.suite,
            r.case,
            r.expected,
            r.observed,
            if r.pass { "ok" } else { "MISMATCH" }
        ));
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    out.push_str(&format!("{} checks, {} mismatches\n", rows.len(), failed));
    out
}
