use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ppcert_core::certifier::LtMode;
use ppcert_core::exec::Executor;
use ppcert_core::grouptab::Generated;
use ppcert_core::harness::{
    emit_report, format_table, parse_curve_record, run_batch, run_oracle_suite, synth, tsv_header,
    BatchOptions, CurveRecord, Format,
};
use ppcert_core::orbitcalc::{orbit_decomposition, point_degree};
use ppcert_core::primitive::{bounds, enumerate_primitive_points, serre_certificate, BoundRecord};

/// Certify unique primitive points from mod-m0 Galois images.
#[derive(Parser)]
#[command(name = "ppcert", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum LtModeArg {
    Top,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Run the LT/EF certifier, the direct oracle and the primitive-point
    /// enumeration over a JSONL corpus.
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: FormatArg,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "top")]
        lt_mode: LtModeArg,
        /// Omit runtimes so reports are byte-identical across runs.
        #[arg(long)]
        no_timings: bool,
        /// Write the batch summary here instead of stdout.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Orbits of G and of H = <G, -I> on vectors of exact order m0.
    Orbits {
        #[arg(long)]
        m0: u32,
        /// Generators as JSON, e.g. '[[[1,1],[0,1]]]'.
        #[arg(long)]
        gens: String,
    },
    /// Bounds on the number of primitive points. Without --m0, prints the
    /// table for every divisor of 24.
    Bounds {
        #[arg(long)]
        m0: Option<u32>,
        /// Adelic index; defaults to 2 when printing the full table.
        #[arg(long)]
        index: Option<u64>,
        /// Generators at level m0, for the per-level finite bounds.
        #[arg(long)]
        gens: Option<String>,
    },
    /// Closed points above j(E) at every level dividing m0, with primitivity.
    Enumerate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Theorem verification suites, printed as a conformance table.
    OracleSuite {
        #[arg(long, default_value_t = 30)]
        max_n: u32,
    },
    /// Commutator-subgroup witness for adelic index 2.
    Serre {
        #[arg(long)]
        m0: u32,
        #[arg(long, default_value_t = 2)]
        index: u64,
    },
    /// Write a seeded random corpus in the input schema.
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Fixed level; otherwise levels are drawn from 1..=max-m0.
        #[arg(long)]
        m0: Option<u32>,
        #[arg(long, default_value_t = 24)]
        max_m0: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_gens(m0: u32, gens: &str) -> Result<CurveRecord> {
    let gens: serde_json::Value = serde_json::from_str(gens).context("--gens is not valid JSON")?;
    let line = json!({"label": "cli", "m0": m0, "generators": gens}).to_string();
    Ok(parse_curve_record(&line)?)
}

fn read_lines(path: &PathBuf) -> Result<impl Iterator<Item = io::Result<String>>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(file).lines())
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn certify(
    input: PathBuf,
    output: PathBuf,
    format: FormatArg,
    jobs: usize,
    lt_mode: LtModeArg,
    no_timings: bool,
    summary_path: Option<PathBuf>,
) -> Result<ExitCode> {
    let format = match format {
        FormatArg::Jsonl => Format::Jsonl,
        FormatArg::Tsv => Format::Tsv,
    };
    let opts = BatchOptions {
        lt_mode: match lt_mode {
            LtModeArg::Top => LtMode::Top,
            LtModeArg::All => LtMode::All,
        },
        timings: !no_timings,
    };
    let lines = read_lines(&input)?;
    let mut out = create(&output)?;
    if format == Format::Tsv {
        writeln!(out, "{}", tsv_header())?;
    }
    let exec = Executor::with_jobs(jobs);
    let summary = run_batch(lines, &exec, &opts, |r| writeln!(out, "{}", emit_report(r, format)))?;
    out.flush()?;

    let text = summary.to_json();
    match summary_path {
        Some(p) => std::fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    if summary.false_positives > 0 {
        eprintln!(
            "soundness violation: {} record(s) certified PASS without a unique primitive point",
            summary.false_positives
        );
    }
    Ok(ExitCode::from(summary.exit_code() as u8))
}

fn orbits(m0: u32, gens: &str) -> Result<ExitCode> {
    let spec = parse_gens(m0, gens)?.spec();
    let h = spec.with_neg_identity();
    let describe = |d: &ppcert_core::orbitcalc::OrbitDecomposition, with_degree: bool| {
        d.orbits()
            .iter()
            .map(|o| {
                let mut v = json!({
                    "rep": [o.representative.a(), o.representative.b()],
                    "size": o.size(),
                });
                if with_degree {
                    v["degree"] = json!(point_degree(o.size(), m0).ok());
                }
                v
            })
            .collect::<Vec<_>>()
    };
    let g_orbits = orbit_decomposition(&spec);
    let h_orbits = orbit_decomposition(&h);
    let out = json!({
        "m0": m0,
        "order": spec.order()?,
        "g_orbits": describe(&g_orbits, false),
        "h_orbits": describe(&h_orbits, true),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn bounds_cmd(m0: Option<u32>, index: Option<u64>, gens: Option<String>) -> Result<ExitCode> {
    let Some(m0) = m0 else {
        if gens.is_some() {
            bail!("--gens requires --m0");
        }
        let index = index.unwrap_or(2);
        println!("{}", BoundRecord::TABLE_HEADER);
        for m0 in [1, 2, 3, 4, 6, 8, 12, 24] {
            println!("{}", bounds(m0, Some(index), None)?.table_row());
        }
        return Ok(ExitCode::SUCCESS);
    };
    let spec = gens.map(|g| parse_gens(m0, &g)).transpose()?.map(|r| r.spec());
    let record = bounds(m0, index, spec.as_ref())?;
    println!("{}", BoundRecord::TABLE_HEADER);
    println!("{}", record.table_row());
    if record.finite.is_some() {
        println!("{}", serde_json::to_string_pretty(&record)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn enumerate(input: PathBuf, output: PathBuf, jobs: usize) -> Result<ExitCode> {
    let mut records = Vec::new();
    for (i, line) in read_lines(&input)?.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_curve_record(&line).map_err(|e| (i + 1, e)));
    }
    let exec = Executor::with_jobs(jobs);
    let lines = exec.map(&records, |r| match r {
        Ok(rec) => match enumerate_primitive_points(&rec.spec(), rec.adelic_index) {
            Ok(report) => (json!({"label": rec.label, "report": report}), false),
            Err(e) => (json!({"label": rec.label, "error": e.to_string()}), true),
        },
        Err((line, e)) => (json!({"label": format!("line:{line}"), "error": e.to_string()}), true),
    });
    let mut out = create(&output)?;
    let mut failed = false;
    for (value, err) in lines {
        writeln!(out, "{value}")?;
        failed |= err;
    }
    out.flush()?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn oracle_suite(max_n: u32) -> Result<ExitCode> {
    let rows = run_oracle_suite(max_n);
    print!("{}", format_table(&rows));
    Ok(if rows.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn serre(m0: u32, index: u64) -> Result<ExitCode> {
    let cert = serre_certificate(m0, index)?;
    if let Some(w) = &cert.warning {
        eprintln!("warning: {w}");
    }
    println!("{}", serde_json::to_string_pretty(&cert)?);
    Ok(ExitCode::SUCCESS)
}

fn synth_cmd(output: PathBuf, count: usize, m0: Option<u32>, max_m0: u32, seed: u64) -> Result<ExitCode> {
    let records = match m0 {
        Some(m0) => synth::random_corpus(seed, m0, count),
        None => synth::mixed_corpus(seed, max_m0, count),
    };
    let mut out = create(&output)?;
    for r in &records {
        writeln!(out, "{}", r.to_json())?;
    }
    out.flush()?;
    eprintln!(
        "wrote {} records at levels up to {}",
        records.len(),
        records.iter().map(|r| r.spec().modulus().n()).max().unwrap_or(0)
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Certify {
            input,
            output,
            format,
            jobs,
            lt_mode,
            no_timings,
            summary,
        } => certify(input, output, format, jobs, lt_mode, no_timings, summary),
        Command::Orbits { m0, gens } => orbits(m0, &gens),
        Command::Bounds { m0, index, gens } => bounds_cmd(m0, index, gens),
        Command::Enumerate { input, output, jobs } => enumerate(input, output, jobs),
        Command::OracleSuite { max_n } => oracle_suite(max_n),
        Command::Serre { m0, index } => serre(m0, index),
        Command::Synth {
            output,
            count,
            m0,
            max_m0,
            seed,
        } => synth_cmd(output, count, m0, max_m0, seed),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
