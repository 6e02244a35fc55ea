//! crtk: reduced Collatz dynamics from the command line.
//!
//! Outputs are deterministic byte-for-byte for identical inputs and
//! flags; elapsed-time fields appear only under --timing. Exit codes:
//! 0 success, 1 domain error (JSON error object under --json), 2 usage.

use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crtk_core::{
    apply, build_graph, coverage, d2r, dynam, export_dot, export_json, forking_point,
    forms_of_length, is_reduced_form, prefix_status, r2d, reduced_dynamics, verify_range,
    DynString, EnumRecord, Error, ForkOutcome, FormStatus, LineStatus, Nat, RangeConfig,
    RdOutcome, ResidueClass, VerifySession, DEFAULT_RANGE_BUDGET, DEFAULT_RD_BUDGET,
    DEFAULT_VERIFY_BUDGET,
};

/// Combined steps between periodic checkpoint writes.
const CHECKPOINT_INTERVAL: u64 = 1 << 16;

#[derive(Parser)]
#[command(
    name = "crtk",
    version,
    about = "Reduced Collatz dynamics: compute, validate, enumerate, verify"
)]
struct Cli {
    /// Emit machine-readable JSON
    #[arg(long, global = true)]
    json: bool,

    /// Write output to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Step budget for searches (defaults per subcommand)
    #[arg(long, global = true, value_name = "N")]
    budget: Option<u64>,

    /// Worker threads for range and enumeration commands
    #[arg(
        long,
        global = true,
        env = "CRTK_THREADS",
        value_name = "N",
        default_value_t = 1
    )]
    threads: usize,

    /// Include elapsed-time fields in reports
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced dynamics of x (sequence to the first value below x)
    Rd { x: String },
    /// First n parity-driven transformations of x
    Dynam { x: String, n: u64 },
    /// Run a dynamics string on x and print the trajectory
    Apply { s: String, x: String },
    /// Residue class whose members share the dynamics s
    D2r { s: String },
    /// Shared first-t dynamics of the class [i] mod 2^t
    R2d { i: String, t: usize },
    /// Classify a string against the reduced-form condition
    Form {
        s: String,
        /// Also print the per-prefix line statuses
        #[arg(long)]
        prefixes: bool,
    },
    /// Every reduced-dynamics pattern with length <= l, with classes
    Enumerate { l: usize },
    /// Exact cumulative coverage ratios R(1..=n)
    Coverage { n: usize },
    /// Partition-labeled forking tree to depth l
    Graph {
        l: usize,
        /// DOT output (the default; global --json switches to JSON)
        #[arg(long)]
        dot: bool,
    },
    /// Drive x to 1, counting combined transformations
    Verify {
        x: String,
        /// Re-run with the classic rule and cross-check counters
        #[arg(long)]
        oracle: bool,
        /// Save/resume state at FILE
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
    },
    /// Verify every integer in [a, b] (first descent; --full goes to 1)
    VerifyRange {
        a: String,
        b: String,
        /// Full descent to 1 instead of first descent
        #[arg(long)]
        full: bool,
    },
    /// First index at which the dynamics of two odd integers diverge
    Fork { x1: String, x2: String },
}

fn parse_nat(text: &str) -> Result<Nat, Error> {
    text.trim().parse()
}

fn parse_dynstring(text: &str) -> Result<DynString, Error> {
    text.trim().parse()
}

fn status_name(status: LineStatus) -> &'static str {
    match status {
        LineStatus::Above => "above",
        LineStatus::Terminal => "terminal",
        LineStatus::Below => "below",
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), Error> {
    match &cli.command {
        Command::Rd { x } => {
            let x = parse_nat(x)?;
            let budget = cli.budget.unwrap_or(DEFAULT_RD_BUDGET);
            match reduced_dynamics(&x, budget)? {
                RdOutcome::Found(s) => {
                    if cli.json {
                        writeln!(out, "{}", serde_json::json!({ "x": x, "rd": s }))?;
                    } else {
                        writeln!(out, "{s}")?;
                    }
                }
                RdOutcome::BudgetExhausted { steps, bit_length } => {
                    if cli.json {
                        writeln!(
                            out,
                            "{}",
                            serde_json::json!({
                                "x": x,
                                "rd": serde_json::Value::Null,
                                "budget_exhausted": true,
                                "steps": steps,
                                "bit_length": bit_length,
                            })
                        )?;
                    } else {
                        writeln!(
                            out,
                            "budget exhausted after {steps} steps (value at {bit_length} bits)"
                        )?;
                    }
                }
            }
        }
        Command::Dynam { x, n } => {
            let x = parse_nat(x)?;
            let s = dynam(&x, *n)?;
            if cli.json {
                writeln!(out, "{}", serde_json::json!({ "x": x, "n": n, "dynam": s }))?;
            } else {
                writeln!(out, "{s}")?;
            }
        }
        Command::Apply { s, x } => {
            let s = parse_dynstring(s)?;
            let x = parse_nat(x)?;
            let trajectory = apply(&s, &x)?;
            if cli.json {
                writeln!(out, "{}", trajectory.to_json())?;
            } else {
                let values: Vec<String> =
                    trajectory.values.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", values.join(" -> "))?;
            }
        }
        Command::D2r { s } => {
            let s = parse_dynstring(s)?;
            let class = d2r(&s)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&class).expect("serializes"))?;
            } else {
                writeln!(out, "{class}")?;
            }
        }
        Command::R2d { i, t } => {
            let class = ResidueClass::new(parse_nat(i)?, *t);
            let s = r2d(&class);
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({ "i": class.i(), "t": class.exponent(), "dynam": s })
                )?;
            } else {
                writeln!(out, "{s}")?;
            }
        }
        Command::Form { s, prefixes } => {
            let s = parse_dynstring(s)?;
            let verdict = is_reduced_form(&s);
            let statuses = prefix_status(&s);
            let status_text = match verdict.status {
                FormStatus::ReducedForm => "reduced-form".to_string(),
                FormStatus::ProperPrefix => "proper-prefix".to_string(),
                FormStatus::Inadmissible => format!(
                    "inadmissible (first violation at prefix {})",
                    verdict.first_violation.unwrap_or(0)
                ),
            };
            if cli.json {
                let names: Vec<&str> = statuses.iter().map(|&st| status_name(st)).collect();
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({
                        "s": s,
                        "status": match verdict.status {
                            FormStatus::ReducedForm => "reduced-form",
                            FormStatus::ProperPrefix => "proper-prefix",
                            FormStatus::Inadmissible => "inadmissible",
                        },
                        "first_violation": verdict.first_violation,
                        "prefixes": names,
                    })
                )?;
            } else {
                writeln!(out, "{status_text}")?;
                if *prefixes {
                    let names: Vec<&str> = statuses.iter().map(|&st| status_name(st)).collect();
                    writeln!(out, "{}", names.join(" "))?;
                }
            }
        }
        Command::Enumerate { l } => {
            if !(1..=60).contains(l) {
                return Err(Error::Domain("enumerate supports lengths 1..=60".into()));
            }
            if cli.json {
                write!(out, "[")?;
                let mut first = true;
                for len in 1..=*l {
                    for record in forms_of_length(len, cli.threads) {
                        if !first {
                            write!(out, ",")?;
                        }
                        first = false;
                        write!(out, "{}", serde_json::to_string(&record).expect("serializes"))?;
                    }
                }
                writeln!(out, "]")?;
            } else {
                writeln!(out, "{}", EnumRecord::CSV_HEADER)?;
                for len in 1..=*l {
                    for record in forms_of_length(len, cli.threads) {
                        writeln!(out, "{}", record.csv_row())?;
                    }
                }
            }
        }
        Command::Coverage { n } => {
            if !(1..=60).contains(n) {
                return Err(Error::Domain("coverage supports lengths 1..=60".into()));
            }
            let table = coverage(*n);
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&table.rows).expect("serializes"))?;
            } else {
                writeln!(out, "{}", crtk_core::CoverageRow::CSV_HEADER)?;
                for row in &table.rows {
                    writeln!(out, "{}", row.csv_row())?;
                }
            }
        }
        Command::Graph { l, dot } => {
            let tree = build_graph(*l)?;
            if cli.json && !*dot {
                writeln!(out, "{}", export_json(&tree))?;
            } else {
                write!(out, "{}", export_dot(&tree))?;
            }
        }
        Command::Verify {
            x,
            oracle,
            checkpoint,
        } => {
            let x = parse_nat(x)?;
            let budget = cli.budget.unwrap_or(DEFAULT_VERIFY_BUDGET);
            let started = Instant::now();

            let mut session = match checkpoint {
                Some(path) if path.exists() => VerifySession::load_checkpoint(path)?,
                _ => VerifySession::new(&x)?,
            };
            let resumed_at = session.steps_taken();

            if let Some(path) = checkpoint {
                while !session.is_done() && session.steps_taken() < budget {
                    let left = budget - session.steps_taken();
                    session.advance(left.min(CHECKPOINT_INTERVAL));
                    session.save_checkpoint(path)?;
                }
            } else {
                session.run(budget);
            }

            let elapsed = started.elapsed();
            let reached = session.is_done();
            if *oracle && reached {
                let classic = crtk_core::classic_descent(&x, budget.saturating_mul(2) + 2)?;
                let expect = Some((session.cnt_i(), session.steps_taken()));
                if classic != expect {
                    return Err(Error::Domain(format!(
                        "oracle disagreement: classic {classic:?} vs combined {expect:?}"
                    )));
                }
            }

            if cli.json {
                let mut value = serde_json::json!({
                    "x": x,
                    "reached_one": reached,
                    "cnt_I": session.cnt_i(),
                    "cnt_O": session.cnt_o(),
                    "total_len": session.steps_taken(),
                    "classic_odd_steps": session.cnt_i(),
                    "classic_halvings": session.steps_taken(),
                    "final_bit_length": session.value().bit_length(),
                    "oracle_checked": *oracle && reached,
                });
                if resumed_at > 0 {
                    value["resumed_at_step"] = serde_json::json!(resumed_at);
                }
                if cli.timing {
                    value["elapsed_ms"] = serde_json::json!(elapsed.as_millis() as u64);
                }
                writeln!(out, "{value}")?;
            } else {
                writeln!(out, "x: {x}")?;
                if resumed_at > 0 {
                    writeln!(out, "resumed at step: {resumed_at}")?;
                }
                writeln!(out, "reached one: {reached}")?;
                writeln!(
                    out,
                    "cnt_I: {}  cnt_O: {}  total: {}",
                    session.cnt_i(),
                    session.cnt_o(),
                    session.steps_taken()
                )?;
                writeln!(
                    out,
                    "classic: {} odd steps, {} halvings",
                    session.cnt_i(),
                    session.steps_taken()
                )?;
                if !reached {
                    writeln!(out, "stalled at {} bits", session.value().bit_length())?;
                }
                if *oracle && reached {
                    writeln!(out, "oracle: counters agree")?;
                }
                if cli.timing {
                    writeln!(out, "elapsed: {elapsed:.2?}")?;
                }
            }
        }
        Command::VerifyRange { a, b, full } => {
            let a = parse_nat(a)?;
            let b = parse_nat(b)?;
            let config = RangeConfig {
                budget: cli.budget.unwrap_or(DEFAULT_RANGE_BUDGET),
                threads: cli.threads,
                full: *full,
            };
            let started = Instant::now();
            let report = verify_range(&a, &b, &config)?;
            let elapsed = started.elapsed();
            if cli.json {
                let mut value = serde_json::to_value(&report).expect("serializes");
                if cli.timing {
                    value["elapsed_ms"] = serde_json::json!(elapsed.as_millis() as u64);
                }
                writeln!(out, "{value}")?;
            } else {
                writeln!(out, "range: {}..={}", report.a, report.b)?;
                writeln!(
                    out,
                    "total: {}  found: {}  exhausted: {}",
                    report.total,
                    report.found,
                    report.exhausted.len()
                )?;
                writeln!(out, "max length: {} at x = {}", report.max_len, report.argmax)?;
                for x in &report.exhausted {
                    writeln!(out, "budget exhausted: {x}")?;
                }
                writeln!(out, "histogram:")?;
                for (len, count) in &report.histogram {
                    writeln!(out, "  {len}: {count}")?;
                }
                if cli.timing {
                    writeln!(out, "elapsed: {elapsed:.2?}")?;
                }
            }
        }
        Command::Fork { x1, x2 } => {
            let x1 = parse_nat(x1)?;
            let x2 = parse_nat(x2)?;
            match forking_point(&x1, &x2)? {
                ForkOutcome::Forked { t } => {
                    if cli.json {
                        writeln!(out, "{}", serde_json::json!({ "t": t }))?;
                    } else {
                        writeln!(out, "{t}")?;
                    }
                }
                ForkOutcome::Identical => {
                    if cli.json {
                        writeln!(out, "{}", serde_json::json!({ "identical": true }))?;
                    } else {
                        writeln!(out, "identical")?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let result = match &cli.out {
        Some(path) => {
            let file = match std::fs::File::create(path) {
                Ok(f) => f,
                Err(e) => return fail(&cli, &Error::Io(e)),
            };
            let mut writer = BufWriter::new(file);
            run(&cli, &mut writer).and_then(|()| writer.flush().map_err(Error::Io))
        }
        None => {
            let stdout = std::io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            run(&cli, &mut writer).and_then(|()| writer.flush().map_err(Error::Io))
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&cli, &e),
    }
}

fn fail(cli: &Cli, error: &Error) -> ExitCode {
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "error": { "kind": error.kind(), "message": error.to_string() }
            })
        );
    } else {
        eprintln!("error: {error}");
    }
    ExitCode::from(1)
}
