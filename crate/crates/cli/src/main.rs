use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gq_cli::batch::{error_json, run_batch};
use gq_cli::{CommandError, Session, Value};
use gq_core::oracle::cross_validate_suite;
use gq_core::rational::parse_q;
use serde_json::json;

#[derive(Parser)]
#[command(name = "gq", version, about = "Exact arithmetic on generalized scalars and quaternions")]
struct Cli {
    /// Truncation order N for division, inverses and square roots.
    #[arg(long, global = true, default_value = "8")]
    order: String,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one line (statements may be separated by `;`).
    Eval { expr: String },
    /// Read lines from stdin, keeping `let` bindings between them.
    Repl,
    /// Run a JSON array of command strings, each in a fresh environment.
    Batch { file: PathBuf },
    /// Cross-check symbolic decisions against numeric sampling.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn render(result: &Result<Option<Value>, CommandError>, as_json: bool) -> String {
    match (result, as_json) {
        (Ok(Some(v)), false) => v.to_string(),
        (Ok(None), false) => String::new(),
        (Err(e), false) => format!("error: {e}"),
        (Ok(v), true) => json!({ "ok": true, "result": v.as_ref().map(Value::to_json) }).to_string(),
        (Err(e), true) => json!({ "ok": false, "error": error_json(e) }).to_string(),
    }
}

fn repl(session: &mut Session, as_json: bool) -> io::Result<bool> {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut stdout = io::stdout();
    let mut all_ok = true;
    loop {
        if interactive {
            write!(stdout, "gq> ")?;
            stdout.flush()?;
        }
        let mut line = String::new();
        if stdin.lock().read_line(&mut line)? == 0 {
            break;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if matches!(line, "quit" | "exit") {
            break;
        }
        let result = session.run_line(line);
        all_ok &= result.is_ok();
        let out = render(&result, as_json);
        if !out.is_empty() {
            writeln!(stdout, "{out}")?;
        }
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(order) = parse_q(&cli.order) else {
        eprintln!("error: --order expects a rational number, got `{}`", cli.order);
        return ExitCode::from(2);
    };
    let mut session = Session::new(order);
    match cli.command {
        Command::Eval { expr } => {
            let result = session.run_line(&expr);
            println!("{}", render(&result, cli.json));
            if result.is_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Repl => match repl(&mut session, cli.json) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::FAILURE,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Batch { file } => {
            let commands: Vec<String> = match std::fs::read_to_string(&file)
                .map_err(|e| e.to_string())
                .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()))
            {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let (out, ok) = run_batch(&session, &commands);
            println!("{}", serde_json::to_string_pretty(&out).expect("json output"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Oracle { seed, trials } => match cross_validate_suite(seed, trials) {
            Ok(summary) => {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&summary).expect("json output"));
                } else {
                    println!(
                        "seed {} trials {}: {} checks, {} confirmed, {} refuted, {} inconclusive, {} mismatches",
                        summary.seed,
                        summary.trials,
                        summary.checks,
                        summary.confirmed,
                        summary.refuted,
                        summary.inconclusive,
                        summary.mismatches.len()
                    );
                    for m in &summary.mismatches {
                        println!("mismatch: trial {} {} claimed {}", m.trial, m.decision, m.claimed);
                    }
                }
                if summary.mismatches.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
    }
}
