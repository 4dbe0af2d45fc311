// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperstab_core::bell::{self, ReportOptions};
use hyperstab_core::photonic::{self, Scenario};
use hyperstab_core::report::{self, Tabular};
use hyperstab_core::stabilizer::{DEFAULT_GUARD_BITS, MAX_GUARD_BITS};
use hyperstab_core::{EnumOptions, Error, HyperState};

const DEFAULT_STATE: &str = "4:0000,4:0101,4:0000";

#[derive(Parser, Debug)]
#[command(
    name = "hyperstab",
    version,
    about = "Stabilizer counts, Bell bounds and photonic protocol checks for GHZ-type hyperentangled states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for enumeration (default: available cores).
    #[arg(long, global = true, env = "HYPERSTAB_THREADS")]
    threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count negative-sign stabilizer elements by enumeration and closed form.
    Count {
        #[command(flatten)]
        state: StateArg,
        #[command(flatten)]
        guard: GuardArg,
    },
    /// Per-block closed-form counts.
    ClosedForm {
        #[command(flatten)]
        state: StateArg,
        /// Also compare one, two and three aligned blocks over this many qubits.
        #[arg(long)]
        ordering: Option<usize>,
    },
    /// Bell operator value, all-plus bound and local hidden variable search.
    Bell {
        #[command(flatten)]
        state: StateArg,
        #[command(flatten)]
        guard: GuardArg,
        #[command(flatten)]
        search: SearchArgs,
        /// Run the exhaustive assignment search.
        #[arg(long)]
        exhaustive: bool,
        /// Refuse exhaustive search above this many active variables.
        #[arg(long, default_value_t = bell::DEFAULT_EXHAUSTIVE_VARS)]
        max_vars: usize,
    },
    /// Run a photonic scenario and compare the output with a target state.
    Simulate {
        /// Scenario JSON file (default: the built-in generation protocol).
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Target state for the fidelity check.
        #[arg(long, default_value = DEFAULT_STATE)]
        state: String,
    },
    /// Violation-degree table for the three twelve-qubit states.
    Table1 {
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        guard: GuardArg,
    },
    /// Closed-form case differences as exact numbers.
    Cases {
        #[arg(long, default_value_t = 5)]
        x_max: i64,
    },
}

#[derive(Args, Debug)]
struct StateArg {
    /// Inline `m:mask[:label],...` or JSON.
    #[arg(long, default_value = DEFAULT_STATE)]
    state: String,
}

#[derive(Args, Debug)]
struct GuardArg {
    /// Largest qubit count enumerated explicitly.
    #[arg(long, default_value_t = DEFAULT_GUARD_BITS)]
    guard_bits: usize,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = bell::DEFAULT_RESTARTS)]
    restarts: usize,
    /// Flips per restart (default: 30 per qubit).
    #[arg(long)]
    steps: Option<usize>,
}

fn enum_options(guard_bits: usize, threads: usize) -> Result<EnumOptions, Error> {
    if guard_bits > MAX_GUARD_BITS {
        return Err(Error::Capacity {
            what: "guard bits",
            size: guard_bits,
            limit: MAX_GUARD_BITS,
        });
    }
    Ok(EnumOptions {
        guard_bits,
        ..EnumOptions::with_threads(threads)
    })
}

fn report_options(search: &SearchArgs, enumeration: EnumOptions) -> ReportOptions {
    ReportOptions {
        seed: search.seed,
        restarts: search.restarts,
        steps: search.steps,
        enumeration,
        ..ReportOptions::default()
    }
}

fn render<T: Serialize + Tabular>(doc: &T, format: Format) -> Result<String, String> {
    match format {
        Format::Json => serde_json::to_string_pretty(doc)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(doc.headers()).map_err(|e| e.to_string())?;
            for row in doc.rows() {
                w.write_record(&row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
        Format::Table => Ok(render_table(&doc.headers(), &doc.rows())),
    }
}

fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let mut out = line(headers.to_vec());
    out += &line(rule.iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn parse_state(text: &str) -> Result<HyperState, Failure> {
    report::parse_state_spec(text).map_err(|e| Failure::Input(format!("--state: {e}")))
}

fn load_scenario(path: &Option<PathBuf>) -> Result<Scenario, Failure> {
    match path {
        None => Ok(photonic::generation_scenario()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1);
    let fmt = cli.format;
    let out = match &cli.command {
        Command::Count { state, guard } => {
            let s = parse_state(&state.state)?;
            let doc = report::count_report(&s, &enum_options(guard.guard_bits, threads)?)?;
            render(&doc, fmt)
        }
        Command::ClosedForm { state, ordering } => {
            let s = parse_state(&state.state)?;
            render(&report::closed_form_report(&s, *ordering)?, fmt)
        }
        Command::Bell {
            state,
            guard,
            search,
            exhaustive,
            max_vars,
        } => {
            let s = parse_state(&state.state)?;
            let opts = ReportOptions {
                exhaustive: *exhaustive,
                max_exhaustive_vars: *max_vars,
                ..report_options(search, enum_options(guard.guard_bits, threads)?)
            };
            render(&bell::report(&s, &opts)?, fmt)
        }
        Command::Simulate { scenario, state } => {
            let target = parse_state(state)?;
            let sc = load_scenario(scenario)?;
            render(&report::simulate_report(&sc, &target)?, fmt)
        }
        Command::Table1 { search, guard } => {
            let opts = report_options(search, enum_options(guard.guard_bits, threads)?);
            render(&report::table1(&opts)?, fmt)
        }
        Command::Cases { x_max } => render(&report::cases_report(*x_max)?, fmt),
    };
    out.map_err(Failure::Input)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, text.as_bytes()),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(3)
        }
    }
}
