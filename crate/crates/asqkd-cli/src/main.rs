//! Command-line front end for the measure-resend ASQKD simulator.
//!
//! Subcommands: `run` (batch of sessions under one attack), `sweep` (one
//! batch or search per swept parameter value), `attack-search` (strongest
//! collective attack under a detection budget), `compare` (protocol
//! comparison table).
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O error.

mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use asqkd::adversary::{constrained_attack_search, information_frontier, SearchOptions};
use asqkd::analysis::{comparison_table, qubit_efficiency, run_batch_with_records, KeysPolicy};
use asqkd::protocol::SessionConfig;
use asqkd::seeding::split_seed;

use output::{
    batch_sweep_csv, compare_csv, compare_table_text, emit, epsilon_sweep_csv, to_json, trials_csv,
    BatchSweepRow, CompareSummary, ConfigEcho, EpsilonSweepRow, RunSummary, SearchConfigEcho,
    SearchSummary, SweepSummary, TOOL_VERSION,
};
use settings::{parse_slots, AttackKind, OutputFormat, Overrides, Settings};

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(String),
}

impl CliError {
    fn invalid(message: impl Into<String>) -> CliError {
        CliError::Invalid(message.into())
    }
}

#[derive(Parser)]
#[command(
    name = "asqkd",
    version,
    about = "Simulator for a single-photon measure-resend authenticated semi-quantum key distribution protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonFlags {
    /// Key length in bits
    #[arg(long)]
    n: Option<usize>,
    /// Hash tag length in bits
    #[arg(long)]
    m: Option<usize>,
    /// Number of independent sessions
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; every derived stream is split from it
    #[arg(long)]
    seed: Option<u64>,
    /// Attack model
    #[arg(long, value_enum)]
    attack: Option<AttackKind>,
    /// Per-photon interception probability (intercept-z / intercept-x)
    #[arg(long = "p-attack")]
    p_attack: Option<f64>,
    /// Comma-separated transmission slots to tamper with (bitflip)
    #[arg(long)]
    slots: Option<String>,
    /// Detection budget for the attack search
    #[arg(long)]
    epsilon: Option<f64>,
    /// Attack-search restarts
    #[arg(long)]
    restarts: Option<usize>,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Flat key=value config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonFlags {
    fn resolve(&self) -> Result<Settings, CliError> {
        let slots = self
            .slots
            .as_deref()
            .map(|text| parse_slots(text).map_err(CliError::invalid))
            .transpose()?;
        let overrides = Overrides {
            n: self.n,
            m: self.m,
            trials: self.trials,
            seed: self.seed,
            attack: self.attack,
            p_attack: self.p_attack,
            slots,
            epsilon: self.epsilon,
            restarts: self.restarts,
            out: self.out.clone(),
            format: self.format,
        };
        Settings::resolve(overrides, self.config.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of sessions and write a summary report
    Run(CommonFlags),
    /// Run one batch (or search) per value of a swept parameter
    Sweep(SweepFlags),
    /// Search for the strongest collective attack under a detection budget
    AttackSearch(SearchFlags),
    /// Print the measure-resend protocol comparison table
    Compare(CommonFlags),
}

#[derive(Args)]
struct SweepFlags {
    #[command(flatten)]
    common: CommonFlags,
    /// Parameter to vary: n, m, p-attack, epsilon, or size (n and m jointly)
    #[arg(long)]
    vary: String,
    /// Comma-separated values for the swept parameter
    #[arg(long)]
    values: String,
    /// Ancilla register width for epsilon sweeps
    #[arg(long, default_value_t = 2)]
    ancilla: usize,
    /// Ascent iteration cap per restart for epsilon sweeps
    #[arg(long = "max-iters", default_value_t = 500)]
    max_iters: usize,
}

#[derive(Args)]
struct SearchFlags {
    #[command(flatten)]
    common: CommonFlags,
    /// Ancilla register width in qubits
    #[arg(long, default_value_t = 2)]
    ancilla: usize,
    /// Ascent iteration cap per restart
    #[arg(long = "max-iters", default_value_t = 500)]
    max_iters: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(flags) => cmd_run(&flags),
        Command::Sweep(flags) => cmd_sweep(&flags),
        Command::AttackSearch(flags) => cmd_attack_search(&flags),
        Command::Compare(flags) => cmd_compare(&flags),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Io(message)) => {
            eprintln!("I/O error: {message}");
            ExitCode::from(3)
        }
    }
}

fn session_config(settings: &Settings) -> Result<SessionConfig, CliError> {
    SessionConfig::new(settings.n, settings.m, settings.seed)
        .map_err(|e| CliError::invalid(e.to_string()))
}

fn cmd_run(flags: &CommonFlags) -> Result<(), CliError> {
    let settings = flags.resolve()?;
    let config = session_config(&settings)?;
    let attack = settings.attack_model()?;
    let (stats, records) = run_batch_with_records(
        &config,
        &KeysPolicy::FreshPerTrial,
        &attack,
        settings.trials,
        settings.seed,
    )
    .map_err(|e| CliError::invalid(e.to_string()))?;

    let summary = RunSummary {
        schema_version: output::SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        command: "run",
        config: ConfigEcho::from_settings(&settings),
        stats: &stats,
    };
    match settings.format {
        OutputFormat::Json => emit(settings.out.as_deref(), &to_json(&summary)),
        OutputFormat::Csv => {
            // The per-trial table goes to the requested sink; the summary
            // still lands on standard output when a file takes the table.
            let csv = trials_csv(&records);
            if settings.out.is_some() {
                emit(settings.out.as_deref(), &csv)?;
                emit(None, &to_json(&summary))
            } else {
                emit(None, &csv)
            }
        }
    }
}

fn cmd_sweep(flags: &SweepFlags) -> Result<(), CliError> {
    let settings = flags.common.resolve()?;
    let values: Vec<&str> = flags
        .values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(CliError::invalid("sweep needs at least one value"));
    }

    match flags.vary.as_str() {
        "n" | "m" | "size" | "p-attack" | "p_attack" => {
            let rows = batch_sweep_rows(&flags.vary, &values, &settings)?;
            let summary = SweepSummary {
                schema_version: output::SCHEMA_VERSION,
                tool_version: TOOL_VERSION,
                command: "sweep",
                vary: &flags.vary,
                rows: &rows,
            };
            match settings.format {
                OutputFormat::Json => emit(settings.out.as_deref(), &to_json(&summary)),
                OutputFormat::Csv => emit(settings.out.as_deref(), &batch_sweep_csv(&rows)),
            }
        }
        "epsilon" => {
            let epsilons: Vec<f64> = values
                .iter()
                .map(|v| parse_positive_float(v, "epsilon"))
                .collect::<Result<_, _>>()?;
            let base = SearchOptions {
                ancilla_qubits: flags.ancilla,
                epsilon: epsilons[0],
                restarts: settings.restarts,
                max_iters: flags.max_iters,
                seed: settings.seed,
                ..SearchOptions::default()
            };
            let reports = information_frontier(&epsilons, &base)
                .map_err(|e| CliError::invalid(e.to_string()))?;
            let rows: Vec<EpsilonSweepRow> = reports
                .iter()
                .map(|r| EpsilonSweepRow {
                    epsilon: r.epsilon,
                    best_detection_prob: r.best_detection_prob,
                    best_eve_info: r.best_eve_info,
                    iterations: r.iterations,
                })
                .collect();
            let summary = SweepSummary {
                schema_version: output::SCHEMA_VERSION,
                tool_version: TOOL_VERSION,
                command: "sweep",
                vary: "epsilon",
                rows: &rows,
            };
            match settings.format {
                OutputFormat::Json => emit(settings.out.as_deref(), &to_json(&summary)),
                OutputFormat::Csv => emit(settings.out.as_deref(), &epsilon_sweep_csv(&rows)),
            }
        }
        other => Err(CliError::invalid(format!(
            "unknown sweep parameter {other:?}; expected n, m, size, p-attack, or epsilon"
        ))),
    }
}

fn batch_sweep_rows(
    vary: &str,
    values: &[&str],
    settings: &Settings,
) -> Result<Vec<BatchSweepRow>, CliError> {
    let mut rows = Vec::with_capacity(values.len());
    for (index, value) in values.iter().enumerate() {
        let mut row_settings = settings.clone();
        let numeric = match vary {
            "n" => {
                row_settings.n = parse_positive_int(value, "n")?;
                row_settings.n as f64
            }
            "m" => {
                row_settings.m = parse_positive_int(value, "m")?;
                row_settings.m as f64
            }
            "size" => {
                let size = parse_positive_int(value, "size")?;
                row_settings.n = size;
                row_settings.m = size;
                size as f64
            }
            _ => {
                let p = parse_positive_float(value, "p-attack")?;
                row_settings.p_attack = Some(p);
                match row_settings.attack_kind {
                    // Default to the Z intercept when no attack was named.
                    AttackKind::Honest => row_settings.attack_kind = AttackKind::InterceptZ,
                    AttackKind::InterceptZ | AttackKind::InterceptX => {}
                    other => {
                        return Err(CliError::invalid(format!(
                            "a p-attack sweep needs an intercept attack, not {}",
                            other.as_str()
                        )))
                    }
                }
                p
            }
        };
        let row_seed = split_seed(settings.seed, index as u64);
        row_settings.seed = row_seed;
        let config = session_config(&row_settings)?;
        let attack = row_settings.attack_model()?;
        let (stats, _) = run_batch_with_records(
            &config,
            &KeysPolicy::FreshPerTrial,
            &attack,
            row_settings.trials,
            row_seed,
        )
        .map_err(|e| CliError::invalid(e.to_string()))?;
        rows.push(BatchSweepRow {
            value: numeric,
            n: row_settings.n,
            m: row_settings.m,
            trials: row_settings.trials,
            seed: row_seed,
            detection_rate: stats.detection_rate,
            bob_hash_fail_rate: stats.bob_hash_fail_rate,
            key_agreement_rate: stats.key_agreement_rate,
            recycled_rate: stats.recycled_rate,
            wilson_halfwidth: stats.wilson_halfwidth,
            decoy_failure_rate: stats.decoy_failure_rate(),
            qubit_efficiency: qubit_efficiency(row_settings.n, row_settings.m).to_string(),
        });
    }
    Ok(rows)
}

fn cmd_attack_search(flags: &SearchFlags) -> Result<(), CliError> {
    let settings = flags.common.resolve()?;
    let options = SearchOptions {
        ancilla_qubits: flags.ancilla,
        epsilon: settings.epsilon,
        restarts: settings.restarts,
        max_iters: flags.max_iters,
        seed: settings.seed,
        ..SearchOptions::default()
    };
    let report =
        constrained_attack_search(&options).map_err(|e| CliError::invalid(e.to_string()))?;
    let summary = SearchSummary {
        schema_version: output::SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        command: "attack-search",
        config: SearchConfigEcho {
            epsilon: options.epsilon,
            restarts: options.restarts,
            max_iters: options.max_iters,
            ancilla_qubits: options.ancilla_qubits,
            seed: options.seed,
        },
        report: &report,
    };
    match settings.format {
        OutputFormat::Json => emit(settings.out.as_deref(), &to_json(&summary)),
        OutputFormat::Csv => {
            let row = EpsilonSweepRow {
                epsilon: report.epsilon,
                best_detection_prob: report.best_detection_prob,
                best_eve_info: report.best_eve_info,
                iterations: report.iterations,
            };
            emit(settings.out.as_deref(), &epsilon_sweep_csv(&[row]))
        }
    }
}

fn cmd_compare(flags: &CommonFlags) -> Result<(), CliError> {
    let settings = flags.resolve()?;
    let rows = comparison_table(settings.n, settings.m);
    // The table always prints; a report file is written on request.
    print!("{}", compare_table_text(&rows, settings.n, settings.m));
    if settings.out.is_some() {
        let summary = CompareSummary {
            schema_version: output::SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            command: "compare",
            n: settings.n,
            m: settings.m,
            rows: &rows,
        };
        match settings.format {
            OutputFormat::Json => emit(settings.out.as_deref(), &to_json(&summary))?,
            OutputFormat::Csv => emit(settings.out.as_deref(), &compare_csv(&rows))?,
        }
    }
    Ok(())
}

fn parse_positive_int(value: &str, what: &str) -> Result<usize, CliError> {
    let parsed: usize = value
        .parse()
        .map_err(|_| CliError::invalid(format!("bad {what} value {value:?}")))?;
    if parsed == 0 {
        return Err(CliError::invalid(format!("{what} must be at least 1")));
    }
    Ok(parsed)
}

fn parse_positive_float(value: &str, what: &str) -> Result<f64, CliError> {
    let parsed: f64 = value
        .parse()
        .map_err(|_| CliError::invalid(format!("bad {what} value {value:?}")))?;
    if !parsed.is_finite() || parsed < 0.0 {
        return Err(CliError::invalid(format!(
            "{what} must be a finite non-negative number"
        )));
    }
    Ok(parsed)
}
