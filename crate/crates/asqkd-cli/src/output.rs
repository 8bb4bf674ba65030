//! Machine-readable report writers. Field order is fixed by the struct
//! definitions, so identical inputs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use asqkd::adversary::AttackSearchReport;
use asqkd::analysis::{BatchStats, ComparisonRow, TrialRecord};

use crate::settings::{AttackKind, Settings};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub attack: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_attack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slots: Option<Vec<usize>>,
}

impl ConfigEcho {
    pub fn from_settings(settings: &Settings) -> ConfigEcho {
        let p_attack = match settings.attack_kind {
            AttackKind::InterceptZ | AttackKind::InterceptX => {
                Some(settings.p_attack.unwrap_or(1.0))
            }
            _ => None,
        };
        let slots = match settings.attack_kind {
            AttackKind::Bitflip => settings.slots.clone(),
            _ => None,
        };
        ConfigEcho {
            n: settings.n,
            m: settings.m,
            trials: settings.trials,
            seed: settings.seed,
            attack: settings.attack_kind.as_str(),
            p_attack,
            slots,
        }
    }
}

#[derive(Serialize)]
pub struct RunSummary<'a> {
    pub schema_version: u32,
    pub tool_version: &'a str,
    pub command: &'a str,
    pub config: ConfigEcho,
    pub stats: &'a BatchStats,
}

#[derive(Serialize)]
pub struct BatchSweepRow {
    pub value: f64,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub detection_rate: f64,
    pub bob_hash_fail_rate: f64,
    pub key_agreement_rate: f64,
    pub recycled_rate: f64,
    pub wilson_halfwidth: f64,
    pub decoy_failure_rate: f64,
    pub qubit_efficiency: String,
}

#[derive(Serialize)]
pub struct EpsilonSweepRow {
    pub epsilon: f64,
    pub best_detection_prob: f64,
    pub best_eve_info: f64,
    pub iterations: usize,
}

#[derive(Serialize)]
pub struct SweepSummary<'a, Row: Serialize> {
    pub schema_version: u32,
    pub tool_version: &'a str,
    pub command: &'a str,
    pub vary: &'a str,
    pub rows: &'a [Row],
}

#[derive(Serialize)]
pub struct SearchConfigEcho {
    pub epsilon: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub ancilla_qubits: usize,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct SearchSummary<'a> {
    pub schema_version: u32,
    pub tool_version: &'a str,
    pub command: &'a str,
    pub config: SearchConfigEcho,
    pub report: &'a AttackSearchReport,
}

#[derive(Serialize)]
pub struct CompareSummary<'a> {
    pub schema_version: u32,
    pub tool_version: &'a str,
    pub command: &'a str,
    pub n: usize,
    pub m: usize,
    pub rows: &'a [ComparisonRow],
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

/// Writes `content` to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError::Io(e.to_string())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn bit(flag: bool) -> u8 {
    u8::from(flag)
}

/// Per-trial CSV; the header row documents the column order.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial_index,alice_pass,bob_pass,key_match,recycled\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial_index,
            bit(r.alice_pass),
            bit(r.bob_pass),
            bit(r.key_match),
            bit(r.recycled)
        ));
    }
    out
}

pub fn batch_sweep_csv(rows: &[BatchSweepRow]) -> String {
    let mut out = String::from(
        "value,n,m,trials,seed,detection_rate,bob_hash_fail_rate,key_agreement_rate,\
         recycled_rate,wilson_halfwidth,decoy_failure_rate,qubit_efficiency\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.value,
            r.n,
            r.m,
            r.trials,
            r.seed,
            r.detection_rate,
            r.bob_hash_fail_rate,
            r.key_agreement_rate,
            r.recycled_rate,
            r.wilson_halfwidth,
            r.decoy_failure_rate,
            r.qubit_efficiency
        ));
    }
    out
}

pub fn epsilon_sweep_csv(rows: &[EpsilonSweepRow]) -> String {
    let mut out = String::from("epsilon,best_detection_prob,best_eve_info,iterations\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.epsilon, r.best_detection_prob, r.best_eve_info, r.iterations
        ));
    }
    out
}

pub fn compare_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(
        "protocol_name,quantum_resource,qubit_efficiency,pre_shared_bits_expr,\
         pre_shared_bits,classical_channel,hash_function\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},\"{}\",{},{},{},\"{}\",{}\n",
            r.protocol_name,
            r.quantum_resource,
            r.qubit_efficiency,
            r.pre_shared_bits_expr,
            r.pre_shared_bits,
            r.classical_channel,
            r.hash_function
        ));
    }
    out
}

/// The comparison as an aligned text table for standard output.
pub fn compare_table_text(rows: &[ComparisonRow], n: usize, m: usize) -> String {
    let mut out = format!("Measure-resend ASQKD comparison at n = {n}, m = {m}\n\n");
    let header = [
        "Protocol",
        "Quantum resource",
        "Qubit efficiency",
        "Pre-shared bits",
        "Classical channel",
        "Hash function",
    ];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.protocol_name.to_string(),
                r.quantum_resource.to_string(),
                r.qubit_efficiency.to_string(),
                format!("{} = {}", r.pre_shared_bits_expr, r.pre_shared_bits),
                r.classical_channel.to_string(),
                r.hash_function.to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let format_row = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(widths.iter())
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header_cells: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    out.push_str(&format_row(&header_cells));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &body {
        out.push_str(&format_row(row.as_slice()));
        out.push('\n');
    }
    out
}
