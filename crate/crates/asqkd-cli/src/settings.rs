//! Configuration layering: command-line flags override config-file values,
//! which override the built-in defaults (n=8, m=8, trials=1000, seed=42,
//! honest attack).
//!
//! The config file is flat `key=value` text; keys are the flag names
//! without the leading dashes (`n`, `m`, `trials`, `seed`, `attack`,
//! `p-attack`, `slots`, `epsilon`, `restarts`, `out`, `format`). Blank
//! lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use asqkd::adversary::{AttackModel, CollectiveAttack};

use crate::CliError;

pub const DEFAULT_N: usize = 8;
pub const DEFAULT_M: usize = 8;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AttackKind {
    Honest,
    InterceptZ,
    InterceptX,
    Bitflip,
    Collective,
}

impl AttackKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttackKind::Honest => "honest",
            AttackKind::InterceptZ => "intercept-z",
            AttackKind::InterceptX => "intercept-x",
            AttackKind::Bitflip => "bitflip",
            AttackKind::Collective => "collective",
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "honest" => Ok(AttackKind::Honest),
            "intercept-z" => Ok(AttackKind::InterceptZ),
            "intercept-x" => Ok(AttackKind::InterceptX),
            "bitflip" => Ok(AttackKind::Bitflip),
            "collective" => Ok(AttackKind::Collective),
            other => Err(CliError::invalid(format!("unknown attack {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Optional values gathered from one layer (flags or a config file).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub attack: Option<AttackKind>,
    pub p_attack: Option<f64>,
    pub slots: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub restarts: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    /// `self` wins over `fallback` field by field.
    pub fn or(self, fallback: Overrides) -> Overrides {
        Overrides {
            n: self.n.or(fallback.n),
            m: self.m.or(fallback.m),
            trials: self.trials.or(fallback.trials),
            seed: self.seed.or(fallback.seed),
            attack: self.attack.or(fallback.attack),
            p_attack: self.p_attack.or(fallback.p_attack),
            slots: self.slots.or(fallback.slots),
            epsilon: self.epsilon.or(fallback.epsilon),
            restarts: self.restarts.or(fallback.restarts),
            out: self.out.or(fallback.out),
            format: self.format.or(fallback.format),
        }
    }

    pub fn from_config_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut overrides = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::invalid(format!(
                    "config line {} is not key=value: {raw:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |e: String| CliError::invalid(format!("config key {key:?}: {e}"));
            match key {
                "n" => overrides.n = Some(parse_num(value).map_err(bad)?),
                "m" => overrides.m = Some(parse_num(value).map_err(bad)?),
                "trials" => overrides.trials = Some(parse_num(value).map_err(bad)?),
                "seed" => overrides.seed = Some(parse_num(value).map_err(bad)?),
                "attack" => overrides.attack = Some(AttackKind::parse(value)?),
                "p-attack" => overrides.p_attack = Some(parse_float(value).map_err(bad)?),
                "slots" => overrides.slots = Some(parse_slots(value).map_err(bad)?),
                "epsilon" => overrides.epsilon = Some(parse_float(value).map_err(bad)?),
                "restarts" => overrides.restarts = Some(parse_num(value).map_err(bad)?),
                "out" => overrides.out = Some(PathBuf::from(value)),
                "format" => {
                    overrides.format = Some(match value {
                        "json" => OutputFormat::Json,
                        "csv" => OutputFormat::Csv,
                        other => {
                            return Err(CliError::invalid(format!("unknown format {other:?}")))
                        }
                    })
                }
                other => {
                    return Err(CliError::invalid(format!("unknown config key {other:?}")));
                }
            }
        }
        Ok(overrides)
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("not a valid number: {value:?}"))
}

fn parse_float(value: &str) -> Result<f64, String> {
    let parsed: f64 = value
        .parse()
        .map_err(|_| format!("not a valid number: {value:?}"))?;
    if parsed.is_finite() {
        Ok(parsed)
    } else {
        Err(format!("not finite: {value:?}"))
    }
}

pub fn parse_slots(value: &str) -> Result<Vec<usize>, String> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad slot index: {part:?}"))
        })
        .collect()
}

/// Fully resolved batch settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub attack_kind: AttackKind,
    pub p_attack: Option<f64>,
    pub slots: Option<Vec<usize>>,
    pub epsilon: f64,
    pub restarts: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Settings {
    pub fn resolve(flags: Overrides, config_path: Option<&Path>) -> Result<Settings, CliError> {
        let layered = match config_path {
            Some(path) => flags.or(Overrides::from_config_file(path)?),
            None => flags,
        };
        let settings = Settings {
            n: layered.n.unwrap_or(DEFAULT_N),
            m: layered.m.unwrap_or(DEFAULT_M),
            trials: layered.trials.unwrap_or(DEFAULT_TRIALS),
            seed: layered.seed.unwrap_or(DEFAULT_SEED),
            attack_kind: layered.attack.unwrap_or(AttackKind::Honest),
            p_attack: layered.p_attack,
            slots: layered.slots,
            epsilon: layered.epsilon.unwrap_or(1e-4),
            restarts: layered.restarts.unwrap_or(20),
            out: layered.out,
            format: layered.format.unwrap_or(OutputFormat::Json),
        };
        if settings.trials == 0 {
            return Err(CliError::invalid("trials must be at least 1"));
        }
        Ok(settings)
    }

    /// Builds the attack model for these settings.
    ///
    /// `collective` maps to the built-in copy attack (the CLI has no way to
    /// pass raw matrices); use `attack-search` to explore general
    /// collective attacks.
    pub fn attack_model(&self) -> Result<AttackModel, CliError> {
        let model = match self.attack_kind {
            AttackKind::Honest => AttackModel::Honest,
            AttackKind::InterceptZ => AttackModel::InterceptResendZ {
                p_attack: self.p_attack.unwrap_or(1.0),
            },
            AttackKind::InterceptX => AttackModel::InterceptResendX {
                p_attack: self.p_attack.unwrap_or(1.0),
            },
            AttackKind::Bitflip => {
                let slots = self
                    .slots
                    .clone()
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| {
                        CliError::invalid("bitflip needs --slots with at least one slot index")
                    })?;
                let limit = 2 * (self.n + self.m);
                if let Some(bad) = slots.iter().find(|&&s| s >= limit) {
                    return Err(CliError::invalid(format!(
                        "slot {bad} out of range; this configuration has {limit} slots"
                    )));
                }
                AttackModel::BitFlip {
                    slots: BTreeSet::from_iter(slots),
                }
            }
            AttackKind::Collective => AttackModel::Collective(
                CollectiveAttack::copy_attack(1)
                    .expect("one ancilla qubit is always constructible"),
            ),
        };
        model
            .validate()
            .map_err(|e| CliError::invalid(e.to_string()))?;
        Ok(model)
    }
}
