//! Resolving training settings: defaults, then the config file, then flags.

use std::fmt;
use std::fs;

use kgalign::kge::{ModelKind, Norm};
use kgalign::trainer::TrainingConfig;
use serde_json::Value;

use crate::{NormArg, TrainArgs};

pub const SEED_VAR: &str = "KGALIGN_SEED";
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or values; exit code 2.
    Usage(String),
    /// Anything that fails while running; exit code 1.
    Pipeline(kgalign::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Pipeline(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Pipeline(e) => write!(f, "{e}"),
        }
    }
}

impl From<kgalign::Error> for CliError {
    fn from(e: kgalign::Error) -> Self {
        CliError::Pipeline(e)
    }
}

pub fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

/// Seed from the environment, or the built-in default.
pub fn default_seed() -> Result<u64, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_VAR}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Parses a flat TOML document of training keys over `base`.
pub fn overlay_toml(base: &TrainingConfig, text: &str) -> Result<TrainingConfig, CliError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| usage(format!("config file: {e}")))?;
    let mut merged = serde_json::to_value(base).expect("config serializes");
    let Value::Object(fields) = &mut merged else {
        unreachable!("config is a struct")
    };
    for (key, value) in table {
        let mut value = serde_json::to_value(&value).map_err(|e| usage(format!("config file: {e}")))?;
        match (key.as_str(), &value) {
            // Accept model names in any case, as on the command line.
            ("model", Value::String(name)) => {
                let kind: ModelKind = name.parse().map_err(|e: kgalign::Error| usage(e.to_string()))?;
                value = serde_json::to_value(kind).expect("model serializes");
            }
            ("norm", Value::String(name)) => value = Value::String(name.to_ascii_lowercase()),
            _ => {}
        }
        fields.insert(key, value);
    }
    serde_json::from_value(merged).map_err(|e| usage(format!("config file: {e}")))
}

/// Builds the training config for `align` and `sweep`.
pub fn resolve_training(args: &TrainArgs) -> Result<TrainingConfig, CliError> {
    let mut config = TrainingConfig {
        seed: default_seed()?,
        ..TrainingConfig::default()
    };
    let mut model_given = false;
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        model_given = text
            .parse::<toml::Table>()
            .map(|t| t.contains_key("model"))
            .unwrap_or(false);
        config = overlay_toml(&config, &text)?;
    }
    if let Some(m) = args.model {
        config.model = m;
        model_given = true;
    }
    if !model_given {
        return Err(usage(format!(
            "--model is required; supported models: {}",
            ModelKind::supported_names()
        )));
    }
    macro_rules! set {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = args.$flag { config.$field = v; })*
        };
    }
    set!(dim => dim, epochs => epochs, batch_size => batch_size, negatives => num_negatives,
         eval_batch_size => eval_batch_size, lr => learning_rate, margin => margin, seed => seed);
    if let Some(n) = args.norm {
        config.norm = match n {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
        };
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}
