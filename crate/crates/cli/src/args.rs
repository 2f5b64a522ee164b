//! Command-line and `--config` JSON arguments.
//!
//! Every subcommand's options deserialize from a JSON object with the same
//! field names (snake case). Flags given on the command line win over the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "fcqem", version, about = "Squared-distribution error mitigation and computed-moments estimates")]
pub struct Cli {
    /// JSON file with default values for the subcommand's options.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a trial state over a parameter range and tabulate estimates.
    Sweep(SweepArgs),
    /// Post-process measurement records against a Hamiltonian.
    Mitigate(MitigateArgs),
    /// Pauli-frame sample large Clifford circuits and correct <Z...Z>.
    Scale(ScaleArgs),
    /// Raw and squared-normalized outcome probabilities.
    DumpDist(DumpArgs),
    /// Exact ground-state energy.
    GroundState(GroundArgs),
}

/// Hamiltonian source shared by several subcommands.
#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Built-in model (`tfim`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Hamiltonian file with `STRING WEIGHT` lines.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<PathBuf>,
    /// Number of sites.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Coupling (default 1).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    /// Transverse field (default 0).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Close the chain into a ring.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub periodic: bool,
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// `neel` or a circuit file.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<String>,
    /// Field range `start:stop:step` (TFIM only).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_range: Option<String>,
    /// Angle range for an appended RY rotation; `pi` literals allowed.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_range: Option<String>,
    /// Qubit receiving the RY rotation, as `q=3` or `3`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotate_y: Option<String>,
    /// Two-qubit depolarizing range; one-qubit rate is a tenth of it.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depol_range: Option<String>,
    /// Noise, e.g. `readout=0.03,depol-2q=0.01`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    /// Shots per basis; 0 keeps exact probabilities.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `per-basis` or `global-z`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    #[arg(long, short)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct MitigateArgs {
    /// Measurement JSON.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurements: Option<PathBuf>,
    /// Independent second copy for the two-copy estimate.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<PathBuf>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct ScaleArgs {
    /// Comma-separated qubit counts.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<String>,
    /// Comma-separated total error rates.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<String>,
    /// Z-to-X bias of the Pauli channel (default 10).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<f64>,
    /// `neel` or a Clifford circuit file.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Add a wall-clock column (output is then not reproducible byte for byte).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub timing: bool,
    #[arg(long, short)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct DumpArgs {
    /// `neel` or a circuit file.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<String>,
    /// Qubit count for the Néel trial.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Read the distribution from a measurement file instead of simulating.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurements: Option<PathBuf>,
    /// Measurement basis (default all Z).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Rows with both probabilities below this are omitted (default 0.005).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[arg(long, short)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct GroundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, short)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Overlays command-line values on the config file's values.
///
/// Config keys must name one of the subcommand's options.
pub fn merge<T: Args + Serialize + DeserializeOwned + Clone>(
    cli: &T,
    config: Option<&serde_json::Value>,
) -> Result<T, CliError> {
    let Some(base) = config else {
        return Ok(cli.clone());
    };
    let mut merged = match base {
        serde_json::Value::Object(m) => m.clone(),
        _ => return Err(CliError::Config("config file must hold a JSON object".into())),
    };
    let known = T::augment_args(clap::Command::new("config"));
    let known: Vec<String> = known.get_arguments().map(|a| a.get_id().to_string()).collect();
    if let Some(bad) = merged.keys().find(|k| !known.contains(k)) {
        return Err(CliError::Config(format!("config file: unknown option `{bad}`")));
    }
    if let serde_json::Value::Object(over) = serde_json::to_value(cli).map_err(CliError::config)? {
        merged.extend(over);
    }
    serde_json::from_value(serde_json::Value::Object(merged))
        .map_err(|e| CliError::Config(format!("config file: {e}")))
}
