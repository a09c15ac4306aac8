//! Run configuration: a flat TOML table whose keys carry their units, with
//! every key also available as a command-line flag. Flags override the file.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Pcc,
    Nm,
    ThetaSweep,
    MSweep,
    Disorder,
    ClassicalNoise,
    RedfieldCompare,
    Universal,
    Qudit,
    Tetrahedron,
    Josephson,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Pcc => "pcc",
            Subcommand::Nm => "nm",
            Subcommand::ThetaSweep => "theta-sweep",
            Subcommand::MSweep => "m-sweep",
            Subcommand::Disorder => "disorder",
            Subcommand::ClassicalNoise => "classical-noise",
            Subcommand::RedfieldCompare => "redfield-compare",
            Subcommand::Universal => "universal",
            Subcommand::Qudit => "qudit",
            Subcommand::Tetrahedron => "tetrahedron",
            Subcommand::Josephson => "josephson",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Xy,
    Heisenberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum TopologyArg {
    Star,
    Tree,
    BipartiteStar,
    Tetrahedron,
    Complete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NoiseTargetArg {
    J,
    B,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QuditModeArg {
    Effective,
    Full,
    Both,
}

/// Every tunable of every subcommand. Unset keys take the subcommand's
/// default; keys a subcommand does not read are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Number of clones (blank sites) or list of them for sweeps
    #[arg(long = "M", value_delimiter = ',')]
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    /// Number of input copies
    #[arg(long = "N")]
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Qudit dimensions
    #[arg(long = "d", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelArg>,
    /// zz anisotropy, overriding the model's value
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologyArg>,
    /// Tree branching factor
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Tree depth below the first level
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    /// Input polar angle (radians)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Input azimuth (radians)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[arg(long = "B_over_J", allow_hyphen_values = true)]
    #[serde(rename = "B_over_J", default, skip_serializing_if = "Option::is_none")]
    pub b_over_j: Option<f64>,
    #[arg(long = "t_over_J", allow_hyphen_values = true)]
    #[serde(rename = "t_over_J", default, skip_serializing_if = "Option::is_none")]
    pub t_over_j: Option<f64>,
    #[arg(long = "B_min_over_J", allow_hyphen_values = true)]
    #[serde(rename = "B_min_over_J", default, skip_serializing_if = "Option::is_none")]
    pub b_min_over_j: Option<f64>,
    #[arg(long = "B_max_over_J", allow_hyphen_values = true)]
    #[serde(rename = "B_max_over_J", default, skip_serializing_if = "Option::is_none")]
    pub b_max_over_j: Option<f64>,
    /// Number of log-spaced fields
    #[arg(long = "n_B")]
    #[serde(rename = "n_B", default, skip_serializing_if = "Option::is_none")]
    pub n_b: Option<usize>,
    #[arg(long = "t_max_over_J", allow_hyphen_values = true)]
    #[serde(rename = "t_max_over_J", default, skip_serializing_if = "Option::is_none")]
    pub t_max_over_j: Option<f64>,
    #[arg(long = "t_step_over_J", allow_hyphen_values = true)]
    #[serde(rename = "t_step_over_J", default, skip_serializing_if = "Option::is_none")]
    pub t_step_over_j: Option<f64>,
    /// Fidelity drop defining the threshold time
    #[arg(long = "threshold_delta", allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_delta: Option<f64>,
    #[arg(long = "threshold_t_step_over_J", allow_hyphen_values = true)]
    #[serde(rename = "threshold_t_step_over_J", default, skip_serializing_if = "Option::is_none")]
    pub threshold_t_step_over_j: Option<f64>,
    #[arg(long = "threshold_t_max_over_J", allow_hyphen_values = true)]
    #[serde(rename = "threshold_t_max_over_J", default, skip_serializing_if = "Option::is_none")]
    pub threshold_t_max_over_j: Option<f64>,
    #[arg(long = "n_theta")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    /// Coupling disorder half-widths
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    /// Sign correlations
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[arg(long = "n_realizations")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_realizations: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<NoiseTargetArg>,
    /// Standard deviations of the quenched offset
    #[arg(long = "delta_over_J", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "delta_over_J", default, skip_serializing_if = "Option::is_none")]
    pub delta_over_j: Option<Vec<f64>>,
    #[arg(long = "n_samples")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    /// Bath coupling strengths
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[arg(long = "beta_times_J", allow_hyphen_values = true)]
    #[serde(rename = "beta_times_J", default, skip_serializing_if = "Option::is_none")]
    pub beta_times_j: Option<f64>,
    #[arg(long = "cutoff_over_J", allow_hyphen_values = true)]
    #[serde(rename = "cutoff_over_J", default, skip_serializing_if = "Option::is_none")]
    pub cutoff_over_j: Option<f64>,
    #[arg(long = "lamb_shift")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lamb_shift: Option<bool>,
    /// Integrator tolerance
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Blank-blank couplings of the universal cloner
    #[arg(long = "J_bb", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "J_bb", default, skip_serializing_if = "Option::is_none")]
    pub j_bb: Option<Vec<f64>>,
    #[arg(long = "n_inputs")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_inputs: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<QuditModeArg>,
    #[arg(long = "Delta_over_J", allow_hyphen_values = true)]
    #[serde(rename = "Delta_over_J", default, skip_serializing_if = "Option::is_none")]
    pub big_delta_over_j: Option<f64>,
    #[arg(long = "n_starts")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_starts: Option<usize>,
    #[arg(long = "max_evals")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<usize>,
    /// Parasitic to exchange coupling ratios E_K / J_K
    #[arg(long = "E_K_over_J_K", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "E_K_over_J_K", default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Vec<f64>>,
    #[arg(long = "bias_min_over_J", allow_hyphen_values = true)]
    #[serde(rename = "bias_min_over_J", default, skip_serializing_if = "Option::is_none")]
    pub bias_min_over_j: Option<f64>,
    #[arg(long = "bias_max_over_J", allow_hyphen_values = true)]
    #[serde(rename = "bias_max_over_J", default, skip_serializing_if = "Option::is_none")]
    pub bias_max_over_j: Option<f64>,
    #[arg(long = "n_bias")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bias: Option<usize>,
}

impl Params {
    /// Keys set in `self` win over those in `base`.
    pub fn over(&self, base: &Params) -> Result<Params, CliError> {
        let mut merged = to_table(base)?;
        merged.extend(to_table(self)?);
        toml::Value::Table(merged).try_into().map_err(|e| CliError::Config(format!("merging parameters: {e}")))
    }
}

fn to_table<T: Serialize>(v: &T) -> Result<toml::Table, CliError> {
    toml::Table::try_from(v).map_err(|e| CliError::Config(format!("serializing parameters: {e}")))
}

/// A complete run: what to compute, with which parameters and seed, and
/// where to write it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub params: Params,
}

const RESERVED: [&str; 3] = ["subcommand", "seed", "output"];

impl RunConfig {
    /// Parse the flat TOML form. Unknown keys and wrongly typed values are
    /// configuration errors.
    pub fn from_toml(text: &str) -> Result<PartialConfig, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
        let subcommand = match table.remove("subcommand") {
            Some(v) => Some(v.try_into().map_err(|e| CliError::Config(format!("subcommand: {e}")))?),
            None => None,
        };
        let seed = match table.remove("seed") {
            Some(toml::Value::Integer(i)) if i >= 0 => Some(i as u64),
            Some(v) => return Err(CliError::Config(format!("seed must be a non-negative integer, got {v}"))),
            None => None,
        };
        let output = match table.remove("output") {
            Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
            Some(v) => return Err(CliError::Config(format!("output must be a path string, got {v}"))),
            None => None,
        };
        let params = toml::Value::Table(table).try_into().map_err(|e| CliError::Config(format!("config: {e}")))?;
        Ok(PartialConfig { subcommand, seed, output, params })
    }

    pub fn from_file(path: &Path) -> Result<PartialConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        let mut table = toml::Table::new();
        table.insert("subcommand".into(), self.subcommand.name().into());
        if let Some(s) = self.seed {
            let s = i64::try_from(s).map_err(|_| CliError::Config(format!("seed {s} does not fit a TOML integer")))?;
            table.insert("seed".into(), s.into());
        }
        if let Some(o) = &self.output {
            table.insert("output".into(), o.to_string_lossy().into_owned().into());
        }
        for (k, v) in to_table(&self.params)? {
            debug_assert!(!RESERVED.contains(&k.as_str()));
            table.insert(k, v);
        }
        toml::to_string(&table).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Config file contents before flags are merged in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub subcommand: Option<Subcommand>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub params: Params,
}
