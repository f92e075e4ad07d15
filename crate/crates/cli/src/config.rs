//! Run configuration file format and its strict validation.
//!
//! Everything physical lives in the JSON file; command-line flags may
//! override individual scalars for sweeps without editing the file. Unknown
//! keys anywhere in the document are rejected before any computation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use dirac1d::extraction::ExperimentConfig;
use dirac1d::fock::StateDescription;
use dirac1d::potential_dynamics::{PotentialField, PotentialTable};
use dirac1d::spectral_basis::SimulationDomain;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub state: StateDescription,
    pub potential: PotentialConfig,
    #[serde(default = "default_charge")]
    pub q_charge: f64,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_charge() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(rename = "L")]
    pub length: f64,
    pub n_z: usize,
    pub r_max: i64,
}

/// Potential section. `kind` selects the rule; the field sets are disjoint
/// and validated explicitly so misplaced keys fail fast.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: String,
    /// Feedback coupling: a single number, or a list for sweeps.
    #[serde(default)]
    pub f: Option<Coupling>,
    /// CSV table of `z_index,t_index,V` rows, for kind = "tabulated".
    #[serde(default)]
    pub table_path: Option<PathBuf>,
    pub t_f: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coupling {
    Single(f64),
    List(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

/// Scalar overrides taken from the command line.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub f: Option<f64>,
    pub t_f: Option<f64>,
    pub n_z: Option<usize>,
    pub n_t: Option<usize>,
}

/// A fully validated run: experiment inputs plus the potential rule.
pub struct PreparedRun {
    pub config: ExperimentConfig<f64>,
    pub potential: PotentialRule,
    pub output: OutputConfig,
}

/// The configured potential, kept symbolic so sweeps can rebuild it per
/// coupling.
pub enum PotentialRule {
    Feedback { couplings: Vec<f64> },
    Tabulated { potential: PotentialField<f64> },
}

pub fn load(path: &Path, overrides: Overrides) -> Result<PreparedRun, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut raw: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("schema error in {}: {e}", path.display())))?;

    if let Some(n_z) = overrides.n_z {
        raw.domain.n_z = n_z;
    }
    if let Some(t_f) = overrides.t_f {
        raw.potential.t_f = t_f;
    }
    if let Some(n_t) = overrides.n_t {
        raw.potential.n_t = n_t;
    }
    if let Some(f) = overrides.f {
        raw.potential.f = Some(Coupling::Single(f));
    }

    let domain = SimulationDomain::new(raw.domain.length, raw.domain.n_z, raw.domain.r_max)
        .map_err(CliError::from_domain)?;
    let state = raw.state.build::<f64>(&domain).map_err(CliError::from_domain)?;
    let config = ExperimentConfig::new(
        domain.clone(),
        state,
        raw.potential.t_f,
        raw.potential.n_t,
        raw.q_charge,
    )
    .map_err(CliError::from_domain)?;

    let potential = match raw.potential.kind.as_str() {
        "feedback" => {
            if raw.potential.table_path.is_some() {
                return Err(CliError::Config(
                    "feedback potential does not take table_path".into(),
                ));
            }
            let couplings = match raw.potential.f {
                Some(Coupling::Single(f)) => vec![f],
                Some(Coupling::List(fs)) => fs,
                None => {
                    return Err(CliError::Config(
                        "feedback potential requires f".into(),
                    ))
                }
            };
            PotentialRule::Feedback { couplings }
        }
        "tabulated" => {
            if raw.potential.f.is_some() {
                return Err(CliError::Config(
                    "tabulated potential does not take f".into(),
                ));
            }
            let table_path = raw.potential.table_path.ok_or_else(|| {
                CliError::Config("tabulated potential requires table_path".into())
            })?;
            // Relative table paths resolve against the config file.
            let resolved = if table_path.is_relative() {
                path.parent()
                    .map(|dir| dir.join(&table_path))
                    .unwrap_or(table_path)
            } else {
                table_path
            };
            let table_text = fs::read_to_string(&resolved).map_err(|e| {
                CliError::Config(format!("cannot read table {}: {e}", resolved.display()))
            })?;
            let table =
                PotentialTable::from_csv(&table_text, raw.domain.length, raw.potential.t_f)
                    .map_err(CliError::from_domain)?;
            PotentialRule::Tabulated {
                potential: PotentialField::from_table(table).map_err(CliError::from_domain)?,
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown potential kind {other:?}; expected \"feedback\" or \"tabulated\""
            )))
        }
    };

    Ok(PreparedRun {
        config,
        potential,
        output: raw.output,
    })
}
