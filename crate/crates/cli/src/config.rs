//! Run configuration: a JSON document merged with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use biform_core::JetConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::scenarios::SCENARIOS;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Truncated Taylor jets.
    #[default]
    Jet,
    /// Central differences with `fd_step`.
    Fd,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    JsonLines,
    Csv,
    Human,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario names in run order; empty means every registered scenario.
    pub scenarios: Vec<String>,
    pub seed: u64,
    pub mode: Mode,
    pub fd_step: f64,
    /// Overrides the tolerance of every identity residual.
    pub tol_identity: Option<f64>,
    /// Threshold below which a torsion residual counts as zero when classifying.
    pub tol_classify: Option<f64>,
    /// Random probe points per check.
    pub probes: usize,
    pub bicomplex_forms: usize,
    pub bicomplex_tuples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenarios: Vec::new(),
            seed: 42,
            mode: Mode::Jet,
            fd_step: 1e-4,
            tol_identity: None,
            tol_classify: None,
            probes: 20,
            bicomplex_forms: 50,
            bicomplex_tuples: 100,
            out: None,
            format: Format::JsonLines,
            parallel: false,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Scenario names to run, resolving the empty list to the full registry.
    pub fn selected(&self) -> Vec<String> {
        if self.scenarios.is_empty() {
            SCENARIOS.iter().map(|s| s.to_string()).collect()
        } else {
            self.scenarios.clone()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for s in &self.scenarios {
            if !SCENARIOS.contains(&s.as_str()) {
                return Err(CliError::Usage(format!(
                    "unknown scenario `{s}` (expected one of {})",
                    SCENARIOS.join(", ")
                )));
            }
        }
        self.jet_config().validate().map_err(|e| CliError::Usage(e.to_string()))?;
        for (name, v) in [("tol_identity", self.tol_identity), ("tol_classify", self.tol_classify)] {
            if let Some(t) = v {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(CliError::Usage(format!("{name} must be positive, got {t}")));
                }
            }
        }
        for (name, v) in
            [("probes", self.probes), ("bicomplex_forms", self.bicomplex_forms), ("bicomplex_tuples", self.bicomplex_tuples)]
        {
            if v == 0 {
                return Err(CliError::Usage(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn jet_config(&self) -> JetConfig {
        match self.mode {
            Mode::Jet => JetConfig::jet(),
            Mode::Fd => JetConfig::central_difference(self.fd_step),
        }
    }
}
