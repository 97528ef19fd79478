//! Exported network weights.

use std::path::Path;

use gcnn_ridgelet::ridgelet::{FiniteNetwork, Unit};
use serde::{Deserialize, Serialize};

use crate::config::{
    build_representation, ActivationSpec, ExperimentConfig, FeatureSpaceSpec, GroupSpec,
};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitRecord {
    /// Filter in raw coordinates of the representation space.
    pub a: Vec<f64>,
    pub b: f64,
    pub c: f64,
}

/// A finite network with enough context to rebuild it:
/// `f(x)(g) = sum_i c_i sigma(<T_{g^-1} x, a_i> - b_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub config_hash: String,
    pub group: GroupSpec,
    pub feature_space: FeatureSpaceSpec,
    pub activation: ActivationSpec,
    /// Normalization constant of the ridgelet pair, absent for random networks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_norm: Option<f64>,
    pub units: Vec<UnitRecord>,
}

impl Weights {
    pub fn from_network(
        cfg: &ExperimentConfig,
        hash: &str,
        net: &FiniteNetwork,
        c_norm: Option<f64>,
    ) -> Self {
        Self {
            config_hash: hash.to_string(),
            group: cfg.group.clone(),
            feature_space: cfg.feature_space.clone(),
            activation: cfg.activation,
            c_norm,
            units: net
                .units()
                .iter()
                .map(|u| UnitRecord {
                    a: u.a.clone(),
                    b: u.b,
                    c: u.c,
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("weights: {e}")))
    }

    pub fn network(&self) -> Result<FiniteNetwork, CliError> {
        let rep = build_representation(&self.group, &self.feature_space)?;
        let units = self
            .units
            .iter()
            .map(|u| Unit {
                a: u.a.clone(),
                b: u.b,
                c: u.c,
            })
            .collect();
        Ok(FiniteNetwork::new(units, self.activation.into(), rep)?)
    }
}
