//! Declarative run configuration (JSON).

use std::path::{Path, PathBuf};

use diclique::estimators::{
    DegreeOptions, EgoPolicy, ExperimentSpec, GammaRule, GridSize, Measurement, RegimeChoice,
};
use diclique::generator::{ReciprocityKernel, SamplingPath};
use diclique::weights::{Coupling, NodeWeightConfig, WeightDist};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA: &str = "diclique.run/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

/// One grid size; `m` defaults to `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl SizeConfig {
    pub fn grid(self) -> GridSize {
        GridSize { n: self.n, m: self.m.unwrap_or(self.n) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DirectionChoice {
    #[default]
    Out,
    In,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeConfig {
    #[serde(default)]
    pub regime: RegimeChoice,
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    #[serde(default)]
    pub direction: DirectionChoice,
}

fn default_r_max() -> usize {
    DegreeOptions::default().r_max
}

impl Default for DegreeConfig {
    fn default() -> Self {
        Self { regime: RegimeChoice::default(), r_max: default_r_max(), direction: DirectionChoice::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

fn unit_weight() -> WeightDist {
    WeightDist::Constant { value: 1.0 }
}

fn unit_nodes() -> NodeWeightConfig {
    NodeWeightConfig { x: unit_weight(), y: unit_weight(), coupling: Coupling::Independent }
}

fn default_measurements() -> Vec<Measurement> {
    vec![Measurement::Dicc, Measurement::Trcc]
}

/// Mirror of [`ExperimentSpec`] plus output settings. Unknown keys are errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub sizes: Vec<SizeConfig>,
    pub gamma: Vec<GammaRule>,
    #[serde(default = "unit_nodes")]
    pub nodes: NodeWeightConfig,
    #[serde(default = "unit_weight")]
    pub z: WeightDist,
    #[serde(default)]
    pub kernel: ReciprocityKernel,
    pub replicates: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_measurements")]
    pub measurements: Vec<Measurement>,
    #[serde(default)]
    pub ego_policy: EgoPolicy,
    #[serde(default)]
    pub sampling: SamplingPath,
    #[serde(default)]
    pub degree: DegreeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Config(format!(
                "config: unsupported schema `{}` (expected `{SCHEMA}`)",
                cfg.schema
            )));
        }
        cfg.spec().validate().map_err(|e| CliError::Config(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            sizes: self.sizes.iter().map(|s| s.grid()).collect(),
            gamma: self.gamma.clone(),
            nodes: self.nodes,
            z: self.z,
            kernel: self.kernel,
            replicates: self.replicates,
            master_seed: self.seed,
            measurements: self.measurements.clone(),
            ego_policy: self.ego_policy,
            sampling: self.sampling,
            degree: DegreeOptions { regime: self.degree.regime, r_max: self.degree.r_max },
        }
    }

    /// The spec with measurements replaced by the configured degree directions.
    pub fn degree_spec(&self) -> ExperimentSpec {
        let mut spec = self.spec();
        spec.measurements = match self.degree.direction {
            DirectionChoice::Out => vec![Measurement::OutPmf],
            DirectionChoice::In => vec![Measurement::InPmf],
            DirectionChoice::Both => vec![Measurement::OutPmf, Measurement::InPmf],
        };
        spec
    }

    pub fn single_cell(&self) -> Result<(GridSize, GammaRule)> {
        match (self.sizes.as_slice(), self.gamma.as_slice()) {
            ([s], [g]) => Ok((s.grid(), *g)),
            _ => Err(CliError::Config(format!(
                "generate needs exactly one size and one gamma rule, got {} x {}",
                self.sizes.len(),
                self.gamma.len()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"schema": "diclique.run/v1", "sizes": [{"n": 10}], "gamma": ["sparse"], "replicates": 2}"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        let spec = cfg.spec();
        assert_eq!(spec.sizes, vec![GridSize { n: 10, m: 10 }]);
        assert_eq!(spec.kernel, ReciprocityKernel::IndependentProduct);
        assert_eq!(spec.measurements, default_measurements());
        assert_eq!(spec.ego_policy, EgoPolicy::MaxInDegree);
        assert_eq!(spec.master_seed, 0);
    }

    #[test]
    fn full_config_parses() {
        let text = r#"{
            "schema": "diclique.run/v1",
            "sizes": [{"n": 100, "m": 50}],
            "gamma": [{"alpha_over_m": 0.5}, {"fixed": 0.01}, "sparse"],
            "nodes": {"x": {"kind": "exponential", "rate": 1.0},
                      "y": {"kind": "pareto", "scale": 1.0, "tail_index": 4.0},
                      "coupling": "comonotone"},
            "z": {"kind": "two_point", "v1": 0.5, "v2": 2.0, "prob_v1": 0.5},
            "kernel": {"kind": "epsilon_min", "epsilon": 0.5},
            "replicates": 3,
            "seed": 18446744073709551615,
            "measurements": ["dicc", "local_dicc", "in_pmf"],
            "ego_policy": "node0",
            "sampling": "direct",
            "degree": {"regime": "attribute_rich", "r_max": 30, "direction": "both"},
            "output": {"dir": "out", "format": "csv"}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.seed, u64::MAX);
        assert_eq!(cfg.spec().cells().len(), 3);
        assert_eq!(cfg.degree_spec().measurements, vec![Measurement::OutPmf, Measurement::InPmf]);
    }

    #[test]
    fn rejections() {
        let cases = [
            MINIMAL.replace("\"replicates\": 2", "\"replicates\": 0"),
            MINIMAL.replace("\"replicates\": 2", "\"replicates\": 2, \"replicate\": 3"),
            MINIMAL.replace("v1", "v0"),
            MINIMAL.replace("[\"sparse\"]", "[]"),
            MINIMAL.replace("{\"n\": 10}", "{\"n\": 10, \"k\": 1}"),
            MINIMAL.replace("\"replicates\": 2", "\"replicates\": 2, \"z\": {\"kind\": \"constant\", \"value\": 0}"),
            "{".to_string(),
        ];
        for text in cases {
            let err = RunConfig::from_json(&text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}");
        }
    }
}
