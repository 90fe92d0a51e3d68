//! Run configuration files (TOML, versioned, unknown keys rejected).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{PapError, Result};
use crate::fields::Protocol;
use crate::model::{build_synthetic_molecule, build_three_level, load_level_system, LevelSystem, SyntheticMoleculeSpec};
use crate::propagator::{IntegratorConfig, RecordPolicy};
use crate::protocols::TrainSetup;
use crate::scan::{uniform_grid, SweepParameter};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Environment variable holding the worker count for parallel scans.
pub const WORKERS_ENV: &str = "PAP_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSection {
    ThreeLevel {
        #[serde(default)]
        pump_detuning: f64,
        #[serde(default)]
        dump_detuning: f64,
        /// Intermediate-level decay rate (ps⁻¹).
        #[serde(default)]
        decay_rate: f64,
    },
    Synthetic(SyntheticMoleculeSpec),
    /// Level-system file, relative paths resolved against the config file.
    File { path: PathBuf },
    Inline(LevelSystem),
}

/// Either explicit values or `start + i·step` for `i < count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Uniform { start: f64, step: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Uniform { start, step, count } => uniform_grid(*start, *step, *count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub delta_t_large: Grid,
    pub delta_t_small: Grid,
}

fn default_threshold() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevivalSection {
    /// ps
    pub t_max: f64,
    /// ps
    pub dt: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FftSection {
    /// Map CSV to analyse; relative to the config file.
    pub map: PathBuf,
    #[serde(default)]
    pub delta_t_large_index: usize,
    #[serde(default)]
    pub hann_window: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_record() -> RecordPolicy {
    RecordPolicy::Compressed
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory, relative to the working directory.
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_record")]
    pub trajectory: RecordPolicy,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_output_dir(),
            trajectory: default_record(),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Protocol for `pairs`, `scan` and `sweep`; `stirap`/`crp` force their own.
    #[serde(default)]
    pub protocol: Option<Protocol>,
    #[serde(default)]
    pub seed: u64,
    /// When false every decay rate is zeroed.
    #[serde(default = "default_true")]
    pub decay: bool,
    pub system: SystemSection,
    #[serde(default)]
    pub train: Option<TrainSetup>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub revivals: Option<RevivalSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub fft: Option<FftSection>,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| PapError::Config(e.to_string()))?;
        if cfg.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(PapError::Config(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        cfg.integrator.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PapError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            PapError::Config(msg) => PapError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| PapError::Config(e.to_string()))
    }

    /// Builds the level system, resolving file paths against `base_dir`.
    pub fn level_system(&self, base_dir: &Path) -> Result<LevelSystem> {
        let levels = match &self.system {
            SystemSection::ThreeLevel {
                pump_detuning,
                dump_detuning,
                decay_rate,
            } => build_three_level(*pump_detuning, *dump_detuning, *decay_rate),
            SystemSection::Synthetic(spec) => build_synthetic_molecule(spec)?,
            SystemSection::File { path } => load_level_system(&base_dir.join(path))?,
            SystemSection::Inline(levels) => levels.clone(),
        }
        .validated()?;
        Ok(if self.decay { levels } else { levels.without_decay() })
    }

    pub fn train(&self) -> Result<&TrainSetup> {
        self.train
            .as_ref()
            .ok_or_else(|| PapError::Config("missing [train] section".into()))
    }

    /// SHA-256 (hex) of the canonical JSON form of the config.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).unwrap_or_default();
        hex(&Sha256::digest(json.as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(PapError::Config(format!("{WORKERS_ENV} must be a positive integer (got {v:?})"))),
        },
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1

[system]
kind = "three_level"

[train]
n_pairs = 50
delta_t_large = 10.0
pump_action = 20.0
dump_action = 20.0
"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.train().unwrap().n_pairs, 50);
        assert_eq!(cfg.integrator, IntegratorConfig::default());
        assert!(cfg.decay);
        let levels = cfg.level_system(Path::new(".")).unwrap();
        assert_eq!(levels.len(), 3);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("n_pairs = 50", "n_pairs = 50\nbogus = 1");
        assert!(matches!(RunConfig::from_toml(&text), Err(PapError::Config(_))));
        let text = format!("{MINIMAL}\n[extra]\nx = 1\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn wrong_version_rejected() {
        let text = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        let err = RunConfig::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }

    #[test]
    fn fingerprint_tracks_every_field() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        let base = cfg.fingerprint();
        assert_eq!(base.len(), 64);
        assert_eq!(base, RunConfig::from_toml(MINIMAL).unwrap().fingerprint());
        let mut changed = cfg.clone();
        changed.seed = 1;
        assert_ne!(changed.fingerprint(), base);
        let mut changed = cfg.clone();
        changed.train.as_mut().unwrap().pump_action = 20.000001;
        assert_ne!(changed.fingerprint(), base);
        let mut changed = cfg;
        changed.integrator.steps_per_pulse = 401;
        assert_ne!(changed.fingerprint(), base);
    }

    #[test]
    fn grid_forms() {
        let g: ScanSection = toml::from_str(
            "delta_t_large = [1.0, 2.0]\ndelta_t_small = { start = 0.5, step = 0.25, count = 3 }",
        )
        .unwrap();
        assert_eq!(g.delta_t_large.values(), vec![1.0, 2.0]);
        assert_eq!(g.delta_t_small.values(), vec![0.5, 0.75, 1.0]);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        let again = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
