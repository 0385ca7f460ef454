//! Experiment configs: one JSON file whose `system`, `cocycle` and
//! `measures` entries are either inline objects or paths relative to the
//! config file.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cocycle_lab::fractal::{BuildConfig, ParamConfig};
use cocycle_lab::{CocycleSpec, MarkovMeasure, ShiftSpace};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

fn default_budget() -> u64 {
    1 << 22
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: ShiftSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleSpec>,
    #[serde(default)]
    pub measures: Vec<MarkovMeasure>,
    /// The only seed: it replaces `params.seed` and `build.seed` below.
    #[serde(default)]
    pub seed: u64,
    /// Cap on enumerated cylinders, scheme points and cylinder sums.
    #[serde(default = "default_budget")]
    pub budget_nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mle: Option<MleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_mle: Option<MeasureMleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irregular: Option<SchemeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyConfig>,
}

/// A point given as `L(..) C(..)@k R(..)` text, or sampled from one of the
/// configured measures with seed `seed + index`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSpec {
    Text(String),
    Sample { measure: usize, index: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MleConfig {
    pub points: Vec<PointSpec>,
    pub checkpoints: Vec<usize>,
    #[serde(default)]
    pub spectrum: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureMleConfig {
    pub n_max: usize,
    /// Also tabulate Bernoulli(i/k), i = 0..=k.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bernoulli_grid: Option<usize>,
}

/// Shared by `irregular` (any mode) and `scheme` (full mode certificates).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// Defaults to `h*/10`, which needs `h* > 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub params: ParamConfig,
    pub build: BuildConfig,
    /// Block choice per level; all zeros by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<Vec<usize>>>,
    /// Bowen-ball radius of the certificates; defaults to `params.ball_radius`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_radius: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Whole,
    Periodic(String),
    Orbit { measure: usize, index: u64, length: usize },
    Points(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSpec {
    pub measure: usize,
    pub index: u64,
    pub eps: f64,
    pub n_max: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    pub eps: Vec<f64>,
    pub horizon: usize,
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub local: Vec<LocalSpec>,
}

/// Replaces a string at `value[key]` by the JSON file it names.
fn inline_file(value: &mut Value, field: &str, base: &Path) -> Result<()> {
    if let Value::String(rel) = value {
        let path: PathBuf = base.join(rel.as_str());
        let text = std::fs::read_to_string(&path).with_context(|| format!("{field}: reading {}", path.display()))?;
        *value = serde_json::from_str(&text).with_context(|| format!("{field}: parsing {}", path.display()))?;
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str(&text, base)
    }

    pub fn from_str(text: &str, base: &Path) -> Result<Self> {
        let mut v: Value = serde_json::from_str(text).context("config is not valid JSON")?;
        let obj = v.as_object_mut().ok_or_else(|| anyhow!("config must be a JSON object"))?;
        for key in ["system", "cocycle"] {
            if let Some(x) = obj.get_mut(key) {
                inline_file(x, key, base)?;
            }
        }
        if let Some(Value::Array(ms)) = obj.get_mut("measures") {
            for (i, m) in ms.iter_mut().enumerate() {
                inline_file(m, &format!("measures[{i}]"), base)?;
            }
        }
        let cfg: ExperimentConfig =
            serde_path_to_error::deserialize(v).map_err(|e| anyhow!("config field `{}`: {}", e.path(), e.inner()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if let Some(c) = &self.cocycle {
            c.validate_for(&self.system).map_err(|e| anyhow!("config field `cocycle`: {e}"))?;
        }
        for (i, m) in self.measures.iter().enumerate() {
            if !m.supported_on(&self.system) {
                bail!("config field `measures[{i}]`: measure charges a transition forbidden by `system`");
            }
        }
        Ok(())
    }

    pub fn cocycle(&self) -> Result<&CocycleSpec> {
        self.cocycle.as_ref().ok_or_else(|| anyhow!("config field `cocycle`: required by this command"))
    }

    pub fn measure(&self, i: usize, field: &str) -> Result<&MarkovMeasure> {
        self.measures
            .get(i)
            .ok_or_else(|| anyhow!("config field `{field}`: measure index {i} out of range ({} measures)", self.measures.len()))
    }

    pub fn section<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T> {
        section.as_ref().ok_or_else(|| anyhow!("config field `{name}`: section required by this command"))
    }

    /// SHA-256 of the canonical JSON of the resolved config, overrides
    /// applied and referenced files inlined.
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(&bytes))
    }
}
