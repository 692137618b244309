//! Scenario files: strict TOML with a mandatory `schema_version`.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Num;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{AsicSpec, NetworkSnapshot};
use crate::error::ModelError;
use crate::physics::TemperatureK;
use crate::quantum::QuantumArchitecture;

pub const SCHEMA_VERSION: u32 = 1;

pub const PUBLISHED_FIXTURE: &str = "paper-2022";
pub const SELF_CONSISTENT_FIXTURE: &str = "self-consistent";

const PUBLISHED_TOML: &str = include_str!("../../fixtures/paper-2022.toml");
const SELF_CONSISTENT_TOML: &str = include_str!("../../fixtures/self-consistent.toml");

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario {path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("schema violation in {path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("invalid scenario {path}: field `{field}` {reason}")]
    Invalid {
        path: PathBuf,
        field: String,
        reason: String,
    },
}

impl ScenarioError {
    /// Failures of the file contents, as opposed to failing to read it.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Self::Io { .. })
    }
}

/// Constants taken as published instead of derived.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureConstants {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits_per_block_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ec_steps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounded_share: Option<f64>,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub network: NetworkSnapshot,
    pub asic: AsicSpec,
    pub quantum_architectures: Vec<QuantumArchitecture>,
    pub ratios: Vec<f64>,
    pub temperature: TemperatureK,
    pub fixture_constants: FixtureConstants,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    name: String,
    temperature_k: f64,
    ratios: Vec<f64>,
    network: RawNetwork,
    asic: RawAsic,
    #[serde(default)]
    fixture_constants: FixtureConstants,
    #[serde(default)]
    quantum: Vec<QuantumArchitecture>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    difficulty: f64,
    network_hashrate_th_per_s: f64,
    block_time_s: f64,
    network_energy_per_block_j: f64,
    max_target: String,
    #[serde(default = "default_search_bits")]
    search_space_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    annual_consumption_twh: Option<f64>,
}

fn default_search_bits() -> u32 {
    256
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAsic {
    hashrate_th_per_s: f64,
    nameplate_power_w: f64,
    nameplate_energy_per_block_j: f64,
    nand_per_hash: u64,
    bits_per_nand: f64,
}

fn parse_target(text: &str) -> Option<BigUint> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => BigUint::from_str_radix(&hex.replace('_', ""), 16).ok(),
        None => BigUint::from_str_radix(t, 10).ok(),
    }
}

impl Scenario {
    /// Bundled fixture by name.
    pub fn bundled(name: &str) -> Option<Scenario> {
        let text = match name {
            PUBLISHED_FIXTURE => PUBLISHED_TOML,
            SELF_CONSISTENT_FIXTURE => SELF_CONSISTENT_TOML,
            _ => return None,
        };
        let origin = PathBuf::from(format!("<bundled:{name}>"));
        Some(parse_scenario(text, &origin).expect("bundled fixtures are valid"))
    }

    pub fn published() -> Scenario {
        Self::bundled(PUBLISHED_FIXTURE).expect("published fixture is bundled")
    }

    pub fn self_consistent() -> Scenario {
        Self::bundled(SELF_CONSISTENT_FIXTURE).expect("self-consistent fixture is bundled")
    }

    /// Non-fatal findings: efficiency ratios below 1 claim to beat the
    /// Landauer bound.
    pub fn warnings(&self) -> Vec<String> {
        self.ratios
            .iter()
            .filter(|&&r| r < 1.0)
            .map(|r| format!("efficiency ratio {r} is below 1 (better than the Landauer bound)"))
            .collect()
    }

    pub fn to_toml(&self) -> String {
        let raw = RawScenario {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            temperature_k: self.temperature.kelvin(),
            ratios: self.ratios.clone(),
            network: RawNetwork {
                difficulty: self.network.difficulty,
                network_hashrate_th_per_s: self.network.network_hashrate_th_per_s,
                block_time_s: self.network.block_time_s,
                network_energy_per_block_j: self.network.network_energy_per_block_j,
                max_target: format!("0x{}", self.network.max_target.to_str_radix(16)),
                search_space_bits: self.network.search_space_bits,
                annual_consumption_twh: self.network.annual_consumption_twh,
            },
            asic: RawAsic {
                hashrate_th_per_s: self.asic.hashrate_th_per_s,
                nameplate_power_w: self.asic.nameplate_power_w,
                nameplate_energy_per_block_j: self.asic.nameplate_energy_per_block_j,
                nand_per_hash: self.asic.nand_per_hash,
                bits_per_nand: self.asic.bits_per_nand,
            },
            fixture_constants: self.fixture_constants.clone(),
            quantum: self.quantum_architectures.clone(),
        };
        toml::to_string(&raw).expect("scenario serializes to TOML")
    }
}

/// Reads a scenario file, or a bundled fixture when `source` names one and
/// no such file exists.
pub fn load_scenario(source: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = source.as_ref();
    if !path.exists() {
        if let Some(s) = path.to_str().and_then(Scenario::bundled) {
            return Ok(s);
        }
    }
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, path)
}

pub fn parse_scenario(text: &str, origin: &Path) -> Result<Scenario, ScenarioError> {
    let path = origin.to_path_buf();
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ScenarioError::Syntax {
            path: path.clone(),
            message: e.message().to_string(),
        })?;

    match table.get("schema_version") {
        None => {
            return Err(ScenarioError::Schema {
                path,
                message: "missing mandatory field `schema_version`".into(),
            })
        }
        Some(toml::Value::Integer(v)) if *v == SCHEMA_VERSION as i64 => {}
        Some(other) => {
            return Err(ScenarioError::Schema {
                path,
                message: format!("`schema_version` must be {SCHEMA_VERSION}, got {other}"),
            })
        }
    }

    let raw: RawScenario = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ScenarioError::Schema {
            path: path.clone(),
            message: e.message().to_string(),
        })?;

    build(raw).map_err(|e| match e {
        ModelError::Invalid { field, reason } => ScenarioError::Invalid {
            path,
            field,
            reason,
        },
        other => ScenarioError::Invalid {
            path,
            field: "<scenario>".into(),
            reason: other.to_string(),
        },
    })
}

fn invalid(field: &str, reason: impl Into<String>) -> ModelError {
    ModelError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

fn positive(field: &str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

fn build(raw: RawScenario) -> Result<Scenario, ModelError> {
    let temperature = TemperatureK::new(raw.temperature_k).map_err(|_| {
        invalid(
            "temperature_k",
            format!("must be positive, got {}", raw.temperature_k),
        )
    })?;

    if raw.ratios.is_empty() {
        return Err(invalid("ratios", "must list at least one efficiency ratio"));
    }
    for r in &raw.ratios {
        positive("ratios", *r)?;
    }

    let max_target = parse_target(&raw.network.max_target).ok_or_else(|| {
        invalid(
            "network.max_target",
            format!(
                "`{}` is not a hex (0x…) or decimal integer",
                raw.network.max_target
            ),
        )
    })?;
    let network = NetworkSnapshot {
        difficulty: raw.network.difficulty,
        network_hashrate_th_per_s: raw.network.network_hashrate_th_per_s,
        block_time_s: raw.network.block_time_s,
        network_energy_per_block_j: raw.network.network_energy_per_block_j,
        max_target,
        search_space_bits: raw.network.search_space_bits,
        annual_consumption_twh: raw.network.annual_consumption_twh,
    };
    network.validate().map_err(|e| prefix("network", e))?;

    let constants = raw.fixture_constants;
    if let Some(bits) = constants.bits_per_block_override {
        if !(bits.is_finite() && bits >= 0.0) {
            return Err(invalid(
                "fixture_constants.bits_per_block_override",
                format!("must be non-negative, got {bits}"),
            ));
        }
    }
    if let Some(steps) = constants.ec_steps {
        positive("fixture_constants.ec_steps", steps)?;
    }
    if let Some(share) = constants.rounded_share {
        if !(share > 0.0 && share <= 1.0) {
            return Err(invalid(
                "fixture_constants.rounded_share",
                format!("must be in (0, 1], got {share}"),
            ));
        }
    }

    let asic = AsicSpec {
        hashrate_th_per_s: raw.asic.hashrate_th_per_s,
        nameplate_power_w: raw.asic.nameplate_power_w,
        nameplate_energy_per_block_j: raw.asic.nameplate_energy_per_block_j,
        nand_per_hash: raw.asic.nand_per_hash,
        bits_per_nand: raw.asic.bits_per_nand,
        bits_per_block_override: constants.bits_per_block_override,
    };
    asic.validate().map_err(|e| prefix("asic", e))?;

    for (i, arch) in raw.quantum.iter().enumerate() {
        arch.validate()
            .map_err(|e| prefix(&format!("quantum[{i}]"), e))?;
    }

    Ok(Scenario {
        name: raw.name,
        network,
        asic,
        quantum_architectures: raw.quantum,
        ratios: raw.ratios,
        temperature,
        fixture_constants: constants,
    })
}

fn prefix(section: &str, e: ModelError) -> ModelError {
    match e {
        ModelError::Invalid { field, reason } => invalid(&format!("{section}.{field}"), reason),
        other => other,
    }
}
