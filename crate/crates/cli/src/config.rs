//! Run configuration: a TOML document with one table per model plus
//! optional `[scan]` and `[tolerances]` tables. Every key has a default.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Optics {
    /// Wavelength, m.
    pub lambda: f64,
    /// Cavity length, m.
    pub l: f64,
}

impl Default for Optics {
    fn default() -> Self {
        Self {
            lambda: 0.85e-6,
            l: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSection {
    pub t: f64,
    pub t_m: f64,
    pub phi_r: f64,
    /// Tandem phase `2kx + phi_r`, rad.
    pub psi: f64,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        Self {
            t: 0.014,
            t_m: 0.1,
            phi_r: 0.0,
            psi: PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MosSection {
    pub t: f64,
    pub t_m: f64,
    pub phi_r: f64,
    /// Membrane detuning in units of `Phi0`.
    pub phi_ratio: f64,
    /// Branch of the transparency position; smallest non-negative when absent.
    pub branch: Option<i64>,
}

impl Default for MosSection {
    fn default() -> Self {
        Self {
            t: 0.014,
            t_m: 0.1,
            phi_r: 0.0,
            phi_ratio: 1.0,
            branch: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsiSection {
    /// Beam-splitter power transmission.
    pub t_b_power: f64,
    pub r_ms: f64,
    /// Membrane displacement from the symmetric position, m.
    pub x: f64,
}

impl Default for MsiSection {
    fn default() -> Self {
        Self {
            t_b_power: 0.51,
            r_ms: 0.9,
            x: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MateSection {
    pub t: f64,
    pub t_m: f64,
    pub phi_r: f64,
    /// Membrane-input-mirror distance, m.
    pub x: f64,
}

impl Default for MateSection {
    fn default() -> Self {
        Self {
            t: 0.014,
            t_m: 0.1,
            phi_r: PI,
            x: 1e-6,
        }
    }
}

/// Noise model in natural units: `gamma = 1`, `g_gamma0 = 1`, `g_omega0 = xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub xi: f64,
    /// Loss-port rate over the mirror rate.
    pub gamma3_ratio: f64,
    /// Analysis frequency over the mirror rate.
    pub omega_ratio: f64,
    pub a0: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            xi: 0.0,
            gamma3_ratio: 0.0,
            omega_ratio: 1e-6,
            a0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MechanicsSection {
    /// m.
    pub x_zpf: f64,
    /// 1/s.
    pub gamma_m: f64,
    /// Mechanical frequency, rad/s.
    pub omega_m: f64,
    /// Intracavity amplitude, sqrt(photons).
    pub a0: f64,
}

impl Default for MechanicsSection {
    fn default() -> Self {
        Self {
            x_zpf: 1e-15,
            gamma_m: 0.1,
            omega_m: 2.0 * PI * 1e6,
            a0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Dotted key, e.g. `mos.phi_ratio`.
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

/// Overrides for individual checks; unset keys come from the profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub unitarity: Option<f64>,
    pub closed_form: Option<f64>,
    pub derivative: Option<f64>,
    pub locus: Option<f64>,
    pub resonance: Option<f64>,
    pub dk_dx: Option<f64>,
    pub regime: Option<f64>,
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub optics: Optics,
    pub synthetic: SyntheticSection,
    pub mos: MosSection,
    pub msi: MsiSection,
    pub mate: MateSection,
    pub noise: NoiseSection,
    pub mechanics: MechanicsSection,
    pub scan: Option<ScanSection>,
    pub tolerances: ToleranceOverrides,
}

/// A configuration together with the explicitly given keys it came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadedConfig {
    pub raw: Table,
    pub config: Config,
}

impl LoadedConfig {
    /// Parse a TOML document and apply `key=value` overrides on top of it.
    pub fn from_str_with(text: &str, sets: &[String]) -> Result<Self, CliError> {
        let mut raw: Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(format!("config: {e}")))?;
        for item in sets {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                CliError::Config(format!("--set expects key=value, got `{item}`"))
            })?;
            set_path(&mut raw, key.trim(), parse_value(value.trim()))?;
        }
        let config = decode(&raw)?;
        Ok(Self { raw, config })
    }

    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_str_with(&text, sets)
    }

    /// Whether a dotted key was given explicitly.
    pub fn is_set(&self, key: &str) -> bool {
        let mut table = &self.raw;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            match table.get(*part) {
                Some(Value::Table(t)) if i + 1 < parts.len() => table = t,
                Some(_) if i + 1 == parts.len() => return true,
                _ => return false,
            }
        }
        false
    }

    /// Configuration with one dotted key replaced by a number.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Config, CliError> {
        let mut raw = self.raw.clone();
        let v = if key == "mos.branch" {
            Value::Integer(value.round() as i64)
        } else {
            Value::Float(value)
        };
        set_path(&mut raw, key, v)?;
        decode(&raw)
    }
}

fn decode(raw: &Table) -> Result<Config, CliError> {
    Value::Table(raw.clone())
        .try_into::<Config>()
        .map_err(|e| CliError::Config(format!("config: {e}")))
}

fn parse_value(text: &str) -> Value {
    if let Ok(i) = text.parse::<i64>() {
        return Value::Integer(i);
    }
    if let Ok(f) = text.parse::<f64>() {
        return Value::Float(f);
    }
    if let Ok(b) = text.parse::<bool>() {
        return Value::Boolean(b);
    }
    Value::String(text.trim_matches('"').to_string())
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad key `{key}`")));
    }
    let (last, sections) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for part in sections {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => {
                return Err(CliError::Config(format!(
                    "`{part}` in `{key}` is not a table"
                )))
            }
        };
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
