//! Column datasets written as CSV with a TOML sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use optomech_core::MosConfig;
use serde::Serialize;

use crate::config::{Config, ScanSection};
use crate::error::CliError;
use crate::validate::ToleranceProfile;

/// MOS normalizers for the configured optics and `[mos]` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalizers {
    pub phi0: f64,
    pub gamma0: f64,
    pub g00: f64,
}

impl Normalizers {
    pub fn from_config(cfg: &Config) -> Result<Self, CliError> {
        let mos = MosConfig::new(cfg.optics.l, cfg.optics.lambda, cfg.mos.t, cfg.mos.t_m)?;
        Ok(Self {
            phi0: mos.phi0(),
            gamma0: mos.gamma0(),
            g00: mos.g00(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub dataset: String,
    pub version: String,
    pub columns: Vec<String>,
    pub rows: usize,
    pub normalizers: Normalizers,
    pub tolerances: ToleranceProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<ScanSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub parameters: Config,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Metadata,
}

impl Dataset {
    pub fn new(
        name: &str,
        columns: Vec<String>,
        rows: Vec<Vec<f64>>,
        cfg: &Config,
        tolerances: ToleranceProfile,
    ) -> Result<Self, CliError> {
        if let Some(bad) = rows.iter().position(|r| r.len() != columns.len()) {
            return Err(CliError::Config(format!(
                "row {bad} has {} values for {} columns",
                rows[bad].len(),
                columns.len()
            )));
        }
        let meta = Metadata {
            dataset: name.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            columns: columns.clone(),
            rows: rows.len(),
            normalizers: Normalizers::from_config(cfg)?,
            tolerances,
            sweep: None,
            notes: Vec::new(),
            parameters: cfg.clone(),
        };
        Ok(Self {
            columns,
            rows,
            meta,
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Whether the first column increases strictly.
    pub fn abscissa_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[0][0] < w[1][0])
    }

    /// Header line, then one line per row with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn meta_toml(&self) -> Result<String, CliError> {
        toml::to_string(&self.meta).map_err(|e| CliError::Config(format!("metadata: {e}")))
    }

    /// Write `path` and `path.meta.toml`.
    pub fn write(&self, path: &Path) -> Result<PathBuf, CliError> {
        std::fs::write(path, self.to_csv())?;
        let sidecar = sidecar_path(path);
        std::fs::write(&sidecar, self.meta_toml()?)?;
        Ok(sidecar)
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.toml");
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dataset {
        Dataset::new(
            "sample",
            vec!["x".into(), "y".into()],
            vec![vec![0.0, 1.0 / 3.0], vec![1.0, -2.5e-300]],
            &Config::default(),
            ToleranceProfile::default(),
        )
        .unwrap()
    }

    #[test]
    fn csv_has_header_and_seventeen_digits() {
        let csv = sample().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,y"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[1], "3.3333333333333331e-1");
        assert_eq!(first[1].parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        let res = Dataset::new(
            "bad",
            vec!["x".into()],
            vec![vec![0.0, 1.0]],
            &Config::default(),
            ToleranceProfile::default(),
        );
        assert!(res.is_err());
    }

    #[test]
    fn metadata_carries_normalizers() {
        let text = sample().meta_toml().unwrap();
        let parsed: toml::Table = text.parse().unwrap();
        let norm = parsed["normalizers"].as_table().unwrap();
        assert_eq!(norm["phi0"].as_float().unwrap(), 0.25 * 0.1 * 0.1);
        assert!(parsed["parameters"]["mos"]["t"].as_float().is_some());
        assert!(parsed["version"].as_str().is_some());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("a/fig2.csv")),
            PathBuf::from("a/fig2.csv.meta.toml")
        );
    }
}
