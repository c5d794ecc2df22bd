//! MOS, MSI and MATE side by side at their zero-dispersive points.

use std::f64::consts::TAU;
use std::fmt::{self, Write as _};

use optomech_core::mate::mate_zero_dispersive;
use optomech_core::mos::{operating_point, zero_dispersive_locus};
use optomech_core::msi::msi_zero_dispersive;
use optomech_core::noise::cooperativity;
use optomech_core::{
    CooperativityInputs, CooperativitySystem, MechanicalParams, MosConfig, MsiConfig, Result,
};
use serde::Serialize;

use crate::config::Config;
use crate::models::mate_config;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub system: &'static str,
    /// `ok` or the model error.
    pub status: String,
    /// Dissipative constant at the zero-dispersive point, rad/s per m.
    pub g_gamma0: f64,
    /// Decay rate there, 1/s.
    pub gamma: f64,
    /// `(2 omega_m / gamma)^2`; 1 for MOS, whose cooperativity carries no such factor.
    pub sideband_factor: f64,
    pub cooperativity: f64,
    /// MOS `|g_gamma0|` over this row's.
    pub g_gamma0_mos_ratio: f64,
    /// MOS cooperativity over this row's.
    pub cooperativity_mos_ratio: f64,
}

impl ComparisonRow {
    fn failed(system: &'static str, err: String) -> Self {
        Self {
            system,
            status: err,
            g_gamma0: f64::NAN,
            gamma: f64::NAN,
            sideband_factor: f64::NAN,
            cooperativity: f64::NAN,
            g_gamma0_mos_ratio: f64::NAN,
            cooperativity_mos_ratio: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

pub const COLUMNS: [&str; 8] = [
    "system",
    "status",
    "g_gamma0",
    "gamma",
    "sideband_factor",
    "cooperativity",
    "g_gamma0_mos_ratio",
    "cooperativity_mos_ratio",
];

/// Shared optics and mechanics from `[optics]` and `[mechanics]`; MOS uses
/// `[mos]` transmissions, MSI `[msi]`, MATE `[mate]`.
pub fn compare_systems(cfg: &Config) -> ComparisonTable {
    let k = TAU / cfg.optics.lambda;
    let mech = &cfg.mechanics;
    let inputs = CooperativityInputs {
        k,
        l: cfg.optics.l,
        a0: mech.a0,
        mechanics: MechanicalParams {
            x_zpf: mech.x_zpf,
            gamma_m: mech.gamma_m,
        },
    };
    let sideband = |gamma: f64| 2.0 * mech.omega_m / gamma;
    let mut rows: Vec<ComparisonRow> = [
        ("MOS", mos_row(cfg, &inputs)),
        ("MSI", msi_row(cfg, k, &inputs, &sideband)),
        ("MATE", mate_row(cfg, &inputs, &sideband)),
    ]
    .into_iter()
    .map(|(system, res)| match res {
        Ok((g, gamma, sb, c)) => ComparisonRow {
            system,
            status: "ok".into(),
            g_gamma0: g,
            gamma,
            sideband_factor: sb,
            cooperativity: c,
            g_gamma0_mos_ratio: f64::NAN,
            cooperativity_mos_ratio: f64::NAN,
        },
        Err(e) => ComparisonRow::failed(system, e.to_string()),
    })
    .collect();
    let (g_mos, c_mos) = (rows[0].g_gamma0, rows[0].cooperativity);
    for row in &mut rows {
        if row.status == "ok" {
            row.g_gamma0_mos_ratio = g_mos.abs() / row.g_gamma0.abs();
            row.cooperativity_mos_ratio = c_mos / row.cooperativity;
        }
    }
    ComparisonTable { rows }
}

type Row = (f64, f64, f64, f64);

fn mos_row(cfg: &Config, inputs: &CooperativityInputs) -> Result<Row> {
    let (t, t_m) = (cfg.mos.t, cfg.mos.t_m);
    zero_dispersive_locus(t, t_m)?;
    let mos = MosConfig::new(cfg.optics.l, cfg.optics.lambda, t, t_m)?;
    let op = operating_point(&mos.with_phi(mos.phi0()))?;
    let c = cooperativity(&CooperativitySystem::Mos { t, t_m }, inputs);
    Ok((op.g_gamma0.abs(), op.gamma, 1.0, c))
}

fn msi_row(
    cfg: &Config,
    k: f64,
    inputs: &CooperativityInputs,
    sideband: &dyn Fn(f64) -> f64,
) -> Result<Row> {
    let msi = MsiConfig::from_split(cfg.msi.t_b_power, cfg.msi.r_ms, cfg.optics.l, k, 0.0)?;
    let z = msi_zero_dispersive(&msi)?;
    let sb = sideband(z.gamma_ms);
    let c = cooperativity(
        &CooperativitySystem::Msi {
            r_ms: z.r_ms,
            sideband: sb,
        },
        inputs,
    );
    Ok((z.g_gamma0.abs(), z.gamma_ms, sb * sb, c))
}

fn mate_row(
    cfg: &Config,
    inputs: &CooperativityInputs,
    sideband: &dyn Fn(f64) -> f64,
) -> Result<Row> {
    let mate = mate_config(cfg)?;
    let z = mate_zero_dispersive(&mate)?;
    let sb = sideband(z.gamma_mate);
    let c = cooperativity(
        &CooperativitySystem::Mate {
            t: mate.t,
            t_m: mate.t_m,
            sideband: sb,
        },
        inputs,
    );
    Ok((z.g_gamma0.abs(), z.gamma_mate, sb * sb, c))
}

impl ComparisonTable {
    pub fn row(&self, system: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.system == system)
    }

    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let status = r.status.replace(',', ";");
            write!(out, "{},\"{}\"", r.system, status.replace('"', "'"))
                .expect("writing to a String");
            for v in [
                r.g_gamma0,
                r.gamma,
                r.sideband_factor,
                r.cooperativity,
                r.g_gamma0_mos_ratio,
                r.cooperativity_mos_ratio,
            ] {
                write!(out, ",{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}  status",
            "system", "|g_gamma0|", "gamma", "sideband^2", "C", "g ratio", "C ratio"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}  {}",
                r.system,
                r.g_gamma0,
                r.gamma,
                r.sideband_factor,
                r.cooperativity,
                r.g_gamma0_mos_ratio,
                r.cooperativity_mos_ratio,
                r.status
            )?;
        }
        Ok(())
    }
}
