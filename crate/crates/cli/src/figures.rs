//! Normalized coupling, decay and noise curves on fixed grids.

use optomech_core::mos::{normalized_couplings, normalized_decay};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::dataset::Dataset;
use crate::error::CliError;
use crate::scan::grid;
use crate::validate::{noise_pair, ToleranceProfile};

pub const FIGURE_POINTS: usize = 801;

/// Loss-port fractions `gamma3 / gamma` of the noise curves.
pub const LOSS_FRACTIONS: [f64; 3] = [0.0, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    /// Dispersive and dissipative constants over `g_00` against `Phi/Phi0`.
    Fig2,
    /// Decay rate over `gamma0` against `Phi/Phi0`.
    Fig3,
    /// Backaction-imprecision product over `hbar^2/4` against `xi`.
    Fig4,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
        }
    }
}

pub fn reproduce_figure(
    id: FigureId,
    cfg: &Config,
    tolerances: ToleranceProfile,
) -> Result<Dataset, CliError> {
    let (columns, rows): (Vec<String>, Vec<Vec<f64>>) = match id {
        FigureId::Fig2 => (
            names(&["phi_ratio", "g_omega0_over_g00", "g_gamma0_over_g00"]),
            grid(-4.0, 4.0, FIGURE_POINTS)
                .into_iter()
                .map(|s| {
                    let (w, g) = normalized_couplings(s);
                    vec![s, w, g]
                })
                .collect(),
        ),
        FigureId::Fig3 => (
            names(&["phi_ratio", "gamma_over_gamma0"]),
            grid(-4.0, 4.0, FIGURE_POINTS)
                .into_iter()
                .map(|s| vec![s, normalized_decay(s)])
                .collect(),
        ),
        FigureId::Fig4 => {
            let mut cols = vec!["xi".to_string()];
            cols.extend(LOSS_FRACTIONS.iter().map(|f| format!("product_loss_{f}")));
            cols.extend(LOSS_FRACTIONS.iter().map(|f| format!("general_loss_{f}")));
            let mut rows = Vec::with_capacity(FIGURE_POINTS);
            for xi in grid(-5.0, 5.0, FIGURE_POINTS) {
                let mut closed = Vec::new();
                let mut general = Vec::new();
                for f in LOSS_FRACTIONS {
                    let (g, rep) = noise_pair(xi, f, 1.0, 1e-6)?;
                    closed.push(rep.normalized_product());
                    general.push(g);
                }
                let mut row = vec![xi];
                row.extend(closed);
                row.extend(general);
                rows.push(row);
            }
            (cols, rows)
        }
    };
    let mut data = Dataset::new(id.name(), columns, rows, cfg, tolerances)?;
    if id == FigureId::Fig4 {
        data.meta.notes.push(
            "natural units, gamma = g_gamma0 = 1, a0 = 1; general columns at omega = 1e-6 gamma"
                .into(),
        );
    }
    Ok(data)
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}
