//! One configuration in, one row of numbers out, for each model.

use std::f64::consts::TAU;

use optomech_core::constants::SPEED_OF_LIGHT;
use optomech_core::mate::{
    classify_resonance, mate_dk_dx, mate_exact_decay, mate_resonances, resonance_near,
};
use optomech_core::mos::operating_point;
use optomech_core::msi::{msi_couplings, msi_effective_mirror};
use optomech_core::scattering::{compose_synthetic, synthetic_response};
use optomech_core::{ElementSpec, Error, MateConfig, ModeFamily, MosConfig, MsiConfig, Result};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::validate::noise_pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Synthetic,
    Mos,
    Msi,
    Mate,
    Noise,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Synthetic => "synthetic",
            Target::Mos => "mos",
            Target::Msi => "msi",
            Target::Mate => "mate",
            Target::Noise => "noise",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Target::Synthetic => &[
                "psi",
                "transmission",
                "mu",
                "dt_dpsi",
                "dmu_dpsi",
                "matrix_transmission",
                "unitarity_deviation",
            ],
            Target::Mos => &[
                "phi_ratio",
                "g_omega0_over_g00",
                "g_gamma0_over_g00",
                "gamma_over_gamma0",
                "transmission",
                "transmission_exact",
                "g_omega0",
                "g_gamma0",
                "gamma",
                "x",
                "regime_ok",
            ],
            Target::Msi => &[
                "x", "two_kx", "tau", "mu", "dtau_dx", "dmu_dx", "gamma_ms", "g_omega0", "g_gamma0",
            ],
            Target::Mate => &[
                "x",
                "k_c",
                "phi",
                "dk_dx",
                "g_omega0",
                "gamma_mate",
                "g_gamma0",
                "short_family",
                "edge_correction",
                "regime_ok",
            ],
            Target::Noise => &[
                "xi",
                "gamma3_ratio",
                "product",
                "product_general",
                "theta_opt",
                "s_xx_imp",
                "s_ff",
            ],
        }
    }

    pub fn evaluate(self, cfg: &Config) -> Result<Vec<f64>> {
        match self {
            Target::Synthetic => synthetic(cfg),
            Target::Mos => mos(cfg),
            Target::Msi => msi(cfg),
            Target::Mate => mate(cfg),
            Target::Noise => noise(cfg),
        }
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn synthetic(cfg: &Config) -> Result<Vec<f64>> {
    let s = &cfg.synthetic;
    let mirror = ElementSpec::mirror(s.t)?;
    let membrane = ElementSpec::membrane(s.t_m, s.phi_r)?;
    let resp = synthetic_response(s.psi, &mirror, &membrane)?;
    let k = TAU / cfg.optics.lambda;
    let x = (s.psi - s.phi_r).rem_euclid(TAU) / (2.0 * k);
    let matrix = compose_synthetic(&mirror, &membrane, x, k)?;
    Ok(vec![
        s.psi,
        resp.transmission,
        resp.mu,
        resp.dt_dpsi,
        resp.dmu_dpsi,
        matrix.power_transmission(),
        matrix.unitarity_deviation(),
    ])
}

pub fn mos_config(cfg: &Config) -> Result<MosConfig> {
    let m = &cfg.mos;
    let mut mos = MosConfig::new(cfg.optics.l, cfg.optics.lambda, m.t, m.t_m)?.with_phi_r(m.phi_r);
    if let Some(n) = m.branch {
        mos = mos.with_branch(n);
    }
    Ok(mos.with_phi(m.phi_ratio * mos.phi0()))
}

fn mos(cfg: &Config) -> Result<Vec<f64>> {
    let mos = mos_config(cfg)?;
    let op = operating_point(&mos)?;
    Ok(vec![
        cfg.mos.phi_ratio,
        op.g_omega0 / op.g_00,
        op.g_gamma0 / op.g_00,
        op.gamma / op.gamma0,
        op.transmission,
        op.transmission_exact,
        op.g_omega0,
        op.g_gamma0,
        op.gamma,
        mos.x,
        flag(op.regime.all()),
    ])
}

fn msi(cfg: &Config) -> Result<Vec<f64>> {
    let m = &cfg.msi;
    let k = TAU / cfg.optics.lambda;
    let msi = MsiConfig::from_split(m.t_b_power, m.r_ms, cfg.optics.l, k, m.x)?;
    let mirror = msi_effective_mirror(&msi)?;
    let g = msi_couplings(&msi)?;
    Ok(vec![
        m.x,
        2.0 * k * m.x,
        mirror.tau,
        mirror.rho.arg(),
        g.dtau_dx,
        g.dmu_dx,
        g.gamma_ms,
        g.g_omega0,
        g.g_gamma0,
    ])
}

pub fn mate_config(cfg: &Config) -> Result<MateConfig> {
    let m = &cfg.mate;
    MateConfig::new(cfg.optics.l, m.x, cfg.optics.lambda, m.t, m.t_m, m.phi_r)
}

fn mate(cfg: &Config) -> Result<Vec<f64>> {
    let mate = mate_config(cfg)?;
    let k_c = nearest_resonance(&mate)?;
    let dk = mate_dk_dx(&mate, k_c)?;
    let decay = mate_exact_decay(&mate, k_c)?;
    let family = classify_resonance(&mate, k_c).family;
    Ok(vec![
        mate.x,
        k_c,
        mate.phi_at(k_c),
        dk,
        -SPEED_OF_LIGHT * dk,
        decay.gamma_mate,
        decay.g_gamma0,
        flag(family == ModeFamily::Short),
        decay.edge_correction,
        flag(decay.regime_ok),
    ])
}

/// Resonance nearest the configured wavevector. Neighbouring modes can sit
/// more than half a free spectral range apart, so a miss in the narrow
/// window falls back to the nearest root within one range either side.
fn nearest_resonance(mate: &MateConfig) -> Result<f64> {
    match resonance_near(mate, mate.k) {
        Err(Error::NoRootInWindow { .. }) => {
            let fsr = mate.fsr_k();
            let roots = mate_resonances(mate, mate.k - fsr, mate.k + fsr)?;
            Ok(roots
                .iter()
                .map(|r| r.k)
                .min_by(|a, b| (a - mate.k).abs().total_cmp(&(b - mate.k).abs()))
                .expect("mate_resonances returns at least one root"))
        }
        other => other,
    }
}

fn noise(cfg: &Config) -> Result<Vec<f64>> {
    let n = &cfg.noise;
    let (general, closed) = noise_pair(n.xi, n.gamma3_ratio, n.a0, n.omega_ratio)?;
    Ok(vec![
        n.xi,
        n.gamma3_ratio,
        closed.normalized_product(),
        general,
        closed.theta_opt,
        closed.s_xx_imp,
        closed.s_ff,
    ])
}
