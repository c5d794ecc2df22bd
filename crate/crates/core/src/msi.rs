//! Michelson-Sagnac interferometer reduced to a one-sided cavity whose input
//! mirror has a membrane-dependent amplitude reflection `rho` and real
//! transmission `tau`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::noise::CooperativitySystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsiConfig {
    /// Beam-splitter amplitude reflection.
    pub r_b: f64,
    /// Beam-splitter amplitude transmission.
    pub t_b: f64,
    /// Membrane amplitude reflection.
    pub r_ms: f64,
    /// Membrane amplitude transmission.
    pub t_ms: f64,
    /// Effective optical length, m.
    pub l: f64,
    /// Wavevector, 1/m.
    pub k: f64,
    /// Membrane displacement from the symmetric position, m.
    pub x: f64,
}

impl MsiConfig {
    /// Build from the beam-splitter power transmission `T_b^2` and the
    /// membrane reflection amplitude.
    pub fn from_split(t_b_power: f64, r_ms: f64, l: f64, k: f64, x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t_b_power) || !(0.0..=1.0).contains(&r_ms) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= T_b^2 <= 1 and 0 <= r_ms <= 1, got {t_b_power}, {r_ms}"
            )));
        }
        let cfg = Self {
            r_b: (1.0 - t_b_power).sqrt(),
            t_b: t_b_power.sqrt(),
            r_ms,
            t_ms: ((1.0 - r_ms) * (1.0 + r_ms)).sqrt(),
            l,
            k,
            x,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_x(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let coeffs = [self.r_b, self.t_b, self.r_ms, self.t_ms];
        if coeffs.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidConfig(format!(
                "coefficients outside [0, 1]: {self:?}"
            )));
        }
        let bs = self.r_b * self.r_b + self.t_b * self.t_b - 1.0;
        let mem = self.r_ms * self.r_ms + self.t_ms * self.t_ms - 1.0;
        if bs.abs() > 1e-12 || mem.abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "lossless elements required (R_b^2+T_b^2-1 = {bs:e}, r_ms^2+t_ms^2-1 = {mem:e})"
            )));
        }
        if !(self.l > 0.0
            && self.l.is_finite()
            && self.k > 0.0
            && self.k.is_finite()
            && self.x.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "need l > 0, k > 0, finite x: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn omega_c(&self) -> f64 {
        SPEED_OF_LIGHT * self.k
    }

    /// `T_b^2 - R_b^2`.
    fn imbalance(&self) -> f64 {
        (self.t_b - self.r_b) * (self.t_b + self.r_b)
    }
}

/// Effective input mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMirror {
    pub rho: Complex64,
    pub tau: f64,
}

/// `rho = -2 R_b T_b t_ms - (R_b^2 - T_b^2) r_ms cos 2kx + i r_ms sin 2kx`,
/// `tau = t_ms (T_b^2 - R_b^2) + 2 R_b T_b r_ms cos 2kx`.
pub fn msi_effective_mirror(cfg: &MsiConfig) -> Result<EffectiveMirror> {
    cfg.validate()?;
    let (s, c) = (2.0 * cfg.k * cfg.x).sin_cos();
    let rt = cfg.r_b * cfg.t_b;
    let imb = cfg.imbalance();
    Ok(EffectiveMirror {
        rho: Complex64::new(-2.0 * rt * cfg.t_ms + imb * cfg.r_ms * c, cfg.r_ms * s),
        tau: cfg.t_ms * imb + 2.0 * rt * cfg.r_ms * c,
    })
}

/// Reflection phase `mu = arg rho`, principal value.
pub fn msi_phase(cfg: &MsiConfig) -> Result<f64> {
    Ok(msi_effective_mirror(cfg)?.rho.arg())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsiCouplings {
    /// `c T_ms / 2l` with `T_ms = tau^2`, 1/s.
    pub gamma_ms: f64,
    /// `(d mu/dx)(c/2l)`, rad/s per m.
    pub g_omega0: f64,
    /// `-tau (d tau/dx)(c/2l)`, rad/s per m.
    pub g_gamma0: f64,
    pub dtau_dx: f64,
    /// Exact derivative of `arg rho`.
    pub dmu_dx: f64,
}

/// Couplings at the configured `x`.
///
/// `d mu/dx = -2k r_ms [2 t_ms R_b T_b cos 2kx - r_ms (T_b^2 - R_b^2)] / |rho|^2`,
/// with `|rho|^2 = 1 - tau^2`. The numerator alone fixes the zero-dispersive
/// points; the divisor matters for the value away from them.
pub fn msi_couplings(cfg: &MsiConfig) -> Result<MsiCouplings> {
    let mirror = msi_effective_mirror(cfg)?;
    let (s, c) = (2.0 * cfg.k * cfg.x).sin_cos();
    let rt = cfg.r_b * cfg.t_b;
    let imb = cfg.imbalance();
    let scale = SPEED_OF_LIGHT / (2.0 * cfg.l);
    let dtau_dx = -4.0 * cfg.k * cfg.r_ms * rt * s;
    let rho2 = mirror.rho.norm_sqr();
    let dmu_dx = if cfg.r_ms == 0.0 {
        0.0
    } else {
        -2.0 * cfg.k * cfg.r_ms * (2.0 * cfg.t_ms * rt * c - cfg.r_ms * imb) / rho2
    };
    Ok(MsiCouplings {
        gamma_ms: scale * mirror.tau * mirror.tau,
        g_omega0: dmu_dx * scale,
        g_gamma0: -mirror.tau * dtau_dx * scale,
        dtau_dx,
        dmu_dx,
    })
}

/// Values at a zero of the dispersive coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsiZeroDispersive {
    pub x_star: f64,
    /// `2 k x*`.
    pub phase: f64,
    /// `tau(x*) = (T_b^2 - R_b^2) / t_ms`.
    pub tau: f64,
    /// `T_ms = tau^2`.
    pub t_ms_power: f64,
    pub gamma_ms: f64,
    /// `-tau (d tau/dx)(c/2l)` at `x*`.
    pub g_gamma0: f64,
    /// `r_ms sqrt(T_ms) omega_c / l`, the balanced-splitter magnitude.
    pub g_gamma0_estimate: f64,
    /// Residual dispersive slope at `x*`.
    pub dmu_dx: f64,
    pub r_ms: f64,
}

impl MsiZeroDispersive {
    /// Cooperativity descriptor for a mechanical frequency `omega_m`.
    pub fn cooperativity_system(&self, omega_m: f64) -> CooperativitySystem {
        CooperativitySystem::Msi {
            r_ms: self.r_ms,
            sideband: 2.0 * omega_m / self.gamma_ms,
        }
    }
}

/// Zero-dispersive point nearest `2kx = pi/2`.
pub fn msi_zero_dispersive(cfg: &MsiConfig) -> Result<MsiZeroDispersive> {
    msi_zero_dispersive_branch(cfg, 0)
}

/// Zero-dispersive points `cos 2kx* = r_ms (T_b^2 - R_b^2) / (2 t_ms R_b T_b)`,
/// indexed in increasing `x`: `j = 0` is `2kx* = acos(..)` in `[0, pi]`,
/// odd `j` gives `pi (j+1) - acos(..)`, even `j` gives `acos(..) + pi j`.
pub fn msi_zero_dispersive_branch(cfg: &MsiConfig, j: i64) -> Result<MsiZeroDispersive> {
    cfg.validate()?;
    let rt = cfg.r_b * cfg.t_b;
    let imb = cfg.imbalance();
    let num = cfg.r_ms * imb;
    let den = 2.0 * cfg.t_ms * rt;
    if den == 0.0 || (num / den).abs() > 1.0 {
        return Err(Error::NoZeroDispersivePoint(format!(
            "cos 2kx* = {num} / {den} is not attainable"
        )));
    }
    let a = (num / den).acos();
    let phase = if j.rem_euclid(2) == 0 {
        a + PI * j as f64
    } else {
        PI * (j + 1) as f64 - a
    };
    let at = cfg.with_x(phase / (2.0 * cfg.k));
    let coup = msi_couplings(&at)?;
    let tau = msi_effective_mirror(&at)?.tau;
    let t_ms_power = tau * tau;
    Ok(MsiZeroDispersive {
        x_star: at.x,
        phase,
        tau,
        t_ms_power,
        gamma_ms: coup.gamma_ms,
        g_gamma0: coup.g_gamma0,
        g_gamma0_estimate: msi_dissipative_estimate(cfg.r_ms, t_ms_power, cfg.omega_c(), cfg.l),
        dmu_dx: coup.dmu_dx,
        r_ms: cfg.r_ms,
    })
}

/// `|g_gamma0| = r_ms sqrt(T_ms) omega_c / l`.
pub fn msi_dissipative_estimate(r_ms: f64, t_ms_power: f64, omega_c: f64, l: f64) -> f64 {
    r_ms * t_ms_power.sqrt() * omega_c / l
}

/// Range of membrane displacements covering one period of the response.
pub fn msi_period(cfg: &MsiConfig) -> f64 {
    TAU / (2.0 * cfg.k)
}
