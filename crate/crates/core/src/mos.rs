//! Membrane-outside system: a two-sided cavity of length `l` whose
//! non-feeding mirror is backed, at distance `x`, by a membrane.
//!
//! The tandem is handled as a synthetic mirror with transmission `T(psi)` and
//! reflection phase `mu(psi)`, `psi = 2kx + phi_r`. Near the transparency
//! maximum the small detuning `Phi = k (x - x_tilde)` and its scale
//! `Phi0 = t_m^2 / 4` give the Lorentzian closed forms used for the
//! operating point.

use std::f64::consts::{PI, TAU};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::roots;
use crate::scattering::{synthetic_response, ElementSpec, SyntheticMirrorResponse};

/// Factors standing in for the `<<` conditions of the asymptotic regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeMargins {
    /// `x < thin_tandem * l t_m^4 / (4 t^2)`.
    pub thin_tandem: f64,
    /// `t < amplitude_ratio * t_m` and `t_m < amplitude_ratio`.
    pub amplitude_ratio: f64,
}

impl Default for RegimeMargins {
    fn default() -> Self {
        Self {
            thin_tandem: 0.01,
            amplitude_ratio: 0.2,
        }
    }
}

/// Each sub-condition of `t_m^2 < t << t_m << 1` and of the thin-tandem
/// bound, reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeFlags {
    pub tm_squared_below_t: bool,
    pub t_much_below_tm: bool,
    pub tm_much_below_one: bool,
    pub thin_tandem: bool,
}

impl RegimeFlags {
    pub fn all(&self) -> bool {
        self.tm_squared_below_t
            && self.t_much_below_tm
            && self.tm_much_below_one
            && self.thin_tandem
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MosConfig {
    /// Cavity length, m.
    pub l: f64,
    /// Light wavevector `2 pi / lambda`, 1/m.
    pub k: f64,
    /// Mirror amplitude transmission.
    pub t: f64,
    /// Membrane amplitude transmission.
    pub t_m: f64,
    /// Membrane reflection phase, rad.
    pub phi_r: f64,
    /// Membrane-mirror distance, m.
    pub x: f64,
    /// Branch index of `x_tilde`; `None` picks the smallest non-negative one.
    pub n: Option<i64>,
    pub margins: RegimeMargins,
}

impl MosConfig {
    /// Configuration with `phi_r = 0` and the membrane sitting at `x_tilde`.
    pub fn new(l: f64, lambda: f64, t: f64, t_m: f64) -> Result<Self> {
        let mut cfg = Self {
            l,
            k: TAU / lambda,
            t,
            t_m,
            phi_r: 0.0,
            x: 0.0,
            n: None,
            margins: RegimeMargins::default(),
        };
        cfg.validate()?;
        cfg.x = cfg.x_tilde();
        Ok(cfg)
    }

    /// Change the membrane phase; `x` is left where it was.
    pub fn with_phi_r(mut self, phi_r: f64) -> Self {
        self.phi_r = phi_r;
        self
    }

    pub fn with_branch(mut self, n: i64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_x(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    /// Place the membrane at detuning `Phi` from the transparency maximum.
    pub fn with_phi(mut self, phi: f64) -> Self {
        self.x = self.x_tilde() + phi / self.k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.l.is_finite()
            && self.l > 0.0
            && self.k.is_finite()
            && self.k > 0.0
            && self.t_m > 0.0
            && self.t_m <= 1.0
            && (0.0..=1.0).contains(&self.t)
            && self.x.is_finite()
            && self.x >= 0.0
            && self.phi_r.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "MOS needs l > 0, k > 0, 0 < t_m <= 1, 0 <= t <= 1, x >= 0; got {self:?}"
            )))
        }
    }

    pub fn lambda(&self) -> f64 {
        TAU / self.k
    }

    pub fn omega_c(&self) -> f64 {
        SPEED_OF_LIGHT * self.k
    }

    pub fn mirror(&self) -> Result<ElementSpec> {
        ElementSpec::mirror(self.t)
    }

    pub fn membrane(&self) -> Result<ElementSpec> {
        ElementSpec::membrane(self.t_m, self.phi_r)
    }

    pub fn psi(&self) -> f64 {
        2.0 * self.k * self.x + self.phi_r
    }

    pub fn branch(&self) -> i64 {
        self.n
            .unwrap_or_else(|| (self.phi_r / TAU - 0.5).ceil() as i64)
    }

    /// Position of maximal tandem transparency, `cos(2k x_tilde + phi_r) = -1`:
    /// `x_tilde = (lambda/2) (1/2 + N - phi_r / 2 pi)`.
    pub fn x_tilde(&self) -> f64 {
        0.5 * self.lambda() * (0.5 + self.branch() as f64 - self.phi_r / TAU)
    }

    /// `Phi = k (x - x_tilde)`.
    pub fn phi(&self) -> f64 {
        self.k * (self.x - self.x_tilde())
    }

    pub fn phi0(&self) -> f64 {
        0.25 * self.t_m * self.t_m
    }

    /// `gamma0 = (2c/l) t^2 / t_m^2`.
    pub fn gamma0(&self) -> f64 {
        2.0 * SPEED_OF_LIGHT / self.l * self.t * self.t / (self.t_m * self.t_m)
    }

    /// `g_00 = 4 omega_c t^2 / (l t_m^4)`.
    pub fn g00(&self) -> f64 {
        4.0 * self.omega_c() / self.l * self.t * self.t / self.t_m.powi(4)
    }

    /// `l t_m^4 / (4 t^2)`, the scale the tandem thickness must stay well below.
    pub fn thin_tandem_bound(&self) -> f64 {
        if self.t == 0.0 {
            f64::INFINITY
        } else {
            self.l * self.t_m.powi(4) / (4.0 * self.t * self.t)
        }
    }

    pub fn regime(&self) -> RegimeFlags {
        let m = &self.margins;
        RegimeFlags {
            tm_squared_below_t: self.t_m * self.t_m < self.t,
            t_much_below_tm: self.t < m.amplitude_ratio * self.t_m,
            tm_much_below_one: self.t_m < m.amplitude_ratio,
            thin_tandem: self.x < m.thin_tandem * self.thin_tandem_bound(),
        }
    }

    /// Shift `l` by less than half a wavelength so that `k` itself satisfies
    /// `2 l k = pi + 2 pi N - mu`.
    pub fn with_resonant_length(mut self) -> Result<Self> {
        let mu = self.response()?.mu;
        let n = ((2.0 * self.l * self.k + mu - PI) / TAU).round();
        self.l = (PI + TAU * n - mu) / (2.0 * self.k);
        self.validate()?;
        Ok(self)
    }

    /// Exact synthetic-mirror response at the configured `x`.
    pub fn response(&self) -> Result<SyntheticMirrorResponse> {
        synthetic_response(self.psi(), &self.mirror()?, &self.membrane()?)
    }
}

/// Dispersive and dissipative constants normalized to `g_00`, as functions
/// of `Phi / Phi0`.
pub fn normalized_couplings(phi_ratio: f64) -> (f64, f64) {
    let q = phi_ratio * phi_ratio;
    let den = (1.0 + q) * (1.0 + q);
    ((1.0 - q) / den, 2.0 * phi_ratio / den)
}

/// `gamma / gamma0 = 1 / (1 + (Phi/Phi0)^2)`.
pub fn normalized_decay(phi_ratio: f64) -> f64 {
    1.0 / (1.0 + phi_ratio * phi_ratio)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub phi: f64,
    pub phi0: f64,
    /// Lorentzian `T = t^2 Phi0 / (Phi^2 + Phi0^2)`.
    pub transmission: f64,
    /// `T` from the exact tandem response.
    pub transmission_exact: f64,
    /// Decay rate through the synthetic mirror, rad/s.
    pub gamma: f64,
    pub gamma0: f64,
    /// Dispersive constant, rad/s per m. Positive at `Phi = 0`.
    pub g_omega0: f64,
    /// Dissipative constant `-1/2 dgamma/dx`, rad/s per m.
    pub g_gamma0: f64,
    pub g_00: f64,
    pub valid_thin_tandem: bool,
    pub regime: RegimeFlags,
}

/// Lorentzian operating point at the configured membrane position, with
/// `omega_c = c k`.
pub fn operating_point(cfg: &MosConfig) -> Result<OperatingPoint> {
    cfg.validate()?;
    let phi = cfg.phi();
    let phi0 = cfg.phi0();
    let ratio = phi / phi0;
    let g_00 = cfg.g00();
    let gamma0 = cfg.gamma0();
    let (gw, gg) = normalized_couplings(ratio);
    let regime = cfg.regime();
    Ok(OperatingPoint {
        phi,
        phi0,
        transmission: cfg.t * cfg.t * phi0 / (phi * phi + phi0 * phi0),
        transmission_exact: cfg.response()?.transmission,
        gamma: gamma0 * normalized_decay(ratio),
        gamma0,
        g_omega0: g_00 * gw,
        g_gamma0: g_00 * gg,
        g_00,
        valid_thin_tandem: regime.thin_tandem,
        regime,
    })
}

/// Membrane positions where `d mu / d psi = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroDispersiveLocus {
    /// Both solutions in `(0, 2 pi)`, ascending.
    pub psi_star: [f64; 2],
    /// `T* = t^2 (1 + r_m^2) / (1 - r^2 r_m^2)`.
    pub t_star: f64,
}

impl ZeroDispersiveLocus {
    /// `(psi* - pi) / 2` for both solutions; close to `-Phi0` and `+Phi0`.
    pub fn half_offsets(&self) -> [f64; 2] {
        self.psi_star.map(|p| 0.5 * (p - PI))
    }
}

fn reflectivities(t: f64, t_m: f64) -> Result<(f64, f64)> {
    let r = ElementSpec::mirror(t)?.r;
    let r_m = ElementSpec::membrane(t_m, 0.0)?.r;
    Ok((r, r_m))
}

/// `cos psi* = -r_m (1 + r^2) / (r (1 + r_m^2))`; exists for `r_m <= r`,
/// the two solutions merging at `pi` when `r_m = r`.
pub fn zero_dispersive_locus(t: f64, t_m: f64) -> Result<ZeroDispersiveLocus> {
    let (r, r_m) = reflectivities(t, t_m)?;
    if r_m > r {
        return Err(Error::NoZeroDispersivePoint(format!(
            "membrane more reflective than the mirror (r_m = {r_m}, r = {r})"
        )));
    }
    let c = r_m * (1.0 + r * r) / (r * (1.0 + r_m * r_m));
    // acos(c) via the stable half-angle form; 1 - c = (r - r_m)(1 - r r_m) / (r (1 + r_m^2))
    let r_minus_rm = (t_m * t_m - t * t) / (r + r_m);
    let one_minus_rrm = (t * t + t_m * t_m - t * t * t_m * t_m) / (1.0 + r * r_m);
    let one_minus_c = (r_minus_rm * one_minus_rrm / (r * (1.0 + r_m * r_m))).max(0.0);
    let half = 2.0 * (0.5 * one_minus_c).sqrt().asin();
    let a = if c > 0.5 {
        half
    } else {
        c.clamp(-1.0, 1.0).acos()
    };
    Ok(ZeroDispersiveLocus {
        psi_star: [PI - a, PI + a],
        t_star: t * t * (1.0 + r_m * r_m) / (1.0 - r * r * r_m * r_m),
    })
}

/// Exact `|dgamma/dx|` at the zero-dispersive point:
/// `(ck/l)(t^2/t_m^2) 2 r_m (1 + r_m^2)/(1 - r_m^2 r^2) sqrt((r^2 - r_m^2)/(1 - r_m^2 r^2))`.
pub fn dissipative_constant_exact(t: f64, t_m: f64, k: f64, l: f64) -> Result<f64> {
    let (r, r_m) = reflectivities(t, t_m)?;
    if r_m > r {
        return Err(Error::NoZeroDispersivePoint(format!(
            "membrane more reflective than the mirror (r_m = {r_m}, r = {r})"
        )));
    }
    let one_minus = 1.0 - r_m * r_m * r * r;
    let r2_minus = (t_m * t_m - t * t).max(0.0);
    Ok(
        SPEED_OF_LIGHT * k / l * (t * t) / (t_m * t_m) * 2.0 * r_m * (1.0 + r_m * r_m) / one_minus
            * (r2_minus / one_minus).sqrt(),
    )
}

/// Leading-order form `(ck/l)(t^2/t_m^4) 2 r_m (1 + r_m^2)`.
pub fn dissipative_constant_asymptotic(t: f64, t_m: f64, k: f64, l: f64) -> Result<f64> {
    let (_, r_m) = reflectivities(t, t_m)?;
    Ok(SPEED_OF_LIGHT * k / l * (t * t) / t_m.powi(4) * 2.0 * r_m * (1.0 + r_m * r_m))
}

/// Finite-thickness forms next to their thin-tandem (`x -> 0`) counterparts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactCorrections {
    /// `mu' = d mu / d(kx)`.
    pub mu_prime: f64,
    /// Dispersive constant including the `1 / (1 + x mu'/2l)` factor.
    pub g_omega_exact: f64,
    /// `-omega_c mu' / 2l`, the thin-tandem dispersive constant.
    pub g_omega_thin: f64,
    /// `c t_m^2 / (2 (l t_m^2 / T + x))`.
    pub gamma_exact: f64,
    /// `c T / 2l`.
    pub gamma_thin: f64,
    pub dgamma_dx_exact: f64,
    /// `(c / 2l) dT/dx`.
    pub dgamma_dx_thin: f64,
}

/// Corrections for the energy stored between mirror and membrane.
///
/// The dispersive sign follows the closed-form convention (positive at
/// `Phi = 0`); with the resonance condition `2lk = pi + 2 pi N - mu(kx)` it
/// equals `+d omega_c / dx`.
pub fn exact_corrections(cfg: &MosConfig) -> Result<ExactCorrections> {
    cfg.validate()?;
    let resp = cfg.response()?;
    let c = SPEED_OF_LIGHT;
    let (l, x, k) = (cfg.l, cfg.x, cfg.k);
    let tm2 = cfg.t_m * cfg.t_m;
    let omega_c = cfg.omega_c();
    let mu_prime = 2.0 * resp.dmu_dpsi;
    let g_omega_thin = -omega_c * mu_prime / (2.0 * l);
    let g_omega_exact = g_omega_thin / (1.0 + x * mu_prime / (2.0 * l));

    let big_t = resp.transmission;
    let dt_dx = 2.0 * k * resp.dt_dpsi;
    let gamma_thin = c * big_t / (2.0 * l);
    let dgamma_dx_thin = c / (2.0 * l) * dt_dx;
    let (gamma_exact, dgamma_dx_exact) = if big_t == 0.0 {
        (0.0, 0.0)
    } else {
        let stored = l * tm2 / big_t + x;
        (
            c * tm2 / (2.0 * stored),
            c * tm2 * (l * tm2 / (big_t * big_t) * dt_dx - 1.0) / (2.0 * stored * stored),
        )
    };
    Ok(ExactCorrections {
        mu_prime,
        g_omega_exact,
        g_omega_thin,
        gamma_exact,
        gamma_thin,
        dgamma_dx_exact,
        dgamma_dx_thin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortSetpoint {
    /// `lambda t_m^2 / (8 pi)`, offset from `x_tilde` giving `Phi = Phi0`.
    pub delta_x: f64,
    /// `2 t^2 / t_m^2`, synthetic-mirror transmission at `Phi = Phi0`.
    pub t_sym: f64,
    /// `pi / T_sym`.
    pub finesse: f64,
}

pub fn two_port_setpoint(cfg: &MosConfig) -> Result<TwoPortSetpoint> {
    cfg.validate()?;
    let tm2 = cfg.t_m * cfg.t_m;
    let t_sym = 2.0 * cfg.t * cfg.t / tm2;
    Ok(TwoPortSetpoint {
        delta_x: cfg.lambda() * tm2 / (8.0 * PI),
        t_sym,
        finesse: PI / t_sym,
    })
}

fn resonance_residual(
    cfg: &MosConfig,
    mirror: &ElementSpec,
    membrane: &ElementSpec,
    n: i64,
    k: f64,
) -> f64 {
    let psi = 2.0 * k * cfg.x + cfg.phi_r;
    match synthetic_response(psi, mirror, membrane) {
        Ok(resp) => 2.0 * cfg.l * k + resp.mu - PI - TAU * n as f64,
        Err(_) => f64::NAN,
    }
}

/// Mode order `N` of the resonance nearest `k_guess`.
pub fn resonance_order(cfg: &MosConfig, k_guess: f64) -> Result<i64> {
    let mu = synthetic_response(
        2.0 * k_guess * cfg.x + cfg.phi_r,
        &cfg.mirror()?,
        &cfg.membrane()?,
    )?
    .mu;
    Ok(((2.0 * cfg.l * k_guess + mu - PI) / TAU).round() as i64)
}

/// Cavity resonance `k_c` of order `n`, solving `2 l k = pi + 2 pi n - mu(k x)`
/// by bracketing. Needs `r_m < r` so that `mu` stays within `(-pi/2, pi/2)`.
pub fn resonance_wavevector(cfg: &MosConfig, n: i64) -> Result<f64> {
    cfg.validate()?;
    let mirror = cfg.mirror()?;
    let membrane = cfg.membrane()?;
    if membrane.r >= mirror.r {
        return Err(Error::InvalidConfig(
            "resonance solver needs a membrane less reflective than the mirror".into(),
        ));
    }
    let two_l = 2.0 * cfg.l;
    let lo = (0.5 * PI + TAU * n as f64) / two_l;
    let hi = (1.5 * PI + TAU * n as f64) / two_l;
    let f = |k: f64| resonance_residual(cfg, &mirror, &membrane, n, k);
    let steps = 64;
    let found = roots::bracket_roots(f, lo, hi, steps);
    found
        .into_iter()
        .min_by(|a, b| (a - cfg.k).abs().total_cmp(&(b - cfg.k).abs()))
        .ok_or(Error::NoRootInWindow { lo, hi })
}
