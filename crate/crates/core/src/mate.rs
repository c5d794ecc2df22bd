//! Membrane at the edge: a one-sided cavity of length `l` with the membrane
//! a distance `x` from the input mirror.
//!
//! Resonances solve `cos(kl + phi_r) + r_m cos(2kx - kl) = 0`. Writing
//! `u = 2kx - kl` and `v = kl + phi_r`, the roots also satisfy
//! `k (2x - l) = s acos(-cos v / r_m) + 2 pi N` for a sign `s` and integer `N`.
//! Away from avoided crossings each root belongs to the short `x`
//! subcavity (`cos(2kx + phi_r)` near `-1`) or to the long `l - x` part.

use std::f64::consts::{PI, TAU};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::mos::{normalized_couplings, MosConfig};
use crate::numdiff::richardson_central;
use crate::roots::{bisect, bracket_roots};
use crate::scattering::{reduce_phase, ElementSpec};

/// Sign in front of `acos` in the explicit solution family, or of the
/// square root in the `(dk/dx)^-1` expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Branch::Minus
        } else {
            Branch::Plus
        }
    }
}

/// Subcavity a mode is derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeFamily {
    /// Between input mirror and membrane.
    Short,
    /// Between membrane and end mirror.
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MateConfig {
    /// Cavity length, m.
    pub l: f64,
    /// Membrane-input-mirror distance, m.
    pub x: f64,
    /// Wavevector of interest, 1/m.
    pub k: f64,
    /// Input-mirror amplitude transmission.
    pub t: f64,
    /// Membrane amplitude transmission.
    pub t_m: f64,
    /// Membrane reflection phase, rad.
    pub phi_r: f64,
    /// Explicit-family sign.
    pub branch: Branch,
    /// Explicit-family order.
    pub n: i64,
}

impl MateConfig {
    pub fn new(l: f64, x: f64, lambda: f64, t: f64, t_m: f64, phi_r: f64) -> Result<Self> {
        let cfg = Self {
            l,
            x,
            k: TAU / lambda,
            t,
            t_m,
            phi_r,
            branch: Branch::Minus,
            n: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_x(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.l.is_finite()
            && self.l > 0.0
            && self.x > 0.0
            && self.x < self.l
            && self.k.is_finite()
            && self.k > 0.0
            && (0.0..=1.0).contains(&self.t)
            && self.t_m > 0.0
            && self.t_m <= 1.0
            && self.phi_r.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "MATE needs 0 < x < l, k > 0, 0 <= t <= 1, 0 < t_m <= 1; got {self:?}"
            )))
        }
    }

    pub fn r_m(&self) -> f64 {
        ElementSpec::membrane(self.t_m, self.phi_r)
            .map(|m| m.r)
            .unwrap_or(0.0)
    }

    pub fn omega_c(&self) -> f64 {
        SPEED_OF_LIGHT * self.k
    }

    /// Free spectral range in wavevector, `pi / l`.
    pub fn fsr_k(&self) -> f64 {
        PI / self.l
    }

    /// `2kx + phi_r` at wavevector `k`.
    pub fn psi_at(&self, k: f64) -> f64 {
        2.0 * k * self.x + self.phi_r
    }

    /// Small detuning `Phi = (psi - pi) / 2`, reduced to `[-pi/2, pi/2)`.
    pub fn phi_at(&self, k: f64) -> f64 {
        0.5 * reduce_phase(self.psi_at(k) - PI)
    }

    /// `l t_m^2 / 4`: the membrane counts as being at the edge for `x` well below it.
    pub fn edge_bound(&self) -> f64 {
        0.25 * self.l * self.t_m * self.t_m
    }
}

/// `cos(kl + phi_r) + r_m cos(2kx - kl)`.
pub fn mate_residual(cfg: &MateConfig, k: f64) -> f64 {
    (k * cfg.l + cfg.phi_r).cos() + cfg.r_m() * (2.0 * k * cfg.x - k * cfg.l).cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MateResonance {
    pub k: f64,
    pub residual: f64,
    /// Explicit-family sign reproducing this root.
    pub branch: Branch,
    /// Explicit-family order reproducing this root.
    pub n: i64,
    /// Sign in front of the square root of `(dk/dx)^-1`.
    pub slope_branch: Branch,
    pub family: ModeFamily,
}

/// Attribute a root to its explicit-family `(s, N)`, derivative branch and subcavity.
pub fn classify_resonance(cfg: &MateConfig, k: f64) -> MateResonance {
    let r_m = cfg.r_m();
    let u = k * (2.0 * cfg.x - cfg.l);
    let v = k * cfg.l + cfg.phi_r;
    let a = if r_m > 0.0 {
        (-v.cos() / r_m).clamp(-1.0, 1.0).acos()
    } else {
        0.5 * PI
    };
    let mismatch = |s: f64| reduce_phase(u - s * a).abs();
    let s = if mismatch(1.0) <= mismatch(-1.0) {
        1.0
    } else {
        -1.0
    };
    let n = ((u - s * a) / TAU).round() as i64;
    let slope = -(v.sin() * u.sin()).signum();
    let short = (0.5 * cfg.psi_at(k)).cos().abs();
    let long = (0.5 * (2.0 * k * (cfg.l - cfg.x) + cfg.phi_r)).cos().abs();
    MateResonance {
        k,
        residual: mate_residual(cfg, k),
        branch: Branch::from_sign(s),
        n,
        slope_branch: Branch::from_sign(slope),
        family: if short <= long {
            ModeFamily::Short
        } else {
            ModeFamily::Long
        },
    }
}

fn grid_steps(cfg: &MateConfig, k_lo: f64, k_hi: f64) -> usize {
    let step = cfg.fsr_k() / 200.0;
    (((k_hi - k_lo) / step).ceil() as usize).max(16)
}

fn check_window(k_lo: f64, k_hi: f64) -> Result<()> {
    if k_lo.is_finite() && k_hi.is_finite() && 0.0 < k_lo && k_lo < k_hi {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "bad wavevector window [{k_lo}, {k_hi}]"
        )))
    }
}

/// Every resonance in `[k_lo, k_hi]`, by sign-change bracketing of the
/// residual on a grid of at most a two-hundredth of a free spectral range.
pub fn mate_resonances(cfg: &MateConfig, k_lo: f64, k_hi: f64) -> Result<Vec<MateResonance>> {
    cfg.validate()?;
    check_window(k_lo, k_hi)?;
    let found = bracket_roots(
        |k| mate_residual(cfg, k),
        k_lo,
        k_hi,
        grid_steps(cfg, k_lo, k_hi),
    );
    if found.is_empty() {
        return Err(Error::NoRootInWindow { lo: k_lo, hi: k_hi });
    }
    Ok(found
        .into_iter()
        .map(|k| classify_resonance(cfg, k))
        .collect())
}

/// `k (2x - l) - s acos(-cos(kl + phi_r) / r_m) - 2 pi N`; NaN where the
/// arccosine is undefined.
pub fn explicit_family_residual(cfg: &MateConfig, branch: Branch, n: i64, k: f64) -> f64 {
    let mut arg = -(k * cfg.l + cfg.phi_r).cos() / cfg.r_m();
    if arg.abs() > 1.0 && arg.abs() < 1.0 + 1e-12 {
        arg = arg.signum();
    }
    if !(-1.0..=1.0).contains(&arg) {
        return f64::NAN;
    }
    k * (2.0 * cfg.x - cfg.l) - branch.sign() * arg.acos() - TAU * n as f64
}

/// Intervals of `[k_lo, k_hi]` on which `|cos(kl + phi_r)| <= r_m`.
fn explicit_domain(cfg: &MateConfig, k_lo: f64, k_hi: f64) -> Vec<(f64, f64)> {
    let edge = cfg.r_m().clamp(-1.0, 1.0).acos();
    let j_lo = ((k_lo * cfg.l + cfg.phi_r) / PI).floor() as i64 - 1;
    let j_hi = ((k_hi * cfg.l + cfg.phi_r) / PI).ceil() as i64;
    (j_lo..=j_hi)
        .filter_map(|j| {
            let a = ((j as f64 * PI + edge - cfg.phi_r) / cfg.l).max(k_lo);
            let b = (((j + 1) as f64 * PI - edge - cfg.phi_r) / cfg.l).min(k_hi);
            (a < b).then_some((a, b))
        })
        .collect()
}

/// Roots of the explicit family over all `(s, N)` reachable in the window,
/// sorted by `k`. Independent of [`mate_resonances`].
pub fn explicit_family_roots(
    cfg: &MateConfig,
    k_lo: f64,
    k_hi: f64,
) -> Result<Vec<(f64, Branch, i64)>> {
    cfg.validate()?;
    check_window(k_lo, k_hi)?;
    if cfg.r_m() == 0.0 {
        return Err(Error::InvalidConfig("explicit family needs r_m > 0".into()));
    }
    let (u1, u2) = (k_lo * (2.0 * cfg.x - cfg.l), k_hi * (2.0 * cfg.x - cfg.l));
    let (u_min, u_max) = (u1.min(u2), u1.max(u2));
    let n_lo = ((u_min - PI) / TAU).floor() as i64;
    let n_hi = ((u_max + PI) / TAU).ceil() as i64;
    let mut out = Vec::new();
    for (a, b) in explicit_domain(cfg, k_lo, k_hi) {
        let steps = grid_steps(cfg, a, b);
        for branch in [Branch::Plus, Branch::Minus] {
            for n in n_lo..=n_hi {
                let f = |k: f64| explicit_family_residual(cfg, branch, n, k);
                out.extend(
                    bracket_roots(f, a, b, steps)
                        .into_iter()
                        .map(|k| (k, branch, n)),
                );
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 * b.0);
    Ok(out)
}

/// Resonance nearest `k_guess` within a quarter free spectral range.
pub fn resonance_near(cfg: &MateConfig, k_guess: f64) -> Result<f64> {
    let w = 0.25 * cfg.fsr_k();
    let (lo, hi) = (k_guess - w, k_guess + w);
    bracket_roots(|k| mate_residual(cfg, k), lo, hi, 100)
        .into_iter()
        .min_by(|a, b| (a - k_guess).abs().total_cmp(&(b - k_guess).abs()))
        .ok_or(Error::NoRootInWindow { lo, hi })
}

fn resonance_tight(cfg: &MateConfig, k_guess: f64) -> Result<f64> {
    let w = cfg.fsr_k() / 64.0;
    let f = |k: f64| mate_residual(cfg, k);
    let (lo, hi) = (k_guess - w, k_guess + w);
    if f(lo).signum() != f(hi).signum() {
        let found = bracket_roots(f, lo, hi, 8);
        if let Some(k) = found
            .into_iter()
            .min_by(|a, b| (a - k_guess).abs().total_cmp(&(b - k_guess).abs()))
        {
            return Ok(k);
        }
    }
    resonance_near(cfg, k_guess)
}

/// Closed-form `dk/dx` at a resonance:
/// `(dk/dx)^-1 = (l/2k) [1 - 2x/l +- r_m^-1 sqrt(1 + t_m^2 cos^2 u / (1 - cos^2 u))]`,
/// the sign being `-sgn(sin u sin v)`.
pub fn mate_dk_dx(cfg: &MateConfig, k_c: f64) -> Result<f64> {
    cfg.validate()?;
    let r_m = cfg.r_m();
    if r_m == 0.0 {
        return Ok(0.0);
    }
    let res = mate_residual(cfg, k_c);
    if res.abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "k = {k_c} is not a resonance (residual {res:e})"
        )));
    }
    let u = k_c * (2.0 * cfg.x - cfg.l);
    let v = k_c * cfg.l + cfg.phi_r;
    let (sin_u, cos_u) = u.sin_cos();
    let sin2 = sin_u * sin_u;
    if sin2 == 0.0 {
        return Err(Error::BranchAmbiguity { k: k_c });
    }
    let root = (1.0 + cfg.t_m * cfg.t_m * cos_u * cos_u / sin2).sqrt() / r_m;
    let sign = -(v.sin() * sin_u).signum();
    let inv = cfg.l / (2.0 * k_c) * (1.0 - 2.0 * cfg.x / cfg.l + sign * root);
    Ok(1.0 / inv)
}

/// Dispersive constant `-c dk/dx` at a resonance, rad/s per m. Positive for
/// modes of the short subcavity, negative for the long one.
pub fn mate_dispersive_constant(cfg: &MateConfig, k_c: f64) -> Result<f64> {
    Ok(-SPEED_OF_LIGHT * mate_dk_dx(cfg, k_c)?)
}

/// `dk_c/dx` from re-solving the resonance at `x +- h` (one Richardson step).
pub fn mate_dk_dx_numeric(cfg: &MateConfig, k_c: f64, h: f64) -> Result<f64> {
    let failure = std::cell::Cell::new(None);
    let root_at = |x: f64| match resonance_tight(&cfg.with_x(x), k_c) {
        Ok(k) => k,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let d = richardson_central(root_at, cfg.x, h);
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

/// Exact and reduced decay rate and its slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MateDecay {
    /// `(c t^2 t_m^2 / 2) / (x t_m^2 + (l - x) B)`, `B = 1 + r_m^2 + 2 r_m cos psi`.
    pub gamma_mate: f64,
    pub dgamma_dx: f64,
    /// `(ck/l) 2 t^2 t_m^2 sin psi / B^2`.
    pub dgamma_dx_reduced: f64,
    /// `-1/2 dgamma/dx`.
    pub g_gamma0: f64,
    /// `4x / (l t_m^2)`, the size of the edge correction.
    pub edge_correction: f64,
    /// Whether `t << t_m` holds (`t < 0.2 t_m`).
    pub regime_ok: bool,
}

fn decay_at_psi(cfg: &MateConfig, k: f64, psi: f64) -> MateDecay {
    let c = SPEED_OF_LIGHT;
    let (l, x) = (cfg.l, cfg.x);
    let r_m = cfg.r_m();
    let t2 = cfg.t * cfg.t;
    let tm2 = cfg.t_m * cfg.t_m;
    let one_minus_rm = tm2 / (1.0 + r_m);
    let half_cos = (0.5 * psi).cos();
    let big_b = one_minus_rm * one_minus_rm + 4.0 * r_m * half_cos * half_cos;
    let sin_psi = psi.sin();

    let stored = x * tm2 + (l - x) * big_b;
    let stored_dx = tm2 - big_b - (l - x) * 4.0 * k * r_m * sin_psi;
    let pref = 0.5 * c * t2 * tm2;
    let dgamma_dx = -pref * stored_dx / (stored * stored);
    MateDecay {
        gamma_mate: pref / stored,
        dgamma_dx,
        dgamma_dx_reduced: c * k / l * 2.0 * t2 * tm2 * sin_psi / (big_b * big_b),
        g_gamma0: -0.5 * dgamma_dx,
        edge_correction: 4.0 * x / (l * tm2),
        regime_ok: cfg.t < 0.2 * cfg.t_m,
    }
}

/// Decay through the input mirror at wavevector `k` and the configured `x`.
pub fn mate_exact_decay(cfg: &MateConfig, k: f64) -> Result<MateDecay> {
    cfg.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidConfig(format!("k must be positive, got {k}")));
    }
    Ok(decay_at_psi(cfg, k, cfg.psi_at(k)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MateZeroDispersive {
    /// `+-acos(r_m)/2`, where `cos(2kx + phi_r) = -r_m`.
    pub phi_star: [f64; 2],
    /// `+-t_m / 2`.
    pub phi_star_estimate: [f64; 2],
    /// `(omega_c / l) t^2 / t_m`.
    pub g_gamma0: f64,
    /// `c t^2 / 2l`.
    pub gamma_mate: f64,
    /// MOS dissipative constant at its operating point over `g_gamma0`: `2 / t_m^3`.
    pub ratio_to_mos: f64,
    /// Exact `|g_gamma0|` at `+phi_star`.
    pub g_gamma0_exact: f64,
    /// Exact decay rate at `phi_star`.
    pub gamma_mate_exact: f64,
    /// Whether `x` is below a hundredth of `l t_m^2 / 4`.
    pub at_edge: bool,
}

pub fn mate_zero_dispersive(cfg: &MateConfig) -> Result<MateZeroDispersive> {
    cfg.validate()?;
    let r_m = cfg.r_m();
    let half = 0.5 * r_m.clamp(-1.0, 1.0).acos();
    let t2 = cfg.t * cfg.t;
    let omega_c = cfg.omega_c();
    let g_gamma0 = omega_c / cfg.l * t2 / cfg.t_m;
    let mos = MosConfig::new(cfg.l, TAU / cfg.k, cfg.t, cfg.t_m)?;
    let g_mos = mos.g00() * normalized_couplings(1.0).1;
    let exact = decay_at_psi(cfg, cfg.k, PI + 2.0 * half);
    Ok(MateZeroDispersive {
        phi_star: [-half, half],
        phi_star_estimate: [-0.5 * cfg.t_m, 0.5 * cfg.t_m],
        g_gamma0,
        gamma_mate: SPEED_OF_LIGHT * t2 / (2.0 * cfg.l),
        ratio_to_mos: g_mos / g_gamma0,
        g_gamma0_exact: exact.g_gamma0.abs(),
        gamma_mate_exact: exact.gamma_mate,
        at_edge: cfg.x < 0.01 * cfg.edge_bound(),
    })
}

/// A point where a tracked mode stops moving with `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionlessPoint {
    pub x: f64,
    pub k: f64,
    /// `(2kx + phi_r - pi) / 2`, reduced.
    pub phi: f64,
}

/// Follow the resonance nearest `cfg.k` while the membrane moves over
/// `x +- phi_span / k`, and return every point where the numerically
/// re-solved `dk_c/dx` changes sign, refined by bisection in `x`.
pub fn mate_track_zero_dispersive(
    cfg: &MateConfig,
    phi_span: f64,
    steps: usize,
    h: f64,
) -> Result<Vec<DispersionlessPoint>> {
    cfg.validate()?;
    let steps = steps.max(4);
    let k0 = resonance_near(cfg, cfg.k)?;
    let dx = phi_span / k0;
    let xs: Vec<f64> = (0..=steps)
        .map(|i| cfg.x - dx + 2.0 * dx * i as f64 / steps as f64)
        .collect();
    let mid = steps / 2;
    let mut ks = vec![0.0; xs.len()];
    ks[mid] = resonance_near(&cfg.with_x(xs[mid]), k0)?;
    for i in (0..mid).rev() {
        ks[i] = resonance_tight(&cfg.with_x(xs[i]), ks[i + 1])?;
    }
    for i in mid + 1..xs.len() {
        ks[i] = resonance_tight(&cfg.with_x(xs[i]), ks[i - 1])?;
    }
    let slope = |x: f64, k_guess: f64| -> Result<(f64, f64)> {
        let at = cfg.with_x(x);
        let k = resonance_tight(&at, k_guess)?;
        Ok((mate_dk_dx_numeric(&at, k, h)?, k))
    };
    let mut slopes = Vec::with_capacity(xs.len());
    for (x, k) in xs.iter().zip(&ks) {
        slopes.push(slope(*x, *k)?.0);
    }
    let mut out = Vec::new();
    for i in 1..xs.len() {
        if slopes[i - 1].signum() == slopes[i].signum() {
            continue;
        }
        let (x_lo, x_hi, k_lo, k_hi) = (xs[i - 1], xs[i], ks[i - 1], ks[i]);
        let guess = |x: f64| k_lo + (k_hi - k_lo) * (x - x_lo) / (x_hi - x_lo);
        let f = |x: f64| slope(x, guess(x)).map(|s| s.0).unwrap_or(f64::NAN);
        let x = bisect(f, x_lo, x_hi);
        let k = resonance_tight(&cfg.with_x(x), guess(x))?;
        let at = cfg.with_x(x);
        out.push(DispersionlessPoint {
            x,
            k,
            phi: at.phi_at(k),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff::relative_error;
    use crate::scattering::synthetic_response;
    use proptest::prelude::*;

    const LAMBDA: f64 = 0.85e-6;

    fn paper_cfg() -> MateConfig {
        MateConfig::new(1e-4, 1e-6, LAMBDA, 0.014, 0.1, PI).unwrap()
    }

    /// Configuration with `l` close to `l_approx` and `phi_r` chosen so that
    /// `k` is a resonance with `u = 2kx - kl` and `v = kl + phi_r` as given (mod 2 pi).
    fn with_phases(k: f64, x: f64, l_approx: f64, t_m: f64, u: f64, v: f64) -> MateConfig {
        let m = ((k * (2.0 * x - l_approx) - u) / TAU).round();
        let l = 2.0 * x - (u + TAU * m) / k;
        MateConfig {
            l,
            x,
            k,
            t: 0.014,
            t_m,
            phi_r: v - k * l,
            branch: Branch::Minus,
            n: 0,
        }
    }

    /// `phi_r` putting `psi = pi + 2 phi` at wavevector `k`.
    fn at_detuning(cfg: &MateConfig, k: f64, phi: f64) -> MateConfig {
        MateConfig {
            phi_r: PI + 2.0 * phi - 2.0 * k * cfg.x,
            ..*cfg
        }
    }

    #[test]
    fn bracketed_root_near_reference_wavevector() {
        let cfg = paper_cfg();
        let res = mate_resonances(&cfg, 7.38e6, 7.40e6).unwrap();
        assert!(!res.is_empty());
        for r in &res {
            assert!(r.residual.abs() < 1e-12);
            assert_eq!(r.residual, mate_residual(&cfg, r.k));
        }
    }

    #[test]
    fn opaque_membrane_decouples_subcavities() {
        let t_m = 1e-3;
        let cfg = MateConfig::new(1e-4, 3e-6, LAMBDA, 0.014, t_m, 0.4).unwrap();
        let res =
            mate_resonances(&cfg, cfg.k - 20.0 * cfg.fsr_k(), cfg.k + 20.0 * cfg.fsr_k()).unwrap();
        assert!(res.len() > 30);
        for r in res {
            let short = 1.0 + (2.0 * r.k * cfg.x + cfg.phi_r).cos();
            let long = 1.0 + (2.0 * r.k * (cfg.l - cfg.x) + cfg.phi_r).cos();
            assert!(short.min(long) < 10.0 * t_m * t_m, "k = {}", r.k);
        }
    }

    #[test]
    fn transparent_membrane_leaves_bare_cavity() {
        let cfg = MateConfig::new(1e-4, 1e-6, LAMBDA, 0.014, 1.0, 0.3).unwrap();
        let res = mate_resonances(&cfg, cfg.k - cfg.fsr_k(), cfg.k + cfg.fsr_k()).unwrap();
        assert_eq!(res.len(), 2);
        for r in res {
            assert!((r.k * cfg.l + cfg.phi_r).cos().abs() < 1e-12);
            assert_eq!(mate_dispersive_constant(&cfg, r.k).unwrap(), 0.0);
        }
    }

    #[test]
    fn empty_window_is_an_error() {
        let cfg = paper_cfg();
        let res = mate_resonances(&cfg, 7.38e6, 7.38e6 + 1e-3);
        assert!(matches!(res, Err(Error::NoRootInWindow { .. })));
        assert!(mate_resonances(&cfg, 2.0, 1.0).is_err());
    }

    #[test]
    fn roots_lie_on_explicit_family() {
        let cfg = paper_cfg();
        let (lo, hi) = (cfg.k - 0.5 * cfg.fsr_k(), cfg.k + 0.5 * cfg.fsr_k());
        let res = mate_resonances(&cfg, lo, hi).unwrap();
        let exp = explicit_family_roots(&cfg, lo, hi).unwrap();
        assert_eq!(res.len(), exp.len());
        for (r, (k, branch, n)) in res.iter().zip(&exp) {
            assert!(relative_error(r.k, *k) < 1e-10);
            assert_eq!(r.branch, *branch);
            assert_eq!(r.n, *n);
        }
    }

    #[test]
    fn maximal_dispersive_constant_at_quadrature() {
        let k = TAU / LAMBDA;
        let t_m = 0.1;
        let cfg = with_phases(k, 5e-9, 1e-3, t_m, -0.5 * PI, -0.5 * PI);
        assert!(mate_residual(&cfg, k).abs() < 1e-12);
        let rm = cfg.r_m();
        let g = mate_dispersive_constant(&cfg, k).unwrap();
        let direct = cfg.omega_c() / (cfg.x + cfg.l * (1.0 - rm) / (2.0 * rm));
        assert!(relative_error(g, direct) < 1e-9);
        let approx = 4.0 * cfg.omega_c() / (cfg.l * t_m * t_m);
        assert!(relative_error(g, approx) < 4.0 * cfg.x / (cfg.l * t_m * t_m) + t_m * t_m);
        assert_eq!(classify_resonance(&cfg, k).slope_branch, Branch::Minus);
    }

    #[test]
    fn dispersive_constant_at_half_quadrature() {
        let k = TAU / LAMBDA;
        let t_m = 0.1;
        let rm = (1.0f64 - t_m * t_m).sqrt();
        let v = -(-rm / 2f64.sqrt()).acos();
        let cfg = with_phases(k, 5e-9, 1e-3, t_m, -0.25 * PI, v);
        assert!(mate_residual(&cfg, k).abs() < 1e-12);
        let g = mate_dispersive_constant(&cfg, k).unwrap();
        let approx = cfg.omega_c() / (cfg.x + 0.5 * cfg.l * t_m * t_m);
        assert!(relative_error(g, approx) < 2.0 * cfg.x / (cfg.l * t_m * t_m) + t_m * t_m);

        // dissipation is small next to dispersion here
        let decay = mate_exact_decay(&cfg, k).unwrap();
        let ratio = (decay.g_gamma0 / g).abs();
        let expected = cfg.t * cfg.t / (t_m * t_m);
        assert!(ratio < 0.1);
        assert!(relative_error(ratio, expected) < 0.25);
    }

    #[test]
    fn ambiguous_branch_on_the_singular_locus() {
        let k = TAU / LAMBDA;
        let t_m = 0.1;
        let rm = (1.0f64 - t_m * t_m).sqrt();
        let l = 1e-4;
        let cfg = MateConfig {
            l,
            x: 0.5 * l,
            k,
            t: 0.014,
            t_m,
            phi_r: (-rm).acos() - k * l,
            branch: Branch::Plus,
            n: 0,
        };
        assert!(mate_residual(&cfg, k).abs() < 1e-9);
        assert!(matches!(
            mate_dk_dx(&cfg, k),
            Err(Error::BranchAmbiguity { .. })
        ));
    }

    #[test]
    fn non_resonant_wavevector_rejected() {
        let cfg = paper_cfg();
        let k = mate_resonances(&cfg, cfg.k - cfg.fsr_k(), cfg.k + cfg.fsr_k()).unwrap()[0].k;
        assert!(mate_dk_dx(&cfg, k + 0.1 * cfg.fsr_k()).is_err());
    }

    #[test]
    fn numeric_slope_matches_closed_form() {
        let cfg = paper_cfg();
        let res =
            mate_resonances(&cfg, cfg.k - 2.0 * cfg.fsr_k(), cfg.k + 2.0 * cfg.fsr_k()).unwrap();
        for r in res {
            let closed = mate_dk_dx(&cfg, r.k).unwrap();
            let numeric = mate_dk_dx_numeric(&cfg, r.k, 1e-12).unwrap();
            assert!(relative_error(numeric, closed) < 1e-4);
        }
    }

    #[test]
    fn sign_follows_mode_family() {
        // window around the short-subcavity resonance psi = pi
        let cfg = MateConfig::new(1e-4, 1e-6, LAMBDA, 0.014, 0.1, PI).unwrap();
        let k_star = 2.0 * PI / (2.0 * cfg.x);
        let span = 0.4 / cfg.x;
        let res = mate_resonances(&cfg, k_star - span, k_star + span).unwrap();
        let mut short = 0;
        let mut long = 0;
        for r in &res {
            let g = mate_dispersive_constant(&cfg, r.k).unwrap();
            match r.family {
                ModeFamily::Short => {
                    short += 1;
                    assert!(g > 0.0);
                    assert_eq!(r.slope_branch, Branch::Minus);
                }
                ModeFamily::Long => {
                    long += 1;
                    assert!(g < 0.0);
                    assert_eq!(r.slope_branch, Branch::Plus);
                }
            }
        }
        assert!(short >= 1 && long >= 10);
    }

    #[test]
    fn zero_dispersive_summary() {
        let z = mate_zero_dispersive(&paper_cfg()).unwrap();
        assert_eq!(z.phi_star_estimate, [-0.05, 0.05]);
        assert!(relative_error(z.phi_star[1], 0.05) < 1e-2);
        assert_eq!(z.phi_star[0], -z.phi_star[1]);
        assert!(relative_error(z.ratio_to_mos, 2000.0) < 1e-10);
        assert!(relative_error(z.gamma_mate_exact, z.gamma_mate) < 1e-12);
        assert!(!z.at_edge);
    }

    #[test]
    fn tracked_mode_stops_at_the_predicted_detuning() {
        let base = paper_cfg();
        let k0 = resonance_near(&base, base.k).unwrap();
        let turns = ((2.0 * k0 * base.x + base.phi_r - PI) / TAU).round();
        let x0 = (PI + TAU * turns - base.phi_r) / (2.0 * k0);
        let cfg = base.with_x(x0).with_k(k0);
        let points = mate_track_zero_dispersive(&cfg, 0.3, 600, 1e-12).unwrap();
        assert_eq!(points.len(), 2);
        let expected = 0.5 * cfg.r_m().acos();
        let mut phis: Vec<f64> = points.iter().map(|p| p.phi).collect();
        phis.sort_by(f64::total_cmp);
        assert!(relative_error(phis[0], -expected) < 1e-6);
        assert!(relative_error(phis[1], expected) < 1e-6);
        for p in &points {
            assert!(relative_error(p.phi.abs(), 0.5 * cfg.t_m) < 1e-2);
            let at = cfg.with_x(p.x);
            let here = mate_dk_dx_numeric(&at, p.k, 1e-12).unwrap();
            let step = 0.01 / p.k;
            let before = mate_dk_dx_numeric(
                &cfg.with_x(p.x - step),
                resonance_near(&cfg.with_x(p.x - step), p.k).unwrap(),
                1e-12,
            )
            .unwrap();
            let after = mate_dk_dx_numeric(
                &cfg.with_x(p.x + step),
                resonance_near(&cfg.with_x(p.x + step), p.k).unwrap(),
                1e-12,
            )
            .unwrap();
            assert!(before.signum() != after.signum());
            assert!(here.abs() < 1e-3 * before.abs().max(after.abs()));
        }
    }

    #[test]
    fn edge_decay_matches_synthetic_mirror_at_transparency() {
        let cfg = MateConfig::new(1e-2, 1e-8, LAMBDA, 0.014, 0.1, 0.0).unwrap();
        let at = at_detuning(&cfg, cfg.k, 0.0);
        let decay = mate_exact_decay(&at, cfg.k).unwrap();
        let m = ElementSpec::mirror(cfg.t).unwrap();
        let mem = ElementSpec::membrane(cfg.t_m, 0.0).unwrap();
        let big_t = synthetic_response(PI, &m, &mem).unwrap().transmission;
        let synthetic = SPEED_OF_LIGHT * big_t / (2.0 * cfg.l);
        let bound = 2.0 * cfg.t * cfg.t / (cfg.t_m * cfg.t_m) + decay.edge_correction;
        assert!(relative_error(decay.gamma_mate, synthetic) < bound);
    }

    #[test]
    fn decay_at_zero_dispersive_point() {
        for x in [1e-8, 1e-6, 3e-5] {
            let cfg = MateConfig::new(1e-4, x, LAMBDA, 0.014, 0.1, 0.0).unwrap();
            let phi = 0.5 * cfg.r_m().acos();
            let decay = mate_exact_decay(&at_detuning(&cfg, cfg.k, phi), cfg.k).unwrap();
            let expected = SPEED_OF_LIGHT * cfg.t * cfg.t / (2.0 * cfg.l);
            assert!(relative_error(decay.gamma_mate, expected) < 1e-12);
        }
    }

    #[test]
    fn dissipation_to_decay_ratio_peaks_near_phi0() {
        let cfg = MateConfig::new(1e-2, 1e-9, LAMBDA, 0.014, 0.1, 0.0).unwrap();
        let phi0 = 0.25 * cfg.t_m * cfg.t_m;
        let figure = |phi: f64| {
            let d = mate_exact_decay(&at_detuning(&cfg, cfg.k, phi), cfg.k).unwrap();
            d.g_gamma0.abs() / d.gamma_mate
        };
        let grid: Vec<f64> = (1..=2000).map(|i| i as f64 * 5.0 * phi0 / 2000.0).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| figure(*a).total_cmp(&figure(*b)))
            .unwrap();
        assert!(relative_error(best, phi0) < 2.0 * cfg.t_m * cfg.t_m);
        let rm = cfg.r_m();
        let optimum = (1.0 - rm) / (2.0 * rm.sqrt());
        assert!((best - optimum).abs() < 2.0 * 5.0 * phi0 / 2000.0);
    }

    #[test]
    fn edge_regime_flag() {
        let d = mate_exact_decay(&paper_cfg(), paper_cfg().k).unwrap();
        assert!(d.regime_ok);
        assert!((d.edge_correction - 4.0).abs() < 1e-12);
        let wide = MateConfig::new(1e-4, 1e-6, LAMBDA, 0.05, 0.1, 0.0).unwrap();
        assert!(!mate_exact_decay(&wide, wide.k).unwrap().regime_ok);
    }

    proptest! {
        #[test]
        fn bracketed_and_explicit_roots_agree(x_frac in 0.001f64..0.45, t_m in 0.05f64..0.9, phi_r in 0.0f64..TAU) {
            let l = 1e-4;
            let cfg = MateConfig::new(l, x_frac * l, LAMBDA, 0.014, t_m, phi_r).unwrap();
            // mode spacing can exceed one free spectral range near avoided crossings
            let (lo, hi) = (cfg.k - 1.5 * cfg.fsr_k(), cfg.k + 1.5 * cfg.fsr_k());
            let res = mate_resonances(&cfg, lo, hi).unwrap();
            let exp = explicit_family_roots(&cfg, lo, hi).unwrap();
            prop_assert_eq!(res.len(), exp.len());
            for r in &res {
                prop_assert!(r.residual.abs() < 1e-12);
                let nearest = exp
                    .iter()
                    .map(|e| relative_error(e.0, r.k))
                    .fold(f64::INFINITY, f64::min);
                prop_assert!(nearest < 1e-10);
            }
        }

        #[test]
        fn reduced_slope_within_edge_bound(frac in 0.0f64..1.0, sign in prop::bool::ANY, xf in 0.0f64..0.01) {
            let (l, t_m) = (1e-3, 0.1);
            let edge = 0.25 * l * t_m * t_m;
            let cfg = MateConfig::new(l, xf * edge + 1e-10, LAMBDA, 0.014, t_m, 0.0).unwrap();
            let phi0 = 0.25 * t_m * t_m;
            let phi = phi0 * (1.0 + 40.0 * frac) * if sign { 1.0 } else { -1.0 };
            let d = mate_exact_decay(&at_detuning(&cfg, cfg.k, phi), cfg.k).unwrap();
            let bound = d.edge_correction + t_m * t_m + LAMBDA / l;
            prop_assert!(relative_error(d.dgamma_dx_reduced, d.dgamma_dx) < bound);

            let m = ElementSpec::mirror(cfg.t).unwrap();
            let mem = ElementSpec::membrane(t_m, 0.0).unwrap();
            let resp = synthetic_response(PI + 2.0 * phi, &m, &mem).unwrap();
            let gamma_syn = SPEED_OF_LIGHT * resp.transmission / (2.0 * l);
            let slope_syn = SPEED_OF_LIGHT / (2.0 * l) * 2.0 * cfg.k * resp.dt_dpsi;
            let syn_bound = 2.0 * cfg.t * cfg.t / (t_m * t_m) + d.edge_correction + LAMBDA / l;
            prop_assert!(relative_error(d.gamma_mate, gamma_syn) < syn_bound);
            prop_assert!(relative_error(d.dgamma_dx, slope_syn) < syn_bound);
        }
    }
}
