//! Linearized quadrature fluctuations of a three-port cavity (input port 1,
//! dissipatively coupled port 2, loss port 3), homodyne detection of port 1,
//! and the resulting backaction-imprecision product and cooperativities.
//!
//! Input quadratures are delta-correlated with `<X X> = <Y Y> = 1` and
//! `<X Y> = i`; every spectral density here is the symmetrized one, so the
//! `X`/`Y` cross-correlation drops out and a quadrature `sum_j c_j N_j` has
//! density `sum_j |c_j|^2`.

use num_complex::Complex64;

use crate::constants::{HBAR, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Decay rates of the three ports, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortRates {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl PortRates {
    /// Symmetric two-sided cavity (`gamma1 = gamma2 = gamma`) plus intracavity loss.
    pub fn symmetric(gamma: f64, gamma3: f64) -> Self {
        Self {
            gamma1: gamma,
            gamma2: gamma,
            gamma3,
        }
    }

    pub fn total(&self) -> f64 {
        self.gamma1 + self.gamma2 + self.gamma3
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.gamma1, self.gamma2, self.gamma3];
        if rates.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "port decay rates must be finite and non-negative: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    /// Detuning `omega_L - omega_c`, rad/s.
    pub delta: f64,
    /// Fourier frequency, rad/s.
    pub omega: f64,
    /// Photon-number-normalized intracavity amplitude.
    pub a0: f64,
}

impl DriveConfig {
    pub fn resonant(a0: f64) -> Self {
        Self {
            delta: 0.0,
            omega: 0.0,
            a0,
        }
    }
}

/// Value of `hbar` used for force densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Si,
    /// `hbar = 1`.
    Natural,
}

impl Units {
    pub fn hbar(self) -> f64 {
        match self {
            Units::Si => HBAR,
            Units::Natural => 1.0,
        }
    }
}

/// Index of each input quadrature in [`QuadratureResponse::noise`].
pub const NOISE_INPUTS: [&str; 6] = ["X_in1", "X_in2", "X_in3", "Y_in1", "Y_in2", "Y_in3"];

/// A quadrature written as a linear combination of the six input
/// quadratures and of the mechanical displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResponse {
    pub noise: [Complex64; 6],
    /// Transduction per metre of displacement.
    pub signal: Complex64,
}

impl QuadratureResponse {
    fn zero() -> Self {
        Self {
            noise: [Complex64::new(0.0, 0.0); 6],
            signal: Complex64::new(0.0, 0.0),
        }
    }

    /// Symmetrized spectral density of the noise part.
    pub fn noise_psd(&self) -> f64 {
        self.noise.iter().map(|c| c.norm_sqr()).sum()
    }

    fn scaled_sum(a: &Self, ca: f64, b: &Self, cb: f64) -> Self {
        let mut out = Self::zero();
        for j in 0..6 {
            out.noise[j] = a.noise[j] * ca + b.noise[j] * cb;
        }
        out.signal = a.signal * ca + b.signal * cb;
        out
    }
}

/// Port-1 output quadratures and the backaction force on the membrane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationSolution {
    pub x_out: QuadratureResponse,
    pub y_out: QuadratureResponse,
    /// Stochastic backaction force; its `signal` part is zero.
    pub force: QuadratureResponse,
}

impl FluctuationSolution {
    /// `Z = X_out cos(theta) + Y_out sin(theta)`.
    pub fn homodyne(&self, theta: f64) -> QuadratureResponse {
        QuadratureResponse::scaled_sum(&self.x_out, theta.cos(), &self.y_out, theta.sin())
    }

    /// Displacement-equivalent imprecision density at homodyne angle `theta`.
    pub fn imprecision_psd(&self, theta: f64) -> f64 {
        let z = self.homodyne(theta);
        z.noise_psd() / z.signal.norm_sqr()
    }

    pub fn force_psd(&self) -> f64 {
        self.force.noise_psd()
    }

    /// Angle in `(-pi/2, pi/2]` minimizing [`Self::imprecision_psd`].
    ///
    /// Both noise and signal power are quadratic forms in
    /// `(cos theta, sin theta)`; the optimum is the top generalized
    /// eigenvector of the signal form against the noise form.
    pub fn optimal_angle(&self) -> f64 {
        let (a, b) = (&self.x_out, &self.y_out);
        let n11 = a.noise_psd();
        let n22 = b.noise_psd();
        let n12: f64 = a
            .noise
            .iter()
            .zip(&b.noise)
            .map(|(p, q)| (p * q.conj()).re)
            .sum();
        let s11 = a.signal.norm_sqr();
        let s22 = b.signal.norm_sqr();
        let s12 = (a.signal * b.signal.conj()).re;

        let qa = n11 * n22 - n12 * n12;
        let qb = -(s11 * n22 + s22 * n11 - 2.0 * s12 * n12);
        let qc = s11 * s22 - s12 * s12;
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        let lambda = (-qb + disc) / (2.0 * qa);

        // (S - lambda N) v = 0; take the better-conditioned row.
        let row1 = (s11 - lambda * n11, s12 - lambda * n12);
        let row2 = (s12 - lambda * n12, s22 - lambda * n22);
        let row = if row1.0.hypot(row1.1) >= row2.0.hypot(row2.1) {
            row1
        } else {
            row2
        };
        let (v1, v2) = if row.0 == 0.0 && row.1 == 0.0 {
            (1.0, 0.0)
        } else {
            (-row.1, row.0)
        };
        fold_angle(v2.atan2(v1))
    }
}

fn fold_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut th = theta;
    while th > 0.5 * PI {
        th -= PI;
    }
    while th <= -0.5 * PI {
        th += PI;
    }
    th
}

/// Solve the Fourier-domain quadrature equations
///
/// ```text
/// (kappa - i w) X + D Y = sum_j sqrt(g_j)/2 X_inj + a0 g_gamma0 x
/// (kappa - i w) Y - D X = sum_j sqrt(g_j)/2 Y_inj + a0 g_omega0 x
/// ```
///
/// with `kappa = (g1 + g2 + g3)/2`, then apply `X_out1 = 2 sqrt(g1) X - X_in1`
/// (same for `Y`). The backaction force is
/// `F = -a0 hbar g_gamma0 / sqrt(g2) Y_in2 + 2 a0 hbar g_omega0 X`, noise part only.
pub fn solve_fluctuations(
    rates: &PortRates,
    drive: &DriveConfig,
    g_omega0: f64,
    g_gamma0: f64,
    units: Units,
) -> Result<FluctuationSolution> {
    rates.validate()?;
    if !(drive.a0.is_finite() && drive.a0 >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "a0 must be >= 0, got {}",
            drive.a0
        )));
    }
    if rates.gamma2 == 0.0 && g_gamma0 != 0.0 && drive.a0 != 0.0 {
        return Err(Error::InvalidConfig(
            "dissipative backaction needs gamma2 > 0".into(),
        ));
    }
    let kappa = Complex64::new(0.5 * rates.total(), -drive.omega);
    let delta = drive.delta;
    let det = kappa * kappa + delta * delta;
    if det.norm() < 1e-300 {
        return Err(Error::SingularSystem {
            det_abs: det.norm(),
        });
    }

    let sq = [
        rates.gamma1.sqrt(),
        rates.gamma2.sqrt(),
        rates.gamma3.sqrt(),
    ];
    let mut rx = QuadratureResponse::zero();
    let mut ry = QuadratureResponse::zero();
    for (j, s) in sq.iter().enumerate() {
        rx.noise[j] = Complex64::new(0.5 * s, 0.0);
        ry.noise[j + 3] = Complex64::new(0.5 * s, 0.0);
    }
    rx.signal = Complex64::new(drive.a0 * g_gamma0, 0.0);
    ry.signal = Complex64::new(drive.a0 * g_omega0, 0.0);

    // [X, Y] = M^{-1} [rx, ry], M = [[kappa, delta], [-delta, kappa]]
    let mut x = QuadratureResponse::zero();
    let mut y = QuadratureResponse::zero();
    for j in 0..6 {
        x.noise[j] = (kappa * rx.noise[j] - delta * ry.noise[j]) / det;
        y.noise[j] = (delta * rx.noise[j] + kappa * ry.noise[j]) / det;
    }
    x.signal = (kappa * rx.signal - delta * ry.signal) / det;
    y.signal = (delta * rx.signal + kappa * ry.signal) / det;

    let two_sq1 = 2.0 * sq[0];
    let mut x_out = QuadratureResponse::scaled_sum(&x, two_sq1, &x, 0.0);
    let mut y_out = QuadratureResponse::scaled_sum(&y, two_sq1, &y, 0.0);
    x_out.noise[0] -= 1.0;
    y_out.noise[3] -= 1.0;

    let hbar = units.hbar();
    let mut force = QuadratureResponse::zero();
    for j in 0..6 {
        force.noise[j] = x.noise[j] * (2.0 * drive.a0 * hbar * g_omega0);
    }
    if rates.gamma2 > 0.0 {
        force.noise[4] -= drive.a0 * hbar * g_gamma0 / sq[1];
    }

    Ok(FluctuationSolution {
        x_out,
        y_out,
        force,
    })
}

/// `(A^2 + 2 A xi^2) / (1 + xi^2)`: backaction-imprecision product in units
/// of `hbar^2 / 4`. Infinite `xi` gives the dispersive limit `2A`.
pub fn normalized_product(xi: f64, a: f64) -> f64 {
    if xi.is_infinite() {
        return 2.0 * a;
    }
    let x2 = xi * xi;
    (a * a + 2.0 * a * x2) / (1.0 + x2)
}

/// Mechanical oscillator parameters entering cooperativities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalParams {
    /// Zero-point fluctuation amplitude, m.
    pub x_zpf: f64,
    /// Mechanical decay rate, 1/s.
    pub gamma_m: f64,
}

/// Closed-form noise figures for resonant drive of the symmetric cavity in
/// the low-frequency limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    pub theta_opt: f64,
    /// m^2 s.
    pub s_xx_imp: f64,
    /// N^2 s.
    pub s_ff: f64,
    /// `S_xx^imp S_FF`, (J s)^2.
    pub product: f64,
    /// `g_omega0 / g_gamma0`.
    pub xi: f64,
    /// `1 + gamma3 / (2 gamma)`.
    pub a: f64,
    /// `(g_gamma0 x_zpf a0)^2 / (gamma gamma_m)` when mechanics are given.
    pub cooperativity: Option<f64>,
    pub hbar: f64,
}

impl NoiseReport {
    /// Product in units of `hbar^2 / 4`.
    pub fn normalized_product(&self) -> f64 {
        self.product / (0.25 * self.hbar * self.hbar)
    }
}

pub fn homodyne_spectra(
    rates: &PortRates,
    drive: &DriveConfig,
    g_omega0: f64,
    g_gamma0: f64,
    mechanics: Option<&MechanicalParams>,
    units: Units,
) -> Result<NoiseReport> {
    rates.validate()?;
    if g_omega0 == 0.0 && g_gamma0 == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let gamma = rates.gamma1;
    if drive.delta != 0.0
        || (rates.gamma1 - rates.gamma2).abs() > 1e-12 * gamma.abs()
        || gamma <= 0.0
    {
        return Err(Error::InvalidConfig(
            "closed-form spectra need resonant drive and gamma1 = gamma2 > 0".into(),
        ));
    }
    if drive.a0.is_nan() || drive.a0 <= 0.0 {
        return Err(Error::InvalidConfig(
            "closed-form spectra need a0 > 0".into(),
        ));
    }
    let hbar = units.hbar();
    let a0 = drive.a0;
    let eff = gamma + 0.5 * rates.gamma3;
    let a = eff / gamma;
    let g2 = g_gamma0 * g_gamma0 + g_omega0 * g_omega0;

    let s_xx_imp = eff * eff / (4.0 * a0 * a0 * gamma * g2);
    let s_ff = hbar * hbar * a0 * a0 * gamma / (eff * eff)
        * (a * a * g_gamma0 * g_gamma0 + 2.0 * a * g_omega0 * g_omega0);
    let xi = if g_gamma0 == 0.0 {
        f64::INFINITY
    } else {
        g_omega0 / g_gamma0
    };
    Ok(NoiseReport {
        theta_opt: g_omega0.atan2(g_gamma0).tan().atan(),
        s_xx_imp,
        s_ff,
        product: s_xx_imp * s_ff,
        xi,
        a,
        cooperativity: mechanics.map(|m| (g_gamma0 * m.x_zpf * a0).powi(2) / (gamma * m.gamma_m)),
        hbar,
    })
}

/// Shared inputs of the cooperativity benchmarks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativityInputs {
    /// Light wavevector, 1/m.
    pub k: f64,
    /// Cavity length, m.
    pub l: f64,
    pub a0: f64,
    pub mechanics: MechanicalParams,
}

impl CooperativityInputs {
    /// `M = c (k a0 x_zpf)^2 / (l gamma_m)`.
    pub fn m_factor(&self) -> f64 {
        let m = &self.mechanics;
        SPEED_OF_LIGHT * (self.k * self.a0 * m.x_zpf).powi(2) / (self.l * m.gamma_m)
    }
}

/// System-specific part of a cooperativity; `sideband` is `2 omega / gamma`
/// for the bad-cavity one-sided systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CooperativitySystem {
    Mos { t: f64, t_m: f64 },
    Msi { r_ms: f64, sideband: f64 },
    Mate { t: f64, t_m: f64, sideband: f64 },
}

/// MOS: `4 M t^2 / t_m^6` (no sideband factor); MSI: `2 M r_ms^2 (2w/g)^2`;
/// MATE: `M (t^2/t_m^2) (2w/g)^2`.
pub fn cooperativity(system: &CooperativitySystem, inputs: &CooperativityInputs) -> f64 {
    let m = inputs.m_factor();
    match *system {
        CooperativitySystem::Mos { t, t_m } => m * 4.0 * t * t / t_m.powi(6),
        CooperativitySystem::Msi { r_ms, sideband } => 2.0 * m * r_ms * r_ms * sideband * sideband,
        CooperativitySystem::Mate { t, t_m, sideband } => {
            m * t * t / (t_m * t_m) * sideband * sideband
        }
    }
}
