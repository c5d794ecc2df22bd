//! Oracle checks: every closed form against an independent brute-force
//! evaluation on seeded random parameter grids.

use std::f64::consts::{PI, TAU};
use std::fmt;

use optomech_core::constants::SPEED_OF_LIGHT;
use optomech_core::mate::{
    explicit_family_roots, mate_dk_dx, mate_dk_dx_numeric, mate_resonances,
    mate_track_zero_dispersive, mate_zero_dispersive, resonance_near, MateConfig,
};
use optomech_core::mos::{
    exact_corrections, normalized_couplings, normalized_decay, operating_point, resonance_order,
    resonance_wavevector, zero_dispersive_locus, MosConfig,
};
use optomech_core::msi::{
    msi_couplings, msi_effective_mirror, msi_phase, msi_zero_dispersive, MsiConfig,
};
use optomech_core::noise::{homodyne_spectra, normalized_product, solve_fluctuations};
use optomech_core::numdiff::{central5, central5_phase, relative_error, richardson_central};
use optomech_core::roots::bracket_roots;
use optomech_core::scattering::{
    compose_by_elimination, compose_synthetic, element_scattering, synthetic_response,
};
use optomech_core::{DriveConfig, ElementSpec, Error, NoiseReport, PortRates, Units};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceOverrides;

const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Default,
    Strict,
}

/// Pass thresholds of the individual checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Per-entry deviation of `S^dagger S` from the identity.
    pub unitarity: f64,
    /// Closed forms against the matrix route and against each other.
    pub closed_form: f64,
    /// Analytic derivatives against finite differences, relative.
    pub derivative: f64,
    /// Zero-dispersive phase against the bracketed root, rad.
    pub locus: f64,
    /// Bracketed resonances against the explicit family, relative in `k`.
    pub resonance: f64,
    /// Re-solved `dk/dx` against the closed form, relative.
    pub dk_dx: f64,
    /// Finite-thickness corrections inside the thin-tandem regime.
    pub regime: f64,
    /// General fluctuation solver against the closed-form spectra.
    pub noise: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self::for_profile(Profile::Default)
    }
}

impl ToleranceProfile {
    pub fn for_profile(profile: Profile) -> Self {
        let base = Self {
            unitarity: 1e-10,
            closed_form: 1e-10,
            derivative: 1e-6,
            locus: 1e-9,
            resonance: 1e-10,
            dk_dx: 1e-4,
            regime: 1e-2,
            noise: 1e-4,
        };
        match profile {
            Profile::Default => base,
            Profile::Strict => Self {
                unitarity: 1e-12,
                closed_form: 1e-11,
                locus: 1e-10,
                resonance: 1e-11,
                ..base
            },
        }
    }

    pub fn with_overrides(mut self, o: &ToleranceOverrides) -> Self {
        let pairs = [
            (&mut self.unitarity, o.unitarity),
            (&mut self.closed_form, o.closed_form),
            (&mut self.derivative, o.derivative),
            (&mut self.locus, o.locus),
            (&mut self.resonance, o.resonance),
            (&mut self.dk_dx, o.dk_dx),
            (&mut self.regime, o.regime),
            (&mut self.noise, o.noise),
        ];
        for (slot, value) in pairs {
            if let Some(v) = value {
                *slot = v;
            }
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    #[default]
    Fast,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst error over the check's samples; NaN if a sample failed outright.
    pub measured: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str, measured: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            samples,
            detail: None,
        }
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            measured: f64::NAN,
            tolerance,
            samples: 0,
            detail: Some(detail),
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<34} measured {:>10.3e}  tolerance {:>9.1e}  n={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance,
            self.samples
        )?;
        if let Some(d) = &self.detail {
            write!(f, "  ({d})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "{}: {} checks, {} failed",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        )
    }
}

pub fn validate(suite: Suite, tol: &ToleranceProfile) -> ValidationReport {
    let n = match suite {
        Suite::Fast => 200,
        Suite::Full => 1000,
    };
    let mut checks = vec![
        unitarity(n, tol.unitarity),
        closed_form_vs_matrix(n, tol.closed_form),
        mos_derivatives(n, tol.derivative),
        msi_derivatives(n, tol.derivative),
        zero_dispersive_locus_oracle(n / 10, tol.locus),
        zero_dispersive_offset(n / 10),
        thin_tandem_limit(tol.closed_form),
        thin_tandem_regime(n / 4, tol.regime),
        cross_system_ratio(tol.closed_form),
        msi_below_cavity_scale(),
        noise_solver(n / 10, tol.noise),
        figure_landmarks(tol.closed_form),
    ];
    if suite == Suite::Full {
        let mate =
            MateConfig::new(1e-4, 1e-6, 0.85e-6, 0.014, 0.1, PI).expect("valid example geometry");
        checks.push(mate_resonance_bracketing(&mate, 5, tol.resonance));
        checks.push(mate_slope_oracle(&mate, 20, tol.dk_dx));
        checks.push(mate_zero_dispersive_position(0.1));
        checks.push(mos_resonance_oracle(1e-5));
    }
    ValidationReport { suite, checks }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Random deep-regime pair with `t_m^2 < t << t_m << 1`.
fn deep_regime_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let t_m = rng.gen_range(0.01..0.1);
    let t = log_uniform(rng, 1.5 * t_m * t_m, 0.2 * t_m);
    (t, t_m)
}

const K: f64 = TAU / 0.85e-6;

/// Random mirrors, membranes and tandems.
pub fn unitarity(samples: usize, tol: f64) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t: f64 = rng.gen_range(0.0..=1.0);
        let t_m: f64 = rng.gen_range(0.0..=1.0);
        let phi_r = rng.gen_range(-PI..PI);
        let x = rng.gen_range(0.0..1e-5);
        let (Ok(m), Ok(mem)) = (ElementSpec::mirror(t), ElementSpec::membrane(t_m, phi_r)) else {
            return Check::failed(
                "unitarity",
                tol,
                format!("invalid element t={t}, t_m={t_m}"),
            );
        };
        for s in [
            element_scattering(&m),
            element_scattering(&mem),
            compose_synthetic(&m, &mem, x, K),
        ] {
            match s {
                Ok(s) => worst = worst.max(s.unitarity_deviation()),
                Err(e) => return Check::failed("unitarity", tol, e.to_string()),
            }
        }
    }
    Check::new("unitarity", worst, tol, 3 * samples)
}

/// Closed-form `T`, `tan mu` against the tandem matrix, and the closed
/// matrix against plain elimination of the internal waves.
pub fn closed_form_vs_matrix(samples: usize, tol: f64) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for _ in 0..samples {
        let t = rng.gen_range(0.001..1.0);
        let t_m = rng.gen_range(0.001..1.0);
        let psi = rng.gen_range(0.0..TAU);
        let m = ElementSpec::mirror(t).expect("t in range");
        let mem = ElementSpec::membrane(t_m, 0.0).expect("t_m in range");
        let x = psi / (2.0 * K);
        let (Ok(s), Ok(b)) = (
            compose_synthetic(&m, &mem, x, K),
            compose_by_elimination(&m, &mem, x, K),
        ) else {
            continue;
        };
        let Ok(resp) = synthetic_response(psi, &m, &mem) else {
            continue;
        };
        used += 1;
        let tan_matrix = (-s.cavity_reflection()).arg().tan();
        let tan_closed = resp.mu.tan();
        worst = worst
            .max((resp.transmission - s.power_transmission()).abs())
            .max(s.max_entry_difference(&b))
            .max(1e-2 * (tan_matrix - tan_closed).abs() / tan_closed.abs().max(1.0));
    }
    Check::new("closed_form_vs_matrix", worst, tol, used)
        .with_detail("tan mu compared at 100x the tolerance".into())
}

/// `dT/dpsi`, `dmu/dpsi` against 5-point central differences. Errors are
/// relative to the derivative, floored at 1e-3 of its scale near zeros.
pub fn mos_derivatives(samples: usize, tol: f64) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t = rng.gen_range(0.01..0.9);
        let t_m = rng.gen_range(0.01..0.9);
        let psi = rng.gen_range(0.0..TAU);
        let m = ElementSpec::mirror(t).expect("t in range");
        let mem = ElementSpec::membrane(t_m, 0.0).expect("t_m in range");
        let resp = match synthetic_response(psi, &m, &mem) {
            Ok(r) => r,
            Err(e) => return Check::failed("mos_derivatives", tol, e.to_string()),
        };
        let width = 1.0 - m.r * mem.r;
        let h = 1e-2 * width.min((m.r - mem.r).abs());
        let eval = |p: f64| synthetic_response(p, &m, &mem).expect("same pair as above");
        let fd_t = central5(|p| eval(p).transmission, psi, h);
        let fd_mu = central5_phase(|p| eval(p).mu, psi, h);
        let t_scale = (t * t_m / width).powi(2) / width;
        let mu_scale = (mem.r * t * t / width).min(1.0 / width);
        worst = worst
            .max((resp.dt_dpsi - fd_t).abs() / resp.dt_dpsi.abs().max(1e-3 * t_scale))
            .max((resp.dmu_dpsi - fd_mu).abs() / resp.dmu_dpsi.abs().max(1e-3 * mu_scale));
    }
    Check::new("mos_derivatives", worst, tol, samples)
}

/// `dtau/dx`, `dmu/dx` of the interferometer mirror against finite differences.
pub fn msi_derivatives(samples: usize, tol: f64) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let tb = rng.gen_range(0.3..0.7);
        let r_ms = rng.gen_range(0.2..0.98);
        let phase = rng.gen_range(0.05..3.0);
        let c = match MsiConfig::from_split(tb, r_ms, 1e-4, K, phase / (2.0 * K)) {
            Ok(c) => c,
            Err(e) => return Check::failed("msi_derivatives", tol, e.to_string()),
        };
        let g = msi_couplings(&c).expect("validated config");
        let h = 1e-4 / K;
        let fd_tau = central5(
            |x| msi_effective_mirror(&c.with_x(x)).expect("valid").tau,
            c.x,
            h,
        );
        let fd_mu = central5_phase(|x| msi_phase(&c.with_x(x)).expect("valid"), c.x, h);
        let tau_scale = 4.0 * K * r_ms * c.r_b * c.t_b;
        worst = worst
            .max((g.dtau_dx - fd_tau).abs() / g.dtau_dx.abs().max(1e-3 * tau_scale))
            .max((g.dmu_dx - fd_mu).abs() / g.dmu_dx.abs().max(1e-3 * K));
    }
    Check::new("msi_derivatives", worst, tol, samples)
}

/// Roots of `dmu/dpsi` bracketed on the exact response, nearest to `target`.
fn bracketed_locus(t: f64, t_m: f64, target: f64) -> Option<f64> {
    let m = ElementSpec::mirror(t).ok()?;
    let mem = ElementSpec::membrane(t_m, 0.0).ok()?;
    let f = |p: f64| {
        synthetic_response(p, &m, &mem)
            .map(|r| r.dmu_dpsi)
            .unwrap_or(f64::NAN)
    };
    let span = 4.0 * (PI - target).abs().max(1e-6);
    bracket_roots(f, PI - span, PI + span, 20_000)
        .into_iter()
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
}

/// Analytic zero-dispersive phases against bracketed roots of `dmu/dpsi`.
pub fn zero_dispersive_locus_oracle(samples: usize, tol: f64) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (t, t_m) = deep_regime_pair(&mut rng);
        let locus = match zero_dispersive_locus(t, t_m) {
            Ok(l) => l,
            Err(e) => return Check::failed("zero_dispersive_locus", tol, e.to_string()),
        };
        for psi in locus.psi_star {
            match bracketed_locus(t, t_m, psi) {
                Some(root) => worst = worst.max((root - psi).abs()),
                None => {
                    return Check::failed(
                        "zero_dispersive_locus",
                        tol,
                        format!("no root near {psi} (t={t}, t_m={t_m})"),
                    )
                }
            }
        }
    }
    Check::new("zero_dispersive_locus", worst, tol, 2 * samples)
}

/// `(psi* - pi)/2` against `+-Phi0`, as a fraction of the allowed `3 t^2/t_m^2`.
pub fn zero_dispersive_offset(samples: usize) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (t, t_m) = deep_regime_pair(&mut rng);
        let Ok(locus) = zero_dispersive_locus(t, t_m) else {
            return Check::failed(
                "zero_dispersive_offset",
                1.0,
                format!("no locus at t={t}, t_m={t_m}"),
            );
        };
        let phi0 = 0.25 * t_m * t_m;
        let bound = 3.0 * t * t / (t_m * t_m);
        let [neg, pos] = locus.half_offsets();
        worst = worst
            .max(relative_error(pos, phi0) / bound)
            .max(relative_error(neg, -phi0) / bound);
    }
    Check::new("zero_dispersive_offset", worst, 1.0, 2 * samples)
        .with_detail("measured as a fraction of 3 t^2/t_m^2".into())
}

/// Finite-thickness forms collapse onto the thin forms at zero distance.
pub fn thin_tandem_limit(tol: f64) -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for ratio in [-3.0, -1.0, 0.0, 0.5, 2.0] {
        let cfg = MosConfig::new(1e-4, 0.85e-6, 0.014, 0.1)
            .expect("valid")
            .with_x(0.0);
        let cfg = cfg.with_phi_r(PI + 2.0 * ratio * cfg.phi0());
        match exact_corrections(&cfg) {
            Ok(ex) => {
                // at x = 0 the slope keeps the stored-energy term -c T^2 / (2 l^2 t_m^2)
                let big_t = 2.0 * cfg.l * ex.gamma_thin / SPEED_OF_LIGHT;
                let stored =
                    SPEED_OF_LIGHT * big_t * big_t / (2.0 * cfg.l * cfg.l * cfg.t_m * cfg.t_m);
                worst = worst
                    .max(relative_error(ex.gamma_exact, ex.gamma_thin))
                    .max(relative_error(ex.g_omega_exact, ex.g_omega_thin))
                    .max(relative_error(
                        ex.dgamma_dx_exact,
                        ex.dgamma_dx_thin - stored,
                    ));
                n += 1;
            }
            Err(e) => return Check::failed("thin_tandem_limit", tol, e.to_string()),
        }
    }
    Check::new("thin_tandem_limit", worst, tol, n)
}

/// Relative size of the finite-thickness corrections to `gamma` and
/// `g_omega0` for membranes inside a hundredth of the thin-tandem bound.
pub fn thin_tandem_regime(samples: usize, tol: f64) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    let mut used = 0;
    let lambda = 0.85e-6;
    for _ in 0..samples {
        let (t, t_m) = deep_regime_pair(&mut rng);
        let ratio = rng.gen_range(-4.0..4.0);
        let frac = rng.gen_range(0.0..0.01);
        let base = match MosConfig::new(1e-4, lambda, t, t_m) {
            Ok(c) => c,
            Err(e) => return Check::failed("thin_tandem_regime", tol, e.to_string()),
        };
        // membrane at x, reflection phase chosen so that 2kx + phi_r = pi + 2 Phi
        let x = frac * base.thin_tandem_bound();
        let cfg = base
            .with_x(x)
            .with_phi_r(PI + 2.0 * ratio * base.phi0() - 2.0 * base.k * x);
        let ex = match exact_corrections(&cfg) {
            Ok(ex) => ex,
            Err(e) => return Check::failed("thin_tandem_regime", tol, e.to_string()),
        };
        used += 1;
        worst = worst
            .max((ex.gamma_exact / ex.gamma_thin - 1.0).abs())
            .max((ex.g_omega_exact / ex.g_omega_thin - 1.0).abs());
    }
    Check::new("thin_tandem_regime", worst, tol, used)
}

/// `|g_gamma0^MOS(Phi0)| / |g_gamma0^MATE(Phi*)| = 2 / t_m^3` over a range of membranes.
pub fn cross_system_ratio(tol: f64) -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for t_m in [0.02, 0.05, 0.1, 0.2] {
        for t_frac in [0.05, 0.14, 0.2] {
            let t = t_frac * t_m;
            let mate = MateConfig::new(1e-4, 1e-9, 0.85e-6, t, t_m, PI);
            let mos = MosConfig::new(1e-4, 0.85e-6, t, t_m);
            let (Ok(mate), Ok(mos)) = (mate, mos) else {
                return Check::failed(
                    "cross_system_ratio",
                    tol,
                    format!("invalid t={t}, t_m={t_m}"),
                );
            };
            let (Ok(z), Ok(op)) = (
                mate_zero_dispersive(&mate),
                operating_point(&mos.with_phi(mos.phi0())),
            ) else {
                return Check::failed(
                    "cross_system_ratio",
                    tol,
                    format!("no operating point t={t}, t_m={t_m}"),
                );
            };
            let expected = 2.0 / t_m.powi(3);
            worst = worst
                .max(relative_error(z.ratio_to_mos, expected))
                .max(relative_error(
                    op.g_gamma0.abs() / z.g_gamma0.abs(),
                    expected,
                ));
            n += 1;
        }
    }
    Check::new("cross_system_ratio", worst, tol, n)
}

/// Interferometer dissipative magnitude stays below `omega_c / l`; measured
/// is the largest ratio to that scale over a grid of splitters and membranes.
pub fn msi_below_cavity_scale() -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for i in 0..=40 {
        for j in 1..=20 {
            let t_b_power = 0.3 + 0.01 * i as f64;
            let r_ms = 0.05 * j as f64;
            let Ok(cfg) = MsiConfig::from_split(t_b_power, r_ms, 1e-4, K, 0.0) else {
                continue;
            };
            let Ok(z) = msi_zero_dispersive(&cfg) else {
                continue;
            };
            worst = worst.max(z.g_gamma0_estimate / (cfg.omega_c() / cfg.l));
            n += 1;
        }
    }
    let mut c = Check::new("msi_below_cavity_scale", worst, 1.0, n);
    c.passed = worst < 1.0;
    c
}

/// General-frequency solver at `omega = 1e-6 gamma` against the closed forms.
pub fn noise_solver(samples: usize, tol: f64) -> Check {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let xi = rng.gen_range(-5.0..5.0);
        let loss = rng.gen_range(0.0..1.0);
        let a0 = rng.gen_range(0.1..10.0);
        match noise_pair(xi, loss, a0, 1e-6) {
            Ok((general, closed)) => {
                worst = worst.max(relative_error(general, closed.normalized_product()))
            }
            Err(e) => return Check::failed("noise_solver", tol, e.to_string()),
        }
    }
    Check::new("noise_solver", worst, tol, samples)
}

/// Normalized backaction-imprecision product from the general solver at
/// `omega = omega_ratio gamma`, and the closed-form report; natural units
/// with `gamma = g_gamma0 = 1`.
pub fn noise_pair(
    xi: f64,
    gamma3_ratio: f64,
    a0: f64,
    omega_ratio: f64,
) -> optomech_core::Result<(f64, NoiseReport)> {
    let rates = PortRates::symmetric(1.0, gamma3_ratio);
    let drive = DriveConfig {
        delta: 0.0,
        omega: omega_ratio,
        a0,
    };
    let sol = solve_fluctuations(&rates, &drive, xi, 1.0, Units::Natural)?;
    let rep = homodyne_spectra(
        &rates,
        &DriveConfig::resonant(a0),
        xi,
        1.0,
        None,
        Units::Natural,
    )?;
    let theta = sol.optimal_angle();
    let general = sol.imprecision_psd(theta) * sol.force_psd() / 0.25;
    Ok((general, rep))
}

/// Landmark values of the normalized curves.
pub fn figure_landmarks(tol: f64) -> Check {
    let checks = [
        (normalized_couplings(0.0).0, 1.0),
        (normalized_couplings(0.0).1, 0.0),
        (normalized_couplings(1.0).0, 0.0),
        (normalized_couplings(1.0).1, 0.5),
        (normalized_decay(1.0), 0.5),
        (normalized_product(0.0, 1.0), 1.0),
        (normalized_product(0.0, 1.25), 1.5625),
        (normalized_product(0.0, 1.5), 2.25),
    ];
    let worst = checks
        .iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Check::new("figure_landmarks", worst, tol, checks.len())
}

/// Bracketed resonances against the explicit `(+-, N)` family, one free
/// spectral range at a time over `windows` consecutive ranges centred on
/// the configured wavevector. A range may hold no resonance near an avoided
/// crossing; both sides must then be empty.
pub fn mate_resonance_bracketing(cfg: &MateConfig, windows: usize, tol: f64) -> Check {
    let name = "mate_resonance_bracketing";
    let fsr = cfg.fsr_k();
    let first = cfg.k - 0.5 * windows as f64 * fsr;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for w in 0..windows {
        let lo = first + w as f64 * fsr;
        let hi = lo + fsr;
        let bracketed = match mate_resonances(cfg, lo, hi) {
            Ok(b) => b.iter().map(|r| r.k).collect(),
            Err(Error::NoRootInWindow { .. }) => Vec::new(),
            Err(e) => return Check::failed(name, tol, e.to_string()),
        };
        let explicit = match explicit_family_roots(cfg, lo, hi) {
            Ok(e) => e,
            Err(e) => return Check::failed(name, tol, e.to_string()),
        };
        if bracketed.len() != explicit.len() {
            return Check::failed(
                name,
                tol,
                format!(
                    "[{lo}, {hi}]: {} bracketed roots, {} explicit",
                    bracketed.len(),
                    explicit.len()
                ),
            );
        }
        for (b, e) in bracketed.iter().zip(&explicit) {
            worst = worst.max(relative_error(e.0, *b));
        }
        count += bracketed.len();
    }
    if count == 0 {
        return Check::failed(name, tol, "no resonance in any window".into());
    }
    Check::new(name, worst, tol, count)
}

/// Re-solved `dk_c/dx` against the closed form around the configured mode.
pub fn mate_slope_oracle(cfg: &MateConfig, samples: usize, tol: f64) -> Check {
    let name = "mate_slope_oracle";
    let mut worst: f64 = 0.0;
    let mut used = 0;
    let fsr = cfg.fsr_k();
    let roots = match mate_resonances(cfg, cfg.k - 3.0 * fsr, cfg.k + 3.0 * fsr) {
        Ok(r) => r,
        Err(e) => return Check::failed(name, tol, e.to_string()),
    };
    for root in roots.iter().take(samples) {
        let Ok(closed) = mate_dk_dx(cfg, root.k) else {
            continue;
        };
        let numeric = match mate_dk_dx_numeric(cfg, root.k, 1e-12) {
            Ok(v) => v,
            Err(e) => return Check::failed(name, tol, e.to_string()),
        };
        used += 1;
        worst = worst.max(relative_error(numeric, closed));
    }
    Check::new(name, worst, tol, used)
}

/// Tracked dispersionless points against `+-t_m/2`.
pub fn mate_zero_dispersive_position(t_m: f64) -> Check {
    let name = "mate_zero_dispersive_position";
    let tol = 1e-2;
    let lambda = 0.85e-6;
    let Ok(base) = MateConfig::new(1e-4, 1e-6, lambda, 0.014, t_m, PI) else {
        return Check::failed(name, tol, "invalid geometry".into());
    };
    // move the membrane so the mode nearest the configured wavevector sits at Phi = 0
    let points = resonance_near(&base, base.k).and_then(|k0| {
        let turns = ((2.0 * k0 * base.x + base.phi_r - PI) / TAU).round();
        let x0 = (PI + TAU * turns - base.phi_r) / (2.0 * k0);
        mate_track_zero_dispersive(&base.with_x(x0).with_k(k0), 0.3, 600, 1e-12)
    });
    let points = match points {
        Ok(p) => p,
        Err(e) => return Check::failed(name, tol, e.to_string()),
    };
    if points.len() != 2 {
        return Check::failed(name, tol, format!("{} dispersionless points", points.len()));
    }
    let worst = points
        .iter()
        .map(|p| relative_error(p.phi.abs(), 0.5 * t_m))
        .fold(0.0, f64::max);
    Check::new(name, worst, tol, points.len())
}

/// Finite-thickness dispersive constant against `c dk_c/dx` of the re-solved resonance.
pub fn mos_resonance_oracle(tol: f64) -> Check {
    let name = "mos_resonance_oracle";
    let mut worst: f64 = 0.0;
    let Ok(base) = MosConfig::new(1e-4, 0.85e-6, 0.014, 0.1) else {
        return Check::failed(name, tol, "invalid geometry".into());
    };
    for ratio in [0.0, 0.5, 1.5, 3.0] {
        let res = base
            .with_phi(ratio * base.phi0())
            .with_resonant_length()
            .and_then(|cfg| {
                let n = resonance_order(&cfg, cfg.k)?;
                let dk = richardson_central(
                    |x| resonance_wavevector(&cfg.with_x(x), n).unwrap_or(f64::NAN),
                    cfg.x,
                    1e-12,
                );
                Ok((exact_corrections(&cfg)?.g_omega_exact, SPEED_OF_LIGHT * dk))
            });
        match res {
            Ok((exact, oracle)) => worst = worst.max(relative_error(exact, oracle)),
            Err(e) => return Check::failed(name, tol, e.to_string()),
        }
    }
    Check::new(name, worst, tol, 4)
}
