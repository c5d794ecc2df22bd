//! Scattering algebra for a lossless mirror, a lossless membrane and the
//! mirror + membrane tandem ("synthetic mirror").
//!
//! Port convention for every [`ScatteringMatrix`]: the output vector is
//! `(U3, G2)` and the input vector is `(U2, G3)`, where `U2` arrives at the
//! mirror from the cavity, `G2` leaves the mirror back into the cavity, `G3`
//! arrives at the membrane from outside and `U3` leaves through the membrane.
//! So `m11`/`m22` are the two transmissions, `m21` is the reflection seen from
//! the cavity and `m12` is the reflection seen from outside.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix4, Matrix4x2};
use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical tolerances for element validation and unitarity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max per-entry deviation of `S^dagger S` from the identity.
    pub unitarity: f64,
    /// Max deviation in `t^2 + r^2 = 1` and in the membrane phase constraint.
    pub constraint: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-10,
            constraint: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Mirror,
    Membrane,
}

/// A lossless two-port optical element.
///
/// The mirror matrix is `[[it, -r], [-r, it]]` and carries no free phases;
/// `phi_t`/`phi_r` are only meaningful for a membrane, whose matrix is
/// `[[t e^{i phi_t}, r e^{i phi_r}], [r e^{i phi_r}, t e^{i phi_t}]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementSpec {
    pub kind: ElementKind,
    pub t: f64,
    pub r: f64,
    pub phi_t: f64,
    pub phi_r: f64,
}

impl ElementSpec {
    /// Mirror with amplitude transmission `t`; `r = sqrt(1 - t^2)`.
    pub fn mirror(t: f64) -> Result<Self> {
        let spec = Self {
            kind: ElementKind::Mirror,
            t,
            r: reflection_from_transmission(t)?,
            phi_t: 0.0,
            phi_r: 0.0,
        };
        spec.validate(&Tolerances::default())?;
        Ok(spec)
    }

    /// Membrane with amplitude transmission `t_m` and reflection phase
    /// `phi_r`. The transmission phase is fixed to `phi_r - pi/2`, which
    /// satisfies `exp(2i(phi_r - phi_t)) = -1`.
    pub fn membrane(t_m: f64, phi_r: f64) -> Result<Self> {
        let spec = Self {
            kind: ElementKind::Membrane,
            t: t_m,
            r: reflection_from_transmission(t_m)?,
            phi_t: phi_r - FRAC_PI_2,
            phi_r,
        };
        spec.validate(&Tolerances::default())?;
        Ok(spec)
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let (t, r) = (self.t, self.r);
        if !(t.is_finite() && r.is_finite())
            || !(0.0..=1.0).contains(&t)
            || !(0.0..=1.0).contains(&r)
        {
            return Err(Error::InvalidElement(format!(
                "amplitudes must lie in [0, 1], got t = {t}, r = {r}"
            )));
        }
        let loss = (t * t + r * r - 1.0).abs();
        if loss > tol.constraint {
            return Err(Error::InvalidElement(format!(
                "t^2 + r^2 deviates from 1 by {loss:e}"
            )));
        }
        if self.kind == ElementKind::Membrane {
            let dev = (Complex64::from_polar(1.0, 2.0 * (self.phi_r - self.phi_t)) + 1.0).norm();
            if dev > tol.constraint {
                return Err(Error::InvalidElement(format!(
                    "membrane phases violate exp(2i(phi_r - phi_t)) = -1 by {dev:e}"
                )));
            }
        }
        Ok(())
    }
}

fn reflection_from_transmission(t: f64) -> Result<f64> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidElement(format!(
            "amplitude transmission must lie in [0, 1], got {t}"
        )));
    }
    Ok((1.0 - t * t).sqrt())
}

/// 2x2 complex amplitude map `(U3, G2) = S (U2, G3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl ScatteringMatrix {
    pub fn identity() -> Self {
        Self {
            m11: Complex64::new(1.0, 0.0),
            m12: Complex64::new(0.0, 0.0),
            m21: Complex64::new(0.0, 0.0),
            m22: Complex64::new(1.0, 0.0),
        }
    }

    /// Largest per-entry deviation of `S^dagger S` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p11 = self.m11.norm_sqr() + self.m21.norm_sqr();
        let p22 = self.m12.norm_sqr() + self.m22.norm_sqr();
        let p12 = self.m11.conj() * self.m12 + self.m21.conj() * self.m22;
        (p11 - 1.0).abs().max((p22 - 1.0).abs()).max(p12.norm())
    }

    pub fn is_unitary(&self, tol: &Tolerances) -> bool {
        self.unitarity_deviation() <= tol.unitarity
    }

    /// Power transmission `|m11|^2`.
    pub fn power_transmission(&self) -> f64 {
        self.m11.norm_sqr()
    }

    /// Amplitude reflection seen from the cavity (`U2 -> G2`).
    pub fn cavity_reflection(&self) -> Complex64 {
        self.m21
    }

    /// Amplitude reflection seen from outside (`G3 -> U3`).
    pub fn outside_reflection(&self) -> Complex64 {
        self.m12
    }

    pub fn max_entry_difference(&self, other: &Self) -> f64 {
        [
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }
}

/// The element's matrix exactly as written for its kind.
pub fn element_scattering(spec: &ElementSpec) -> Result<ScatteringMatrix> {
    element_scattering_with(spec, &Tolerances::default())
}

pub fn element_scattering_with(spec: &ElementSpec, tol: &Tolerances) -> Result<ScatteringMatrix> {
    spec.validate(tol)?;
    Ok(match spec.kind {
        ElementKind::Mirror => {
            let trans = I * spec.t;
            let refl = Complex64::new(-spec.r, 0.0);
            ScatteringMatrix {
                m11: trans,
                m12: refl,
                m21: refl,
                m22: trans,
            }
        }
        ElementKind::Membrane => {
            let trans = Complex64::from_polar(spec.t, spec.phi_t);
            let refl = Complex64::from_polar(spec.r, spec.phi_r);
            ScatteringMatrix {
                m11: trans,
                m12: refl,
                m21: refl,
                m22: trans,
            }
        }
    })
}

fn check_pair(mirror: &ElementSpec, membrane: &ElementSpec) -> Result<()> {
    if mirror.kind != ElementKind::Mirror || membrane.kind != ElementKind::Membrane {
        return Err(Error::InvalidElement(
            "tandem needs a mirror followed by a membrane".into(),
        ));
    }
    let tol = Tolerances::default();
    mirror.validate(&tol)?;
    membrane.validate(&tol)
}

fn check_geometry(x: f64, k: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) || !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tandem needs x >= 0 and k > 0, got x = {x}, k = {k}"
        )));
    }
    Ok(())
}

/// Tandem phase `psi = 2kx + phi_r`.
pub fn tandem_phase(membrane: &ElementSpec, x: f64, k: f64) -> f64 {
    2.0 * k * x + membrane.phi_r
}

/// Closed-form scattering matrix of the mirror + membrane tandem, membrane a
/// distance `x` behind the mirror, light wavevector `k`.
pub fn compose_synthetic(
    mirror: &ElementSpec,
    membrane: &ElementSpec,
    x: f64,
    k: f64,
) -> Result<ScatteringMatrix> {
    check_pair(mirror, membrane)?;
    check_geometry(x, k)?;
    let (r, t) = (mirror.r, mirror.t);
    let (r_m, t_m) = (membrane.r, membrane.t);
    let psi = tandem_phase(membrane, x, k);
    let e_psi = Complex64::from_polar(1.0, psi);
    let inv = 1.0 / (1.0 + r * r_m * e_psi);
    let trans = I * t * t_m * Complex64::from_polar(1.0, membrane.phi_t) * inv;
    Ok(ScatteringMatrix {
        m11: trans,
        m12: Complex64::from_polar(1.0, 2.0 * membrane.phi_r) * (r + r_m * e_psi.conj()) * inv,
        m21: -(r + r_m * e_psi) * inv,
        m22: trans,
    })
}

/// Same matrix as [`compose_synthetic`], obtained by solving the four
/// amplitude relations at the mirror and membrane for the internal waves.
///
/// Unknowns are `(G1, G2, U1, U3)`; right-movers propagate as `e^{ikz}`, all
/// amplitudes are referenced to the mirror plane.
pub fn compose_by_elimination(
    mirror: &ElementSpec,
    membrane: &ElementSpec,
    x: f64,
    k: f64,
) -> Result<ScatteringMatrix> {
    check_pair(mirror, membrane)?;
    check_geometry(x, k)?;
    let (r, t) = (mirror.r, mirror.t);
    let (r_m, t_m) = (membrane.r, membrane.t);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let tm_phase = Complex64::from_polar(t_m, membrane.phi_t);
    let rm_back = Complex64::from_polar(r_m, membrane.phi_r + 2.0 * k * x);
    let rm_out = Complex64::from_polar(r_m, membrane.phi_r - 2.0 * k * x);

    // Rows: G1 + r U1 = it U2 ; G2 - it U1 = -r U2 ;
    //       U3 - tm G1 = rm_out G3 ; U1 - rm_back G1 = tm G3.
    #[rustfmt::skip]
    let lhs = Matrix4::new(
        one,       zero, r.into(),  zero,
        zero,      one,  -I * t,    zero,
        -tm_phase, zero, zero,      one,
        -rm_back,  zero, one,       zero,
    );
    #[rustfmt::skip]
    let rhs = Matrix4x2::new(
        I * t,          zero,
        (-r).into(),    zero,
        zero,           rm_out,
        zero,           tm_phase,
    );
    let sol = lhs.lu().solve(&rhs).ok_or(Error::DegenerateDenominator {
        psi: tandem_phase(membrane, x, k),
    })?;
    Ok(ScatteringMatrix {
        m11: sol[(3, 0)],
        m12: sol[(3, 1)],
        m21: sol[(1, 0)],
        m22: sol[(1, 1)],
    })
}

/// Transmission and reflection phase of the synthetic mirror at tandem phase `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticMirrorResponse {
    pub psi: f64,
    /// Power transmission `T`.
    pub transmission: f64,
    /// `arg(-rho)` with `rho` the cavity-side amplitude reflection; principal
    /// value, continuous on `(-pi, pi)` in the reduced phase.
    pub mu: f64,
    pub dt_dpsi: f64,
    pub dmu_dpsi: f64,
}

/// Reduce a phase to `[-pi, pi)`.
pub fn reduce_phase(psi: f64) -> f64 {
    (psi + PI).rem_euclid(TAU) - PI
}

/// Below this a denominator of the form `a^2 + 4 r r_m cos^2(psi/2)` is
/// indistinguishable from zero: `cos(psi/2)` at a float next to `pi` is only
/// known to about one ulp.
fn degenerate_floor(r: f64, r_m: f64) -> f64 {
    (16.0 * r * r_m * f64::EPSILON * f64::EPSILON).max(1e-300)
}

/// Closed-form synthetic-mirror response.
///
/// `T = t^2 t_m^2 / (1 + r^2 r_m^2 + 2 r r_m cos psi)` and
/// `tan mu = r_m t^2 sin psi / (r_m (1 + r^2) cos psi + r (1 + r_m^2))`.
/// Every `1 + cos psi` is evaluated as `2 cos^2(psi/2)` and every
/// `r - r_m`, `1 - r r_m` from the transmissions, so the response stays
/// accurate near `psi = pi` when both reflectivities are close to one.
pub fn synthetic_response(
    psi: f64,
    mirror: &ElementSpec,
    membrane: &ElementSpec,
) -> Result<SyntheticMirrorResponse> {
    check_pair(mirror, membrane)?;
    let (r, t) = (mirror.r, mirror.t);
    let (r_m, t_m) = (membrane.r, membrane.t);
    let t2 = t * t;
    let tm2 = t_m * t_m;

    let red = reduce_phase(psi);
    let (sin_psi, half_cos) = (red.sin(), (0.5 * red).cos());
    let cos2_half = half_cos * half_cos;

    let r_minus_rm = if r + r_m > 0.0 {
        (tm2 - t2) / (r + r_m)
    } else {
        0.0
    };
    let one_minus_rrm = (t2 + tm2 - t2 * tm2) / (1.0 + r * r_m);

    // 1 + r^2 r_m^2 + 2 r r_m cos psi
    let denom = one_minus_rrm * one_minus_rrm + 4.0 * r * r_m * cos2_half;
    let floor = degenerate_floor(r, r_m);
    if denom < floor {
        return Err(Error::DegenerateDenominator { psi });
    }
    // r^2 + r_m^2 + 2 r r_m cos psi = |r + r_m e^{i psi}|^2
    let refl_norm = r_minus_rm * r_minus_rm + 4.0 * r * r_m * cos2_half;

    let transmission = t2 * tm2 / denom;
    let dt_dpsi = 2.0 * r * r_m * t2 * tm2 * sin_psi / (denom * denom);

    let mu_num = r_m * t2 * sin_psi;
    let mu_den = r_minus_rm * one_minus_rrm + 2.0 * r_m * (1.0 + r * r) * cos2_half;
    let mu = mu_num.atan2(mu_den);

    let dmu_dpsi = if r_m == 0.0 {
        0.0
    } else {
        if refl_norm < floor || refl_norm * denom < 1e-300 {
            return Err(Error::DegenerateDenominator { psi });
        }
        let slope_num = -r_minus_rm * one_minus_rrm + 2.0 * r * (1.0 + r_m * r_m) * cos2_half;
        r_m * t2 * slope_num / (refl_norm * denom)
    };

    Ok(SyntheticMirrorResponse {
        psi,
        transmission,
        mu,
        dt_dpsi,
        dmu_dpsi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff::{central5, central5_phase};
    use proptest::prelude::*;

    const K: f64 = TAU / 0.85e-6;

    fn tandem(t: f64, t_m: f64, phi_r: f64) -> (ElementSpec, ElementSpec) {
        (
            ElementSpec::mirror(t).unwrap(),
            ElementSpec::membrane(t_m, phi_r).unwrap(),
        )
    }

    /// Distance giving tandem phase `psi` for the membrane phase `phi_r`.
    fn x_for(psi: f64, phi_r: f64) -> f64 {
        (psi - phi_r).rem_euclid(TAU) / (2.0 * K)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mirror_matrix_as_written() {
        let s = element_scattering(&ElementSpec::mirror(0.6).unwrap()).unwrap();
        let want = ScatteringMatrix {
            m11: c(0.0, 0.6),
            m12: c(-0.8, 0.0),
            m21: c(-0.8, 0.0),
            m22: c(0.0, 0.6),
        };
        assert!(s.max_entry_difference(&want) < 1e-15);
        assert!(s.unitarity_deviation() < 1e-15);
    }

    #[test]
    fn transparent_membrane_is_identity() {
        let spec = ElementSpec {
            kind: ElementKind::Membrane,
            t: 1.0,
            r: 0.0,
            phi_t: 0.0,
            phi_r: FRAC_PI_2,
        };
        let s = element_scattering(&spec).unwrap();
        assert!(s.max_entry_difference(&ScatteringMatrix::identity()) < 1e-15);
    }

    #[test]
    fn rejects_unphysical_elements() {
        assert!(matches!(
            ElementSpec::mirror(1.2),
            Err(Error::InvalidElement(_))
        ));
        let lossy = ElementSpec {
            kind: ElementKind::Mirror,
            t: 0.6,
            r: 0.7,
            phi_t: 0.0,
            phi_r: 0.0,
        };
        assert!(matches!(
            element_scattering(&lossy),
            Err(Error::InvalidElement(_))
        ));
        let bad_phase = ElementSpec {
            kind: ElementKind::Membrane,
            t: 0.6,
            r: 0.8,
            phi_t: 0.0,
            phi_r: 0.0,
        };
        assert!(matches!(
            element_scattering(&bad_phase),
            Err(Error::InvalidElement(_))
        ));
    }

    #[test]
    fn transparent_membrane_leaves_bare_mirror() {
        let (m, mem) = tandem(0.3, 1.0, 0.4);
        let s = compose_synthetic(&m, &mem, 1.3e-7, K).unwrap();
        assert!((s.m11.norm() - 0.3).abs() < 1e-15);
        assert!((s.m22.norm() - 0.3).abs() < 1e-15);
        assert!((s.m12.norm() - m.r).abs() < 1e-15);
        assert!((s.m21.norm() - m.r).abs() < 1e-15);
        let resp = synthetic_response(0.7, &m, &mem).unwrap();
        assert!((resp.transmission - 0.09).abs() < 1e-15);
        assert_eq!(resp.mu, 0.0);
        assert_eq!(resp.dmu_dpsi, 0.0);
    }

    #[test]
    fn maximal_transparency_value() {
        let (m, mem) = tandem(0.014, 0.1, 0.3);
        let x = x_for(PI, 0.3);
        let closed = compose_synthetic(&m, &mem, x, K).unwrap();
        let elim = compose_by_elimination(&m, &mem, x, K).unwrap();
        let resp = synthetic_response(PI, &m, &mem).unwrap();
        // t^2 t_m^2 / (1 - r r_m)^2 evaluated independently
        let (r, r_m) = ((1.0f64 - 0.014 * 0.014).sqrt(), (1.0f64 - 0.01).sqrt());
        let direct = (0.014f64 * 0.1).powi(2) / (1.0 - r * r_m).powi(2);
        assert!((elim.power_transmission() - direct).abs() < 1e-10);
        assert!((closed.power_transmission() - direct).abs() < 1e-10);
        assert!((resp.transmission - direct).abs() < 1e-12);
        assert!((resp.transmission - 0.0751).abs() < 1e-4);
        let slope_scale = direct / (1.0 - r * r_m);
        assert!(resp.dt_dpsi.abs() < 1e-12 * slope_scale);
        let fd = central5(
            |p| synthetic_response(p, &m, &mem).unwrap().transmission,
            PI,
            1e-4,
        );
        assert!(fd.abs() < 1e-9 * slope_scale);
    }

    #[test]
    fn zero_dispersive_transmission() {
        let (t, t_m) = (0.014, 0.1);
        let (m, mem) = tandem(t, t_m, 0.0);
        let (r, r_m) = (m.r, mem.r);
        let psi = (-r_m * (1.0 + r * r) / (r * (1.0 + r_m * r_m))).acos();
        let resp = synthetic_response(psi, &m, &mem).unwrap();
        assert!(resp.dmu_dpsi.abs() < 1e-9);
        let t_star = t * t * (1.0 + r_m * r_m) / (1.0 - r * r * r_m * r_m);
        assert!((resp.transmission - t_star).abs() < 1e-9 * t_star);
    }

    #[test]
    fn degenerate_denominator_for_perfect_reflectors() {
        let (m, mem) = tandem(0.0, 0.0, 0.0);
        assert!(matches!(
            synthetic_response(PI, &m, &mem),
            Err(Error::DegenerateDenominator { .. })
        ));
        assert!(synthetic_response(0.0, &m, &mem).is_ok());
    }

    #[test]
    fn equal_reflectors_at_transparency() {
        // the cavity-side reflection vanishes, so its phase is undefined
        let (m, mem) = tandem(0.1, 0.1, 0.0);
        assert!(matches!(
            synthetic_response(PI, &m, &mem),
            Err(Error::DegenerateDenominator { .. })
        ));
        let s = compose_synthetic(&m, &mem, x_for(PI, 0.0), K).unwrap();
        assert!((s.power_transmission() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cavity_side_port_carries_the_phase() {
        // tan mu matches the cavity-side reflection; the outside one flips the sine
        let (m, mem) = tandem(0.2, 0.3, 0.9);
        let psi = 2.2;
        let s = compose_synthetic(&m, &mem, x_for(psi, 0.9), K).unwrap();
        let resp = synthetic_response(psi, &m, &mem).unwrap();
        let inside = (-s.cavity_reflection()).arg();
        assert!((inside - resp.mu).abs() < 1e-12);
        let outside = (-s.outside_reflection() * Complex64::from_polar(1.0, -2.0 * 0.9)).arg();
        assert!((outside + resp.mu).abs() > 1e-3 || resp.mu.abs() < 1e-12);
        assert!((outside.tan() - resp.mu.tan()).abs() > 1e-3);
    }

    #[test]
    fn rejects_negative_distance() {
        let (m, mem) = tandem(0.2, 0.3, 0.0);
        assert!(compose_synthetic(&m, &mem, -1e-9, K).is_err());
        assert!(compose_by_elimination(&m, &mem, 1e-9, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn elements_are_unitary(t in 0.0f64..=1.0, phi in -10.0f64..10.0) {
            let tol = Tolerances::default();
            prop_assert!(element_scattering(&ElementSpec::mirror(t).unwrap()).unwrap().is_unitary(&tol));
            prop_assert!(element_scattering(&ElementSpec::membrane(t, phi).unwrap()).unwrap().is_unitary(&tol));
        }

        #[test]
        fn tandem_routes_agree(t in 0.01f64..1.0, t_m in 0.01f64..1.0, phi_r in 0.0f64..TAU, psi in 0.0f64..TAU) {
            let (m, mem) = tandem(t, t_m, phi_r);
            let x = x_for(psi, phi_r);
            let a = compose_synthetic(&m, &mem, x, K).unwrap();
            let b = compose_by_elimination(&m, &mem, x, K).unwrap();
            prop_assert!(a.max_entry_difference(&b) < 1e-12);
            prop_assert!(a.unitarity_deviation() < 1e-10);
            prop_assert!((a.m11.norm() - a.m22.norm()).abs() < 1e-12);
            prop_assert!((a.m12.norm() - a.m21.norm()).abs() < 1e-12);
        }

        #[test]
        fn closed_form_matches_matrix(t in 0.001f64..1.0, t_m in 0.001f64..1.0, psi in 0.0f64..TAU) {
            let (m, mem) = tandem(t, t_m, 0.0);
            let s = compose_synthetic(&m, &mem, x_for(psi, 0.0), K).unwrap();
            if let Ok(resp) = synthetic_response(psi, &m, &mem) {
                prop_assert!((resp.transmission - s.power_transmission()).abs() < 1e-10);
                prop_assert!((0.0..=1.0 + 1e-15).contains(&resp.transmission));
                let tan_matrix = (-s.cavity_reflection()).arg().tan();
                let tan_closed = resp.mu.tan();
                prop_assert!((tan_matrix - tan_closed).abs() < 1e-8 * tan_closed.abs().max(1.0));
            }
        }

        #[test]
        fn derivatives_match_finite_differences(t in 0.01f64..0.9, t_m in 0.01f64..0.9, psi in 0.0f64..TAU) {
            let (m, mem) = tandem(t, t_m, 0.0);
            let resp = synthetic_response(psi, &m, &mem).unwrap();
            // width of the transmission feature in psi; the phase also varies
            // on the scale |r - r_m| near psi = pi
            let width = 1.0 - m.r * mem.r;
            let h = 1e-2 * width.min((m.r - mem.r).abs());
            let fd_t = central5(|p| synthetic_response(p, &m, &mem).unwrap().transmission, psi, h);
            let fd_mu = central5_phase(|p| synthetic_response(p, &m, &mem).unwrap().mu, psi, h);
            let t_max = (t * t_m / width).powi(2);
            let mu_scale = (mem.r * t * t / width).min(1.0 / width);
            prop_assert!((resp.dt_dpsi - fd_t).abs() <= 1e-6 * resp.dt_dpsi.abs().max(1e-3 * t_max / width));
            prop_assert!((resp.dmu_dpsi - fd_mu).abs() <= 1e-6 * resp.dmu_dpsi.abs().max(1e-3 * mu_scale));
        }

        #[test]
        fn response_is_periodic(t in 0.0f64..1.0, t_m in 0.01f64..1.0, psi in -20.0f64..20.0) {
            let (m, mem) = tandem(t, t_m, 0.0);
            if let Ok(a) = synthetic_response(psi, &m, &mem) {
                let b = synthetic_response(psi + TAU, &m, &mem).unwrap();
                let scale = 1.0 + a.dt_dpsi.abs() + a.dmu_dpsi.abs();
                prop_assert!((a.transmission - b.transmission).abs() <= 1e-12 * scale);
                prop_assert!((a.dt_dpsi - b.dt_dpsi).abs() <= 1e-12 * scale);
                prop_assert!((a.dmu_dpsi - b.dmu_dpsi).abs() <= 1e-12 * scale);
            }
        }
    }
}
