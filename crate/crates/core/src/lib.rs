//! Synthetic-mirror scattering and optomechanical coupling models for
//! dissipatively coupled cavities: membrane outside the cavity (MOS),
//! Michelson-Sagnac interferometer (MSI) and membrane at the edge (MATE),
//! plus the quantum noise of a three-port cavity.

pub mod constants;
pub mod error;
pub mod mate;
pub mod mos;
pub mod msi;
pub mod noise;
pub mod numdiff;
pub mod roots;
pub mod scattering;

pub use error::{Error, Result};
pub use mate::{Branch, MateConfig, MateDecay, MateResonance, MateZeroDispersive, ModeFamily};
pub use mos::{MosConfig, OperatingPoint, RegimeFlags, RegimeMargins, ZeroDispersiveLocus};
pub use msi::{EffectiveMirror, MsiConfig, MsiCouplings, MsiZeroDispersive};
pub use noise::{
    CooperativityInputs, CooperativitySystem, DriveConfig, MechanicalParams, NoiseReport,
    PortRates, Units,
};
pub use scattering::{
    ElementKind, ElementSpec, ScatteringMatrix, SyntheticMirrorResponse, Tolerances,
};
