//! Secrecy outage and harvested energy of a power-splitting SWIPT downlink
//! observed by `N` energy-harvesting eavesdroppers over Nakagami-m fading
//! with imperfect channel estimates.

// Tabulated coefficients are kept at their published digits.
#![allow(clippy::excessive_precision)]

pub mod channel;
pub mod config;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod outage;
pub mod quadrature;
pub mod specfun;

pub use channel::{Architecture, EveMode, EveNoiseSplit, LinkGeometry, Side, SystemParams};
pub use distributions::LinkDistributions;
pub use error::{Error, QuadratureFailure, Result};
pub use experiments::{Axis, Figure, McSettings, SweepRow, SweepSpec, ValidationReport};
pub use montecarlo::{EnergySecrecyPoint, SimSpec};
pub use outage::{ArchitecturePair, Method, OutageEstimate, SeriesForm};
pub use specfun::GammaShapeRate;
