//! Takeover-request time budget (TORTB) model.
//!
//! The budget is the sum of the driver's stimulus response time, a
//! driving-experience coefficient, a scenario-specific time and a
//! non-driving-task penalty, minus a learning deduction for repeated
//! exposures:
//!
//! ```text
//! total = srt + dec + noa * c_noa + noj * c_noj + rsc + ndrtc - oc
//! ```
//!
//! where `noa * c_noa + noj * c_noj + rsc` is the scenario-specific time.
//! The sum is evaluated strictly left to right so breakdowns are
//! bit-reproducible.

mod coefficients;
mod estimate;
mod types;

pub use coefficients::{Band, CoefficientFile, CoefficientSet, ExperienceBandEntry, SpeedBandEntry};
pub use estimate::{
    compute_sst, dec_lookup, estimate_tortb, ndrtc_lookup, oc_lookup, relative_speed, rsc_lookup,
    Components, SstBreakdown, TortbEstimate,
};
pub use types::{DriverProfile, NdrtClass, ScenarioSpec, TakeoverContext, LITERATURE_SRT_RANGE};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("stimulus response time {0} s is outside [0, 1] s")]
    SrtOutOfRange(f64),
    #[error("driving experience {0} km/week is negative")]
    NegativeExperience(f64),
    #[error("scenario {field} must be a finite value >= 0, got {value}")]
    InvalidScenarioValue { field: &'static str, value: f64 },
    #[error("hazard speed {hazard} km/hr exceeds ego speed {ego} km/hr; relative speed would be negative")]
    NegativeRelativeSpeed { ego: f64, hazard: f64 },
    #[error("relative speed {speed} km/hr is above the model range (max {max} km/hr)")]
    SpeedAboveModelRange { speed: f64, max: f64 },
    #[error("takeover ordinal must be >= 1")]
    InvalidOrdinal,
    #[error("unknown NDRT class `{0}` (expected `handsfree` or `handheld`)")]
    UnknownNdrtClass(String),
    #[error("invalid coefficient set: {0}")]
    InvalidCoefficients(String),
}
