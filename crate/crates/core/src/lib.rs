//! Takeover-request time budget (TORTB) toolkit for conditionally
//! automated driving.
//!
//! * [`model`]: the budget formula, banded coefficient lookups and a
//!   component-wise breakdown.
//! * [`calibration`]: solving unknown coefficients from anchor scenarios
//!   whose suitable budget is known.
//! * [`log_analysis`]: takeover time, average lateral displacement and
//!   maximum acceleration from 20 Hz drive logs.
//! * [`simulator`]: seeded discrete-time takeover episodes that emit
//!   synthetic drive logs.
//! * [`cli`]: the `tortb` command-line front end.

pub mod calibration;
pub mod cli;
pub mod config;
pub mod log_analysis;
pub mod model;
pub mod presets;
pub mod simulator;
pub mod table;

pub use model::{
    estimate_tortb, CoefficientSet, DriverProfile, ModelError, NdrtClass, ScenarioSpec,
    TakeoverContext, TortbEstimate,
};
pub use presets::ScenarioPreset;
