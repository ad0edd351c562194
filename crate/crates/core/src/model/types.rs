use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Visual stimulus response times reported in the literature, in seconds.
pub const LITERATURE_SRT_RANGE: (f64, f64) = (0.18, 0.27);

/// Per-driver inputs: visual stimulus response time and weekly driving distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverProfile {
    #[serde(rename = "srt_s")]
    pub srt: f64,
    pub experience_km_per_week: f64,
}

impl DriverProfile {
    pub fn new(srt: f64, experience_km_per_week: f64) -> Result<Self, ModelError> {
        let driver = Self {
            srt,
            experience_km_per_week,
        };
        driver.validate()?;
        Ok(driver)
    }

    /// Slowest visual SRT and least experience: the bound the published
    /// coefficients were solved against.
    pub fn calibration_bound() -> Self {
        Self {
            srt: 0.3,
            experience_km_per_week: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.srt) {
            return Err(ModelError::SrtOutOfRange(self.srt));
        }
        if !(self.experience_km_per_week >= 0.0) || !self.experience_km_per_week.is_finite() {
            return Err(ModelError::NegativeExperience(self.experience_km_per_week));
        }
        Ok(())
    }

    pub fn srt_in_literature_range(&self) -> bool {
        let (lo, hi) = LITERATURE_SRT_RANGE;
        (lo..=hi).contains(&self.srt)
    }
}

/// Everything the scenario-specific time needs.
///
/// `noj` counts the adjoining roads at the decision point, excluding the
/// ego vehicle's own approach: a four-way junction has `noj = 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub noa: u32,
    pub noj: u32,
    #[serde(rename = "ego_speed_kmh")]
    pub ego_speed: f64,
    #[serde(rename = "hazard_speed_kmh")]
    pub hazard_speed: f64,
    #[serde(default)]
    pub label: String,
}

impl ScenarioSpec {
    pub fn new(noa: u32, noj: u32, ego_speed: f64, hazard_speed: f64) -> Result<Self, ModelError> {
        let spec = Self {
            noa,
            noj,
            ego_speed,
            hazard_speed,
            label: String::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in [("ego_speed", self.ego_speed), ("hazard_speed", self.hazard_speed)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ModelError::InvalidScenarioValue { field, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NdrtClass {
    HandsFree,
    HandHeld,
}

impl FromStr for NdrtClass {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "handsfree" => Ok(NdrtClass::HandsFree),
            "handheld" => Ok(NdrtClass::HandHeld),
            _ => Err(ModelError::UnknownNdrtClass(s.to_string())),
        }
    }
}

impl fmt::Display for NdrtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NdrtClass::HandsFree => f.write_str("handsfree"),
            NdrtClass::HandHeld => f.write_str("handheld"),
        }
    }
}

/// NDRT the driver was engaged in, and how many times they have met this
/// scenario class (1 = first exposure).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TakeoverContext {
    pub ndrt_class: NdrtClass,
    pub ordinal: u32,
}

impl TakeoverContext {
    pub fn new(ndrt_class: NdrtClass, ordinal: u32) -> Result<Self, ModelError> {
        let ctx = Self { ndrt_class, ordinal };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.ordinal == 0 {
            return Err(ModelError::InvalidOrdinal);
        }
        Ok(())
    }
}
