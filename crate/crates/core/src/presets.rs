//! Bundled scenario presets.
//!
//! * `S1`: stationary car ahead on the highway with a second vehicle
//!   approaching, ego at 130 km/hr; two agents, no junctions.
//! * `S2`: leaving the highway at an exit, 50 km/hr. `noj = 1` models the
//!   exit ramp branch. This preset is an extrapolation: no published
//!   budget was derived from it.
//! * `S3`: right turn at a four-way country road junction with a bicyclist
//!   and a pedestrian, 80 km/hr; `noj = 3` counts the adjoining roads
//!   other than the ego's approach.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::ScenarioSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioPreset {
    S1,
    S2,
    S3,
}

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 3] = [ScenarioPreset::S1, ScenarioPreset::S2, ScenarioPreset::S3];

    pub fn spec(self) -> ScenarioSpec {
        let (noa, noj, ego_speed, label) = match self {
            ScenarioPreset::S1 => (2, 0, 130.0, "S1 stationary car on highway"),
            ScenarioPreset::S2 => (0, 1, 50.0, "S2 highway exit"),
            ScenarioPreset::S3 => (2, 3, 80.0, "S3 right turn at country junction"),
        };
        ScenarioSpec {
            noa,
            noj,
            ego_speed,
            hazard_speed: 0.0,
            label: label.to_string(),
        }
    }
}

impl fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ScenarioPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(ScenarioPreset::S1),
            "S2" => Ok(ScenarioPreset::S2),
            "S3" => Ok(ScenarioPreset::S3),
            _ => Err(format!("unknown scenario preset `{s}` (expected S1, S2 or S3)")),
        }
    }
}
