//! TOML input files: coefficient sets, calibration anchors and episode
//! batches. Keys carry their units (`_s`, `_kmh`, `_km_per_week`).

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::calibration::{AnchorCase, Unknown};
use crate::model::{CoefficientSet, DriverProfile, ModelError, NdrtClass, ScenarioSpec, TakeoverContext};
use crate::presets::ScenarioPreset;
use crate::simulator::{DeadlineMode, EpisodeConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&text).map_err(|source| ConfigError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_coefficients(path: &Path) -> Result<CoefficientSet, ConfigError> {
    read_toml(path)
}

pub fn coefficients_to_toml(coeffs: &CoefficientSet) -> String {
    toml::to_string(coeffs).expect("coefficient sets always serialize")
}

/// Scenario given either as a preset name or as explicit fields.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct ScenarioFields {
    pub scenario: Option<String>,
    pub noa: Option<u32>,
    pub noj: Option<u32>,
    pub ego_speed_kmh: Option<f64>,
    pub hazard_speed_kmh: Option<f64>,
    pub label: Option<String>,
}

impl ScenarioFields {
    pub fn resolve(&self) -> Result<ScenarioSpec, ConfigError> {
        let explicit = self.noa.is_some()
            || self.noj.is_some()
            || self.ego_speed_kmh.is_some()
            || self.hazard_speed_kmh.is_some();
        let mut spec = match (&self.scenario, explicit) {
            (Some(_), true) => {
                return Err(ConfigError::Invalid(
                    "give either a scenario preset or explicit scenario fields, not both".into(),
                ))
            }
            (Some(name), false) => name.parse::<ScenarioPreset>().map_err(ConfigError::Invalid)?.spec(),
            (None, _) => {
                let missing = |f: &str| ConfigError::Invalid(format!("missing scenario field `{f}`"));
                ScenarioSpec::new(
                    self.noa.ok_or_else(|| missing("noa"))?,
                    self.noj.ok_or_else(|| missing("noj"))?,
                    self.ego_speed_kmh.ok_or_else(|| missing("ego_speed_kmh"))?,
                    self.hazard_speed_kmh.unwrap_or(0.0),
                )?
            }
        };
        if let Some(label) = &self.label {
            spec.label = label.clone();
        }
        Ok(spec)
    }
}

fn parse_ndrt(s: &str) -> Result<NdrtClass, ConfigError> {
    Ok(s.parse::<NdrtClass>()?)
}

#[derive(Debug, Clone, Deserialize)]
pub struct AnchorEntry {
    pub label: Option<String>,
    pub unknown: String,
    pub known_tortb_s: f64,
    pub srt_s: f64,
    pub experience_km_per_week: f64,
    pub ndrt: String,
    pub ordinal: u32,
    #[serde(flatten)]
    pub scenario: ScenarioFields,
}

/// ```toml
/// [coefficients]          # optional seed; defaults to the published set
/// c_noa_s = 1.9
/// ...
///
/// [[anchor]]
/// label = "S1"
/// unknown = "c_noa"
/// known_tortb_s = 7.0
/// srt_s = 0.3
/// experience_km_per_week = 0
/// ndrt = "handsfree"
/// ordinal = 1
/// scenario = "S1"
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorsFile {
    pub coefficients: Option<CoefficientSet>,
    #[serde(default)]
    pub anchor: Vec<AnchorEntry>,
}

impl AnchorsFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        read_toml(path)
    }

    pub fn seed(&self) -> CoefficientSet {
        self.coefficients.clone().unwrap_or_default()
    }

    pub fn anchors(&self) -> Result<Vec<AnchorCase>, ConfigError> {
        self.anchor
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let label = e.label.clone().unwrap_or_else(|| format!("anchor {}", i + 1));
                let ctx_err = |err: ConfigError| ConfigError::Invalid(format!("{label}: {err}"));
                Ok(AnchorCase {
                    unknown: e.unknown.parse::<Unknown>().map_err(ConfigError::Invalid).map_err(ctx_err)?,
                    scenario: e.scenario.resolve().map_err(ctx_err)?,
                    driver: DriverProfile::new(e.srt_s, e.experience_km_per_week)
                        .map_err(|m| ctx_err(m.into()))?,
                    ctx: TakeoverContext::new(parse_ndrt(&e.ndrt).map_err(ctx_err)?, e.ordinal)
                        .map_err(|m| ctx_err(m.into()))?,
                    known_tortb: e.known_tortb_s,
                    label,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct EpisodeEntry {
    pub srt_s: f64,
    pub experience_km_per_week: f64,
    pub ndrt: String,
    pub ordinal: u32,
    pub response_noise_s: Option<f64>,
    pub maneuver_duration_s: Option<f64>,
    /// Explicit deadline; absent means the estimated budget.
    pub deadline_s: Option<f64>,
    pub reference_srt_s: Option<f64>,
    pub reference_experience_km_per_week: Option<f64>,
    #[serde(flatten)]
    pub scenario: ScenarioFields,
}

/// ```toml
/// base_seed = 42
/// response_noise_s = 0.0       # default for every episode
/// maneuver_duration_s = 2.0    # default for every episode
///
/// [[episode]]
/// scenario = "S3"
/// srt_s = 0.25
/// experience_km_per_week = 60
/// ndrt = "handheld"
/// ordinal = 1
/// ```
///
/// Without `deadline_s` the deadline is the budget estimated for the
/// reference driver (`reference_srt_s`, `reference_experience_km_per_week`),
/// which defaults to the calibration bound of 0.3 s and 0 km/week.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodesFile {
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub response_noise_s: f64,
    #[serde(default = "default_maneuver")]
    pub maneuver_duration_s: f64,
    pub coefficients: Option<CoefficientSet>,
    #[serde(default)]
    pub episode: Vec<EpisodeEntry>,
}

fn default_maneuver() -> f64 {
    2.0
}

impl EpisodesFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        read_toml(path)
    }

    pub fn configs(&self) -> Result<Vec<EpisodeConfig>, ConfigError> {
        let coeffs = self.coefficients.clone().unwrap_or_default();
        let bound = DriverProfile::calibration_bound();
        self.episode
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let ctx_err = |err: ConfigError| ConfigError::Invalid(format!("episode {}: {err}", i + 1));
                let deadline_mode = match e.deadline_s {
                    Some(d) => DeadlineMode::Explicit(d),
                    None => DeadlineMode::FromBudget {
                        reference: DriverProfile::new(
                            e.reference_srt_s.unwrap_or(bound.srt),
                            e.reference_experience_km_per_week
                                .unwrap_or(bound.experience_km_per_week),
                        )
                        .map_err(|m| ctx_err(m.into()))?,
                    },
                };
                Ok(EpisodeConfig {
                    driver: DriverProfile::new(e.srt_s, e.experience_km_per_week)
                        .map_err(|m| ctx_err(m.into()))?,
                    scenario: e.scenario.resolve().map_err(ctx_err)?,
                    ctx: TakeoverContext::new(parse_ndrt(&e.ndrt).map_err(ctx_err)?, e.ordinal)
                        .map_err(|m| ctx_err(m.into()))?,
                    coeffs: coeffs.clone(),
                    deadline_mode,
                    response_noise: e.response_noise_s.unwrap_or(self.response_noise_s),
                    maneuver_duration: e.maneuver_duration_s.unwrap_or(self.maneuver_duration_s),
                    seed: 0,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_file_parses() {
        let text = r#"
            [[anchor]]
            label = "S1"
            unknown = "c_noa"
            known_tortb_s = 7.0
            srt_s = 0.3
            experience_km_per_week = 0
            ndrt = "handsfree"
            ordinal = 1
            scenario = "S1"

            [[anchor]]
            unknown = "c_noj"
            known_tortb_s = 7
            srt_s = 0.3
            experience_km_per_week = 10.0
            ndrt = "handsfree"
            ordinal = 1
            noa = 2
            noj = 3
            ego_speed_kmh = 80
        "#;
        let file: AnchorsFile = toml::from_str(text).unwrap();
        let anchors = file.anchors().unwrap();
        assert_eq!(anchors.len(), 2);
        assert_eq!(anchors[0].scenario.noa, 2);
        assert_eq!(anchors[1].label, "anchor 2");
        assert_eq!(anchors[1].scenario.noj, 3);
        assert_eq!(file.seed(), CoefficientSet::published());
    }

    #[test]
    fn scenario_preset_and_fields_conflict() {
        let fields = ScenarioFields {
            scenario: Some("S1".into()),
            noa: Some(1),
            ..Default::default()
        };
        assert!(fields.resolve().is_err());
        let missing = ScenarioFields {
            noa: Some(1),
            ..Default::default()
        };
        assert!(missing.resolve().is_err());
    }

    #[test]
    fn episodes_file_defaults() {
        let text = r#"
            base_seed = 9
            response_noise_s = 0.1

            [[episode]]
            scenario = "S2"
            srt_s = 0.2
            experience_km_per_week = 50
            ndrt = "handheld"
            ordinal = 2

            [[episode]]
            scenario = "S1"
            srt_s = 0.3
            experience_km_per_week = 0
            ndrt = "handsfree"
            ordinal = 1
            deadline_s = 4.0
            maneuver_duration_s = 1.0
        "#;
        let file: EpisodesFile = toml::from_str(text).unwrap();
        let configs = file.configs().unwrap();
        assert_eq!(file.base_seed, 9);
        assert_eq!(configs[0].response_noise, 0.1);
        assert_eq!(configs[0].maneuver_duration, 2.0);
        assert_eq!(configs[0].deadline_mode, DeadlineMode::calibration_bound());
        assert_eq!(configs[1].deadline_mode, DeadlineMode::Explicit(4.0));
        assert_eq!(configs[1].maneuver_duration, 1.0);
    }

    #[test]
    fn invalid_entries_name_the_episode() {
        let text = r#"
            [[episode]]
            scenario = "S1"
            srt_s = 3.0
            experience_km_per_week = 0
            ndrt = "handsfree"
            ordinal = 1
        "#;
        let file: EpisodesFile = toml::from_str(text).unwrap();
        let err = file.configs().unwrap_err().to_string();
        assert!(err.starts_with("episode 1"), "{err}");
    }
}
