use serde::{Deserialize, Serialize};

use super::ModelError;

/// One row of a banded lookup: applies to inputs up to and including `upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub upper: f64,
    pub value: f64,
}

impl Band {
    pub const fn new(upper: f64, value: f64) -> Self {
        Self { upper, value }
    }
}

/// Model constants.
///
/// Serialized through [`CoefficientFile`], whose keys carry their units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CoefficientFile", try_from = "CoefficientFile")]
pub struct CoefficientSet {
    /// Seconds per interacting traffic agent.
    pub c_noa: f64,
    /// Seconds per adjoining road.
    pub c_noj: f64,
    /// Relative speed (km/hr) bands.
    pub rsc_bands: Vec<Band>,
    /// Weekly driving distance (km/week) bands.
    pub dec_bands: Vec<Band>,
    /// DEC for experience above the last band.
    pub dec_floor: f64,
    pub ndrtc_handheld: f64,
    pub oc_repeat: f64,
}

impl Default for CoefficientSet {
    fn default() -> Self {
        Self::published()
    }
}

impl CoefficientSet {
    /// The published, one-decimal rounded coefficient set.
    pub fn published() -> Self {
        Self {
            c_noa: 1.9,
            c_noj: 0.2,
            rsc_bands: vec![Band::new(50.0, 0.25), Band::new(80.0, 0.5), Band::new(130.0, 1.0)],
            dec_bands: vec![Band::new(30.0, 2.0), Band::new(100.0, 1.5), Band::new(200.0, 1.0)],
            dec_floor: 1.0,
            ndrtc_handheld: 2.73,
            oc_repeat: 0.4,
        }
    }

    /// The published set with the solved coefficients left unrounded:
    /// `c_noa = 3.7 / 2`, `c_noj = 0.5 / 3`, `oc_repeat = 0.053 * 7`.
    pub fn unrounded() -> Self {
        Self {
            c_noa: 1.85,
            c_noj: 0.5 / 3.0,
            oc_repeat: 0.053 * 7.0,
            ..Self::published()
        }
    }

    pub fn with_ndrtc_handheld(mut self, seconds: f64) -> Self {
        self.ndrtc_handheld = seconds;
        self
    }

    pub fn rsc_max_speed(&self) -> f64 {
        self.rsc_bands.last().map_or(0.0, |b| b.upper)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let scalars = [
            ("c_noa", self.c_noa),
            ("c_noj", self.c_noj),
            ("dec_floor", self.dec_floor),
            ("ndrtc_handheld", self.ndrtc_handheld),
            ("oc_repeat", self.oc_repeat),
        ];
        for (name, v) in scalars {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ModelError::InvalidCoefficients(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        check_bands("rsc_bands", &self.rsc_bands, |prev, next| next >= prev, "non-decreasing")?;
        check_bands("dec_bands", &self.dec_bands, |prev, next| next <= prev, "non-increasing")?;
        if let Some(last) = self.dec_bands.last() {
            if self.dec_floor > last.value {
                return Err(ModelError::InvalidCoefficients(format!(
                    "dec_floor {} exceeds the last DEC band value {}",
                    self.dec_floor, last.value
                )));
            }
        }
        Ok(())
    }
}

fn check_bands(
    name: &str,
    bands: &[Band],
    ordered: impl Fn(f64, f64) -> bool,
    order_name: &str,
) -> Result<(), ModelError> {
    if bands.is_empty() {
        return Err(ModelError::InvalidCoefficients(format!("{name} is empty")));
    }
    for b in bands {
        if !(b.upper >= 0.0) || !(b.value >= 0.0) || !b.upper.is_finite() || !b.value.is_finite() {
            return Err(ModelError::InvalidCoefficients(format!(
                "{name} entries must be finite and >= 0"
            )));
        }
    }
    for pair in bands.windows(2) {
        if !(pair[1].upper > pair[0].upper) {
            return Err(ModelError::InvalidCoefficients(format!(
                "{name} upper bounds must be strictly increasing"
            )));
        }
        if !ordered(pair[0].value, pair[1].value) {
            return Err(ModelError::InvalidCoefficients(format!(
                "{name} values must be {order_name}"
            )));
        }
    }
    Ok(())
}

/// On-disk layout of a [`CoefficientSet`]. Every key names its unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub c_noa_s: f64,
    pub c_noj_s: f64,
    pub dec_floor_s: f64,
    pub ndrtc_handheld_s: f64,
    pub oc_repeat_s: f64,
    pub rsc_bands: Vec<SpeedBandEntry>,
    pub dec_bands: Vec<ExperienceBandEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedBandEntry {
    pub upper_kmh: f64,
    pub value_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperienceBandEntry {
    pub upper_km_per_week: f64,
    pub value_s: f64,
}

impl From<CoefficientSet> for CoefficientFile {
    fn from(c: CoefficientSet) -> Self {
        Self {
            c_noa_s: c.c_noa,
            c_noj_s: c.c_noj,
            dec_floor_s: c.dec_floor,
            ndrtc_handheld_s: c.ndrtc_handheld,
            oc_repeat_s: c.oc_repeat,
            rsc_bands: c
                .rsc_bands
                .iter()
                .map(|b| SpeedBandEntry {
                    upper_kmh: b.upper,
                    value_s: b.value,
                })
                .collect(),
            dec_bands: c
                .dec_bands
                .iter()
                .map(|b| ExperienceBandEntry {
                    upper_km_per_week: b.upper,
                    value_s: b.value,
                })
                .collect(),
        }
    }
}

impl TryFrom<CoefficientFile> for CoefficientSet {
    type Error = ModelError;

    fn try_from(f: CoefficientFile) -> Result<Self, Self::Error> {
        let set = CoefficientSet {
            c_noa: f.c_noa_s,
            c_noj: f.c_noj_s,
            rsc_bands: f
                .rsc_bands
                .iter()
                .map(|b| Band::new(b.upper_kmh, b.value_s))
                .collect(),
            dec_bands: f
                .dec_bands
                .iter()
                .map(|b| Band::new(b.upper_km_per_week, b.value_s))
                .collect(),
            dec_floor: f.dec_floor_s,
            ndrtc_handheld: f.ndrtc_handheld_s,
            oc_repeat: f.oc_repeat_s,
        };
        set.validate()?;
        Ok(set)
    }
}
