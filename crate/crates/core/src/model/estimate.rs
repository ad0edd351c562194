use serde::{Deserialize, Serialize};

use super::{
    Band, CoefficientSet, DriverProfile, ModelError, NdrtClass, ScenarioSpec, TakeoverContext,
    LITERATURE_SRT_RANGE,
};

/// Closing speed toward the cause of the critical situation.
pub fn relative_speed(ego_speed: f64, hazard_speed: f64) -> Result<f64, ModelError> {
    if ego_speed < hazard_speed {
        return Err(ModelError::NegativeRelativeSpeed {
            ego: ego_speed,
            hazard: hazard_speed,
        });
    }
    Ok(ego_speed - hazard_speed)
}

/// First band whose (inclusive) upper bound covers `x`.
fn band_for(bands: &[Band], x: f64) -> Option<&Band> {
    bands.iter().find(|b| x <= b.upper)
}

pub fn rsc_lookup(rs: f64, coeffs: &CoefficientSet) -> Result<f64, ModelError> {
    band_for(&coeffs.rsc_bands, rs)
        .map(|b| b.value)
        .ok_or(ModelError::SpeedAboveModelRange {
            speed: rs,
            max: coeffs.rsc_max_speed(),
        })
}

/// Experience above the last band falls back to `dec_floor`.
pub fn dec_lookup(experience_km_per_week: f64, coeffs: &CoefficientSet) -> f64 {
    band_for(&coeffs.dec_bands, experience_km_per_week).map_or(coeffs.dec_floor, |b| b.value)
}

pub fn ndrtc_lookup(ndrt_class: NdrtClass, coeffs: &CoefficientSet) -> f64 {
    match ndrt_class {
        NdrtClass::HandsFree => 0.0,
        NdrtClass::HandHeld => coeffs.ndrtc_handheld,
    }
}

pub fn oc_lookup(ordinal: u32, coeffs: &CoefficientSet) -> f64 {
    if ordinal <= 1 {
        0.0
    } else {
        coeffs.oc_repeat
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SstBreakdown {
    pub relative_speed: f64,
    pub noa_term: f64,
    pub noj_term: f64,
    pub rsc: f64,
    pub sst: f64,
}

/// Scenario-specific time: agents, junctions and the relative speed band.
pub fn compute_sst(scenario: &ScenarioSpec, coeffs: &CoefficientSet) -> Result<SstBreakdown, ModelError> {
    scenario.validate()?;
    let rs = relative_speed(scenario.ego_speed, scenario.hazard_speed)?;
    let rsc = rsc_lookup(rs, coeffs)?;
    let noa_term = f64::from(scenario.noa) * coeffs.c_noa;
    let noj_term = f64::from(scenario.noj) * coeffs.c_noj;
    Ok(SstBreakdown {
        relative_speed: rs,
        noa_term,
        noj_term,
        rsc,
        sst: noa_term + noj_term + rsc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub srt: f64,
    pub dec: f64,
    pub sst: f64,
    pub noa_term: f64,
    pub noj_term: f64,
    pub rsc: f64,
    pub ndrtc: f64,
    pub oc: f64,
}

impl Components {
    /// `srt + dec + noa_term + noj_term + rsc + ndrtc - oc`, in that order.
    pub fn sum(&self) -> f64 {
        self.srt + self.dec + self.noa_term + self.noj_term + self.rsc + self.ndrtc - self.oc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TortbEstimate {
    pub total: f64,
    pub components: Components,
    pub relative_speed: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub fn estimate_tortb(
    driver: &DriverProfile,
    scenario: &ScenarioSpec,
    ctx: &TakeoverContext,
    coeffs: &CoefficientSet,
) -> Result<TortbEstimate, ModelError> {
    driver.validate()?;
    ctx.validate()?;
    coeffs.validate()?;
    let sst = compute_sst(scenario, coeffs)?;

    let components = Components {
        srt: driver.srt,
        dec: dec_lookup(driver.experience_km_per_week, coeffs),
        sst: sst.sst,
        noa_term: sst.noa_term,
        noj_term: sst.noj_term,
        rsc: sst.rsc,
        ndrtc: ndrtc_lookup(ctx.ndrt_class, coeffs),
        oc: oc_lookup(ctx.ordinal, coeffs),
    };

    let mut warnings = Vec::new();
    if !driver.srt_in_literature_range() {
        let (lo, hi) = LITERATURE_SRT_RANGE;
        warnings.push(format!(
            "srt {} s is outside the visual stimulus response range [{lo}, {hi}] s",
            driver.srt
        ));
    }
    let mut total = components.sum();
    if total < 0.0 {
        warnings.push(format!("budget {total} s clamped to 0 s"));
        total = 0.0;
    }

    Ok(TortbEstimate {
        total,
        components,
        relative_speed: sst.relative_speed,
        warnings,
    })
}
