//! Sequential substitution of unknown coefficients.
//!
//! An anchor is a scenario whose suitable budget is known. With every
//! other coefficient fixed, the budget formula is linear in the single
//! unknown, so each anchor determines exactly one value:
//!
//! ```text
//! raw = (known_tortb - sum of known terms) / multiplier
//! ```
//!
//! The multiplier is `noa` for `c_noa`, `noj` for `c_noj`, and `-1` for the
//! repeat-exposure deduction. Anchors are solved in order and each solved
//! value feeds the anchors that follow.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    compute_sst, dec_lookup, estimate_tortb, ndrtc_lookup, oc_lookup, CoefficientSet,
    DriverProfile, ModelError, ScenarioSpec, TakeoverContext,
};

/// Raw values this far below zero are treated as exactly zero.
const NEGATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("anchor `{label}` cannot identify {unknown}: its multiplier is zero")]
    UnidentifiableUnknown { label: String, unknown: Unknown },
    #[error("anchor `{label}` solves {unknown} = {raw}, which is negative; the anchors are inconsistent")]
    NegativeCoefficient { label: String, unknown: Unknown, raw: f64 },
    #[error("anchor `{label}` needs {needs}, which a later anchor solves")]
    DependencyOrder { label: String, needs: Unknown },
    #[error("{0} is solved by more than one anchor")]
    DuplicateUnknown(Unknown),
    #[error("invalid anchor `{label}`: {reason}")]
    InvalidAnchor { label: String, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unknown {
    CNoa,
    CNoj,
    Oc,
}

impl Unknown {
    pub fn get(self, coeffs: &CoefficientSet) -> f64 {
        match self {
            Unknown::CNoa => coeffs.c_noa,
            Unknown::CNoj => coeffs.c_noj,
            Unknown::Oc => coeffs.oc_repeat,
        }
    }

    pub fn set(self, coeffs: &mut CoefficientSet, value: f64) {
        match self {
            Unknown::CNoa => coeffs.c_noa = value,
            Unknown::CNoj => coeffs.c_noj = value,
            Unknown::Oc => coeffs.oc_repeat = value,
        }
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unknown::CNoa => "c_noa",
            Unknown::CNoj => "c_noj",
            Unknown::Oc => "oc",
        })
    }
}

impl FromStr for Unknown {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c_noa" | "cnoa" => Ok(Unknown::CNoa),
            "c_noj" | "cnoj" => Ok(Unknown::CNoj),
            "oc" | "oc_repeat" => Ok(Unknown::Oc),
            _ => Err(format!("unknown coefficient `{s}` (expected c_noa, c_noj or oc)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chaining {
    /// Later anchors see earlier solutions unrounded.
    #[default]
    UseRaw,
    /// Later anchors see earlier solutions rounded to one decimal.
    UseRounded,
}

impl FromStr for Chaining {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" | "use_raw" => Ok(Chaining::UseRaw),
            "rounded" | "use_rounded" => Ok(Chaining::UseRounded),
            _ => Err(format!("unknown chaining `{s}` (expected raw or rounded)")),
        }
    }
}

/// A scenario with a known suitable budget, used to solve one coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorCase {
    pub label: String,
    pub scenario: ScenarioSpec,
    pub driver: DriverProfile,
    pub ctx: TakeoverContext,
    pub known_tortb: f64,
    pub unknown: Unknown,
}

impl AnchorCase {
    /// Coefficient of `unknown` in the budget formula for this anchor.
    pub fn multiplier(&self) -> f64 {
        match self.unknown {
            Unknown::CNoa => f64::from(self.scenario.noa),
            Unknown::CNoj => f64::from(self.scenario.noj),
            Unknown::Oc if self.ctx.ordinal >= 2 => -1.0,
            Unknown::Oc => 0.0,
        }
    }

    /// Solvable coefficients other than its own unknown that this anchor's
    /// budget depends on.
    pub fn dependencies(&self) -> Vec<Unknown> {
        let mut deps = Vec::new();
        if self.scenario.noa > 0 {
            deps.push(Unknown::CNoa);
        }
        if self.scenario.noj > 0 {
            deps.push(Unknown::CNoj);
        }
        if self.ctx.ordinal >= 2 {
            deps.push(Unknown::Oc);
        }
        deps.retain(|u| *u != self.unknown);
        deps
    }

    fn validate(&self) -> Result<(), CalibrationError> {
        if !(self.known_tortb > 0.0) || !self.known_tortb.is_finite() {
            return Err(CalibrationError::InvalidAnchor {
                label: self.label.clone(),
                reason: format!("known_tortb must be > 0, got {}", self.known_tortb),
            });
        }
        self.driver.validate()?;
        self.scenario.validate()?;
        self.ctx.validate()?;
        Ok(())
    }
}

/// Rounds half-up to one decimal place.
///
/// Values within 1e-9 below a tie are treated as the tie, so binary
/// representations such as `(7.0 - 3.3) / 2.0` still round up.
pub fn round_one_decimal(x: f64) -> f64 {
    let scaled = x * 10.0;
    let floor = scaled.floor();
    let rounded = if scaled - floor >= 0.5 - 1e-9 { floor + 1.0 } else { floor };
    rounded / 10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvedValue {
    pub raw: f64,
    pub rounded: f64,
}

impl SolvedValue {
    fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            rounded: round_one_decimal(raw),
        }
    }
}

pub fn solve_coefficient(anchor: &AnchorCase, known: &CoefficientSet) -> Result<SolvedValue, CalibrationError> {
    anchor.validate()?;
    known.validate()?;
    let multiplier = anchor.multiplier();
    if multiplier == 0.0 {
        return Err(CalibrationError::UnidentifiableUnknown {
            label: anchor.label.clone(),
            unknown: anchor.unknown,
        });
    }

    let sst = compute_sst(&anchor.scenario, known)?;
    let noa_term = if anchor.unknown == Unknown::CNoa { 0.0 } else { sst.noa_term };
    let noj_term = if anchor.unknown == Unknown::CNoj { 0.0 } else { sst.noj_term };
    let oc = if anchor.unknown == Unknown::Oc {
        0.0
    } else {
        oc_lookup(anchor.ctx.ordinal, known)
    };
    let known_terms = anchor.driver.srt
        + dec_lookup(anchor.driver.experience_km_per_week, known)
        + noa_term
        + noj_term
        + sst.rsc
        + ndrtc_lookup(anchor.ctx.ndrt_class, known)
        - oc;

    let mut raw = (anchor.known_tortb - known_terms) / multiplier;
    if raw < 0.0 {
        if raw < -NEGATIVE_TOLERANCE {
            return Err(CalibrationError::NegativeCoefficient {
                label: anchor.label.clone(),
                unknown: anchor.unknown,
                raw,
            });
        }
        raw = 0.0;
    }
    Ok(SolvedValue::from_raw(raw))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedCoefficient {
    pub label: String,
    pub unknown: Unknown,
    pub raw: f64,
    pub rounded: f64,
    /// Anchor budget minus its reconstruction with the rounded set.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub chaining: Chaining,
    pub solved: Vec<SolvedCoefficient>,
    /// Seed with every solved coefficient replaced by its raw value.
    pub raw: CoefficientSet,
    /// Seed with every solved coefficient replaced by its rounded value.
    pub rounded: CoefficientSet,
}

impl CalibrationResult {
    pub fn get(&self, unknown: Unknown) -> Option<&SolvedCoefficient> {
        self.solved.iter().find(|s| s.unknown == unknown)
    }
}

/// Solves `anchors` in order, starting from `seed`.
///
/// Seed values for the anchors' unknowns are ignored. An anchor whose
/// budget depends on a coefficient that only a later anchor solves is a
/// [`CalibrationError::DependencyOrder`] error.
pub fn calibrate_sequence(
    anchors: &[AnchorCase],
    seed: &CoefficientSet,
    chaining: Chaining,
) -> Result<CalibrationResult, CalibrationError> {
    let mut pending = HashSet::new();
    for a in anchors {
        if !pending.insert(a.unknown) {
            return Err(CalibrationError::DuplicateUnknown(a.unknown));
        }
    }

    let mut working = seed.clone();
    let mut raw_set = seed.clone();
    let mut rounded_set = seed.clone();
    let mut values = Vec::with_capacity(anchors.len());

    for anchor in anchors {
        if let Some(needs) = anchor.dependencies().into_iter().find(|u| pending.contains(u)) {
            return Err(CalibrationError::DependencyOrder {
                label: anchor.label.clone(),
                needs,
            });
        }
        let solved = solve_coefficient(anchor, &working)?;
        anchor.unknown.set(&mut raw_set, solved.raw);
        anchor.unknown.set(&mut rounded_set, solved.rounded);
        let chained = match chaining {
            Chaining::UseRaw => solved.raw,
            Chaining::UseRounded => solved.rounded,
        };
        anchor.unknown.set(&mut working, chained);
        pending.remove(&anchor.unknown);
        values.push(solved);
    }

    let solved = anchors
        .iter()
        .zip(values)
        .map(|(anchor, v)| {
            let rebuilt = estimate_tortb(&anchor.driver, &anchor.scenario, &anchor.ctx, &rounded_set)?;
            Ok(SolvedCoefficient {
                label: anchor.label.clone(),
                unknown: anchor.unknown,
                raw: v.raw,
                rounded: v.rounded,
                residual: anchor.known_tortb - rebuilt.total,
            })
        })
        .collect::<Result<Vec<_>, CalibrationError>>()?;

    Ok(CalibrationResult {
        chaining,
        solved,
        raw: raw_set,
        rounded: rounded_set,
    })
}

/// Repeat-exposure deduction as the ordinal effect size (partial eta
/// squared) times the upper-bound budget.
pub fn derive_oc(ordinal_effect_size: f64, upper_bound_tortb: f64) -> Result<SolvedValue, CalibrationError> {
    if !(0.0..=1.0).contains(&ordinal_effect_size) {
        return Err(CalibrationError::InvalidInput(format!(
            "effect size must lie in [0, 1], got {ordinal_effect_size}"
        )));
    }
    if !(upper_bound_tortb > 0.0) || !upper_bound_tortb.is_finite() {
        return Err(CalibrationError::InvalidInput(format!(
            "upper bound budget must be > 0, got {upper_bound_tortb}"
        )));
    }
    Ok(SolvedValue::from_raw(ordinal_effect_size * upper_bound_tortb))
}

/// Anchors used to solve the published coefficients: S1 for `c_noa` and S3
/// for `c_noj`, both at a 7 s budget for the slowest, least experienced
/// driver engaged in a hands-free task on a first drive.
pub fn published_anchors() -> Vec<AnchorCase> {
    use crate::model::NdrtClass;
    use crate::presets::ScenarioPreset;

    let ctx = TakeoverContext {
        ndrt_class: NdrtClass::HandsFree,
        ordinal: 1,
    };
    vec![
        AnchorCase {
            label: "S1".into(),
            scenario: ScenarioPreset::S1.spec(),
            driver: DriverProfile::calibration_bound(),
            ctx,
            known_tortb: 7.0,
            unknown: Unknown::CNoa,
        },
        AnchorCase {
            label: "S3".into(),
            scenario: ScenarioPreset::S3.spec(),
            driver: DriverProfile::calibration_bound(),
            ctx,
            known_tortb: 7.0,
            unknown: Unknown::CNoj,
        },
    ]
}
