//! Seeded discrete-time takeover episodes.
//!
//! Timeline of one episode, relative to the TOR instant:
//!
//! ```text
//! TOR ── response onset ── maneuver start ─────── maneuver end ──
//!  0     srt + ndrtc       max(onset, required - maneuver)   start + maneuver
//! ```
//!
//! The deadline (critical situation) lies either at the estimated budget
//! or at an explicit time. The synthetic driver needs
//! `srt + dec + sst + ndrtc - oc` of their own, plus bounded uniform noise.
//! Kinematics are schematic: a steering step at the response onset, a
//! raised-cosine lane change and a half-sine acceleration pulse.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log_analysis::{DriveLog, LogError, Sample, Summary};
use crate::model::{
    estimate_tortb, ndrtc_lookup, CoefficientSet, DriverProfile, ModelError, ScenarioSpec,
    TakeoverContext,
};

pub const SAMPLE_RATE: f64 = 20.0;
/// Samples recorded before the TOR.
pub const LEAD_IN_SAMPLES: usize = 100;
/// Seconds recorded after the later of maneuver end and deadline.
pub const TAIL_S: f64 = 5.0;
/// Lane-change amplitude: one lane width, m.
pub const LANE_WIDTH_M: f64 = 3.5;
pub const STEERING_BASELINE: f64 = 0.5;
pub const STEERING_STEP: f64 = 0.2;
/// Peak of the acceleration pulse during the maneuver, m/s².
pub const ACCEL_PEAK: f64 = 1.5;
/// Half-width of the lane-keeping wander before the maneuver, m.
const LANE_WANDER_M: f64 = 0.1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("invalid episode config: {0}")]
    InvalidConfig(String),
    #[error("batch has no episodes")]
    EmptyBatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeadlineMode {
    /// Deadline at the budget estimated for `reference`, normally the
    /// slowest and least experienced driver the budget must cover.
    FromBudget { reference: DriverProfile },
    /// Deadline in seconds after the TOR.
    Explicit(f64),
}

impl DeadlineMode {
    pub fn calibration_bound() -> Self {
        DeadlineMode::FromBudget {
            reference: DriverProfile::calibration_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub driver: DriverProfile,
    pub scenario: ScenarioSpec,
    pub ctx: TakeoverContext,
    pub coeffs: CoefficientSet,
    pub deadline_mode: DeadlineMode,
    /// Half-width of the uniform perturbation on the required time, s.
    pub response_noise: f64,
    pub maneuver_duration: f64,
    pub seed: u64,
}

impl EpisodeConfig {
    /// Noise-free config with the deadline at the calibration-bound budget.
    pub fn new(driver: DriverProfile, scenario: ScenarioSpec, ctx: TakeoverContext) -> Self {
        Self {
            driver,
            scenario,
            ctx,
            coeffs: CoefficientSet::published(),
            deadline_mode: DeadlineMode::calibration_bound(),
            response_noise: 0.0,
            maneuver_duration: 2.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.response_noise >= 0.0) || !self.response_noise.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "response_noise must be >= 0, got {}",
                self.response_noise
            )));
        }
        if !(self.maneuver_duration > 0.0) || !self.maneuver_duration.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "maneuver_duration must be > 0, got {}",
                self.maneuver_duration
            )));
        }
        if let DeadlineMode::Explicit(d) = self.deadline_mode {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(SimError::InvalidConfig(format!("explicit deadline must be >= 0, got {d}")));
            }
        }
        Ok(())
    }

    /// Time after the TOR at which the driver's first input appears.
    pub fn response_onset(&self) -> f64 {
        self.driver.srt + ndrtc_lookup(self.ctx.ndrt_class, &self.coeffs)
    }

    pub fn deadline(&self) -> Result<f64, SimError> {
        Ok(match &self.deadline_mode {
            DeadlineMode::FromBudget { reference } => {
                estimate_tortb(reference, &self.scenario, &self.ctx, &self.coeffs)?.total
            }
            DeadlineMode::Explicit(d) => *d,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Success,
    Late,
    Collision,
}

/// `Success` iff `margin >= 0`; `Collision` iff `margin <= -maneuver_duration`.
pub fn classify(margin: f64, maneuver_duration: f64) -> Classification {
    if margin >= 0.0 {
        Classification::Success
    } else if margin > -maneuver_duration {
        Classification::Late
    } else {
        Classification::Collision
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeOutcome {
    pub required_time: f64,
    pub deadline: f64,
    pub classification: Classification,
    /// `deadline - required_time`
    pub margin: f64,
    pub response_onset: f64,
    pub seed: u64,
    #[serde(skip)]
    pub log: DriveLog,
}

/// The driver's own time to complete takeover and maneuver.
pub fn required_takeover_time<R: Rng + ?Sized>(cfg: &EpisodeConfig, rng: &mut R) -> Result<f64, SimError> {
    cfg.validate()?;
    let own = estimate_tortb(&cfg.driver, &cfg.scenario, &cfg.ctx, &cfg.coeffs)?.total;
    let noise = if cfg.response_noise > 0.0 {
        rng.gen_range(-cfg.response_noise..=cfg.response_noise)
    } else {
        0.0
    };
    Ok((own + noise).max(0.0))
}

pub fn run_episode(cfg: &EpisodeConfig) -> Result<EpisodeOutcome, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let required_time = required_takeover_time(cfg, &mut rng)?;
    let deadline = cfg.deadline()?;
    let margin = deadline - required_time;
    let response_onset = cfg.response_onset();
    let log = synthesize_log(cfg, required_time, deadline, response_onset, &mut rng)?;
    Ok(EpisodeOutcome {
        required_time,
        deadline,
        classification: classify(margin, cfg.maneuver_duration),
        margin,
        response_onset,
        seed: cfg.seed,
        log,
    })
}

fn synthesize_log(
    cfg: &EpisodeConfig,
    required_time: f64,
    deadline: f64,
    onset: f64,
    rng: &mut ChaCha8Rng,
) -> Result<DriveLog, SimError> {
    let maneuver_start = onset.max(required_time - cfg.maneuver_duration);
    let maneuver_end = maneuver_start + cfg.maneuver_duration;
    let horizon = maneuver_end.max(deadline) + TAIL_S;
    let post_samples = (horizon * SAMPLE_RATE).ceil() as usize;
    // first sample index (relative to the TOR) at or after the onset. The TOR
    // sample is the detector's reference value, so a zero onset shows up one
    // sample later.
    let onset_k = ((onset * SAMPLE_RATE - 1e-9).ceil() as usize).max(1);

    let samples = (0..=LEAD_IN_SAMPLES + post_samples)
        .map(|k| {
            let t = k as f64 / SAMPLE_RATE;
            let rel = (k as f64 - LEAD_IN_SAMPLES as f64) / SAMPLE_RATE;
            let progress = ((rel - maneuver_start) / cfg.maneuver_duration).clamp(0.0, 1.0);
            let in_maneuver = rel > maneuver_start && rel < maneuver_end;
            let wander = if progress == 0.0 {
                rng.gen_range(-LANE_WANDER_M..=LANE_WANDER_M)
            } else {
                0.0
            };
            Sample {
                t,
                lateral_displacement: wander + LANE_WIDTH_M * (1.0 - (PI * progress).cos()) / 2.0,
                acceleration: if in_maneuver { ACCEL_PEAK * (PI * progress).sin() } else { 0.0 },
                steering: if k >= LEAD_IN_SAMPLES + onset_k {
                    STEERING_BASELINE + STEERING_STEP
                } else {
                    STEERING_BASELINE
                },
                brake: 0.0,
            }
        })
        .collect();
    Ok(DriveLog::new(SAMPLE_RATE, samples, LEAD_IN_SAMPLES)?)
}

/// Seed of episode `index` in a batch: SplitMix64 of
/// `base_seed + (index + 1) * 0x9E3779B97F4A7C15` (wrapping).
pub fn episode_seed(base_seed: u64, index: usize) -> u64 {
    let mut z = base_seed.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub base_seed: u64,
    pub outcomes: Vec<EpisodeOutcome>,
    pub success: usize,
    pub late: usize,
    pub collision: usize,
    pub margin: Summary,
}

/// Runs every config with its seed replaced by [`episode_seed`]. Episodes
/// run in parallel; the report is independent of execution order.
pub fn run_batch(configs: &[EpisodeConfig], base_seed: u64) -> Result<BatchReport, SimError> {
    if configs.is_empty() {
        return Err(SimError::EmptyBatch);
    }
    let outcomes = configs
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| {
            let cfg = EpisodeConfig {
                seed: episode_seed(base_seed, i),
                ..cfg.clone()
            };
            run_episode(&cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let count = |c: Classification| outcomes.iter().filter(|o| o.classification == c).count();
    let margins: Vec<f64> = outcomes.iter().map(|o| o.margin).collect();
    Ok(BatchReport {
        base_seed,
        success: count(Classification::Success),
        late: count(Classification::Late),
        collision: count(Classification::Collision),
        margin: Summary::from_values(&margins)?,
        outcomes,
    })
}
