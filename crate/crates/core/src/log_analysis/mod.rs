//! Objective takeover performance measures from 20 Hz drive logs.
//!
//! Logs are CSV with the header `t,lat_disp,acc,steering,brake,tor_flag`
//! and exactly one row flagged as the takeover request (TOR).

mod drive_log;
mod metrics;
mod summary;

pub use drive_log::{parse_drive_log, parse_drive_log_with_rate, DriveLog, Sample, CSV_HEADER, DEFAULT_SAMPLE_RATE};
pub use metrics::{
    avg_lateral_displacement, detect_tot, extract_metrics, max_acceleration, TakeoverMetrics,
    DEFAULT_TOT_THRESHOLD,
};
pub use summary::{summarize, summarize_metrics, MetricsSummary, Summary};

use thiserror::Error;

/// Slack when comparing timestamps against window edges, in seconds.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("non-uniform sampling at row {row}: step {step} s, expected {expected} s")]
    NonUniformSampling { row: usize, step: f64, expected: f64 },
    #[error("no row has tor_flag = 1")]
    MissingTorMarker,
    #[error("{0} rows have tor_flag = 1; exactly one is required")]
    MultipleTorMarkers(usize),
    #[error("window [{start}, {end}] s is outside the log extent [{first}, {last}] s")]
    WindowOutOfRange { start: f64, end: f64, first: f64, last: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot summarize an empty group")]
    EmptyGroup,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
