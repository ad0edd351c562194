use serde::{Deserialize, Serialize};

use super::{DriveLog, LogError, TIME_EPS};

/// Fraction of full input range that counts as a takeover input.
pub const DEFAULT_TOT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TakeoverMetrics {
    /// Seconds from TOR to the first takeover input; `None` if none occurred.
    pub tot: Option<f64>,
    /// Mean absolute lateral displacement around the TOR, m.
    pub avg_ld: f64,
    /// Peak acceleration between TOR and takeover, m/s²; `None` without a takeover.
    pub max_acc: Option<f64>,
    /// Absolute log time of the takeover input.
    pub takeover_time_abs: Option<f64>,
}

/// Takeover time: from the TOR to the earliest sample at or after it where
/// steering or brake differs from its value at the TOR by at least
/// `threshold` of full range.
pub fn detect_tot(log: &DriveLog, threshold: f64) -> Option<f64> {
    let samples = log.samples();
    let base = samples[log.tor_index()];
    samples[log.tor_index()..]
        .iter()
        .find(|s| (s.steering - base.steering).abs() >= threshold || (s.brake - base.brake).abs() >= threshold)
        .map(|s| s.t - base.t)
}

/// Sample index range covering `[start, end]` (inclusive, with `TIME_EPS` slack).
fn window(log: &DriveLog, start: f64, end: f64) -> Result<std::ops::Range<usize>, LogError> {
    let (first, last) = (log.first_time(), log.last_time());
    if start < first - TIME_EPS || end > last + TIME_EPS || start > end + TIME_EPS {
        return Err(LogError::WindowOutOfRange { start, end, first, last });
    }
    let samples = log.samples();
    let lo = samples.partition_point(|s| s.t < start - TIME_EPS);
    let hi = samples.partition_point(|s| s.t <= end + TIME_EPS);
    Ok(lo..hi)
}

/// Mean of |lateral displacement| over `[tor - pre_window, tor + post_window]`.
pub fn avg_lateral_displacement(log: &DriveLog, pre_window: f64, post_window: f64) -> Result<f64, LogError> {
    if !(pre_window > 0.0) || !(post_window > 0.0) {
        return Err(LogError::InvalidParameter(format!(
            "windows must be > 0 s, got pre {pre_window} s and post {post_window} s"
        )));
    }
    let tor = log.tor_time();
    let range = window(log, tor - pre_window, tor + post_window)?;
    let picked = &log.samples()[range];
    let sum: f64 = picked.iter().map(|s| s.lateral_displacement.abs()).sum();
    Ok(sum / picked.len() as f64)
}

/// Peak acceleration over `[tor, takeover_time_abs]`.
pub fn max_acceleration(log: &DriveLog, takeover_time_abs: f64) -> Result<f64, LogError> {
    let tor = log.tor_time();
    if takeover_time_abs < tor - TIME_EPS {
        return Err(LogError::WindowOutOfRange {
            start: tor,
            end: takeover_time_abs,
            first: log.first_time(),
            last: log.last_time(),
        });
    }
    let range = window(log, tor, takeover_time_abs)?;
    Ok(log.samples()[range]
        .iter()
        .map(|s| s.acceleration)
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn extract_metrics(
    log: &DriveLog,
    pre_window: f64,
    post_window: f64,
    threshold: f64,
) -> Result<TakeoverMetrics, LogError> {
    if !(threshold > 0.0) || threshold > 1.0 {
        return Err(LogError::InvalidParameter(format!(
            "threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let avg_ld = avg_lateral_displacement(log, pre_window, post_window)?;
    let tot = detect_tot(log, threshold);
    let takeover_time_abs = tot.map(|tot| log.tor_time() + tot);
    let max_acc = takeover_time_abs.map(|t| max_acceleration(log, t)).transpose()?;
    Ok(TakeoverMetrics {
        tot,
        avg_ld,
        max_acc,
        takeover_time_abs,
    })
}
