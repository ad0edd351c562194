use std::io::{Read, Write};

use serde::Deserialize;

use super::LogError;

pub const DEFAULT_SAMPLE_RATE: f64 = 20.0;
pub const CSV_HEADER: [&str; 6] = ["t", "lat_disp", "acc", "steering", "brake", "tor_flag"];

/// Tolerated deviation of a sampling step from `1 / sample_rate`, in seconds.
const STEP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Signed offset from the lane center, m.
    pub lateral_displacement: f64,
    /// Longitudinal acceleration, m/s².
    pub acceleration: f64,
    /// Fraction of full steering range, `[0, 1]`.
    pub steering: f64,
    /// Fraction of full brake range, `[0, 1]`.
    pub brake: f64,
}

/// A validated, uniformly sampled log with a single TOR instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveLog {
    sample_rate: f64,
    samples: Vec<Sample>,
    tor_index: usize,
}

impl DriveLog {
    pub fn new(sample_rate: f64, samples: Vec<Sample>, tor_index: usize) -> Result<Self, LogError> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(LogError::InvalidParameter(format!("sample rate {sample_rate} Hz")));
        }
        if samples.is_empty() {
            return Err(LogError::Schema("log has no samples".into()));
        }
        if tor_index >= samples.len() {
            return Err(LogError::InvalidParameter(format!(
                "TOR index {tor_index} outside {} samples",
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            let row = i + 1;
            let values = [s.t, s.lateral_displacement, s.acceleration, s.steering, s.brake];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(LogError::Schema(format!("row {row}: non-finite value")));
            }
            if !(0.0..=1.0).contains(&s.steering) || !(0.0..=1.0).contains(&s.brake) {
                return Err(LogError::Schema(format!(
                    "row {row}: steering and brake must lie in [0, 1]"
                )));
            }
        }
        let expected = 1.0 / sample_rate;
        for (i, pair) in samples.windows(2).enumerate() {
            let step = pair[1].t - pair[0].t;
            if (step - expected).abs() > STEP_TOLERANCE {
                return Err(LogError::NonUniformSampling {
                    row: i + 2,
                    step,
                    expected,
                });
            }
        }
        Ok(Self {
            sample_rate,
            samples,
            tor_index,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn tor_index(&self) -> usize {
        self.tor_index
    }

    pub fn tor_time(&self) -> f64 {
        self.samples[self.tor_index].t
    }

    pub fn first_time(&self) -> f64 {
        self.samples[0].t
    }

    pub fn last_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Writes the log in the CSV schema accepted by [`parse_drive_log`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), LogError> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| LogError::Io(e.into());
        w.write_record(CSV_HEADER).map_err(io)?;
        for (i, s) in self.samples.iter().enumerate() {
            let flag = if i == self.tor_index { "1" } else { "0" };
            w.write_record([
                s.t.to_string(),
                s.lateral_displacement.to_string(),
                s.acceleration.to_string(),
                s.steering.to_string(),
                s.brake.to_string(),
                flag.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    t: f64,
    lat_disp: f64,
    acc: f64,
    steering: f64,
    brake: f64,
    tor_flag: u8,
}

pub fn parse_drive_log<R: Read>(reader: R) -> Result<DriveLog, LogError> {
    parse_drive_log_with_rate(reader, DEFAULT_SAMPLE_RATE)
}

pub fn parse_drive_log_with_rate<R: Read>(reader: R, sample_rate: f64) -> Result<DriveLog, LogError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| LogError::Schema(format!("cannot read header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(LogError::Schema(format!(
            "expected header `{}`, found `{}`",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut samples = Vec::new();
    let mut tor_rows = Vec::new();
    for (i, record) in rdr.deserialize::<Row>().enumerate() {
        let row = record.map_err(|e| LogError::Schema(format!("row {}: {e}", i + 1)))?;
        match row.tor_flag {
            0 => {}
            1 => tor_rows.push(i),
            other => {
                return Err(LogError::Schema(format!(
                    "row {}: tor_flag must be 0 or 1, got {other}",
                    i + 1
                )))
            }
        }
        samples.push(Sample {
            t: row.t,
            lateral_displacement: row.lat_disp,
            acceleration: row.acc,
            steering: row.steering,
            brake: row.brake,
        });
    }
    let tor_index = match tor_rows.as_slice() {
        [] => return Err(LogError::MissingTorMarker),
        [i] => *i,
        many => return Err(LogError::MultipleTorMarkers(many.len())),
    };
    DriveLog::new(sample_rate, samples, tor_index)
}
