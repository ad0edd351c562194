use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LogError, TakeoverMetrics};

/// Descriptive statistics; `std` is the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Result<Self, LogError> {
        if values.is_empty() {
            return Err(LogError::EmptyGroup);
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        Ok(Self {
            n,
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Partitions `(key, value)` pairs by key and summarizes each group.
pub fn summarize<K: Ord + Clone>(records: &[(K, f64)]) -> Result<BTreeMap<K, Summary>, LogError> {
    if records.is_empty() {
        return Err(LogError::EmptyGroup);
    }
    let mut groups: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for (k, v) in records {
        groups.entry(k.clone()).or_default().push(*v);
    }
    groups
        .into_iter()
        .map(|(k, vs)| Summary::from_values(&vs).map(|s| (k, s)))
        .collect()
}

/// Per-group summary of every measure. Absent takeover times and peak
/// accelerations are left out; a group where all are absent reports `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub n: usize,
    pub tot: Option<Summary>,
    pub avg_ld: Summary,
    pub max_acc: Option<Summary>,
}

pub fn summarize_metrics<K: Ord + Clone>(
    records: &[(K, TakeoverMetrics)],
) -> Result<BTreeMap<K, MetricsSummary>, LogError> {
    if records.is_empty() {
        return Err(LogError::EmptyGroup);
    }
    let mut groups: BTreeMap<K, Vec<TakeoverMetrics>> = BTreeMap::new();
    for (k, m) in records {
        groups.entry(k.clone()).or_default().push(*m);
    }
    let optional = |vs: Vec<f64>| if vs.is_empty() { Ok(None) } else { Summary::from_values(&vs).map(Some) };
    groups
        .into_iter()
        .map(|(k, ms)| {
            let tot = optional(ms.iter().filter_map(|m| m.tot).collect())?;
            let max_acc = optional(ms.iter().filter_map(|m| m.max_acc).collect())?;
            let avg_ld = Summary::from_values(&ms.iter().map(|m| m.avg_ld).collect::<Vec<_>>())?;
            Ok((
                k,
                MetricsSummary {
                    n: ms.len(),
                    tot,
                    avg_ld,
                    max_acc,
                },
            ))
        })
        .collect()
}
