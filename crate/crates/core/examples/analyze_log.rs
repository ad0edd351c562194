//! Extract takeover metrics from a drive log. Uses the bundled sample log
//! unless a path is given.
//!
//! cargo run --example analyze_log [-- path/to/log.csv]

use std::fs::File;
use std::io::BufReader;

use tortb::log_analysis::{detect_tot, extract_metrics, parse_drive_log, DEFAULT_TOT_THRESHOLD};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_log.csv").to_string());
    let log = parse_drive_log(BufReader::new(File::open(&path)?))?;
    println!("{path}: {} samples, TOR at {} s", log.samples().len(), log.tor_time());

    let m = extract_metrics(&log, 5.0, 5.0, DEFAULT_TOT_THRESHOLD)?;
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    println!("TOT      {} s", show(m.tot));
    println!("avg_LD   {:.4} m", m.avg_ld);
    println!("max_acc  {} m/s^2", show(m.max_acc));

    for threshold in [0.01, 0.05, 0.15, 0.25, 0.5] {
        println!("threshold {threshold:<4} -> TOT {}", show(detect_tot(&log, threshold)));
    }
    Ok(())
}
