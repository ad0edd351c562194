//! Run one noisy takeover episode, print its outcome and write the synthetic
//! log as CSV to the temp directory.
//!
//! cargo run --example simulate_episode

use tortb::log_analysis::{detect_tot, DEFAULT_TOT_THRESHOLD};
use tortb::simulator::{run_episode, EpisodeConfig};
use tortb::{DriverProfile, NdrtClass, ScenarioPreset, TakeoverContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = EpisodeConfig::new(
        DriverProfile::new(0.25, 60.0)?,
        ScenarioPreset::S3.spec(),
        TakeoverContext::new(NdrtClass::HandHeld, 1)?,
    );
    cfg.response_noise = 0.8;
    cfg.seed = 2024;

    let o = run_episode(&cfg)?;
    println!("response onset  {:.3} s", o.response_onset);
    println!("required time   {:.3} s", o.required_time);
    println!("deadline        {:.3} s", o.deadline);
    println!("margin          {:+.3} s -> {:?}", o.margin, o.classification);
    println!("detected TOT    {:?}", detect_tot(&o.log, DEFAULT_TOT_THRESHOLD));

    let path = std::env::temp_dir().join("tortb_episode.csv");
    o.log.write_csv(std::fs::File::create(&path)?)?;
    println!("log written to {}", path.display());
    Ok(())
}
