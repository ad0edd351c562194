//! Sweep the noise level for a batch of preset episodes and report how the
//! outcome mix shifts. Episodes run in parallel; results are seed-stable.
//!
//! cargo run --release --example batch_sweep

use tortb::simulator::{run_batch, EpisodeConfig};
use tortb::{DriverProfile, NdrtClass, ScenarioPreset, TakeoverContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut base = Vec::new();
    for preset in ScenarioPreset::ALL {
        for srt in [0.18, 0.22, 0.27] {
            for experience in [10.0, 60.0, 150.0, 400.0] {
                for ndrt in [NdrtClass::HandsFree, NdrtClass::HandHeld] {
                    base.push(EpisodeConfig::new(
                        DriverProfile::new(srt, experience)?,
                        preset.spec(),
                        TakeoverContext::new(ndrt, 1)?,
                    ));
                }
            }
        }
    }

    println!("{:>9} {:>8} {:>6} {:>10} {:>12}", "noise [s]", "success", "late", "collision", "mean margin");
    for noise in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let configs: Vec<_> = base
            .iter()
            .cloned()
            .flat_map(|c| std::iter::repeat(EpisodeConfig { response_noise: noise, ..c }).take(25))
            .collect();
        let r = run_batch(&configs, 7)?;
        println!(
            "{:>9} {:>8} {:>6} {:>10} {:>12.3}",
            noise, r.success, r.late, r.collision, r.margin.mean
        );
    }
    Ok(())
}
