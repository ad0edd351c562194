//! Recover the agent and junction coefficients from two anchor scenarios, then
//! derive the repeat-exposure deduction from an effect size.
//!
//! cargo run --example calibrate_coefficients

use tortb::calibration::{calibrate_sequence, derive_oc, published_anchors, Chaining};
use tortb::CoefficientSet;

fn main() -> Result<(), tortb::calibration::CalibrationError> {
    let anchors = published_anchors();
    for chaining in [Chaining::UseRaw, Chaining::UseRounded] {
        let result = calibrate_sequence(&anchors, &CoefficientSet::published(), chaining)?;
        println!("{chaining:?}:");
        for s in &result.solved {
            println!(
                "  {:<3} {:<6} raw {:.4} -> {:.1} (residual {:+.2} s)",
                s.label, s.unknown.to_string(), s.raw, s.rounded, s.residual
            );
        }
    }

    let oc = derive_oc(0.053, 7.0)?;
    println!("oc: 0.053 x 7 s = {:.3} -> {:.1}", oc.raw, oc.rounded);

    let result = calibrate_sequence(&anchors, &CoefficientSet::published(), Chaining::UseRaw)?;
    println!("\nrounded set as TOML:\n{}", tortb::config::coefficients_to_toml(&result.rounded));
    Ok(())
}
