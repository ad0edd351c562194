//! Estimate the takeover budget for the three preset scenarios, for a typical
//! driver and for the least experienced one, with and without a handheld task.
//!
//! cargo run --example estimate_budget

use tortb::{estimate_tortb, CoefficientSet, DriverProfile, NdrtClass, ScenarioPreset, TakeoverContext};

fn main() -> Result<(), tortb::ModelError> {
    let coeffs = CoefficientSet::published();
    let drivers = [
        ("typical", DriverProfile::new(0.22, 120.0)?),
        ("novice", DriverProfile::calibration_bound()),
    ];

    println!("{:<8} {:<8} {:<10} {:>9}", "preset", "driver", "task", "TORTB [s]");
    for preset in ScenarioPreset::ALL {
        let scenario = preset.spec();
        for (name, driver) in &drivers {
            for ndrt in [NdrtClass::HandsFree, NdrtClass::HandHeld] {
                let ctx = TakeoverContext::new(ndrt, 1)?;
                let e = estimate_tortb(driver, &scenario, &ctx, &coeffs)?;
                println!("{:<8} {:<8} {:<10} {:>9.2}", preset.to_string(), name, ndrt.to_string(), e.total);
            }
        }
    }

    // full breakdown for one case
    let e = estimate_tortb(
        &drivers[1].1,
        &ScenarioPreset::S3.spec(),
        &TakeoverContext::new(NdrtClass::HandsFree, 2)?,
        &coeffs,
    )?;
    println!("\nS3, novice, second drive: {:#?}", e.components);
    for w in &e.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
