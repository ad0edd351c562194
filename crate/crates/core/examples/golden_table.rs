//! Reproduce the published six-row example table.
//!
//! cargo run --example golden_table

use tortb::table::reproduce_table;

fn main() -> Result<(), tortb::ModelError> {
    println!("{:>3} {:>3} {:>5} {:>5} {:>3} {:>6} {:>9} {:>9}", "NOA", "NOJ", "ego", "haz", "#", "NDRTC", "TORTB", "published");
    for r in reproduce_table()? {
        println!(
            "{:>3} {:>3} {:>5} {:>5} {:>3} {:>6} {:>9.3} {:>9}",
            r.row.noa,
            r.row.noj,
            r.row.ego_speed,
            r.row.hazard_speed,
            r.row.ordinal,
            r.estimate.components.ndrtc,
            r.estimate.total,
            r.row.published_tortb,
        );
        assert!(r.deviation.abs() <= 1e-3);
    }
    Ok(())
}
