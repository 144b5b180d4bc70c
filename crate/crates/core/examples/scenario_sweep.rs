//! Configure a scenario from key=value text, sweep n and write the tables.
//!
//! cargo run --example scenario_sweep -- /tmp/sweep

use wigner_lab::scenario::{run_scenario, sweep_summary, write_scenario, ScenarioConfig};

fn main() -> wigner_lab::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sweep-out".into());
    let mut config = ScenarioConfig::default();
    config.apply_text(
        "scenario=checkerboard
         n=100,200,400
         trials=4
         k-max=6",
    )?;
    config.set("seed", "7")?;

    let result = run_scenario(&config)?;
    for t in sweep_summary(&result)? {
        println!("{:<16} {:?} {}", t.functional, t.values, t.flag);
    }
    for path in write_scenario(&result, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
