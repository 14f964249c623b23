//! FBDPP against the three fixed-rule baselines over about a million slots.

use coopsim::{run_episode, ModelParams, PolicySpec, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let policies = [
        PolicySpec::Fbdpp,
        PolicySpec::NoCoop,
        PolicySpec::AlwaysCoop,
        PolicySpec::CounterBased,
    ];
    println!(
        "{:<12} {:>9} {:>9} {:>7} {:>11}",
        "policy", "admitted", "served", "power", "coop power"
    );
    for policy in policies {
        let m = run_episode(&Scenario::new(
            ModelParams::reference_point(),
            policy,
            500.0,
            100_000,
            3,
        ))?;
        println!(
            "{:<12} {:>9.4} {:>9.4} {:>7.4} {:>11.4}",
            m.policy,
            m.throughput_admitted(),
            m.throughput_served(),
            m.avg_power(),
            m.avg_coop_power()
        );
    }
    Ok(())
}
