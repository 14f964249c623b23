//! FBDPP tracking a PU load that drops after frame 350 and rises after frame
//! 700. Prints the 100-frame moving averages every 50 frames.

use coopsim::sim::run_adaptive;
use coopsim::{ModelParams, PolicySpec, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::reference_point().with_lambda_pu(0.4).with_lambda_su(0.8);
    let scenario =
        Scenario::new(params, PolicySpec::Fbdpp, 500.0, 1000, 7).with_schedule(vec![(350, 0.2), (700, 0.55)]);
    let m = run_adaptive(&scenario)?;
    println!(
        "{:>5} {:>9} {:>10} {:>10} {:>8}",
        "frame", "lambda_pu", "throughput", "coop power", "power"
    );
    for p in m.moving_average(scenario.window).iter().filter(|p| p.frame % 50 == 0) {
        println!(
            "{:>5} {:>9} {:>10.4} {:>10.4} {:>8.4}",
            p.frame, p.lambda_pu, p.throughput, p.coop_power, p.power
        );
    }
    Ok(())
}
