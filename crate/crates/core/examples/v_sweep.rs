//! Throughput, backlog and power as V grows. Short horizons show the
//! transient; long ones show convergence to the stationary optimum.
//!
//! Usage: cargo run --release --example v_sweep -- [FRAMES]

use coopsim::oracle::optimal_two_point;
use coopsim::sim::sweep_v;
use coopsim::{ModelParams, PolicySpec, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frames: u64 = std::env::args().nth(1).map_or(Ok(1000), |s| s.parse())?;
    let params = ModelParams::reference_point();
    let optimum = optimal_two_point(&params)?.upsilon;
    let template = Scenario::new(params, PolicySpec::Fbdpp, 1.0, frames, 2024);
    let v_list = [10.0, 50.0, 100.0, 500.0, 1000.0, 2000.0];

    println!("optimum {optimum:.4}, {frames} frames per V");
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>8} {:>6}",
        "V", "admitted", "served", "mean Q", "power", "max Q"
    );
    for (v, m) in sweep_v(&template, &v_list)? {
        println!(
            "{v:>6} {:>10.4} {:>10.4} {:>10.1} {:>8.4} {:>6}",
            m.throughput_admitted(),
            m.throughput_served(),
            m.avg_q_su(),
            m.avg_power(),
            m.max_q_su
        );
    }
    Ok(())
}
