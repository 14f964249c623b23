//! The best stationary randomized policy: closed form, grid search, the
//! no-cooperation restriction, and a Monte-Carlo check.

use coopsim::oracle::{grid_search, grid_search_with_coop, optimal_two_point, simulate_stationary};
use coopsim::{run_episode, ModelParams, PolicySpec, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::reference_point();
    let best = optimal_two_point(&params)?;
    println!(
        "closed form: upsilon = {:.6}, q = {:.4}, p = {:.4}, pi_0 = {:.4}, power = {:.4}",
        best.upsilon, best.coop_prob, best.idle_tx_prob, best.pi_0, best.power_used
    );
    println!("grid 1e-3:   upsilon = {:.6}", grid_search(&params, 1e-3)?.upsilon);
    println!(
        "q fixed 0:   upsilon = {:.6}",
        grid_search_with_coop(&params, 1e-3, 0.0)?.upsilon
    );

    let est = simulate_stationary(&best, &params, 5_000_000, 1);
    println!(
        "simulated:   capacity = {:.4}, power = {:.4}, idle fraction = {:.4}",
        est.service_capacity, est.avg_power, est.idle_fraction
    );

    // The same mix replayed through the episode engine with threshold admission.
    let spec = PolicySpec::OracleStationary {
        q: best.coop_prob,
        p: best.idle_tx_prob,
    };
    let m = run_episode(&Scenario::new(params.clone(), spec, 500.0, 100_000, 2))?;
    println!(
        "episode:     served = {:.4}, power = {:.4}",
        m.throughput_served(),
        m.avg_power()
    );

    let rich = ModelParams::two_point(0.5, 1.0, 0.6, 0.8, 1.0, 1.0, 1.0)?;
    let r = optimal_two_point(&rich)?;
    println!("P_avg = P_max: upsilon = {:.4}, q = {}", r.upsilon, r.coop_prob);
    Ok(())
}
