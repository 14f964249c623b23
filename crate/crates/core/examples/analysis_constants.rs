//! Frame-length bounds, busy-period moments and the drift constants at the
//! reference operating point, plus the throughput guarantee for a few V.

use coopsim::analysis::{
    busy_period_moments, drift_constants, exact_busy_period_moments, steady_state, throughput_lower_bound,
};
use coopsim::oracle::optimal_two_point;
use coopsim::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::reference_point();
    let c = drift_constants(&params)?;
    let (e_b, e_b2) = busy_period_moments(params.lambda_pu, params.phi_nc())?;
    let (_, e_b2_fp) = exact_busy_period_moments(params.lambda_pu, params.phi_nc())?;
    let no_coop = steady_state(params.lambda_pu, params.phi_nc())?;
    let coop = steady_state(params.lambda_pu, params.phi_c())?;

    println!(
        "idle probability: {:.4} without cooperation, {:.4} always cooperating",
        no_coop.pi_0, coop.pi_0
    );
    println!("T_min = {:.4}  T_max = {:.4}", c.t_min, c.t_max);
    println!("E[B] = {e_b:.3}  E[B^2] = {e_b2:.2} (first passage {e_b2_fp:.2})");
    println!("D = {:.2}  B = {:.2}  C = {:.2}", c.d_const, c.b_const, c.c_const);

    let upsilon = optimal_two_point(&params)?.upsilon;
    for v in [100.0, 500.0, 1000.0, 10_000.0] {
        let bound = throughput_lower_bound(v, upsilon, &c);
        println!(
            "V = {v:>7}: guaranteed throughput {bound:+.4}{}",
            if bound <= 0.0 { " (vacuous)" } else { "" }
        );
    }
    Ok(())
}
