//! The per-frame power decision for a handful of queue states, on the
//! two-point set and on a four-level grid.

use coopsim::controller::{admit, frame_powers, threshold_rule_p1};
use coopsim::{ModelParams, PowerCurve, PowerSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let two_point = ModelParams::reference_point();
    println!("two-point set {{0, 1}}");
    println!(
        "{:>6} {:>6} {:>6} {:>6} {:>8} {:>10}",
        "Q", "X", "P0*", "P1*", "theta*", "threshold"
    );
    for (q, x) in [(100.0, 10.0), (100.0, 40.0), (10.0, 10.0), (0.0, 5.0), (500.0, 120.0)] {
        let fp = frame_powers(q, x, &two_point);
        let threshold =
            fp.theta_star * (two_point.phi_c() - two_point.phi_nc()) / (two_point.p_max * two_point.phi_nc());
        assert_eq!(
            fp.p1_star,
            threshold_rule_p1(fp.theta_star, x, two_point.phi_nc(), two_point.phi_c(), 1.0)
        );
        println!(
            "{q:>6} {x:>6} {:>6} {:>6} {:>8.2} {threshold:>10.2}",
            fp.p0_star, fp.p1_star, fp.theta_star
        );
    }

    let levels = vec![0.0, 0.25, 0.5, 1.0];
    let grid = ModelParams {
        phi: PowerCurve::on_levels(&levels, &[0.5, 0.6, 0.7, 0.78])?,
        mu_su: PowerCurve::on_levels(&levels, &[0.0, 0.5, 0.8, 1.0])?,
        power_set: PowerSet::grid(levels)?,
        lambda_pu: 0.4,
        p_avg: 0.4,
        ..two_point
    };
    grid.validate()?;
    println!("\nfour-level grid");
    for (q, x) in [(50.0, 5.0), (50.0, 30.0), (50.0, 60.0), (200.0, 60.0)] {
        let fp = frame_powers(q, x, &grid);
        println!(
            "Q = {q:>5} X = {x:>5}: P0* = {:<5} P1* = {:<5} theta* = {:.2}",
            fp.p0_star, fp.p1_star, fp.theta_star
        );
    }

    println!(
        "\nadmission with V = 500: Q = 499 -> {}, Q = 501 -> {}",
        admit(499, 1, 500.0),
        admit(501, 1, 500.0)
    );
    Ok(())
}
