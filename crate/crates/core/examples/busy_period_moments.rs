//! Simulated PU busy-period and frame-length moments against the closed forms.

use coopsim::analysis::{busy_period_moments, compute_d, exact_busy_period_moments, idle_period_moments};
use coopsim::sim::sample_pu_periods;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (lambda, mu) in [(0.5, 0.6), (0.5, 0.8), (0.3, 0.6)] {
        let s = sample_pu_periods(lambda, mu, 1_000_000, 1);
        let (e_b, e_b2) = exact_busy_period_moments(lambda, mu)?;
        let (e_i, e_i2) = idle_period_moments(lambda)?;
        let (_, e_b2_lifo) = busy_period_moments(lambda, mu)?;
        println!("lambda = {lambda}, mu = {mu}");
        println!("  E[B]   sim {:>8.3}  first passage {e_b:>8.3}", s.mean_busy);
        println!(
            "  E[B^2] sim {:>8.2}  first passage {e_b2:>8.2}  decomposition {e_b2_lifo:>8.2}",
            s.mean_busy_sq
        );
        println!(
            "  E[T^2] sim {:>8.2}  first passage {:>8.2}  D {:>8.2}",
            s.mean_frame_sq,
            e_i2 + e_b2 + 2.0 * e_i * e_b,
            compute_d(lambda, mu)?
        );
    }
    Ok(())
}
