//! Three SUs with different channels sharing one PU. Per frame one user
//! sends in idle slots and one user cooperates in busy slots.

use coopsim::controller::solve_multiuser_frame;
use coopsim::sim::{run_multiuser_episode, MultiUserScenario};
use coopsim::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let users = vec![
        ModelParams::two_point(0.5, 0.1, 0.6, 0.8, 1.0, 0.5, 1.0)?,
        ModelParams::two_point(0.5, 0.1, 0.6, 0.7, 0.6, 0.5, 1.0)?,
        ModelParams::two_point(0.5, 0.1, 0.6, 0.9, 0.9, 0.3, 1.0)?,
    ];

    let d = solve_multiuser_frame(&[(40.0, 5.0), (80.0, 5.0), (10.0, 0.0)], &users)?;
    println!(
        "one frame: user {} sends at {} (theta* = {:.1}), user {} cooperates at {}",
        d.idle_user, d.p0_star, d.theta_star, d.coop_user, d.p1_star
    );

    let m = run_multiuser_episode(&MultiUserScenario {
        params_per_user: users,
        horizon_frames: 20_000,
        seed: 5,
        v: 200.0,
    })?;
    println!(
        "{:>4} {:>10} {:>8} {:>8} {:>9} {:>12}",
        "user", "throughput", "power", "max Q", "sending", "cooperating"
    );
    for (i, u) in m.users.iter().enumerate() {
        println!(
            "{i:>4} {:>10.4} {:>8.4} {:>8} {:>9} {:>12}",
            m.throughput(i),
            m.avg_power(i),
            u.max_q_su,
            u.frames_sending,
            u.frames_cooperating
        );
    }
    Ok(())
}
