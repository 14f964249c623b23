//! One FBDPP episode at the reference point, with a per-frame trace of the
//! first few frames.
//!
//! Usage: cargo run --example fbdpp_episode -- [V] [FRAMES] [SEED]

use coopsim::{run_episode, ModelParams, PolicySpec, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let v: f64 = args.first().map_or(Ok(500.0), |s| s.parse())?;
    let frames: u64 = args.get(1).map_or(Ok(1000), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(1), |s| s.parse())?;

    let m = run_episode(&Scenario::new(
        ModelParams::reference_point(),
        PolicySpec::Fbdpp,
        v,
        frames,
        seed,
    ))?;
    println!(
        "{:>5} {:>4} {:>4} {:>4} {:>6} {:>6} {:>5} {:>8}",
        "frame", "len", "adm", "srv", "P_idle", "P_coop", "Q", "X"
    );
    for f in m.frames.iter().take(12) {
        println!(
            "{:>5} {:>4} {:>4} {:>4} {:>6} {:>6} {:>5} {:>8.2}",
            f.frame, f.frame_len, f.admitted, f.served, f.power_idle, f.power_coop, f.q_su_end, f.x_su_end
        );
    }
    println!("...");
    println!(
        "{} frames, {} slots: admitted {:.4}, served {:.4}, power {:.4}, max Q {}, mean Q {:.1}",
        m.frames.len(),
        m.total_slots,
        m.throughput_admitted(),
        m.throughput_served(),
        m.avg_power(),
        m.max_q_su,
        m.avg_q_su()
    );
    Ok(())
}
