//! Cooperation under a two-state relay channel: the busy-slot power is chosen
//! per fading state each frame.

use coopsim::controller::{solve_p1_fading, FadingModel, FadingSearch, FadingState};
use coopsim::{run_episode, ModelParams, PolicySpec, PowerCurve, PowerSet, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let levels = vec![0.0, 0.5, 1.0];
    let params = ModelParams {
        phi: PowerCurve::on_levels(&levels, &[0.6, 0.7, 0.8])?,
        mu_su: PowerCurve::on_levels(&levels, &[0.0, 0.7, 1.0])?,
        power_set: PowerSet::grid(levels.clone())?,
        ..ModelParams::reference_point()
    };
    let fading = FadingModel::new(vec![
        FadingState {
            id: "good".into(),
            prob: 0.6,
            phi: PowerCurve::on_levels(&levels, &[0.6, 0.8, 0.9])?,
        },
        FadingState {
            id: "bad".into(),
            prob: 0.4,
            phi: PowerCurve::on_levels(&levels, &[0.6, 0.62, 0.65])?,
        },
    ])?;

    for (theta, x) in [(90.0, 10.0), (90.0, 40.0), (20.0, 10.0)] {
        let fp = solve_p1_fading(theta, x, &fading, &params, &FadingSearch::default())?;
        println!(
            "theta* = {theta:>4}, X = {x:>4}: powers {:?} (good, bad), ratio {:.2}",
            fp.powers, fp.objective
        );
    }

    for with_fading in [false, true] {
        let mut scenario = Scenario::new(params.clone(), PolicySpec::Fbdpp, 500.0, 50_000, 4);
        if with_fading {
            scenario = scenario.with_fading(fading.clone());
        }
        let m = run_episode(&scenario)?;
        println!(
            "{:<16} served {:.4}, power {:.4}, coop power {:.4}, mean frame {:.2}",
            if with_fading { "fading-aware" } else { "average channel" },
            m.throughput_served(),
            m.avg_power(),
            m.avg_coop_power(),
            m.mean_frame_len()
        );
    }
    Ok(())
}
