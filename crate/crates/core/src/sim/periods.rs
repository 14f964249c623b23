//! Monte-Carlo sampling of PU idle/busy periods with a fixed success probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{step_pu_queue, Phase};

/// Sample moments over complete frames (idle period followed by busy period).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodSample {
    pub frames: u64,
    pub mean_idle: f64,
    pub mean_busy: f64,
    pub mean_busy_sq: f64,
    pub mean_frame: f64,
    pub mean_frame_sq: f64,
    /// Sample variance of the frame length.
    pub var_frame: f64,
}

/// Runs the PU queue alone for `frames` frames with success probability `mu`
/// in every busy slot (`phi_nc` for no cooperation, `phi_c` for always
/// cooperating). Starts empty, so the first frame is complete.
pub fn sample_pu_periods(lambda_pu: f64, mu: f64, frames: u64, seed: u64) -> PeriodSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q_pu = 0u64;
    let (mut s_i, mut s_b, mut s_b2, mut s_t, mut s_t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..frames {
        let (mut idle, mut busy) = (0u64, 0u64);
        loop {
            let phase = Phase::of(q_pu);
            if phase == Phase::Idle && busy > 0 {
                break;
            }
            match phase {
                Phase::Idle => idle += 1,
                Phase::Busy => busy += 1,
            }
            let success = phase == Phase::Busy && rng.gen::<f64>() < mu;
            let arrival = u64::from(rng.gen::<f64>() < lambda_pu);
            q_pu = step_pu_queue(q_pu, success, arrival);
        }
        let (i, b) = (idle as f64, busy as f64);
        s_i += i;
        s_b += b;
        s_b2 += b * b;
        s_t += i + b;
        s_t2 += (i + b) * (i + b);
    }
    let n = frames.max(1) as f64;
    let mean_frame = s_t / n;
    let mean_frame_sq = s_t2 / n;
    PeriodSample {
        frames,
        mean_idle: s_i / n,
        mean_busy: s_b / n,
        mean_busy_sq: s_b2 / n,
        mean_frame,
        mean_frame_sq,
        var_frame: (mean_frame_sq - mean_frame * mean_frame) * n / (n - 1.0).max(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idle_and_busy_means() {
        let s = sample_pu_periods(0.5, 0.6, 200_000, 5);
        assert!((s.mean_idle - 2.0).abs() < 0.02, "{s:?}");
        assert!((s.mean_busy - 10.0).abs() < 0.2, "{s:?}");
        assert!((s.mean_frame - s.mean_idle - s.mean_busy).abs() < 1e-9);
    }
}
