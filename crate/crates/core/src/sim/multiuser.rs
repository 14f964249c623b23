//! Episodes with several SUs sharing one PU channel.
//!
//! Each user keeps its own backlog and virtual power queue. Per frame, one user
//! transmits in the idle slots and one user cooperates in the busy slots. The
//! PU arrival rate and the frame structure come from the first user's
//! parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{draw_arrivals, SimError};
use crate::controller::{admit, solve_multiuser_frame};
use crate::model::{step_pu_queue, step_su_queue, update_virtual_queue, ModelParams, Phase};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiUserScenario {
    pub params_per_user: Vec<ModelParams>,
    pub horizon_frames: u64,
    pub seed: u64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UserTotals {
    pub admitted: u64,
    pub served: u64,
    pub power: f64,
    pub max_q_su: u64,
    pub final_q_su: u64,
    pub final_x_su: f64,
    /// Frames in which this user was the idle-slot sender.
    pub frames_sending: u64,
    /// Frames in which this user was picked as the cooperator.
    pub frames_cooperating: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiUserMetrics {
    pub total_slots: u64,
    pub frames: u64,
    pub users: Vec<UserTotals>,
}

impl MultiUserMetrics {
    pub fn throughput(&self, user: usize) -> f64 {
        self.users[user].admitted as f64 / self.total_slots.max(1) as f64
    }

    pub fn avg_power(&self, user: usize) -> f64 {
        self.users[user].power / self.total_slots.max(1) as f64
    }
}

pub fn run_multiuser_episode(scenario: &MultiUserScenario) -> Result<MultiUserMetrics, SimError> {
    let users = &scenario.params_per_user;
    if users.is_empty() {
        return Err(SimError::InvalidScenario("no users".into()));
    }
    for p in users {
        p.validate()?;
    }
    if !(scenario.v > 0.0 && scenario.v.is_finite()) || scenario.horizon_frames == 0 {
        return Err(SimError::InvalidScenario("v and horizon must be positive".into()));
    }
    let pu = &users[0];
    let n = users.len();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut q = vec![0u64; n];
    let mut x = vec![0.0f64; n];
    let mut totals = vec![UserTotals::default(); n];
    let mut q_pu = 0u64;
    let mut slots = 0u64;

    for _ in 0..scenario.horizon_frames {
        let weights: Vec<(f64, f64)> = q.iter().zip(&x).map(|(&qi, &xi)| (qi as f64, xi)).collect();
        let d = solve_multiuser_frame(&weights, users)?;
        totals[d.idle_user].frames_sending += 1;
        totals[d.coop_user].frames_cooperating += 1;

        let mut frame_len = 0u64;
        let mut frame_power = vec![0.0; n];
        let mut busy_seen = false;
        loop {
            let phase = Phase::of(q_pu);
            if phase == Phase::Idle && (busy_seen || (frame_len > 0 && pu.lambda_pu == 0.0)) {
                break;
            }
            busy_seen |= phase == Phase::Busy;
            let u_out: f64 = rng.gen();

            let mut served = vec![0u64; n];
            let mut pu_success = false;
            match phase {
                Phase::Idle => {
                    let i = d.idle_user;
                    frame_power[i] += d.p0_star;
                    served[i] = u64::from(q[i] > 0 && u_out < users[i].mu_su.eval(d.p0_star));
                }
                Phase::Busy => {
                    let j = d.coop_user;
                    frame_power[j] += d.p1_star;
                    pu_success = u_out < users[j].phi.eval(d.p1_star);
                }
            }
            for i in 0..n {
                let a = draw_arrivals(&mut rng, &users[i]);
                let admitted = admit(q[i], a, scenario.v);
                q[i] = step_su_queue(q[i], served[i], u64::from(admitted));
                totals[i].admitted += u64::from(admitted);
                totals[i].served += served[i];
                totals[i].max_q_su = totals[i].max_q_su.max(q[i]);
            }
            let pu_arrival = u64::from(rng.gen::<f64>() < pu.lambda_pu);
            q_pu = step_pu_queue(q_pu, pu_success, pu_arrival);
            frame_len += 1;
        }

        slots += frame_len;
        for i in 0..n {
            x[i] = update_virtual_queue(x[i], frame_len, frame_power[i], users[i].p_avg);
            totals[i].power += frame_power[i];
        }
    }

    for i in 0..n {
        totals[i].final_q_su = q[i];
        totals[i].final_x_su = x[i];
    }
    Ok(MultiUserMetrics {
        total_slots: slots,
        frames: scenario.horizon_frames,
        users: totals,
    })
}
