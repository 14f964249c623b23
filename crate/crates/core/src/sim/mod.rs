//! Slot-by-slot episode driver.
//!
//! Every slot runs in a fixed order: observe the state, let the policy pick
//! `(R_su(t), P(t))`, sample the transmission outcome, sample arrivals, then
//! update both queues. A frame starts in the first PU-idle slot after a busy
//! period (frame 1 starts at slot 0), and the virtual power queue is updated
//! once per frame boundary. Episodes run for a whole number of frames.
//!
//! All randomness comes from a `ChaCha8Rng` seeded with the scenario seed, and
//! every slot consumes the same number of draws whatever the policy decides,
//! so an episode is a pure function of its scenario.

mod metrics;
mod multiuser;
mod periods;

pub use metrics::{FrameRecord, MovingPoint, RunMetrics};
pub use multiuser::{run_multiuser_episode, MultiUserMetrics, MultiUserScenario, UserTotals};
pub use periods::{sample_pu_periods, PeriodSample};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::{always_coop_decide, counter_decide, no_coop_decide, CounterState};
use crate::controller::{admit, ControllerError, FadingModel, FadingSearch, FbdppController};
use crate::model::{step_pu_queue, step_su_queue, update_virtual_queue, ModelError, ModelParams, Phase, SystemState};

/// Identifier of the pseudo-random generator, recorded in output headers.
pub const GENERATOR: &str = "chacha8";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// Control policy run by an episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    /// Frame-based drift-plus-penalty with the scenario's `v`.
    Fbdpp,
    NoCoop,
    AlwaysCoop,
    CounterBased,
    /// Fixed randomized policy: cooperate at `P_max` with probability `q`,
    /// transmit at `P_max` in idle slots with probability `p`.
    OracleStationary {
        q: f64,
        p: f64,
    },
}

impl PolicySpec {
    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::Fbdpp => "fbdpp",
            PolicySpec::NoCoop => "no-coop",
            PolicySpec::AlwaysCoop => "always-coop",
            PolicySpec::CounterBased => "counter",
            PolicySpec::OracleStationary { .. } => "oracle-stationary",
        }
    }
}

/// How idle-slot power is charged when the SU queue is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerAccounting {
    /// Power is spent as allocated.
    #[default]
    Strict,
    /// No power is spent in idle slots while `Q_su = 0`.
    SkipWhenEmpty,
}

/// A fully specified episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub base_params: ModelParams,
    pub horizon_frames: u64,
    pub seed: u64,
    /// `(frame_index, lambda_pu)`: the new rate applies from the frame with this
    /// 0-based index onwards, i.e. after the first `frame_index` frames.
    pub lambda_schedule: Vec<(u64, f64)>,
    pub policy: PolicySpec,
    /// Admission threshold for every policy and the FBDPP control parameter.
    pub v: f64,
    /// Moving-average window in frames.
    pub window: usize,
    pub power_accounting: PowerAccounting,
    pub fading: Option<FadingModel>,
    pub fading_search: FadingSearch,
}

impl Scenario {
    pub fn new(base_params: ModelParams, policy: PolicySpec, v: f64, horizon_frames: u64, seed: u64) -> Self {
        Scenario {
            base_params,
            horizon_frames,
            seed,
            lambda_schedule: Vec::new(),
            policy,
            v,
            window: 100,
            power_accounting: PowerAccounting::Strict,
            fading: None,
            fading_search: FadingSearch::default(),
        }
    }

    pub fn with_schedule(mut self, schedule: Vec<(u64, f64)>) -> Self {
        self.lambda_schedule = schedule;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_v(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn with_policy(mut self, policy: PolicySpec) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_fading(mut self, fading: FadingModel) -> Self {
        self.fading = Some(fading);
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.base_params.validate()?;
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(SimError::InvalidScenario(format!("v must be positive, got {}", self.v)));
        }
        if self.horizon_frames == 0 {
            return Err(SimError::InvalidScenario("horizon must be at least one frame".into()));
        }
        if self.window == 0 {
            return Err(SimError::InvalidScenario(
                "moving-average window must be positive".into(),
            ));
        }
        if self.lambda_schedule.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SimError::InvalidScenario(
                "lambda schedule frame indices must be strictly increasing".into(),
            ));
        }
        for &(_, lambda) in &self.lambda_schedule {
            self.base_params.with_lambda_pu(lambda).validate()?;
        }
        if let PolicySpec::OracleStationary { q, p } = self.policy {
            if !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidScenario(format!(
                    "stationary mix (q = {q}, p = {p}) must be probabilities"
                )));
            }
        }
        if let Some(f) = &self.fading {
            f.check_levels(&self.base_params.power_set.levels())?;
        }
        Ok(())
    }
}

/// Seed of the `index`-th episode of a sweep; index 0 reuses the base seed.
pub fn derive_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// SU arrivals for one slot: Bernoulli when `a_max = 1`, otherwise
/// Binomial(`a_max`, `lambda_su / a_max`).
pub fn draw_arrivals<R: Rng>(rng: &mut R, params: &ModelParams) -> u32 {
    match params.a_max {
        0 => 0,
        1 => u32::from(rng.gen::<f64>() < params.lambda_su),
        n => {
            let p = params.lambda_su / f64::from(n);
            (0..n).filter(|_| rng.gen::<f64>() < p).count() as u32
        }
    }
}

enum ActivePolicy {
    Fbdpp(Box<FbdppController>),
    NoCoop(CounterState),
    AlwaysCoop(CounterState),
    Counter(CounterState),
    Stationary { q: f64, p: f64 },
}

impl ActivePolicy {
    fn new(scenario: &Scenario) -> Self {
        match scenario.policy {
            PolicySpec::Fbdpp => {
                let mut c = FbdppController::new(scenario.base_params.clone(), scenario.v);
                if let Some(f) = &scenario.fading {
                    c = c.with_fading(f.clone(), scenario.fading_search);
                }
                ActivePolicy::Fbdpp(Box::new(c))
            }
            PolicySpec::NoCoop => ActivePolicy::NoCoop(CounterState::new()),
            PolicySpec::AlwaysCoop => ActivePolicy::AlwaysCoop(CounterState::new()),
            PolicySpec::CounterBased => ActivePolicy::Counter(CounterState::new()),
            PolicySpec::OracleStationary { q, p } => ActivePolicy::Stationary { q, p },
        }
    }

    fn begin_frame(&mut self, state: &SystemState, params: &ModelParams) -> Result<(), SimError> {
        if let ActivePolicy::Fbdpp(c) = self {
            c.set_params(params.clone());
            c.begin_frame(state.q_su, state.x_su)?;
        }
        Ok(())
    }

    fn power(&self, phase: Phase, fade: Option<usize>, u_mix: f64, params: &ModelParams) -> f64 {
        let (p_avg, p_max) = (params.p_avg, params.p_max);
        match self {
            ActivePolicy::Fbdpp(c) => c.decide(phase, fade),
            ActivePolicy::NoCoop(cs) => no_coop_decide(phase, cs, p_avg, p_max),
            ActivePolicy::AlwaysCoop(cs) => always_coop_decide(phase, cs, p_avg, p_max),
            ActivePolicy::Counter(cs) => counter_decide(phase, cs, p_avg, p_max),
            ActivePolicy::Stationary { q, p } => {
                let prob = if phase == Phase::Idle { *p } else { *q };
                if u_mix < prob {
                    p_max
                } else {
                    0.0
                }
            }
        }
    }

    fn record(&mut self, phase: Phase, spent: f64) {
        match self {
            ActivePolicy::NoCoop(cs) | ActivePolicy::AlwaysCoop(cs) | ActivePolicy::Counter(cs) => {
                cs.record(phase, spent)
            }
            _ => {}
        }
    }
}

/// Runs one episode of `scenario.horizon_frames` complete frames.
pub fn run_episode(scenario: &Scenario) -> Result<RunMetrics, SimError> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut params = scenario.base_params.clone();
    let mut policy = ActivePolicy::new(scenario);
    let mut schedule = scenario.lambda_schedule.iter().peekable();
    let bound = scenario.v + f64::from(params.a_max);

    let mut state = SystemState::initial();
    let mut m = RunMetrics {
        policy: scenario.policy.label().to_string(),
        v: scenario.v,
        seed: scenario.seed,
        generator: GENERATOR,
        frames: Vec::with_capacity(scenario.horizon_frames.min(1 << 20) as usize),
        total_slots: 0,
        total_admitted: 0,
        total_served: 0,
        total_power: 0.0,
        total_coop_power: 0.0,
        max_q_su: 0,
        q_su_slot_sum: 0,
        queue_bound_violations: 0,
        window: scenario.window,
    };

    for k in 0..scenario.horizon_frames {
        while let Some(&&(at, lambda)) = schedule.peek() {
            if at > k {
                break;
            }
            params.lambda_pu = lambda;
            schedule.next();
        }
        state.frame = k;
        state.frame_start_slot = state.slot;
        state.q_su_at_frame_start = state.q_su;
        state.x_su_at_frame_start = state.x_su;
        policy.begin_frame(&state, &params)?;

        let mut frame = FrameRecord {
            frame: k + 1,
            frame_len: 0,
            admitted: 0,
            served: 0,
            power_idle: 0.0,
            power_coop: 0.0,
            q_su_end: 0,
            x_su_end: 0.0,
            lambda_pu: params.lambda_pu,
        };
        let mut busy_seen = false;
        loop {
            state.phase = Phase::of(state.q_pu);
            if state.phase == Phase::Idle && (busy_seen || (frame.frame_len > 0 && params.lambda_pu == 0.0)) {
                break;
            }
            busy_seen |= state.phase == Phase::Busy;

            let u_mix: f64 = rng.gen();
            let u_out: f64 = rng.gen();
            let u_fade: f64 = rng.gen();
            let fade = match (&scenario.fading, state.phase) {
                (Some(f), Phase::Busy) => Some(f.sample(u_fade)),
                _ => None,
            };

            let allocated = policy.power(state.phase, fade, u_mix, &params);
            let spent = match (scenario.power_accounting, state.phase) {
                (PowerAccounting::SkipWhenEmpty, Phase::Idle) if state.q_su == 0 => 0.0,
                _ => allocated,
            };
            let (served, pu_success) = match state.phase {
                Phase::Idle => (u64::from(state.q_su > 0 && u_out < params.mu_su.eval(allocated)), false),
                Phase::Busy => {
                    let phi = match (&scenario.fading, fade) {
                        (Some(f), Some(s)) => f.states[s].phi.eval(allocated),
                        _ => params.phi.eval(allocated),
                    };
                    (0, u_out < phi)
                }
            };

            let arrivals = draw_arrivals(&mut rng, &params);
            let admitted = admit(state.q_su, arrivals, scenario.v);
            let pu_arrival = u64::from(rng.gen::<f64>() < params.lambda_pu);

            policy.record(state.phase, spent);
            m.q_su_slot_sum += u128::from(state.q_su);
            state.q_pu = step_pu_queue(state.q_pu, pu_success, pu_arrival);
            state.q_su = step_su_queue(state.q_su, served, u64::from(admitted));
            state.slot += 1;
            if state.q_su as f64 > bound {
                m.queue_bound_violations += 1;
            }
            m.max_q_su = m.max_q_su.max(state.q_su);

            frame.frame_len += 1;
            frame.admitted += u64::from(admitted);
            frame.served += served;
            match state.phase {
                Phase::Idle => frame.power_idle += spent,
                Phase::Busy => frame.power_coop += spent,
            }
        }

        let frame_power = frame.power_idle + frame.power_coop;
        state.x_su = update_virtual_queue(state.x_su, frame.frame_len, frame_power, params.p_avg);
        frame.q_su_end = state.q_su;
        frame.x_su_end = state.x_su;

        m.total_slots += frame.frame_len;
        m.total_admitted += frame.admitted;
        m.total_served += frame.served;
        m.total_power += frame_power;
        m.total_coop_power += frame.power_coop;
        m.frames.push(frame);
    }
    Ok(m)
}

/// Same as [`run_episode`]; the moving-average series is available through
/// [`RunMetrics::moving_average`] with the scenario window.
pub fn run_adaptive(scenario: &Scenario) -> Result<RunMetrics, SimError> {
    run_episode(scenario)
}

/// Independent episodes for each `v`, in input order, fanned out over the
/// current rayon pool. Episode `i` uses `derive_seed(template.seed, i)`.
pub fn sweep_v(template: &Scenario, v_values: &[f64]) -> Result<Vec<(f64, RunMetrics)>, SimError> {
    if v_values.is_empty() {
        return Err(SimError::InvalidScenario("empty V list".into()));
    }
    v_values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let scenario = template.clone().with_v(v).with_seed(derive_seed(template.seed, i));
            run_episode(&scenario).map(|m| (v, m))
        })
        .collect()
}
