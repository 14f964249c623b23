//! Frame-based drift-plus-penalty control.
//!
//! At the start of every frame the controller reads the SU backlog `Q` and the
//! virtual power queue `X` and fixes two powers for the whole frame:
//!
//! 1. `P0* = argmax_P  Q mu_su(P) - X P` for PU-idle slots, with optimum `theta*`;
//! 2. `P1* = argmin_P  (theta* + X P) / phi(P)` for PU-busy slots.
//!
//! Admission is a per-slot threshold on the current backlog. Ties in every
//! scan go to the lower power (and, with several users, the lower index).

mod fading;
mod multiuser;

pub use fading::{solve_p1_fading, FadingModel, FadingPowers, FadingSearch, FadingState};
pub use multiuser::{solve_multiuser_frame, MultiUserDecision};

use thiserror::Error;

use crate::model::{ModelParams, Phase, PowerSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControllerError {
    #[error("fading search space |P|^|S| = {size} exceeds the cap {cap} and the fallback is disabled")]
    SizeCapExceeded { size: u128, cap: u128 },
    #[error("invalid fading model: {0}")]
    InvalidFading(String),
    #[error("multi-user frame needs at least one user and one parameter set per user")]
    NoUsers,
}

/// Powers fixed for one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePowers {
    pub p0_star: f64,
    pub p1_star: f64,
    pub theta_star: f64,
}

/// Admission rule: take every arrival while the current backlog is at most `v`.
pub fn admit(q_su_now: u64, arrivals_now: u32, v: f64) -> u32 {
    if q_su_now as f64 <= v {
        arrivals_now
    } else {
        0
    }
}

/// Idle-slot power: `argmax_P q mu_su(P) - x P` and the attained value.
pub fn solve_p0(q_su_frame: f64, x_su_frame: f64, params: &ModelParams) -> (f64, f64) {
    best_idle_power(q_su_frame, x_su_frame, &params.power_set, |p| params.mu_su.eval(p))
}

pub(crate) fn best_idle_power(q: f64, x: f64, power_set: &PowerSet, mu_su: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut best = (0.0, f64::NEG_INFINITY);
    for p in power_set.levels() {
        let value = q * mu_su(p) - x * p;
        if value > best.1 {
            best = (p, value);
        }
    }
    best
}

/// Busy-slot objective `(theta + x P) / phi(P)`; `+inf` where `phi(P) = 0`.
pub fn coop_objective(theta_star: f64, x_su_frame: f64, power: f64, phi_at_power: f64) -> f64 {
    if phi_at_power <= 0.0 {
        f64::INFINITY
    } else {
        (theta_star + x_su_frame * power) / phi_at_power
    }
}

/// Busy-slot power by exhaustive scan, returning `(P1*, objective)`.
pub fn argmin_coop_power(
    theta_star: f64,
    x_su_frame: f64,
    power_set: &PowerSet,
    phi: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let mut best = (0.0, f64::INFINITY);
    for p in power_set.levels() {
        let value = coop_objective(theta_star, x_su_frame, p, phi(p));
        if value < best.1 {
            best = (p, value);
        }
    }
    best
}

/// Two-point threshold rule: stay silent iff `x >= theta (phi_c - phi_nc) / (p_max phi_nc)`.
pub fn threshold_rule_p1(theta_star: f64, x_su_frame: f64, phi_nc: f64, phi_c: f64, p_max: f64) -> f64 {
    if x_su_frame >= theta_star * (phi_c - phi_nc) / (p_max * phi_nc) {
        0.0
    } else {
        p_max
    }
}

/// Busy-slot cooperation power.
///
/// Two-point sets use the closed-form threshold rule; finite grids are scanned.
pub fn solve_p1(theta_star: f64, x_su_frame: f64, params: &ModelParams) -> f64 {
    match params.power_set {
        PowerSet::TwoPoint { p_max } => {
            threshold_rule_p1(theta_star, x_su_frame, params.phi_nc(), params.phi_c(), p_max)
        }
        PowerSet::FiniteGrid { .. } => {
            argmin_coop_power(theta_star, x_su_frame, &params.power_set, |p| params.phi.eval(p)).0
        }
    }
}

/// Both frame powers from the frame-start queue weights.
pub fn frame_powers(q_su_frame: f64, x_su_frame: f64, params: &ModelParams) -> FramePowers {
    let (p0_star, theta_star) = solve_p0(q_su_frame, x_su_frame, params);
    let p1_star = solve_p1(theta_star, x_su_frame, params);
    FramePowers {
        p0_star,
        p1_star,
        theta_star,
    }
}

/// Power to use in a slot of the current frame.
pub fn frame_power(phase: Phase, fp: &FramePowers) -> f64 {
    match phase {
        Phase::Idle => fp.p0_star,
        Phase::Busy => fp.p1_star,
    }
}

/// Single-SU controller holding the powers of the frame in progress.
#[derive(Debug, Clone)]
pub struct FbdppController {
    params: ModelParams,
    v: f64,
    current: FramePowers,
    fading: Option<(FadingModel, FadingSearch)>,
    fading_powers: Option<FadingPowers>,
}

impl FbdppController {
    pub fn new(params: ModelParams, v: f64) -> Self {
        FbdppController {
            params,
            v,
            current: FramePowers {
                p0_star: 0.0,
                p1_star: 0.0,
                theta_star: 0.0,
            },
            fading: None,
            fading_powers: None,
        }
    }

    /// Busy-slot powers become per-fade-state; idle slots are unaffected.
    pub fn with_fading(mut self, fading: FadingModel, search: FadingSearch) -> Self {
        self.fading = Some((fading, search));
        self
    }

    pub fn set_params(&mut self, params: ModelParams) {
        self.params = params;
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn begin_frame(&mut self, q_su: u64, x_su: f64) -> Result<FramePowers, ControllerError> {
        let q = q_su as f64;
        self.current = frame_powers(q, x_su, &self.params);
        if let Some((fading, search)) = &self.fading {
            let fp = solve_p1_fading(self.current.theta_star, x_su, fading, &self.params, search)?;
            self.fading_powers = Some(fp);
        }
        Ok(self.current)
    }

    pub fn frame_powers(&self) -> &FramePowers {
        &self.current
    }

    /// Power for a slot; `fade` indexes the fading state of a busy slot.
    pub fn decide(&self, phase: Phase, fade: Option<usize>) -> f64 {
        match (phase, &self.fading_powers, fade) {
            (Phase::Busy, Some(fp), Some(s)) => fp.powers[s],
            _ => frame_power(phase, &self.current),
        }
    }

    pub fn admit(&self, q_su_now: u64, arrivals_now: u32) -> u32 {
        admit(q_su_now, arrivals_now, self.v)
    }
}
