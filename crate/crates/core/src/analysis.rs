//! Closed-form quantities of the PU birth–death chain and the drift constants.
//!
//! The PU backlog is a birth–death chain on `{0, 1, 2, ...}`: from 0 it moves
//! up with probability `lambda_pu`; from `i >= 1` it moves up with probability
//! `lambda_pu (1 - mu)` and down with probability `(1 - lambda_pu) mu`, where
//! `mu` is the per-busy-slot PU success probability.

use thiserror::Error;

use crate::model::ModelParams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("unstable chain: lambda_pu = {lambda} must be below the service probability {mu}")]
    Unstable { lambda: f64, mu: f64 },
    #[error("degenerate chain: lambda_pu must be positive (got {0})")]
    NoArrivals(f64),
}

fn check_stable(lambda: f64, mu: f64) -> Result<(), AnalysisError> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(AnalysisError::NoArrivals(lambda));
    }
    if !(lambda < mu && mu <= 1.0) {
        return Err(AnalysisError::Unstable { lambda, mu });
    }
    Ok(())
}

/// Stationary idle/busy split of the PU chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSolution {
    pub pi_0: f64,
    pub busy_fraction: f64,
    pub effective_mu: f64,
}

/// Idle probability `pi_0 = 1 - lambda/mu` of the PU chain with effective
/// per-busy-slot success probability `mu_eff`.
pub fn steady_state(lambda_pu: f64, mu_eff: f64) -> Result<ChainSolution, AnalysisError> {
    check_stable(lambda_pu, mu_eff)?;
    let pi_0 = 1.0 - lambda_pu / mu_eff;
    Ok(ChainSolution {
        pi_0,
        busy_fraction: 1.0 - pi_0,
        effective_mu: mu_eff,
    })
}

/// Expected frame length with success probability `mu` on every busy slot:
/// `mu / ((mu - lambda) lambda)`.
pub fn expected_frame_length(lambda_pu: f64, mu: f64) -> Result<f64, AnalysisError> {
    check_stable(lambda_pu, mu)?;
    Ok(mu / ((mu - lambda_pu) * lambda_pu))
}

/// `(t_min, t_max)`: expected frame lengths under always/never cooperating.
pub fn frame_length_bounds(params: &ModelParams) -> Result<(f64, f64), AnalysisError> {
    let t_min = expected_frame_length(params.lambda_pu, params.phi_c())?;
    let t_max = expected_frame_length(params.lambda_pu, params.phi_nc())?;
    Ok((t_min, t_max))
}

/// Busy-period moments `(E[B], E[B^2])` without cooperation, from the
/// preemptive-LIFO decomposition of the busy period.
///
/// See [`exact_busy_period_moments`] for the first-passage values of the slot
/// dynamics; the two second moments differ (this one is larger).
pub fn busy_period_moments(lambda_pu: f64, phi_nc: f64) -> Result<(f64, f64), AnalysisError> {
    check_stable(lambda_pu, phi_nc)?;
    let l = lambda_pu;
    let f = phi_nc;
    let gap = f - l;
    let e_b = 1.0 / gap;
    let e_b2 = (2.0 - f) / (f * gap) + 2.0 * l / (f * gap * gap) + 4.0 * l * l * (1.0 - f) / (f * gap * gap * gap);
    Ok((e_b, e_b2))
}

/// First-passage moments `(E[B], E[B^2])` of the busy period (time for the
/// PU backlog to fall from 1 to 0) under success probability `mu` per busy slot.
///
/// With up-probability `u = lambda (1 - mu)` and `E[B] = 1/(mu - lambda)`, a
/// one-step decomposition gives `E[B^2] = E[B] (2 E[B] - 1 + 2 u E[B]^2)`.
pub fn exact_busy_period_moments(lambda_pu: f64, mu: f64) -> Result<(f64, f64), AnalysisError> {
    check_stable(lambda_pu, mu)?;
    let e_b = 1.0 / (mu - lambda_pu);
    let up = lambda_pu * (1.0 - mu);
    Ok((e_b, e_b * (2.0 * e_b - 1.0 + 2.0 * up * e_b * e_b)))
}

/// Idle-period moments `(E[I], E[I^2])`; the idle period is geometric in `lambda_pu`.
pub fn idle_period_moments(lambda_pu: f64) -> Result<(f64, f64), AnalysisError> {
    if !(lambda_pu > 0.0 && lambda_pu <= 1.0) {
        return Err(AnalysisError::NoArrivals(lambda_pu));
    }
    Ok((1.0 / lambda_pu, (2.0 - lambda_pu) / (lambda_pu * lambda_pu)))
}

/// Frame second-moment bound `D = E[I^2] + E[B^2] + 2 E[I] E[B]` under no cooperation.
pub fn compute_d(lambda_pu: f64, phi_nc: f64) -> Result<f64, AnalysisError> {
    let (e_b, e_b2) = busy_period_moments(lambda_pu, phi_nc)?;
    let (e_i, e_i2) = idle_period_moments(lambda_pu)?;
    Ok(e_i2 + e_b2 + 2.0 * e_i * e_b)
}

/// Constants of the drift bound and the throughput guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftConstants {
    pub b_const: f64,
    pub c_const: f64,
    pub d_const: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl DriftConstants {
    pub fn from_parts(d: f64, mu_max: f64, a_max: f64, p_max: f64, p_avg: f64, t_min: f64, t_max: f64) -> Self {
        let excess = p_max - p_avg;
        DriftConstants {
            b_const: d * (mu_max * mu_max + a_max * a_max + excess * excess) / 2.0,
            c_const: d * (a_max + mu_max) * a_max / 2.0,
            d_const: d,
            t_min,
            t_max,
        }
    }
}

pub fn drift_constants(params: &ModelParams) -> Result<DriftConstants, AnalysisError> {
    let d = compute_d(params.lambda_pu, params.phi_nc())?;
    let (t_min, t_max) = frame_length_bounds(params)?;
    Ok(DriftConstants::from_parts(
        d,
        params.mu_max(),
        f64::from(params.a_max),
        params.p_max,
        params.p_avg,
        t_min,
        t_max,
    ))
}

/// Guaranteed time-average admitted throughput `upsilon* - (B + C)/(V T_min)`.
/// Negative values mean the guarantee is vacuous at this `v`.
pub fn throughput_lower_bound(v: f64, upsilon_star: f64, constants: &DriftConstants) -> f64 {
    upsilon_star - (constants.b_const + constants.c_const) / (v * constants.t_min)
}
