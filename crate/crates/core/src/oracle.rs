//! Offline optimum over stationary randomized policies.
//!
//! A stationary policy mixes between two power levels in PU-busy slots (with
//! probability `q` on the upper level, the same mix in every busy state) and
//! between two levels in PU-idle slots (probability `p` on the upper level).
//! Its idle probability is `pi_0 = 1 - lambda_pu / E[phi]`, its throughput
//! `min(lambda_su, pi_0 E[mu_su])` and its power
//! `(1 - pi_0) E[P_busy] + pi_0 E[P_idle]`, which must not exceed `P_avg`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{step_pu_queue, ModelParams, PowerSet};
use crate::sim::draw_arrivals;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("the closed-form oracle needs a two-point power set {{0, P_max}}; use a grid search (--grid-step) for finite grids")]
    NotTwoPoint,
    #[error("grid step must lie in (0, 1], got {0}")]
    InvalidStep(f64),
    #[error("coop probability must lie in [0, 1], got {0}")]
    InvalidCoopProb(f64),
}

/// Slack allowed on the power constraint when checking grid points.
const POWER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPolicy {
    /// Probability of the upper busy level.
    pub coop_prob: f64,
    /// Probability of the upper idle level.
    pub idle_tx_prob: f64,
    /// `(lower, upper)` busy-slot levels; `(0, P_max)` for two-point sets.
    pub busy_levels: (f64, f64),
    /// `(lower, upper)` idle-slot levels; `(0, P_max)` for two-point sets.
    pub idle_levels: (f64, f64),
    pub upsilon: f64,
    pub pi_0: f64,
    pub power_used: f64,
}

impl StationaryPolicy {
    /// Analytic performance of a mix; `None` if the PU chain would be unstable.
    pub fn evaluate(
        params: &ModelParams,
        busy_levels: (f64, f64),
        coop_prob: f64,
        idle_levels: (f64, f64),
        idle_tx_prob: f64,
    ) -> Option<Self> {
        let mix =
            |levels: (f64, f64), prob: f64, f: &dyn Fn(f64) -> f64| (1.0 - prob) * f(levels.0) + prob * f(levels.1);
        let mean_phi = mix(busy_levels, coop_prob, &|p| params.phi.eval(p));
        if params.lambda_pu >= mean_phi {
            return None;
        }
        let pi_0 = 1.0 - params.lambda_pu / mean_phi;
        let service = mix(idle_levels, idle_tx_prob, &|p| params.mu_su.eval(p));
        let busy_power = mix(busy_levels, coop_prob, &|p| p);
        let idle_power = mix(idle_levels, idle_tx_prob, &|p| p);
        Some(StationaryPolicy {
            coop_prob,
            idle_tx_prob,
            busy_levels,
            idle_levels,
            upsilon: params.lambda_su.min(pi_0 * service),
            pi_0,
            power_used: (1.0 - pi_0) * busy_power + pi_0 * idle_power,
        })
    }

    pub fn is_feasible(&self, p_avg: f64) -> bool {
        self.power_used <= p_avg + POWER_SLACK
    }
}

fn two_point_levels(params: &ModelParams) -> Result<f64, OracleError> {
    match params.power_set {
        PowerSet::TwoPoint { p_max } => Ok(p_max),
        PowerSet::FiniteGrid { .. } => Err(OracleError::NotTwoPoint),
    }
}

/// Best idle mix for a given cooperation probability, spending whatever budget
/// cooperation leaves. `None` if cooperation alone breaks the budget.
fn best_for_coop(params: &ModelParams, p_max: f64, q: f64) -> Option<StationaryPolicy> {
    let levels = (0.0, p_max);
    let base = StationaryPolicy::evaluate(params, levels, q, levels, 0.0)?;
    if !base.is_feasible(params.p_avg) {
        return None;
    }
    let mu0 = params.mu_su.eval(0.0);
    let mu1 = params.mu_su.eval(p_max);
    let p = if mu1 > mu0 {
        ((params.p_avg - base.power_used) / (base.pi_0 * p_max)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    StationaryPolicy::evaluate(params, levels, q, levels, p)
}

/// Lowers the idle transmit probability until throughput just meets `lambda_su`.
fn trim_to_arrivals(params: &ModelParams, policy: StationaryPolicy) -> StationaryPolicy {
    let mu0 = params.mu_su.eval(policy.idle_levels.0);
    let mu1 = params.mu_su.eval(policy.idle_levels.1);
    let capacity = policy.pi_0 * ((1.0 - policy.idle_tx_prob) * mu0 + policy.idle_tx_prob * mu1);
    if capacity <= params.lambda_su || mu1 <= mu0 {
        return policy;
    }
    let p = ((params.lambda_su / policy.pi_0 - mu0) / (mu1 - mu0)).clamp(0.0, policy.idle_tx_prob);
    StationaryPolicy::evaluate(params, policy.busy_levels, policy.coop_prob, policy.idle_levels, p).unwrap_or(policy)
}

/// Optimal stationary policy for a two-point power set.
///
/// With `mu_su(0) = 0` the optimum sits where the idle probability `pi_0(q)`
/// (increasing in `q`) meets the idle budget left after cooperation (decreasing
/// in `q`): `q = (lambda_pu - c phi_nc) / (lambda_pu + c (phi_c - phi_nc))`,
/// `c = 1 - P_avg/P_max`, clamped to `[0, 1]`. A `1e-4` scan over `q` verifies
/// the candidate and takes over when it finds something strictly better.
pub fn optimal_two_point(params: &ModelParams) -> Result<StationaryPolicy, OracleError> {
    let p_max = two_point_levels(params)?;
    let levels = (0.0, p_max);
    if params.lambda_su <= 0.0 {
        return Ok(StationaryPolicy::evaluate(params, levels, 0.0, levels, 0.0)
            .expect("params are stable without cooperation"));
    }

    let lambda = params.lambda_pu;
    let phi_nc = params.phi_nc();
    let delta = params.phi_c() - phi_nc;
    let c = 1.0 - params.p_avg / p_max;

    let mut candidates = vec![0.0, 1.0];
    let denom = lambda + c * delta;
    if denom > 0.0 {
        candidates.push(((lambda - c * phi_nc) / denom).clamp(0.0, 1.0));
    }
    // Where cooperation alone uses the whole budget.
    let denom = p_max * lambda - params.p_avg * delta;
    if denom > 0.0 {
        candidates.push((params.p_avg * phi_nc / denom).clamp(0.0, 1.0));
    }

    let mut best: Option<StationaryPolicy> = None;
    let consider = |cand: Option<StationaryPolicy>, best: &mut Option<StationaryPolicy>| {
        if let Some(c) = cand {
            if best.is_none_or(|b| c.upsilon > b.upsilon) {
                *best = Some(c);
            }
        }
    };
    for &q in &candidates {
        consider(best_for_coop(params, p_max, q), &mut best);
    }
    let closed_form = best;
    const REFINE_STEPS: u32 = 10_000;
    for i in 0..=REFINE_STEPS {
        let q = f64::from(i) / f64::from(REFINE_STEPS);
        let cand = best_for_coop(params, p_max, q);
        if let (Some(c), Some(b)) = (cand, best) {
            if c.upsilon > b.upsilon + 1e-12 {
                best = Some(c);
            }
        } else if best.is_none() {
            best = cand;
        }
    }
    let chosen = match (closed_form, best) {
        (Some(cf), Some(b)) if b.upsilon <= cf.upsilon + 1e-12 => cf,
        (_, Some(b)) => b,
        (Some(cf), None) => cf,
        (None, None) => {
            StationaryPolicy::evaluate(params, levels, 0.0, levels, 0.0).expect("params are stable without cooperation")
        }
    };
    Ok(trim_to_arrivals(params, chosen))
}

fn grid_points(step: f64) -> Result<Vec<f64>, OracleError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(OracleError::InvalidStep(step));
    }
    let n = (1.0 / step).round().max(1.0) as u64;
    Ok((0..=n).map(|i| (i as f64 * step).min(1.0)).collect())
}

fn level_pairs(power_set: &PowerSet) -> Vec<(f64, f64)> {
    let levels = power_set.levels();
    let mut pairs = Vec::new();
    for (i, &lo) in levels.iter().enumerate() {
        for &hi in &levels[i + 1..] {
            pairs.push((lo, hi));
        }
    }
    pairs
}

fn scan(params: &ModelParams, step: f64, coop_rows: Option<&[f64]>) -> Result<StationaryPolicy, OracleError> {
    let grid = grid_points(step)?;
    let rows = coop_rows.unwrap_or(&grid);
    let pairs = level_pairs(&params.power_set);
    let mut best: Option<StationaryPolicy> = None;
    for &busy in &pairs {
        for &q in rows {
            for &idle in &pairs {
                for &p in &grid {
                    let Some(cand) = StationaryPolicy::evaluate(params, busy, q, idle, p) else {
                        continue;
                    };
                    if !cand.is_feasible(params.p_avg) {
                        continue;
                    }
                    if best.is_none_or(|b| cand.upsilon > b.upsilon) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    Ok(best.unwrap_or_else(|| {
        let zero = (0.0, params.p_max);
        StationaryPolicy::evaluate(params, zero, 0.0, zero, 0.0).expect("stable without cooperation")
    }))
}

/// Exhaustive scan of both mixing probabilities on a `step` grid.
///
/// Two-point sets mix `{0, P_max}`; finite grids try every ordered pair of
/// levels in each phase, which only approximates the optimum there.
pub fn grid_search(params: &ModelParams, step: f64) -> Result<StationaryPolicy, OracleError> {
    scan(params, step, None)
}

/// [`grid_search`] with the busy mix pinned to `coop_prob`.
pub fn grid_search_with_coop(params: &ModelParams, step: f64, coop_prob: f64) -> Result<StationaryPolicy, OracleError> {
    if !(0.0..=1.0).contains(&coop_prob) {
        return Err(OracleError::InvalidCoopProb(coop_prob));
    }
    scan(params, step, Some(&[coop_prob]))
}

/// Monte-Carlo estimates from running a fixed stationary policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryEstimate {
    /// Admitted packets per slot (arrivals thinned with probability `upsilon / lambda_su`).
    pub admitted: f64,
    /// Packets actually served per slot.
    pub served: f64,
    /// Successful SU transmission opportunities per slot, backlog or not.
    pub service_capacity: f64,
    pub avg_power: f64,
    pub idle_fraction: f64,
    pub slots: u64,
}

/// Runs the slotted chain under `policy` for `horizon` slots.
pub fn simulate_stationary(
    policy: &StationaryPolicy,
    params: &ModelParams,
    horizon: u64,
    seed: u64,
) -> StationaryEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let admit_prob = if params.lambda_su > 0.0 {
        (policy.upsilon / params.lambda_su).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (mut q_pu, mut q_su) = (0u64, 0u64);
    let (mut admitted, mut served, mut capacity, mut idle) = (0u64, 0u64, 0u64, 0u64);
    let mut power = 0.0;
    for _ in 0..horizon {
        let u_mix: f64 = rng.gen();
        let u_out: f64 = rng.gen();
        let mut pu_success = false;
        if q_pu == 0 {
            idle += 1;
            let p = if u_mix < policy.idle_tx_prob {
                policy.idle_levels.1
            } else {
                policy.idle_levels.0
            };
            power += p;
            if u_out < params.mu_su.eval(p) {
                capacity += 1;
                if q_su > 0 {
                    q_su -= 1;
                    served += 1;
                }
            }
        } else {
            let p = if u_mix < policy.coop_prob {
                policy.busy_levels.1
            } else {
                policy.busy_levels.0
            };
            power += p;
            pu_success = u_out < params.phi.eval(p);
        }
        let arrivals = draw_arrivals(&mut rng, params);
        let take: bool = rng.gen::<f64>() < admit_prob;
        if take {
            q_su += u64::from(arrivals);
            admitted += u64::from(arrivals);
        }
        let pu_arrival = u64::from(rng.gen::<f64>() < params.lambda_pu);
        q_pu = step_pu_queue(q_pu, pu_success, pu_arrival);
    }
    let n = horizon.max(1) as f64;
    StationaryEstimate {
        admitted: admitted as f64 / n,
        served: served as f64 / n,
        service_capacity: capacity as f64 / n,
        avg_power: power / n,
        idle_fraction: idle as f64 / n,
        slots: horizon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_optimum_is_a_quarter() {
        let p = ModelParams::reference_point();
        let opt = optimal_two_point(&p).unwrap();
        assert!((opt.upsilon - 0.25).abs() <= 1e-12, "{opt:?}");
        assert!((opt.coop_prob - 1.0 / 3.0).abs() <= 1e-12);
        assert!((opt.idle_tx_prob - 1.0).abs() <= 1e-12);
        assert!((opt.pi_0 - 0.25).abs() <= 1e-12);
        assert!(opt.power_used <= p.p_avg + 1e-12);
    }

    #[test]
    fn unconstrained_power_maximises_idle_time() {
        let mut p = ModelParams::two_point(0.5, 1.0, 0.6, 0.8, 1.0, 1.0, 1.0).unwrap();
        p.a_max = 1;
        let opt = optimal_two_point(&p).unwrap();
        assert_eq!(opt.coop_prob, 1.0);
        assert!((opt.upsilon - (1.0 - 0.5 / 0.8)).abs() < 1e-12);
    }

    #[test]
    fn no_arrivals_no_throughput() {
        let p = ModelParams::reference_point().with_lambda_su(0.0);
        assert_eq!(optimal_two_point(&p).unwrap().upsilon, 0.0);
        assert_eq!(grid_search(&p, 0.1).unwrap().upsilon, 0.0);
    }

    #[test]
    fn arrival_cap_trims_idle_transmission() {
        let p = ModelParams::reference_point().with_lambda_su(0.1);
        let opt = optimal_two_point(&p).unwrap();
        assert!((opt.upsilon - 0.1).abs() < 1e-12);
        assert!(opt.idle_tx_prob < 1.0);
        assert!(opt.power_used < p.p_avg);
    }

    #[test]
    fn grid_corners_only_with_unit_step() {
        let p = ModelParams::reference_point();
        let best = grid_search(&p, 1.0).unwrap();
        assert!([0.0, 1.0].contains(&best.coop_prob));
        assert!([0.0, 1.0].contains(&best.idle_tx_prob));
        // q = 0, p = 1 is the best feasible corner: pi_0 = 1/6, power 1/6.
        assert!((best.upsilon - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn forced_no_cooperation_row() {
        let p = ModelParams::reference_point();
        let best = grid_search_with_coop(&p, 1e-3, 0.0).unwrap();
        assert!((best.upsilon - 1.0 / 6.0).abs() < 1e-12);
        assert!((best.upsilon - 0.1667).abs() < 1e-4);
    }

    #[test]
    fn invalid_inputs() {
        let p = ModelParams::reference_point();
        assert!(matches!(grid_search(&p, 0.0), Err(OracleError::InvalidStep(_))));
        assert!(matches!(grid_search(&p, 1.5), Err(OracleError::InvalidStep(_))));
        assert!(grid_search_with_coop(&p, 0.1, 1.2).is_err());
        let mut grid = p.clone();
        grid.power_set = PowerSet::grid(vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(optimal_two_point(&grid), Err(OracleError::NotTwoPoint));
    }

    #[test]
    fn zero_idle_transmission_serves_nothing() {
        let p = ModelParams::reference_point();
        let pol = StationaryPolicy::evaluate(&p, (0.0, 1.0), 0.5, (0.0, 1.0), 0.0).unwrap();
        assert_eq!(pol.upsilon, 0.0);
        let est = simulate_stationary(&pol, &p, 20_000, 3);
        assert_eq!(est.admitted, 0.0);
        assert_eq!(est.served, 0.0);
    }
}
