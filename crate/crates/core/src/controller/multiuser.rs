//! Several SUs sharing one PU channel: one SU sends in idle slots and at most
//! one SU cooperates in busy slots, each chosen per frame.

use super::{argmin_coop_power, best_idle_power, ControllerError};
use crate::model::ModelParams;

/// Frame decision for the multi-user controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiUserDecision {
    pub idle_user: usize,
    pub p0_star: f64,
    pub theta_star: f64,
    pub coop_user: usize,
    pub p1_star: f64,
}

/// Picks the idle-slot sender and the busy-slot cooperator for one frame.
///
/// `frame_queues[i] = (Q_i, X_i)` at the frame start. The sender maximises
/// `Q_i mu_i(P) - X_i P` over users and powers; with the resulting `theta*`
/// the cooperator minimises `(theta* + X_j P) / phi_j(P)`. Ties go to the lower
/// power, then the lower user index.
pub fn solve_multiuser_frame(
    frame_queues: &[(f64, f64)],
    params_per_user: &[ModelParams],
) -> Result<MultiUserDecision, ControllerError> {
    if frame_queues.is_empty() || frame_queues.len() != params_per_user.len() {
        return Err(ControllerError::NoUsers);
    }

    let mut idle: Option<(usize, f64, f64)> = None;
    for (i, (&(q, x), params)) in frame_queues.iter().zip(params_per_user).enumerate() {
        let (p, value) = best_idle_power(q, x, &params.power_set, |p| params.mu_su.eval(p));
        let better = match idle {
            None => true,
            Some((_, bp, bv)) => value > bv || (value == bv && p < bp),
        };
        if better {
            idle = Some((i, p, value));
        }
    }
    let (idle_user, p0_star, theta_star) = idle.expect("at least one user");

    let mut coop: Option<(usize, f64, f64)> = None;
    for (j, (&(_, x), params)) in frame_queues.iter().zip(params_per_user).enumerate() {
        let (p, value) = argmin_coop_power(theta_star, x, &params.power_set, |p| params.phi.eval(p));
        let better = match coop {
            None => true,
            Some((_, bp, bv)) => value < bv || (value == bv && p < bp),
        };
        if better {
            coop = Some((j, p, value));
        }
    }
    let (coop_user, p1_star, _) = coop.expect("at least one user");

    Ok(MultiUserDecision {
        idle_user,
        p0_star,
        theta_star,
        coop_user,
        p1_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::{solve_p0, solve_p1};

    #[test]
    fn single_user_reduces_to_two_step() {
        let p = ModelParams::reference_point();
        for &(q, x) in &[(100.0, 10.0), (100.0, 40.0), (0.0, 3.0), (12.0, 0.0), (5.0, 5.0)] {
            let d = solve_multiuser_frame(&[(q, x)], std::slice::from_ref(&p)).unwrap();
            let (p0, theta) = solve_p0(q, x, &p);
            assert_eq!(d.idle_user, 0);
            assert_eq!(d.coop_user, 0);
            assert_eq!(d.p0_star, p0);
            assert_eq!(d.theta_star, theta);
            assert_eq!(d.p1_star, solve_p1(theta, x, &p));
        }
    }

    #[test]
    fn larger_backlog_wins_idle_slots() {
        let p = ModelParams::reference_point();
        let d = solve_multiuser_frame(&[(20.0, 2.0), (50.0, 2.0)], &[p.clone(), p]).unwrap();
        assert_eq!(d.idle_user, 1);
        assert_eq!(d.theta_star, 48.0);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let p = ModelParams::reference_point();
        let d = solve_multiuser_frame(&[(7.0, 1.0), (7.0, 1.0)], &[p.clone(), p]).unwrap();
        assert_eq!(d.idle_user, 0);
        assert_eq!(d.coop_user, 0);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let p = ModelParams::reference_point();
        assert!(solve_multiuser_frame(&[], &[]).is_err());
        assert!(solve_multiuser_frame(&[(1.0, 1.0)], &[p.clone(), p]).is_err());
    }
}
