//! Cooperation under i.i.d. fading of the PU link.
//!
//! With fade state `s` drawn with probability `q_s` in every slot, the busy-slot
//! decision becomes one deterministic power per state, minimising
//! `(theta* + X sum_s q_s P_s) / sum_s q_s phi_s(P_s)`.

use super::ControllerError;
use crate::model::{ModelParams, PowerCurve};

#[derive(Debug, Clone, PartialEq)]
pub struct FadingState {
    pub id: String,
    pub prob: f64,
    pub phi: PowerCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FadingModel {
    pub states: Vec<FadingState>,
}

impl FadingModel {
    pub fn new(states: Vec<FadingState>) -> Result<Self, ControllerError> {
        if states.is_empty() {
            return Err(ControllerError::InvalidFading("no fading states".into()));
        }
        if states.iter().any(|s| !(s.prob >= 0.0 && s.prob <= 1.0)) {
            return Err(ControllerError::InvalidFading(
                "state probability outside [0, 1]".into(),
            ));
        }
        let total: f64 = states.iter().map(|s| s.prob).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(ControllerError::InvalidFading(format!(
                "state probabilities sum to {total}"
            )));
        }
        Ok(FadingModel { states })
    }

    /// Checks that every `phi_s` is a non-decreasing probability over `levels`.
    pub fn check_levels(&self, levels: &[f64]) -> Result<(), ControllerError> {
        for s in &self.states {
            for w in levels.windows(2) {
                if s.phi.eval(w[0]) > s.phi.eval(w[1]) {
                    return Err(ControllerError::InvalidFading(format!(
                        "phi of state {} decreases between {} and {}",
                        s.id, w[0], w[1]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the state selected by a uniform draw `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, s) in self.states.iter().enumerate() {
            acc += s.prob;
            if u < acc {
                return i;
            }
        }
        self.states.len() - 1
    }

    /// Expected busy-slot success probability under per-state powers.
    pub fn mean_phi(&self, powers: &[f64]) -> f64 {
        self.states
            .iter()
            .zip(powers)
            .map(|(s, &p)| s.prob * s.phi.eval(p))
            .sum()
    }

    /// Expected busy-slot power under per-state powers.
    pub fn mean_power(&self, powers: &[f64]) -> f64 {
        self.states.iter().zip(powers).map(|(s, &p)| s.prob * p).sum()
    }
}

/// How to search the `|P|^|S|` per-state power vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSearch {
    /// Largest search space enumerated exhaustively.
    pub size_cap: u128,
    /// Above the cap, fall back to parametric (Dinkelbach) iteration.
    pub allow_fallback: bool,
}

impl Default for FadingSearch {
    fn default() -> Self {
        FadingSearch {
            size_cap: 1 << 20,
            allow_fallback: true,
        }
    }
}

/// Per-state busy powers and the attained objective.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingPowers {
    pub powers: Vec<f64>,
    pub objective: f64,
}

fn ratio(theta: f64, x: f64, fading: &FadingModel, powers: &[f64]) -> f64 {
    let den = fading.mean_phi(powers);
    if den <= 0.0 {
        return f64::INFINITY;
    }
    (theta + x * fading.mean_power(powers)) / den
}

pub fn solve_p1_fading(
    theta_star: f64,
    x_su_frame: f64,
    fading: &FadingModel,
    params: &ModelParams,
    search: &FadingSearch,
) -> Result<FadingPowers, ControllerError> {
    let levels = params.power_set.levels();
    let n_states = fading.len();
    let size = (levels.len() as u128).checked_pow(n_states as u32).unwrap_or(u128::MAX);
    if size <= search.size_cap {
        Ok(exhaustive(theta_star, x_su_frame, fading, &levels))
    } else if search.allow_fallback {
        Ok(dinkelbach(theta_star, x_su_frame, fading, &levels))
    } else {
        Err(ControllerError::SizeCapExceeded {
            size,
            cap: search.size_cap,
        })
    }
}

/// Odometer over level indices, state 0 most significant; keeps the first
/// strict minimum, so ties go to the lexicographically lowest powers.
fn exhaustive(theta: f64, x: f64, fading: &FadingModel, levels: &[f64]) -> FadingPowers {
    let n = fading.len();
    let mut idx = vec![0usize; n];
    let mut powers = vec![levels[0]; n];
    let mut best = FadingPowers {
        powers: powers.clone(),
        objective: ratio(theta, x, fading, &powers),
    };
    loop {
        let mut pos = n;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < levels.len() {
                break;
            }
            idx[pos] = 0;
        }
        for (p, &i) in powers.iter_mut().zip(&idx) {
            *p = levels[i];
        }
        let value = ratio(theta, x, fading, &powers);
        if value < best.objective {
            best = FadingPowers {
                powers: powers.clone(),
                objective: value,
            };
        }
    }
}

/// For a trial ratio `r`, `min N - r D` separates across states; iterate
/// `r <- N/D` of the minimiser until it stops decreasing.
fn dinkelbach(theta: f64, x: f64, fading: &FadingModel, levels: &[f64]) -> FadingPowers {
    let mut powers = vec![*levels.last().expect("levels"); fading.len()];
    let mut r = ratio(theta, x, fading, &powers);
    for _ in 0..1000 {
        let next: Vec<f64> = fading
            .states
            .iter()
            .map(|s| {
                let mut best = (levels[0], f64::INFINITY);
                for &p in levels {
                    let value = x * p - r * s.phi.eval(p);
                    if value < best.1 {
                        best = (p, value);
                    }
                }
                best.0
            })
            .collect();
        let next_r = ratio(theta, x, fading, &next);
        if next_r < r - 1e-15 * r.abs().max(1.0) {
            powers = next;
            r = next_r;
        } else {
            break;
        }
    }
    FadingPowers { powers, objective: r }
}
