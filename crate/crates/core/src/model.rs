//! Domain types and the per-slot queue recursions shared by every policy.

use thiserror::Error;

/// Tolerance used when matching a power value against a power-set level.
pub const LEVEL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unstable primary queue: lambda_pu = {lambda_pu} must be below phi(0) = {phi_nc}")]
    UnstablePrimary { lambda_pu: f64, phi_nc: f64 },
    #[error("{name} = {value} is not a probability in [0, 1]")]
    NotAProbability { name: &'static str, value: f64 },
    #[error("invalid power set: {0}")]
    InvalidPowerSet(String),
    #[error("invalid power curve: {0}")]
    InvalidCurve(String),
    #[error("phi must be non-decreasing over the power set (phi({lo}) > phi({hi}))")]
    PhiNotMonotone { lo: f64, hi: f64 },
    #[error("power budget must satisfy 0 < p_avg <= p_max (p_avg = {p_avg}, p_max = {p_max})")]
    InvalidBudget { p_avg: f64, p_max: f64 },
    #[error("arrival model: {0}")]
    InvalidArrivals(String),
}

/// The set of power levels the SU may pick from in any slot.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerSet {
    /// `{0, p_max}`: stay silent or go full power.
    TwoPoint { p_max: f64 },
    /// Finite, strictly increasing levels starting at 0.
    FiniteGrid { levels: Vec<f64> },
}

impl PowerSet {
    pub fn two_point(p_max: f64) -> Result<Self, ModelError> {
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(ModelError::InvalidPowerSet(format!(
                "p_max must be positive and finite, got {p_max}"
            )));
        }
        Ok(PowerSet::TwoPoint { p_max })
    }

    pub fn grid(levels: Vec<f64>) -> Result<Self, ModelError> {
        if levels.is_empty() {
            return Err(ModelError::InvalidPowerSet("no levels".into()));
        }
        if levels[0] != 0.0 {
            return Err(ModelError::InvalidPowerSet("0 must be the first level".into()));
        }
        if levels.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(ModelError::InvalidPowerSet(
                "levels must be finite and non-negative".into(),
            ));
        }
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::InvalidPowerSet("levels must be strictly increasing".into()));
        }
        Ok(PowerSet::FiniteGrid { levels })
    }

    /// Levels in increasing order; always starts with 0.
    pub fn levels(&self) -> Vec<f64> {
        match self {
            PowerSet::TwoPoint { p_max } => vec![0.0, *p_max],
            PowerSet::FiniteGrid { levels } => levels.clone(),
        }
    }

    pub fn p_max(&self) -> f64 {
        match self {
            PowerSet::TwoPoint { p_max } => *p_max,
            PowerSet::FiniteGrid { levels } => *levels.last().expect("non-empty"),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PowerSet::TwoPoint { .. } => 2,
            PowerSet::FiniteGrid { levels } => levels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_two_point(&self) -> bool {
        matches!(self, PowerSet::TwoPoint { .. })
    }

    pub fn contains(&self, power: f64) -> bool {
        self.levels().iter().any(|l| (l - power).abs() <= LEVEL_EPS)
    }
}

/// A map from power to probability, given as sorted `(power, value)` points.
///
/// Evaluation between points is linear and clamps beyond the ends, but the
/// controllers only ever evaluate it at power-set levels.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    points: Vec<(f64, f64)>,
}

impl PowerCurve {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::InvalidCurve("no points".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(ModelError::InvalidCurve("duplicate power".into()));
        }
        for &(p, v) in &points {
            if !p.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(ModelError::InvalidCurve(format!(
                    "point ({p}, {v}) is not a power/probability pair"
                )));
            }
        }
        Ok(PowerCurve { points })
    }

    /// Two-point curve with `value_at_zero` at power 0 and `value_at_max` at `p_max`.
    pub fn two_point(p_max: f64, value_at_zero: f64, value_at_max: f64) -> Result<Self, ModelError> {
        Self::new(vec![(0.0, value_at_zero), (p_max, value_at_max)])
    }

    /// Curve defined on the given power levels.
    pub fn on_levels(levels: &[f64], values: &[f64]) -> Result<Self, ModelError> {
        if levels.len() != values.len() {
            return Err(ModelError::InvalidCurve(format!(
                "{} levels but {} values",
                levels.len(),
                values.len()
            )));
        }
        Self::new(levels.iter().copied().zip(values.iter().copied()).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, power: f64) -> f64 {
        let pts = &self.points;
        if power <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts[pts.len() - 1];
        if power >= last.0 {
            return last.1;
        }
        let i = pts.partition_point(|(p, _)| *p <= power);
        let (p0, v0) = pts[i - 1];
        let (p1, v1) = pts[i];
        if (power - p0).abs() <= LEVEL_EPS {
            return v0;
        }
        v0 + (v1 - v0) * (power - p0) / (p1 - p0)
    }
}

/// Static inputs of the single-SU model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// PU Bernoulli arrival probability per slot.
    pub lambda_pu: f64,
    /// Mean SU arrivals per slot.
    pub lambda_su: f64,
    /// Per-slot SU arrival cap.
    pub a_max: u32,
    /// PU success probability as a function of cooperation power.
    pub phi: PowerCurve,
    /// SU (Bernoulli) service probability as a function of transmit power.
    pub mu_su: PowerCurve,
    pub p_avg: f64,
    pub p_max: f64,
    pub power_set: PowerSet,
}

impl ModelParams {
    /// Two-point model `{0, p_max}` with `phi(0) = phi_nc`, `phi(p_max) = phi_c`,
    /// `mu_su(0) = 0` and `mu_su(p_max) = mu_su_max`.
    #[allow(clippy::too_many_arguments)]
    pub fn two_point(
        lambda_pu: f64,
        lambda_su: f64,
        phi_nc: f64,
        phi_c: f64,
        mu_su_max: f64,
        p_avg: f64,
        p_max: f64,
    ) -> Result<Self, ModelError> {
        let params = ModelParams {
            lambda_pu,
            lambda_su,
            a_max: 1,
            phi: PowerCurve::two_point(p_max, phi_nc, phi_c)?,
            mu_su: PowerCurve::two_point(p_max, 0.0, mu_su_max)?,
            p_avg,
            p_max,
            power_set: PowerSet::two_point(p_max)?,
        };
        params.validate()?;
        Ok(params)
    }

    /// The operating point of the reference experiments: `lambda_pu = lambda_su = 0.5`,
    /// `phi_nc = 0.6`, `phi_c = 0.8`, `P_avg = 0.5`, `P_max = 1`, `mu_su(P_max) = 1`.
    pub fn reference_point() -> Self {
        Self::two_point(0.5, 0.5, 0.6, 0.8, 1.0, 0.5, 1.0).expect("reference point is valid")
    }

    pub fn with_lambda_pu(&self, lambda_pu: f64) -> Self {
        ModelParams {
            lambda_pu,
            ..self.clone()
        }
    }

    pub fn with_lambda_su(&self, lambda_su: f64) -> Self {
        ModelParams {
            lambda_su,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check_prob = |name: &'static str, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(ModelError::NotAProbability { name, value })
            }
        };
        check_prob("lambda_pu", self.lambda_pu)?;
        if !(self.lambda_su >= 0.0 && self.lambda_su <= f64::from(self.a_max)) {
            return Err(ModelError::InvalidArrivals(format!(
                "lambda_su = {} must lie in [0, a_max = {}]",
                self.lambda_su, self.a_max
            )));
        }
        if self.a_max == 0 && self.lambda_su > 0.0 {
            return Err(ModelError::InvalidArrivals("a_max = 0 with positive lambda_su".into()));
        }
        if !(self.p_avg > 0.0 && self.p_avg <= self.p_max) {
            return Err(ModelError::InvalidBudget {
                p_avg: self.p_avg,
                p_max: self.p_max,
            });
        }
        if (self.power_set.p_max() - self.p_max).abs() > LEVEL_EPS {
            return Err(ModelError::InvalidPowerSet(format!(
                "largest level {} differs from p_max {}",
                self.power_set.p_max(),
                self.p_max
            )));
        }
        let levels = self.power_set.levels();
        for w in levels.windows(2) {
            if self.phi.eval(w[0]) > self.phi.eval(w[1]) {
                return Err(ModelError::PhiNotMonotone { lo: w[0], hi: w[1] });
            }
        }
        for &p in &levels {
            check_prob("phi", self.phi.eval(p))?;
            check_prob("mu_su", self.mu_su.eval(p))?;
        }
        if self.lambda_pu >= self.phi_nc() {
            return Err(ModelError::UnstablePrimary {
                lambda_pu: self.lambda_pu,
                phi_nc: self.phi_nc(),
            });
        }
        Ok(())
    }

    /// PU success probability without cooperation, `phi(0)`.
    pub fn phi_nc(&self) -> f64 {
        self.phi.eval(0.0)
    }

    /// PU success probability under full cooperation, `phi(p_max)`.
    pub fn phi_c(&self) -> f64 {
        self.phi.eval(self.p_max)
    }

    /// Largest SU service probability over the power set.
    pub fn mu_max(&self) -> f64 {
        self.power_set
            .levels()
            .into_iter()
            .map(|p| self.mu_su.eval(p))
            .fold(0.0, f64::max)
    }
}

/// PU channel phase of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// `Q_pu = 0`: the SU may send its own data.
    Idle,
    /// `Q_pu > 0`: the PU transmits and the SU may cooperate.
    Busy,
}

impl Phase {
    pub fn of(q_pu: u64) -> Self {
        if q_pu == 0 {
            Phase::Idle
        } else {
            Phase::Busy
        }
    }
}

/// Dynamic state of the system at the start of a slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub q_pu: u64,
    pub q_su: u64,
    /// Virtual power queue; only changes at frame boundaries.
    pub x_su: f64,
    pub slot: u64,
    pub frame: u64,
    pub frame_start_slot: u64,
    pub q_su_at_frame_start: u64,
    pub x_su_at_frame_start: f64,
    pub phase: Phase,
}

impl SystemState {
    /// Empty queues, frame 0 starting at slot 0 in the idle phase.
    pub fn initial() -> Self {
        SystemState {
            q_pu: 0,
            q_su: 0,
            x_su: 0.0,
            slot: 0,
            frame: 0,
            frame_start_slot: 0,
            q_su_at_frame_start: 0,
            x_su_at_frame_start: 0.0,
            phase: Phase::Idle,
        }
    }
}

/// What happened in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome {
    pub admitted: u32,
    pub su_served: u32,
    pub pu_success: bool,
    pub power_spent: f64,
    pub was_idle_phase: bool,
}

/// PU queue update: departures are applied before arrivals.
pub fn step_pu_queue(q_pu: u64, pu_success: bool, arrival: u64) -> u64 {
    q_pu.saturating_sub(u64::from(pu_success)) + arrival
}

/// SU queue update: departures are applied before admitted arrivals.
pub fn step_su_queue(q_su: u64, served: u64, admitted: u64) -> u64 {
    q_su.saturating_sub(served) + admitted
}

/// Frame-boundary update of the virtual power queue.
pub fn update_virtual_queue(x_su: f64, frame_len: u64, frame_power_sum: f64, p_avg: f64) -> f64 {
    (x_su - frame_len as f64 * p_avg + frame_power_sum).max(0.0)
}
