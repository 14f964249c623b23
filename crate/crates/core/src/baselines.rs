//! Comparison policies: No Cooperation, Always Cooperate and Counter-Based.
//!
//! All three act at full power or not at all, gated by the running average of
//! the power spent so far.

use crate::model::Phase;

/// Running power bookkeeping shared by the baselines.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CounterState {
    pub total_power: f64,
    pub slots_elapsed: u64,
    /// Busy slots seen so far (used by Always Cooperate's reservation).
    pub busy_slots: u64,
}

impl CounterState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn running_average(&self) -> f64 {
        self.total_power / self.slots_elapsed.max(1) as f64
    }

    pub fn busy_fraction(&self) -> f64 {
        self.busy_slots as f64 / self.slots_elapsed.max(1) as f64
    }

    /// Records the actual spend of a finished slot.
    pub fn record(&mut self, phase: Phase, power_spent: f64) {
        self.total_power += power_spent;
        self.slots_elapsed += 1;
        if phase == Phase::Busy {
            self.busy_slots += 1;
        }
    }
}

/// Full power may be spent if the running average is below the budget, or if
/// full power cannot exceed the budget at all.
fn budget_open(counter: &CounterState, p_avg: f64, p_max: f64) -> bool {
    counter.running_average() < p_avg || (p_max <= p_avg && p_avg > 0.0)
}

/// Never cooperates; transmits in idle slots while the budget gate is open.
pub fn no_coop_decide(phase: Phase, counter: &CounterState, p_avg: f64, p_max: f64) -> f64 {
    match phase {
        Phase::Busy => 0.0,
        Phase::Idle if budget_open(counter, p_avg, p_max) => p_max,
        Phase::Idle => 0.0,
    }
}

/// Cooperates in every busy slot the budget allows, and transmits in idle
/// slots only from what would remain after cooperating on every busy slot.
pub fn always_coop_decide(phase: Phase, counter: &CounterState, p_avg: f64, p_max: f64) -> f64 {
    if !budget_open(counter, p_avg, p_max) {
        return 0.0;
    }
    match phase {
        Phase::Busy => p_max,
        Phase::Idle if counter.busy_fraction() * p_max < p_avg => p_max,
        Phase::Idle => 0.0,
    }
}

/// Transmits or cooperates at full power whenever the running average is below the budget.
pub fn counter_decide(_phase: Phase, counter: &CounterState, p_avg: f64, p_max: f64) -> f64 {
    if budget_open(counter, p_avg, p_max) {
        p_max
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spent(total: f64, slots: u64, busy: u64) -> CounterState {
        CounterState {
            total_power: total,
            slots_elapsed: slots,
            busy_slots: busy,
        }
    }

    #[test]
    fn no_coop_examples() {
        let fresh = CounterState::new();
        assert_eq!(no_coop_decide(Phase::Busy, &fresh, 0.5, 1.0), 0.0);
        assert_eq!(no_coop_decide(Phase::Idle, &fresh, 0.5, 1.0), 1.0);
        assert_eq!(no_coop_decide(Phase::Idle, &spent(6.0, 10, 0), 0.5, 1.0), 0.0);
    }

    #[test]
    fn always_coop_examples() {
        let fresh = CounterState::new();
        assert_eq!(always_coop_decide(Phase::Busy, &fresh, 0.5, 1.0), 1.0);
        // Busy share 0.7 > P_avg: nothing left for idle transmission.
        assert_eq!(always_coop_decide(Phase::Idle, &spent(3.0, 10, 7), 0.5, 1.0), 0.0);
        assert_eq!(always_coop_decide(Phase::Busy, &spent(3.0, 10, 7), 0.5, 1.0), 1.0);
        assert_eq!(always_coop_decide(Phase::Idle, &spent(3.0, 10, 3), 0.5, 1.0), 1.0);
        assert_eq!(always_coop_decide(Phase::Busy, &spent(5.0, 10, 7), 0.5, 1.0), 0.0);
    }

    #[test]
    fn slack_budget_means_full_power() {
        let heavy = spent(100.0, 100, 90);
        assert_eq!(always_coop_decide(Phase::Busy, &heavy, 1.0, 1.0), 1.0);
        assert_eq!(always_coop_decide(Phase::Idle, &spent(100.0, 100, 50), 1.0, 1.0), 1.0);
        assert_eq!(counter_decide(Phase::Idle, &heavy, 1.0, 1.0), 1.0);
    }

    #[test]
    fn counter_examples() {
        let fresh = CounterState::new();
        assert_eq!(counter_decide(Phase::Idle, &fresh, 0.5, 1.0), 1.0);
        assert_eq!(counter_decide(Phase::Busy, &fresh, 0.5, 1.0), 1.0);
        assert_eq!(counter_decide(Phase::Busy, &spent(5.0, 10, 5), 0.5, 1.0), 0.0);
        assert_eq!(counter_decide(Phase::Idle, &spent(4.9, 10, 5), 0.5, 1.0), 1.0);
        assert_eq!(counter_decide(Phase::Idle, &fresh, 0.0, 1.0), 0.0);
        assert_eq!(counter_decide(Phase::Busy, &spent(0.0, 50, 9), 0.0, 1.0), 0.0);
    }

    #[test]
    fn counter_records_actual_spend() {
        let mut c = CounterState::new();
        c.record(Phase::Busy, 1.0);
        c.record(Phase::Idle, 0.0);
        assert_eq!(c.running_average(), 0.5);
        assert_eq!(c.busy_slots, 1);
        assert_eq!(c.busy_fraction(), 0.5);
    }
}
