//! Per-frame records and episode summaries.

/// One complete frame of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    /// 1-based frame number.
    pub frame: u64,
    pub frame_len: u64,
    pub admitted: u64,
    pub served: u64,
    /// Power spent in PU-idle slots of the frame.
    pub power_idle: f64,
    /// Power spent cooperating in PU-busy slots of the frame.
    pub power_coop: f64,
    /// SU backlog at the start of the next frame.
    pub q_su_end: u64,
    /// Virtual power queue after the frame-boundary update.
    pub x_su_end: f64,
    /// PU arrival rate in force during the frame.
    pub lambda_pu: f64,
}

/// Trailing moving averages at one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingPoint {
    pub frame: u64,
    pub lambda_pu: f64,
    /// Admitted packets per slot over the window.
    pub throughput: f64,
    /// Cooperation power per slot over the window.
    pub coop_power: f64,
    /// Total power per slot over the window.
    pub power: f64,
}

/// Everything measured over one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub policy: String,
    pub v: f64,
    pub seed: u64,
    pub generator: &'static str,
    pub frames: Vec<FrameRecord>,
    pub total_slots: u64,
    pub total_admitted: u64,
    pub total_served: u64,
    pub total_power: f64,
    pub total_coop_power: f64,
    pub max_q_su: u64,
    /// Sum of `Q_su(t)` over slots, observed at the start of each slot.
    pub q_su_slot_sum: u128,
    /// Slots whose post-update backlog exceeded `V + A_max`.
    pub queue_bound_violations: u64,
    /// Default moving-average window, in frames.
    pub window: usize,
}

impl RunMetrics {
    fn per_slot(&self, total: f64) -> f64 {
        if self.total_slots == 0 {
            0.0
        } else {
            total / self.total_slots as f64
        }
    }

    /// Admitted packets per slot.
    pub fn throughput_admitted(&self) -> f64 {
        self.per_slot(self.total_admitted as f64)
    }

    /// Served packets per slot.
    pub fn throughput_served(&self) -> f64 {
        self.per_slot(self.total_served as f64)
    }

    /// Frame-averaged power `sum P / sum T`.
    pub fn avg_power(&self) -> f64 {
        self.per_slot(self.total_power)
    }

    pub fn avg_coop_power(&self) -> f64 {
        self.per_slot(self.total_coop_power)
    }

    pub fn avg_q_su(&self) -> f64 {
        self.per_slot(self.q_su_slot_sum as f64)
    }

    pub fn mean_frame_len(&self) -> f64 {
        if self.frames.is_empty() {
            0.0
        } else {
            self.total_slots as f64 / self.frames.len() as f64
        }
    }

    /// Trailing moving averages over `window` frames (fewer at the start).
    pub fn moving_average(&self, window: usize) -> Vec<MovingPoint> {
        let window = window.max(1);
        let mut out = Vec::with_capacity(self.frames.len());
        let (mut slots, mut admitted, mut coop, mut power) = (0u64, 0u64, 0.0, 0.0);
        for (i, f) in self.frames.iter().enumerate() {
            slots += f.frame_len;
            admitted += f.admitted;
            coop += f.power_coop;
            power += f.power_idle + f.power_coop;
            if i >= window {
                let old = &self.frames[i - window];
                slots -= old.frame_len;
                admitted -= old.admitted;
                coop -= old.power_coop;
                power -= old.power_idle + old.power_coop;
            }
            let n = slots.max(1) as f64;
            out.push(MovingPoint {
                frame: f.frame,
                lambda_pu: f.lambda_pu,
                throughput: admitted as f64 / n,
                coop_power: (coop / n).max(0.0),
                power: (power / n).max(0.0),
            });
        }
        out
    }
}
