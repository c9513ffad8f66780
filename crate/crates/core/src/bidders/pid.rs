use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

/// PID on a traffic-indexed clock: the integral weights each error by the
/// traffic share of its step and the derivative divides by it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrafficPid {
    pub gains: PidGains,
    integral: f64,
    prev_error: f64,
}

impl TrafficPid {
    pub fn new(gains: PidGains) -> Self {
        TrafficPid {
            gains,
            integral: 0.0,
            prev_error: 0.0,
        }
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev_error = 0.0;
    }

    /// Feeds error `e` observed over a step of traffic mass `dt`.
    /// The derivative term is dropped when `dt` is zero.
    pub fn update(&mut self, e: f64, dt: f64) -> f64 {
        self.integral += e * dt;
        let derivative = if dt > 0.0 {
            (e - self.prev_error) / dt
        } else {
            0.0
        };
        self.prev_error = e;
        self.gains.kp * e + self.gains.ki * self.integral + self.gains.kd * derivative
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }
}
