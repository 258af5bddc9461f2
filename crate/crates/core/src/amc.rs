//! Adaptive modulation controller: per-packet BER feedback selects the
//! modulation scheme, with a hysteresis band between the two thresholds.

use crate::modem::Scheme;
use crate::{Error, Result};

/// Scheme ladder and switching thresholds.
#[derive(Debug, Clone)]
pub struct AmcPolicy {
    /// Ordered low-to-high modulation ladder.
    pub ladder: Vec<Scheme>,
    /// Measured BER below this steps one rung up.
    pub up_threshold: f64,
    /// Measured BER above this steps one rung down.
    pub down_threshold: f64,
    /// Scheme used before any feedback arrives.
    pub initial: Scheme,
}

impl AmcPolicy {
    /// QPSK/16-QAM ladder starting at 16-QAM, up at 1e-2, down at 5e-2.
    pub fn default_policy() -> Self {
        Self {
            ladder: vec![Scheme::Qpsk, Scheme::Qam16],
            up_threshold: 1e-2,
            down_threshold: 5e-2,
            initial: Scheme::Qam16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() {
            return Err(Error::Config("AMC ladder is empty".into()));
        }
        if !(self.up_threshold > 0.0 && self.up_threshold < 1.0)
            || !(self.down_threshold > 0.0 && self.down_threshold < 1.0)
        {
            return Err(Error::Config("AMC thresholds must be in (0,1)".into()));
        }
        if self.up_threshold >= self.down_threshold {
            return Err(Error::Config(
                "AMC up threshold must be below the down threshold".into(),
            ));
        }
        Ok(())
    }
}

/// Current scheme plus the measurement that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmcState {
    pub current: Scheme,
    pub last_measured_ber: f64,
}

/// Starting state: the policy's initial scheme, clamped onto the ladder
/// (highest rung not above it, else the lowest rung).
pub fn initial_state(policy: &AmcPolicy) -> AmcState {
    let current = if policy.ladder.contains(&policy.initial) {
        policy.initial
    } else {
        policy
            .ladder
            .iter()
            .copied()
            .filter(|s| *s <= policy.initial)
            .max()
            .unwrap_or(policy.ladder[0])
    };
    AmcState {
        current,
        last_measured_ber: 0.0,
    }
}

/// Single-rung move per measurement: up when clearly good, down when
/// clearly bad, hold inside the hysteresis band.
pub fn update(state: &AmcState, measured_ber: f64, policy: &AmcPolicy) -> AmcState {
    let idx = policy
        .ladder
        .iter()
        .position(|s| *s == state.current)
        .unwrap_or(0);
    let next = if measured_ber < policy.up_threshold && idx + 1 < policy.ladder.len() {
        policy.ladder[idx + 1]
    } else if measured_ber > policy.down_threshold && idx > 0 {
        policy.ladder[idx - 1]
    } else {
        state.current
    };
    AmcState {
        current: next,
        last_measured_ber: measured_ber,
    }
}
