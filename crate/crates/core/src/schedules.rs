//! Atomic frequency drives Ω(t). Times are in 1/ω with ω = 1.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DriveSchedule {
    Constant {
        omega_atom: f64,
    },
    /// Pulses of height `amplitude` and width `width` centered at
    /// `|t - phase| = nT/2`, `n = 1, 2, ...`.
    Rectangular {
        period: f64,
        width: f64,
        phase: f64,
        amplitude: f64,
    },
    /// `amplitude · (1 + cos 2(t + phase)) / 2`.
    Sinusoidal {
        phase: f64,
        amplitude: f64,
    },
}

impl DriveSchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        match *self {
            DriveSchedule::Constant { omega_atom } if !omega_atom.is_finite() => bad("omega_atom", "not finite"),
            DriveSchedule::Rectangular {
                period,
                width,
                phase,
                amplitude,
            } => {
                if !(period > 0.0 && period.is_finite()) {
                    return bad("period", "must be positive");
                }
                if !(width > 0.0 && width < period) {
                    return bad("width", "need 0 < T1 < T");
                }
                if !phase.is_finite() {
                    return bad("phase", "not finite");
                }
                if !(amplitude >= 0.0 && amplitude.is_finite()) {
                    return bad("amplitude", "must be non-negative");
                }
                Ok(())
            }
            DriveSchedule::Sinusoidal { phase, amplitude } => {
                if !phase.is_finite() {
                    return bad("phase", "not finite");
                }
                if !(amplitude >= 0.0 && amplitude.is_finite()) {
                    return bad("amplitude", "must be non-negative");
                }
                Ok(())
            }
            DriveSchedule::Constant { .. } => Ok(()),
        }
    }

    /// Ω(t).
    pub fn omega_at(&self, t: f64) -> f64 {
        match *self {
            DriveSchedule::Constant { omega_atom } => omega_atom,
            DriveSchedule::Rectangular {
                period,
                width,
                phase,
                amplitude,
            } => {
                let x = (t - phase).abs();
                // n with |x - nT/2| ≤ T1/2 lies in [(2x - T1)/T, (2x + T1)/T]
                let first = (((2.0 * x - width) / period).floor() as i64).max(1);
                let on = (first..=first + 2).any(|n| {
                    let n = n as f64;
                    0.5 * (n * period - width) < x && x <= 0.5 * (n * period + width)
                });
                if on {
                    amplitude
                } else {
                    0.0
                }
            }
            DriveSchedule::Sinusoidal { phase, amplitude } => 0.5 * amplitude * (1.0 + (2.0 * (t + phase)).cos()),
        }
    }

    /// Period over which the midpoint samples of a smooth drive repeat; only
    /// the sinusoid qualifies (the rectangular pattern skips `n = 0`).
    pub fn smooth_period(&self) -> Option<f64> {
        match self {
            DriveSchedule::Sinusoidal { .. } => Some(PI),
            _ => None,
        }
    }

    pub fn is_rectangular(&self) -> bool {
        matches!(self, DriveSchedule::Rectangular { .. })
    }

    /// Short human-readable label, used in output metadata.
    pub fn label(&self) -> String {
        match *self {
            DriveSchedule::Constant { omega_atom } => format!("constant(Ω={omega_atom})"),
            DriveSchedule::Rectangular {
                period,
                width,
                phase,
                amplitude,
            } => format!("rectangular(T={period}, T1={width}, φ0={phase}, A={amplitude})"),
            DriveSchedule::Sinusoidal { phase, amplitude } => format!("sinusoidal(φ0={phase}, A={amplitude})"),
        }
    }
}

/// On/off switching times of a rectangular drive inside `[0, t_max]`, sorted.
pub fn segment_boundaries(schedule: &DriveSchedule, t_max: f64) -> Result<Vec<f64>> {
    let DriveSchedule::Rectangular {
        period,
        width,
        phase,
        ..
    } = *schedule
    else {
        return Err(Error::ScheduleVariant {
            expected: "rectangular",
        });
    };
    let reach = (t_max - phase).abs().max(phase.abs()) + period;
    let n_max = (2.0 * reach / period).ceil() as i64 + 1;
    let mut candidates = Vec::new();
    for n in 1..=n_max {
        let n = n as f64;
        for edge in [0.5 * (n * period - width), 0.5 * (n * period + width)] {
            for t in [phase + edge, phase - edge] {
                if (0.0..=t_max).contains(&t) {
                    candidates.push(t);
                }
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * period);

    // Drop interior points of overlapping pulses: Ω must actually switch.
    let eps = 1e-9 * period.min(width);
    Ok(candidates
        .into_iter()
        .filter(|&b| schedule.omega_at(b - eps) != schedule.omega_at(b + eps))
        .collect())
}
