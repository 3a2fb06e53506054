//! Named parameter sets for the figure runs.

use crate::config::{Coupling, RunConfig, ScheduleKind};
use crate::error::{CliError, CliResult};

pub const PRESET_NAMES: [&str; 10] = [
    "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig5d",
];

/// Extents of the four constant-Ω runs: two near J0 zeros, two near its
/// stationary points.
pub const FIG4_EXTENTS: [f64; 4] = [24.31, 25.73, 27.50, 28.89];

/// Points marked on the J0 plot.
pub const FIG3_POINTS: [(&str, f64); 4] = [("a", 24.31), ("b", 25.73), ("c", 27.50), ("d", 28.89)];

const FIG_N: f64 = 1.01e4;
const FIG_ALPHA: f64 = 0.1;
const FIG_L: f64 = 28.89;

pub const FIG5_SIGN_NOTE: &str = "the drive figures quote 4g√n̄/ω = 28.89 while L = -4g√n̄/ω with g < 0 \
     elsewhere; this run uses L = +28.89, the same packet motion as the constant-Ω figures";
pub const FIG5_PHASE_NOTE: &str = "φ0 is used exactly as in Ω(t) as written: φ0 = 0 puts pulses (or \
     sinusoid maxima) at t = kT_B/2, where the two packets are farthest apart; they meet at \
     t = T_B/4 + kT_B/2";
pub const ANALYTIC_DRIVE_NOTE: &str = "analytic series assume constant Ω = omega_atom";

pub enum Preset {
    Run { config: RunConfig, notes: Vec<String> },
    /// Tabulated J0 with the marked points.
    BesselTable,
}

fn figure_config(l: f64, periods: f64) -> RunConfig {
    RunConfig {
        coupling: Coupling::Extent(l),
        omega_atom: 1.0,
        n_bar: FIG_N,
        n0: Some(FIG_N),
        k0: 0.0,
        alpha: FIG_ALPHA,
        t_max_periods: periods,
        ..RunConfig::default()
    }
}

pub fn preset(name: &str) -> CliResult<Preset> {
    let run = |config, notes: Vec<String>| Ok(Preset::Run { config, notes });
    match name {
        "fig2" => run(figure_config(FIG_L, 12.0), vec![]),
        "fig3" => Ok(Preset::BesselTable),
        "fig4a" | "fig4b" | "fig4c" | "fig4d" => {
            let i = (name.as_bytes()[4] - b'a') as usize;
            run(figure_config(FIG4_EXTENTS[i], 12.0), vec![])
        }
        "fig5a" | "fig5b" | "fig5c" | "fig5d" => {
            let (schedule, phi0) = match name {
                "fig5a" => (ScheduleKind::Rectangular, 0.0),
                "fig5b" => (ScheduleKind::Rectangular, 0.25),
                "fig5c" => (ScheduleKind::Sinusoidal, 0.0),
                _ => (ScheduleKind::Sinusoidal, 0.25),
            };
            let config = RunConfig {
                schedule,
                phi0_over_t: phi0,
                ..figure_config(FIG_L, 20.0)
            };
            run(
                config,
                vec![
                    FIG5_SIGN_NOTE.to_string(),
                    FIG5_PHASE_NOTE.to_string(),
                    ANALYTIC_DRIVE_NOTE.to_string(),
                ],
            )
        }
        _ => Err(CliError::UnknownPreset(name.to_string())),
    }
}
