//! Two-sector runs from the standard initial state.

use crate::error::{Error, Result};
use crate::model::{
    build_effective_chain, build_sector_chain, initial_superposition, validity_report, ChainKind, ModelParams,
    ParitySector, SectorState, ValidityReport,
};
use crate::observables::{
    conservation_monitor, photon_distribution, sector_overlap_probabilities, ConservationRecord, DistributionFrame,
};
use crate::propagate::{eigendecompose, evolve_schedule, SectorChain};
use crate::schedules::DriveSchedule;

/// Default number of propagation steps per Bloch period.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 4000;

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub params: ModelParams,
    pub kind: ChainKind,
    pub schedule: DriveSchedule,
    /// Sample times, strictly increasing multiples of `dt`.
    pub times: Vec<f64>,
    pub dt: f64,
}

/// Observables at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub frame: DistributionFrame,
    pub p_a: f64,
    pub p_b: f64,
    pub conservation: ConservationRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub samples: Vec<Sample>,
    pub validity: ValidityReport,
    pub initial: SectorState,
    pub final_state: SectorState,
}

/// `k T_B / samples_per_period` for `k = 0..=periods·samples_per_period`.
pub fn uniform_times(bloch_period: f64, periods: u32, samples_per_period: u32) -> Vec<f64> {
    let n = periods as u64 * samples_per_period as u64;
    (0..=n)
        .map(|k| k as f64 * bloch_period / samples_per_period as f64)
        .collect()
}

/// Steps per period: the smallest multiple of `samples_per_period` that
/// reaches `DEFAULT_STEPS_PER_PERIOD`, made even so the sinusoid (period
/// T_B/2) spans a whole number of steps.
pub fn default_steps_per_period(samples_per_period: u32) -> u64 {
    let s = samples_per_period.max(1) as u64;
    let mut m = s * (DEFAULT_STEPS_PER_PERIOD as u64).div_ceil(s);
    if m % 2 == 1 {
        m *= 2;
    }
    m
}

pub fn run(spec: &RunSpec) -> Result<RunRecord> {
    spec.params.validate()?;
    if spec.times.is_empty() {
        return Err(Error::TimeGrid("no sample times".into()));
    }
    let params = &spec.params;
    let t_b = params.bloch_period();
    let initial = initial_superposition(params)?;
    let h0 = eigendecompose(&build_effective_chain(params, false)?)?;

    let mut trajectories = Vec::with_capacity(2);
    for sector in ParitySector::BOTH {
        let chain = SectorChain::new(spec.kind, sector);
        let traj = evolve_schedule(initial.get(sector), params, chain, &spec.schedule, &spec.times, spec.dt)?;
        trajectories.push(traj);
    }
    let [even, odd] = <[_; 2]>::try_from(trajectories).expect("two sectors");

    let mut samples = Vec::with_capacity(spec.times.len());
    let mut last = None;
    for ((t, e), o) in even.times.iter().zip(even.states).zip(odd.states) {
        let state = SectorState {
            even: e,
            odd: o,
            weights: initial.weights,
        };
        let frame = photon_distribution(&state, *t)?;
        let (p_a, p_b) = sector_overlap_probabilities(&initial, &h0, &state, *t, t_b)?;
        let at = params.with_omega_atom(spec.schedule.omega_at(*t));
        let conservation = conservation_monitor(
            &state,
            &build_sector_chain(&at, spec.kind, ParitySector::Even)?,
            &build_sector_chain(&at, spec.kind, ParitySector::Odd)?,
        )?;
        samples.push(Sample {
            t: *t,
            frame,
            p_a,
            p_b,
            conservation,
        });
        last = Some(state);
    }
    Ok(RunRecord {
        samples,
        validity: validity_report(params)?,
        initial,
        final_state: last.expect("non-empty grid"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_per_period() {
        assert_eq!(default_steps_per_period(64), 4032);
        assert_eq!(default_steps_per_period(100), 4000);
        assert_eq!(default_steps_per_period(3), 4002);
        assert_eq!(default_steps_per_period(4000) % 2, 0);
    }

    #[test]
    fn times_sit_on_the_mesh() {
        let t_b = 2.0 * std::f64::consts::PI;
        let times = uniform_times(t_b, 3, 10);
        assert_eq!(times.len(), 31);
        assert!((times[30] - 3.0 * t_b).abs() < 1e-12);
    }

    #[test]
    fn short_constant_run() {
        let params = ModelParams::from_extent(28.89, 1e4, 0.1).unwrap();
        let t_b = params.bloch_period();
        let spec = RunSpec {
            params,
            kind: ChainKind::Effective,
            schedule: DriveSchedule::Constant { omega_atom: 0.0 },
            times: uniform_times(t_b, 1, 4),
            dt: t_b / 4000.0,
        };
        let rec = run(&spec).unwrap();
        assert_eq!(rec.samples.len(), 5);
        for s in &rec.samples {
            assert!((s.conservation.norm - 1.0).abs() < 1e-12);
            assert!(s.p_a + s.p_b <= 1.0 + 1e-12);
        }
        // with Ω = 0 the whole packet sits near n0 - L after half a period
        let mid = &rec.samples[2];
        assert!((mid.frame.center - (1e4 - 28.89)).abs() < 1.0, "{}", mid.frame.center);
        assert!(rec.validity.window_guard_ok);
    }
}
