//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys:
//! `omega_ratio_g` (g/ω) or `L`, `omega_atom` (Ω/ω), `n_bar`, `n0`, `k0`,
//! `alpha`, `window_halfwidth`, `schedule` (constant | rectangular |
//! sinusoidal), `phi0_over_T`, `t_max_periods`, `samples_per_period`,
//! `dt_per_period` (dt/T_B), `outputs` (comma list), `strict`.

use crate::error::{CliError, CliResult};
use rabi_bloch::model::coupling_for_extent;
use rabi_bloch::simulation::default_steps_per_period;
use rabi_bloch::{DriveSchedule, ModelParams};
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::Path;

pub const MIN_SAMPLES_PER_PERIOD: u32 = 8;
pub const MAX_PERIODS: f64 = 200.0;
/// Rectangular pulses: `T = T_B`, `T1 = 0.1 T`.
pub const PULSE_WIDTH_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Bloch extent `L`.
    Extent(f64),
    /// `g/ω`.
    Ratio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Constant,
    Rectangular,
    Sinusoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Distribution,
    Centers,
    Overlaps,
    Analytic,
}

impl Output {
    pub const ALL: [Output; 4] = [Output::Distribution, Output::Centers, Output::Overlaps, Output::Analytic];

    fn parse(s: &str) -> Option<Self> {
        match s {
            "distribution" => Some(Output::Distribution),
            "centers" => Some(Output::Centers),
            "overlaps" => Some(Output::Overlaps),
            "analytic" => Some(Output::Analytic),
            _ => None,
        }
    }
}

/// A fully resolved run description; ω = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub coupling: Coupling,
    pub omega_atom: f64,
    pub n_bar: f64,
    /// Defaults to `n_bar`.
    pub n0: Option<f64>,
    pub k0: f64,
    pub alpha: f64,
    /// Defaults to `ceil(L + 8/α)`.
    pub window_halfwidth: Option<i64>,
    pub schedule: ScheduleKind,
    pub phi0_over_t: f64,
    pub t_max_periods: f64,
    pub samples_per_period: u32,
    pub dt_per_period: Option<f64>,
    pub outputs: BTreeSet<Output>,
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            coupling: Coupling::Extent(28.89),
            omega_atom: 1.0,
            n_bar: 1.01e4,
            n0: None,
            k0: 0.0,
            alpha: 0.1,
            window_halfwidth: None,
            schedule: ScheduleKind::Constant,
            phi0_over_t: 0.0,
            t_max_periods: 12.0,
            samples_per_period: 64,
            dt_per_period: None,
            outputs: Output::ALL.into_iter().collect(),
            strict: false,
        }
    }
}

fn bad(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config {
        line,
        msg: msg.into(),
    }
}

fn number(line: usize, key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = v.parse().map_err(|_| bad(line, format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(bad(line, format!("{key}: must be finite")));
    }
    Ok(x)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses config text over the defaults.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        let mut seen_g = false;
        let mut seen_l = false;
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            let (key, value) = s
                .split_once('=')
                .ok_or_else(|| bad(line, format!("expected 'key = value', got '{s}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(bad(line, format!("duplicate key '{key}'")));
            }
            match key {
                "omega_ratio_g" => {
                    cfg.coupling = Coupling::Ratio(number(line, key, value)?);
                    seen_g = true;
                }
                "L" => {
                    cfg.coupling = Coupling::Extent(number(line, key, value)?);
                    seen_l = true;
                }
                "omega_atom" => cfg.omega_atom = number(line, key, value)?,
                "n_bar" => cfg.n_bar = number(line, key, value)?,
                "n0" => cfg.n0 = Some(number(line, key, value)?),
                "k0" => cfg.k0 = number(line, key, value)?,
                "alpha" => cfg.alpha = number(line, key, value)?,
                "window_halfwidth" => {
                    let w: i64 = value
                        .parse()
                        .map_err(|_| bad(line, format!("window_halfwidth: '{value}' is not an integer")))?;
                    cfg.window_halfwidth = Some(w);
                }
                "schedule" => {
                    cfg.schedule = match value {
                        "constant" => ScheduleKind::Constant,
                        "rectangular" => ScheduleKind::Rectangular,
                        "sinusoidal" => ScheduleKind::Sinusoidal,
                        _ => return Err(bad(line, format!("unknown schedule '{value}'"))),
                    }
                }
                "phi0_over_T" => cfg.phi0_over_t = number(line, key, value)?,
                "t_max_periods" => cfg.t_max_periods = number(line, key, value)?,
                "samples_per_period" => {
                    cfg.samples_per_period = value
                        .parse()
                        .map_err(|_| bad(line, format!("samples_per_period: '{value}' is not a count")))?;
                }
                "dt_per_period" => cfg.dt_per_period = Some(number(line, key, value)?),
                "outputs" => {
                    cfg.outputs = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| Output::parse(s).ok_or_else(|| bad(line, format!("unknown output '{s}'"))))
                        .collect::<CliResult<_>>()?;
                }
                "strict" => {
                    cfg.strict = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(bad(line, format!("strict: expected true or false, got '{value}'"))),
                    }
                }
                _ => return Err(bad(line, format!("unknown key '{key}'"))),
            }
        }
        if seen_g && seen_l {
            return Err(bad(0, "give either omega_ratio_g or L, not both"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.samples_per_period < MIN_SAMPLES_PER_PERIOD {
            return Err(bad(
                0,
                format!("samples_per_period must be at least {MIN_SAMPLES_PER_PERIOD}"),
            ));
        }
        if !(self.t_max_periods > 0.0 && self.t_max_periods <= MAX_PERIODS) {
            return Err(bad(0, format!("t_max_periods must lie in (0, {MAX_PERIODS}]")));
        }
        if let Some(dt) = self.dt_per_period {
            if !(dt > 0.0 && dt <= 1.0) {
                return Err(bad(0, "dt_per_period must lie in (0, 1]"));
            }
        }
        self.steps_per_period()?;
        self.params()?;
        Ok(())
    }

    pub fn extent(&self) -> f64 {
        match self.coupling {
            Coupling::Extent(l) => l,
            // L = -4g√n̄/ω with ω = 1
            Coupling::Ratio(g) => -4.0 * g * self.n_bar.sqrt(),
        }
    }

    pub fn coupling_g(&self) -> f64 {
        match self.coupling {
            Coupling::Extent(l) => coupling_for_extent(l, self.n_bar, 1.0),
            Coupling::Ratio(g) => g,
        }
    }

    pub fn params(&self) -> CliResult<ModelParams> {
        let mut p = ModelParams::from_extent(self.extent(), self.n_bar, self.alpha)?
            .with_omega_atom(self.omega_atom)
            .with_momentum(self.k0);
        p.g = self.coupling_g();
        if let Some(n0) = self.n0 {
            p = p.with_center(n0);
        }
        if let Some(w) = self.window_halfwidth {
            p = p.with_half_width(w)?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn drive(&self) -> DriveSchedule {
        let t_b = 2.0 * std::f64::consts::PI;
        let phase = self.phi0_over_t * t_b;
        match self.schedule {
            ScheduleKind::Constant => DriveSchedule::Constant {
                omega_atom: self.omega_atom,
            },
            ScheduleKind::Rectangular => DriveSchedule::Rectangular {
                period: t_b,
                width: PULSE_WIDTH_FRACTION * t_b,
                phase,
                amplitude: self.omega_atom,
            },
            ScheduleKind::Sinusoidal => DriveSchedule::Sinusoidal {
                phase,
                amplitude: self.omega_atom,
            },
        }
    }

    /// Sample count after t = 0.
    pub fn sample_count(&self) -> u64 {
        (self.t_max_periods * f64::from(self.samples_per_period)).round() as u64
    }

    /// Sample times `k T_B / S`.
    pub fn times(&self) -> Vec<f64> {
        let t_b = 2.0 * std::f64::consts::PI;
        let s = f64::from(self.samples_per_period);
        (0..=self.sample_count()).map(|k| k as f64 * t_b / s).collect()
    }

    /// Propagation steps per Bloch period; an explicit `dt_per_period` must
    /// divide the sampling interval.
    pub fn steps_per_period(&self) -> CliResult<u64> {
        let Some(dt) = self.dt_per_period else {
            return Ok(default_steps_per_period(self.samples_per_period));
        };
        let steps = (1.0 / dt).round();
        if (steps * dt - 1.0).abs() > 1e-9 {
            return Err(bad(0, format!("dt_per_period = {dt} is not 1/integer")));
        }
        let steps = steps as u64;
        if steps % u64::from(self.samples_per_period) != 0 {
            return Err(bad(
                0,
                format!(
                    "1/dt_per_period = {steps} is not a multiple of samples_per_period = {}",
                    self.samples_per_period
                ),
            ));
        }
        Ok(steps)
    }

    pub fn dt(&self) -> CliResult<f64> {
        Ok(2.0 * std::f64::consts::PI / self.steps_per_period()? as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let c = RunConfig::parse("").unwrap();
        let p = c.params().unwrap();
        assert!((p.bloch_extent() - 28.89).abs() < 1e-12);
        assert_eq!(p.n0, 1.01e4);
        assert_eq!(c.steps_per_period().unwrap(), 4032);
    }

    #[test]
    fn parses_all_keys() {
        let text = "\
# comment
L = 24.31 # trailing comment
omega_atom = 0.5
n_bar = 10000
n0 = 10002
k0 = 0.1
alpha = 0.2
window_halfwidth = 90
schedule = sinusoidal
phi0_over_T = 0.25
t_max_periods = 3
samples_per_period = 10
dt_per_period = 0.0002
outputs = centers, overlaps
strict = true
";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.coupling, Coupling::Extent(24.31));
        assert_eq!(c.schedule, ScheduleKind::Sinusoidal);
        assert_eq!(c.outputs.len(), 2);
        assert!(c.strict);
        assert_eq!(c.steps_per_period().unwrap(), 5000);
        assert_eq!(c.times().len(), 31);
        let p = c.params().unwrap();
        assert_eq!(p.window.len(), 181);
        assert_eq!(p.n0, 10002.0);
        match c.drive() {
            DriveSchedule::Sinusoidal { phase, amplitude } => {
                assert!((phase - 0.5 * std::f64::consts::PI).abs() < 1e-12);
                assert_eq!(amplitude, 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coupling_ratio_maps_to_extent() {
        let c = RunConfig::parse("omega_ratio_g = -0.0725\nn_bar = 10000").unwrap();
        assert!((c.extent() - 29.0).abs() < 1e-12);
        assert_eq!(c.params().unwrap().g, -0.0725);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "L = 1\nomega_ratio_g = 0.1",
            "samples_per_period = 4",
            "t_max_periods = 500",
            "schedule = square",
            "bogus = 1",
            "L = abc",
            "L 12",
            "L = 1\nL = 2",
            "outputs = distribution, movie",
            "strict = yes",
            "alpha = -1",
            "samples_per_period = 64\ndt_per_period = 0.0003",
        ] {
            assert!(RunConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        match RunConfig::parse("L = 1\n\nfoo = 2") {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
