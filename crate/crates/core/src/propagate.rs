//! Exact-diagonalization propagation on tridiagonal chains.
//!
//! A [`Spectrum`] is computed once per Hamiltonian and then propagates any
//! state to any time at O(N²) cost. Time-dependent drives are handled
//! piecewise-constant: rectangular pulses segment by segment, smooth drives
//! with a midpoint-sampled uniform mesh.

use crate::error::{Error, Result};
use crate::model::{build_sector_chain, ChainHamiltonian, ChainKind, ModelParams, ParitySector, Window};
use crate::schedules::{segment_boundaries, DriveSchedule};
use num_complex::Complex64;
use std::collections::HashMap;

/// Complex amplitudes over a photon-number window.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    offset: i64,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes; no normalization is applied.
    pub fn new(offset: i64, amplitudes: Vec<Complex64>) -> Self {
        StateVector { offset, amplitudes }
    }

    /// Photon number of entry 0.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn window(&self) -> Result<Window> {
        Window::new(self.offset, self.offset + self.len() as i64 - 1)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|ψ_n|²` per site.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn check_window(&self, offset: i64, len: usize) -> Result<()> {
        if self.offset != offset || self.len() != len {
            return Err(Error::Shape {
                expected_offset: offset,
                expected_len: len,
                offset: self.offset,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        other.check_window(self.offset, self.len())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        other.check_window(self.offset, self.len())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    offset: i64,
    eigenvalues: Vec<f64>,
    // column-major, column j is the eigenvector of eigenvalue j
    vectors: Vec<f64>,
}

impl Spectrum {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        let n = self.size();
        &self.vectors[j * n..(j + 1) * n]
    }

    /// Eigenvector `j` as a state on the chain window.
    pub fn eigenstate(&self, j: usize) -> StateVector {
        StateVector::new(
            self.offset,
            self.eigenvector(j).iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// `amps ← V e^{-iEt} Vᵀ amps`.
    pub(crate) fn propagate_in_place(&self, amps: &mut [Complex64], t: f64, coeffs: &mut Vec<Complex64>) {
        let n = self.size();
        coeffs.clear();
        coeffs.extend(self.vectors.chunks_exact(n).zip(&self.eigenvalues).map(|(col, &e)| {
            let (mut re, mut im) = (0.0, 0.0);
            for (v, a) in col.iter().zip(amps.iter()) {
                re += v * a.re;
                im += v * a.im;
            }
            Complex64::new(re, im) * Complex64::from_polar(1.0, -e * t)
        }));
        amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for (col, c) in self.vectors.chunks_exact(n).zip(coeffs.iter()) {
            for (a, v) in amps.iter_mut().zip(col) {
                a.re += v * c.re;
                a.im += v * c.im;
            }
        }
    }
}

const MAX_QL_SWEEPS: usize = 64;

/// Full spectrum of a symmetric tridiagonal chain by implicit-shift QL.
///
/// Each eigenvector is signed so that its largest-magnitude component is
/// positive, which makes the output a deterministic function of the input.
pub fn eigendecompose(h: &ChainHamiltonian) -> Result<Spectrum> {
    let n = h.size();
    if h.hopping.len() + 1 != n {
        return Err(Error::InvalidParameter {
            name: "hopping",
            reason: format!("expected {} entries, got {}", n.saturating_sub(1), h.hopping.len()),
        });
    }
    let mut d = h.onsite.clone();
    let mut e = h.hopping.clone();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: sweeps - 1,
                    residual: e[l].abs(),
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (left, right) = z.split_at_mut((i + 1) * n);
                let col_i = &mut left[i * n..];
                let col_next = &mut right[..n];
                for (zi, zn) in col_i.iter_mut().zip(col_next.iter_mut()) {
                    let f = *zn;
                    *zn = s * *zi + c * f;
                    *zi = c * *zi - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues = order.iter().map(|&j| d[j]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &j in &order {
        let col = &z[j * n..(j + 1) * n];
        let mut pivot = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        vectors.extend(col.iter().map(|v| sign * v));
    }
    Ok(Spectrum {
        offset: h.offset,
        eigenvalues,
        vectors,
    })
}

/// `e^{-iHt} state` for the Hamiltonian whose spectrum is `spec`.
pub fn evolve_const(state: &StateVector, spec: &Spectrum, t: f64) -> Result<StateVector> {
    state.check_window(spec.offset, spec.size())?;
    let mut out = state.clone();
    let mut coeffs = Vec::with_capacity(spec.size());
    spec.propagate_in_place(&mut out.amplitudes, t, &mut coeffs);
    Ok(out)
}

/// States sampled along a propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub schedule: DriveSchedule,
}

/// One sector's chain family, rebuilt for each value of Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorChain {
    pub kind: ChainKind,
    pub sector: ParitySector,
}

impl SectorChain {
    pub fn new(kind: ChainKind, sector: ParitySector) -> Self {
        SectorChain { kind, sector }
    }

    pub fn build(&self, params: &ModelParams, omega_atom: f64) -> Result<ChainHamiltonian> {
        build_sector_chain(&params.with_omega_atom(omega_atom), self.kind, self.sector)
    }
}

/// Smooth drives need at least this many steps per Bloch period.
pub const MIN_STEPS_PER_PERIOD: f64 = 2000.0;
/// Memory budget for cached spectra of a single propagation.
const SPECTRUM_CACHE_BYTES: usize = 1 << 30;
/// Resolution of Ω in the spectrum cache, 2^-40 ≈ 9e-13.
const OMEGA_QUANTUM: f64 = 1.0 / (1u64 << 40) as f64;

struct SpectrumCache<'a> {
    params: &'a ModelParams,
    chain: SectorChain,
    entries: HashMap<i64, Spectrum>,
    capacity: usize,
}

impl<'a> SpectrumCache<'a> {
    fn new(params: &'a ModelParams, chain: SectorChain) -> Self {
        let n = params.window.len();
        SpectrumCache {
            params,
            chain,
            entries: HashMap::new(),
            capacity: (SPECTRUM_CACHE_BYTES / (8 * n * (n + 1))).max(2),
        }
    }

    /// Ω is rounded to a multiple of `OMEGA_QUANTUM` so that midpoint values
    /// that agree up to rounding (a smooth drive is symmetric about each
    /// extremum) share one spectrum.
    fn with<R>(&mut self, omega_atom: f64, f: impl FnOnce(&Spectrum) -> R) -> Result<R> {
        let key = (omega_atom / OMEGA_QUANTUM).round() as i64;
        if let Some(spec) = self.entries.get(&key) {
            return Ok(f(spec));
        }
        let spec = eigendecompose(&self.chain.build(self.params, key as f64 * OMEGA_QUANTUM)?)?;
        let out = f(&spec);
        if self.entries.len() < self.capacity {
            self.entries.insert(key, spec);
        }
        Ok(out)
    }
}

/// Converts grid times to step counts, checking they sit on the mesh.
fn grid_steps(t_grid: &[f64], dt: f64) -> Result<Vec<u64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::TimeGrid(format!("dt = {dt} must be positive")));
    }
    let mut steps = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::TimeGrid(format!("time {t} must be finite and non-negative")));
        }
        let k = (t / dt).round();
        if (t - k * dt).abs() > 1e-6 * dt {
            return Err(Error::TimeGrid(format!("time {t} is not a multiple of dt = {dt}")));
        }
        let k = k as u64;
        if let Some(&prev) = steps.last() {
            if k <= prev {
                return Err(Error::TimeGrid("times must be strictly increasing".into()));
            }
        }
        steps.push(k);
    }
    Ok(steps)
}

/// Propagates `state` under `schedule` and records it at each `t_grid` time.
///
/// Constant drives are propagated exactly from t = 0, rectangular drives
/// segment by segment with pulse edges snapped to the `dt` mesh, and smooth
/// drives with the midpoint stepper of [`evolve_midpoint`].
pub fn evolve_schedule(
    state: &StateVector,
    params: &ModelParams,
    chain: SectorChain,
    schedule: &DriveSchedule,
    t_grid: &[f64],
    dt: f64,
) -> Result<Trajectory> {
    schedule.validate()?;
    let steps = grid_steps(t_grid, dt)?;
    state.check_window(params.window.lo(), params.window.len())?;
    match *schedule {
        DriveSchedule::Constant { omega_atom } => {
            let spec = eigendecompose(&chain.build(params, omega_atom)?)?;
            let states = steps
                .iter()
                .map(|&k| evolve_const(state, &spec, k as f64 * dt))
                .collect::<Result<_>>()?;
            Ok(Trajectory {
                times: steps.iter().map(|&k| k as f64 * dt).collect(),
                states,
                schedule: *schedule,
            })
        }
        DriveSchedule::Rectangular { .. } => evolve_segments(state, params, chain, schedule, &steps, dt),
        DriveSchedule::Sinusoidal { .. } => evolve_midpoint(state, params, chain, schedule, t_grid, dt),
    }
}

fn evolve_segments(
    state: &StateVector,
    params: &ModelParams,
    chain: SectorChain,
    schedule: &DriveSchedule,
    steps: &[u64],
    dt: f64,
) -> Result<Trajectory> {
    let last = steps.last().copied().unwrap_or(0);
    let mut events: Vec<u64> = segment_boundaries(schedule, last as f64 * dt)?
        .into_iter()
        .map(|b| (b / dt).round() as u64)
        .filter(|&k| k > 0 && k < last)
        .chain(steps.iter().copied())
        .collect();
    events.sort_unstable();
    events.dedup();

    let mut cache = SpectrumCache::new(params, chain);
    let mut amps = state.amplitudes.clone();
    let mut coeffs = Vec::with_capacity(amps.len());
    let mut states = Vec::with_capacity(steps.len());
    let mut wanted = steps.iter().peekable();
    let mut at = 0u64;
    if wanted.peek() == Some(&&0) {
        states.push(state.clone());
        wanted.next();
    }
    for &next in &events {
        if next == at {
            continue;
        }
        let omega = schedule.omega_at((at as f64 + 0.5) * dt);
        let span = (next - at) as f64 * dt;
        cache.with(omega, |spec| spec.propagate_in_place(&mut amps, span, &mut coeffs))?;
        at = next;
        if wanted.peek() == Some(&&at) {
            states.push(StateVector::new(state.offset, amps.clone()));
            wanted.next();
        }
    }
    Ok(Trajectory {
        times: steps.iter().map(|&k| k as f64 * dt).collect(),
        states,
        schedule: *schedule,
    })
}

/// Uniform-mesh stepper: each step of length `dt` applies the exact
/// propagator of the chain with Ω sampled at the step midpoint.
///
/// Works for every schedule; [`evolve_schedule`] uses it for smooth drives.
/// Smooth drives require `dt ≤ T_B / 2000`.
pub fn evolve_midpoint(
    state: &StateVector,
    params: &ModelParams,
    chain: SectorChain,
    schedule: &DriveSchedule,
    t_grid: &[f64],
    dt: f64,
) -> Result<Trajectory> {
    schedule.validate()?;
    let steps = grid_steps(t_grid, dt)?;
    state.check_window(params.window.lo(), params.window.len())?;
    if schedule.smooth_period().is_some() {
        let bound = params.bloch_period() / MIN_STEPS_PER_PERIOD;
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::Accuracy { dt, bound });
        }
    }

    // When the drive period is a whole number of steps, fold the step index
    // so equal midpoint values share one cached spectrum.
    let fold = schedule.smooth_period().and_then(|period| {
        let per = period / dt;
        let whole = per.round();
        ((per - whole).abs() < 1e-9 * per && whole >= 1.0).then_some(whole as u64)
    });
    let omega_for_step = |k: u64| {
        let k = fold.map_or(k, |p| k % p);
        schedule.omega_at((k as f64 + 0.5) * dt)
    };

    let mut cache = SpectrumCache::new(params, chain);
    let mut amps = state.amplitudes.clone();
    let mut coeffs = Vec::with_capacity(amps.len());
    let mut states = Vec::with_capacity(steps.len());
    let mut k = 0u64;
    for &target in &steps {
        while k < target {
            cache.with(omega_for_step(k), |spec| spec.propagate_in_place(&mut amps, dt, &mut coeffs))?;
            k += 1;
        }
        states.push(StateVector::new(state.offset, amps.clone()));
    }
    Ok(Trajectory {
        times: steps.iter().map(|&k| k as f64 * dt).collect(),
        states,
        schedule: *schedule,
    })
}

/// `‖ψ_dt(t_end) - ψ_{dt/2}(t_end)‖` for the midpoint stepper.
pub fn self_convergence(
    state: &StateVector,
    params: &ModelParams,
    chain: SectorChain,
    schedule: &DriveSchedule,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    let coarse = evolve_midpoint(state, params, chain, schedule, &[t_end], dt)?;
    let fine = evolve_midpoint(state, params, chain, schedule, &[t_end], 0.5 * dt)?;
    coarse.states[0].distance(&fine.states[0])
}
