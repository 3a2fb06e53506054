//! Run parameters, the two parity-sector chains of the Rabi Hamiltonian, the
//! uniform-hopping effective chain, and the atom⊗photon ↔ sector mapping.
//!
//! Units: ω is the energy unit (normally 1), times are in 1/ω. Every chain is
//! shifted by `n̄ω` so the onsite energies near the packet stay O(L).

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::propagate::StateVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Guard added to `L` (in units of 1/α) when sizing the default window.
pub const WINDOW_GUARD_WIDTHS: f64 = 8.0;
/// Relative deviation of √i from √n̄ above which the uniform-hopping
/// truncation is flagged.
pub const SQRT_DEVIATION_LIMIT: f64 = 0.05;

/// Inclusive photon-number window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo < 0 {
            return Err(Error::InvalidWindow {
                lo,
                hi,
                reason: "negative photon numbers",
            });
        }
        if hi <= lo {
            return Err(Error::InvalidWindow {
                lo,
                hi,
                reason: "need lo < hi",
            });
        }
        Ok(Window { lo, hi })
    }

    /// `[c - w, c + w]` around the nearest integer to `center`, clamped at 0.
    pub fn centered(center: f64, half_width: i64) -> Result<Self> {
        let c = center.round() as i64;
        Window::new((c - half_width).max(0), c + half_width)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    pub fn photon_numbers(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// Parity of the excitation number `a†a + (σ_x + 1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySector {
    Even,
    Odd,
}

impl ParitySector {
    pub const BOTH: [ParitySector; 2] = [ParitySector::Even, ParitySector::Odd];

    /// 1 for the even sector, 0 for the odd one.
    pub fn gamma(self) -> i64 {
        match self {
            ParitySector::Even => 1,
            ParitySector::Odd => 0,
        }
    }

    /// `(-1)^{γ_λ + n}`, the sign of the staggered atomic term at photon number `n`.
    pub fn stagger_sign(self, n: i64) -> f64 {
        if (self.gamma() + n) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Which chain approximates the Rabi dynamics in a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    /// Exact `g√(i+1)` hopping.
    Equivalent,
    /// Uniform `g√n̄` hopping.
    Effective,
}

/// Physical parameters of a run plus its truncation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Field frequency; 1 in the internal units.
    pub omega: f64,
    /// Atom-field coupling, signed (negative for the figures' positive L).
    pub g: f64,
    /// Atomic frequency Ω for a constant segment.
    pub omega_atom: f64,
    pub n_bar: f64,
    /// Initial packet center.
    pub n0: f64,
    /// Initial packet momentum, in [-π, π).
    pub k0: f64,
    /// Gaussian width parameter; the amplitude envelope has FWHM 2√(2 ln 2)/α.
    pub alpha: f64,
    pub window: Window,
}

impl ModelParams {
    /// Parameters with Bloch extent `l` (so `g = -ωL/(4√n̄)`), ω = Ω = 1,
    /// a `k0 = 0` packet at `n̄` and the default window.
    pub fn from_extent(l: f64, n_bar: f64, alpha: f64) -> Result<Self> {
        let omega = 1.0;
        if !(n_bar >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "n_bar",
                reason: format!("{n_bar} < 1"),
            });
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("{alpha} must be positive"),
            });
        }
        let window = Window::centered(n_bar, default_half_width(l, alpha))?;
        let params = ModelParams {
            omega,
            g: coupling_for_extent(l, n_bar, omega),
            omega_atom: omega,
            n_bar,
            n0: n_bar,
            k0: 0.0,
            alpha,
            window,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_omega_atom(mut self, omega_atom: f64) -> Self {
        self.omega_atom = omega_atom;
        self
    }

    pub fn with_center(mut self, n0: f64) -> Self {
        self.n0 = n0;
        self
    }

    pub fn with_momentum(mut self, k0: f64) -> Self {
        self.k0 = k0;
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    /// Re-centers the window on `n̄` with the given half-width.
    pub fn with_half_width(mut self, half_width: i64) -> Result<Self> {
        self.window = Window::centered(self.n_bar, half_width)?;
        Ok(self)
    }

    /// Bloch extent `L = -4g√n̄/ω`.
    pub fn bloch_extent(&self) -> f64 {
        -4.0 * self.g * self.n_bar.sqrt() / self.omega
    }

    /// `T_B = 2π/ω`.
    pub fn bloch_period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Constant removed from every onsite energy.
    pub fn energy_shift(&self) -> f64 {
        self.n_bar * self.omega
    }

    /// Hard invariants; the soft window guard lives in [`validity_report`].
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega", self.omega),
            ("g", self.g),
            ("omega_atom", self.omega_atom),
            ("n_bar", self.n_bar),
            ("n0", self.n0),
            ("k0", self.k0),
            ("alpha", self.alpha),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must be positive".into(),
            });
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must be positive".into(),
            });
        }
        if self.n_bar < 1.0 {
            return Err(Error::InvalidParameter {
                name: "n_bar",
                reason: format!("{} < 1", self.n_bar),
            });
        }
        if !(-PI..PI).contains(&self.k0) {
            return Err(Error::InvalidParameter {
                name: "k0",
                reason: format!("{} outside [-π, π)", self.k0),
            });
        }
        if self.n0 < self.window.lo as f64 || self.n0 > self.window.hi as f64 {
            return Err(Error::InvalidParameter {
                name: "n0",
                reason: format!(
                    "packet center {} outside window [{}, {}]",
                    self.n0, self.window.lo, self.window.hi
                ),
            });
        }
        if !self.bloch_extent().is_finite() {
            return Err(Error::InvalidParameter {
                name: "g",
                reason: "Bloch extent is not finite".into(),
            });
        }
        Ok(())
    }
}

/// `g = -ωL / (4√n̄)`.
pub fn coupling_for_extent(l: f64, n_bar: f64, omega: f64) -> f64 {
    -omega * l / (4.0 * n_bar.sqrt())
}

/// `ceil(L + 8/α)`.
pub fn default_half_width(l: f64, alpha: f64) -> i64 {
    (l.abs() + WINDOW_GUARD_WIDTHS / alpha).ceil() as i64
}

/// Real symmetric tridiagonal operator over a photon-number window.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHamiltonian {
    /// Onsite energies, already shifted by `energy_shift`.
    pub onsite: Vec<f64>,
    /// `hopping[i]` couples sites `i` and `i + 1`.
    pub hopping: Vec<f64>,
    /// Photon number of site 0.
    pub offset: i64,
    pub energy_shift: f64,
}

impl ChainHamiltonian {
    pub fn size(&self) -> usize {
        self.onsite.len()
    }

    pub fn window(&self) -> Window {
        Window {
            lo: self.offset,
            hi: self.offset + self.onsite.len() as i64 - 1,
        }
    }

    /// Infinity norm (max absolute row sum); bounds the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.hopping[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.hopping[i].abs() } else { 0.0 };
                self.onsite[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// `H·ψ`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(psi.len(), n, "state length does not match chain");
        (0..n)
            .map(|i| {
                let mut acc = psi[i] * self.onsite[i];
                if i > 0 {
                    acc += psi[i - 1] * self.hopping[i - 1];
                }
                if i + 1 < n {
                    acc += psi[i + 1] * self.hopping[i];
                }
                acc
            })
            .collect()
    }

    /// `⟨ψ|H|ψ⟩` for a state on the same window.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        state.check_window(self.offset, self.size())?;
        let h_psi = self.apply(state.amplitudes());
        Ok(state
            .amplitudes()
            .iter()
            .zip(&h_psi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }
}

/// Sector chain with exact `g√(i+1)` hopping.
pub fn build_equivalent_chain(params: &ModelParams, sector: ParitySector) -> Result<ChainHamiltonian> {
    build_sector_chain(params, ChainKind::Equivalent, sector)
}

/// Uniform-hopping chain `H_0 (+ H_1)`; the stagger uses `(-1)^n Ω/2`.
pub fn build_effective_chain(params: &ModelParams, stagger_on: bool) -> Result<ChainHamiltonian> {
    let w = Window::new(params.window.lo, params.window.hi)?;
    let hop = params.g * params.n_bar.sqrt();
    let shift = params.energy_shift();
    let onsite = w
        .photon_numbers()
        .map(|n| {
            let linear = (n as f64 - params.n_bar) * params.omega;
            if stagger_on {
                linear + ParitySector::Odd.stagger_sign(n) * 0.5 * params.omega_atom
            } else {
                linear
            }
        })
        .collect();
    Ok(ChainHamiltonian {
        onsite,
        hopping: vec![hop; w.len() - 1],
        offset: w.lo,
        energy_shift: shift,
    })
}

/// Chain of `kind` for one parity sector, with the sector's stagger sign
/// `(-1)^{γ_λ + n}`. For [`ChainKind::Effective`] the odd sector coincides with
/// [`build_effective_chain`]`(params, true)`.
pub fn build_sector_chain(
    params: &ModelParams,
    kind: ChainKind,
    sector: ParitySector,
) -> Result<ChainHamiltonian> {
    let w = Window::new(params.window.lo, params.window.hi)?;
    let onsite = w
        .photon_numbers()
        .map(|n| {
            sector.stagger_sign(n) * 0.5 * params.omega_atom + (n as f64 - params.n_bar) * params.omega
        })
        .collect();
    let hopping = match kind {
        ChainKind::Equivalent => (w.lo..w.hi)
            .map(|n| params.g * ((n + 1) as f64).sqrt())
            .collect(),
        ChainKind::Effective => vec![params.g * params.n_bar.sqrt(); w.len() - 1],
    };
    Ok(ChainHamiltonian {
        onsite,
        hopping,
        offset: w.lo,
        energy_shift: params.energy_shift(),
    })
}

/// Probability weights of the two parity sectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorWeights {
    pub even: f64,
    pub odd: f64,
}

impl SectorWeights {
    pub fn get(&self, sector: ParitySector) -> f64 {
        match sector {
            ParitySector::Even => self.even,
            ParitySector::Odd => self.odd,
        }
    }
}

/// A state of the full model held as two normalized sector vectors and
/// their weights. A sector of zero weight carries an all-zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    pub even: StateVector,
    pub odd: StateVector,
    pub weights: SectorWeights,
}

impl SectorState {
    pub fn get(&self, sector: ParitySector) -> &StateVector {
        match sector {
            ParitySector::Even => &self.even,
            ParitySector::Odd => &self.odd,
        }
    }

    pub fn get_mut(&mut self, sector: ParitySector) -> &mut StateVector {
        match sector {
            ParitySector::Even => &mut self.even,
            ParitySector::Odd => &mut self.odd,
        }
    }
}

const MAPPING_NORM_TOL: f64 = 1e-12;

/// Splits `(c_g|g⟩ + c_e|e⟩) ⊗ Σ ψ_n|n⟩` into the two parity chains.
///
/// Chain site `n` of the even sector is `|g,n⟩` for even `n` and `|e,n⟩` for odd
/// `n`; the odd sector is the complement.
pub fn map_product_state_to_sectors(
    c_g: Complex64,
    c_e: Complex64,
    photon_amps: &StateVector,
) -> Result<SectorState> {
    let atom_norm = c_g.norm_sqr() + c_e.norm_sqr();
    if (atom_norm - 1.0).abs() > MAPPING_NORM_TOL {
        return Err(Error::Normalization {
            squared_norm: atom_norm,
            tolerance: MAPPING_NORM_TOL,
        });
    }
    let field_norm = photon_amps.norm_sqr();
    if (field_norm - 1.0).abs() > MAPPING_NORM_TOL {
        return Err(Error::Normalization {
            squared_norm: field_norm,
            tolerance: MAPPING_NORM_TOL,
        });
    }

    let offset = photon_amps.offset();
    let mut even = Vec::with_capacity(photon_amps.len());
    let mut odd = Vec::with_capacity(photon_amps.len());
    for (i, &psi) in photon_amps.amplitudes().iter().enumerate() {
        let n = offset + i as i64;
        if n % 2 == 0 {
            even.push(c_g * psi);
            odd.push(c_e * psi);
        } else {
            even.push(c_e * psi);
            odd.push(c_g * psi);
        }
    }
    let (even, w_even) = normalize_sector(offset, even);
    let (odd, w_odd) = normalize_sector(offset, odd);
    Ok(SectorState {
        even,
        odd,
        weights: SectorWeights {
            even: w_even,
            odd: w_odd,
        },
    })
}

fn normalize_sector(offset: i64, mut amps: Vec<Complex64>) -> (StateVector, f64) {
    let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if weight > 0.0 {
        let scale = weight.sqrt().recip();
        amps.iter_mut().for_each(|a| *a *= scale);
    }
    (StateVector::new(offset, amps), weight)
}

/// Amplitudes `⟨g,n|ψ⟩` and `⟨e,n|ψ⟩` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPhotonTable {
    pub offset: i64,
    pub ground: Vec<Complex64>,
    pub excited: Vec<Complex64>,
}

impl AtomPhotonTable {
    pub fn total_probability(&self) -> f64 {
        self.ground
            .iter()
            .chain(&self.excited)
            .map(|a| a.norm_sqr())
            .sum()
    }
}

/// Inverse of [`map_product_state_to_sectors`] (valid for any sector state,
/// not only product states).
pub fn sectors_to_atom_photon(state: &SectorState) -> Result<AtomPhotonTable> {
    state
        .odd
        .check_window(state.even.offset(), state.even.len())?;
    let offset = state.even.offset();
    let se = state.weights.even.sqrt();
    let so = state.weights.odd.sqrt();
    let mut ground = Vec::with_capacity(state.even.len());
    let mut excited = Vec::with_capacity(state.even.len());
    for (i, (&e, &o)) in state
        .even
        .amplitudes()
        .iter()
        .zip(state.odd.amplitudes())
        .enumerate()
    {
        let n = offset + i as i64;
        if n % 2 == 0 {
            ground.push(e * se);
            excited.push(o * so);
        } else {
            ground.push(o * so);
            excited.push(e * se);
        }
    }
    Ok(AtomPhotonTable {
        offset,
        ground,
        excited,
    })
}

/// Diagnostics for the uniform-hopping truncation and the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// Bloch extent `L`.
    pub l: f64,
    /// Spatial extent `D = L + 6/α` covered by the dynamics.
    pub d: f64,
    /// `max_i |(√i - √n̄)/√n̄|` over the window.
    pub max_sqrt_deviation: f64,
    pub j0_at_l: f64,
    pub j1_at_l: f64,
    /// `max_sqrt_deviation > 5%`.
    pub sqrt_deviation_exceeded: bool,
    /// Window half-width ≥ `L + 8/α` on both sides of `n̄`.
    pub window_guard_ok: bool,
}

pub fn validity_report(params: &ModelParams) -> Result<ValidityReport> {
    let l = params.bloch_extent();
    let d = l + 6.0 / params.alpha;
    let root = params.n_bar.sqrt();
    let dev = |n: i64| ((n as f64).sqrt() - root).abs() / root;
    // √ is monotone, so the extremes sit at the window edges.
    let max_sqrt_deviation = dev(params.window.lo).max(dev(params.window.hi));
    let x = l.abs();
    let j0_at_l = bessel_j(0, x)?;
    // J_1 is odd
    let j1_at_l = bessel_j(1, x)? * l.signum();
    let guard = l.abs() + WINDOW_GUARD_WIDTHS / params.alpha;
    let window_guard_ok = (params.n_bar - params.window.lo as f64 >= guard || params.window.lo == 0)
        && params.window.hi as f64 - params.n_bar >= guard;
    Ok(ValidityReport {
        l,
        d,
        max_sqrt_deviation,
        j0_at_l,
        j1_at_l,
        sqrt_deviation_exceeded: max_sqrt_deviation > SQRT_DEVIATION_LIMIT,
        window_guard_ok,
    })
}

/// Discrete Gaussian `e^{-α²(n-n0)²/2} e^{i k0 n}` normalized over the window.
pub fn gaussian_packet(window: Window, n0: f64, k0: f64, alpha: f64) -> StateVector {
    let mut amps: Vec<Complex64> = window
        .photon_numbers()
        .map(|n| {
            let x = n as f64 - n0;
            Complex64::from_polar((-0.5 * alpha * alpha * x * x).exp(), k0 * n as f64)
        })
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::new(window.lo, amps)
}

/// The initial state `(|g⟩ + |e⟩)/√2 ⊗ φ(n0, k0)` in sector form.
pub fn initial_superposition(params: &ModelParams) -> Result<SectorState> {
    let packet = gaussian_packet(params.window, params.n0, params.k0, params.alpha);
    let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    map_product_state_to_sectors(c, c, &packet)
}
