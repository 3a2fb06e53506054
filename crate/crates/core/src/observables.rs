//! Quantities measured on evolved states.

use crate::error::Result;
use crate::model::{ChainHamiltonian, SectorState, SectorWeights};
use crate::propagate::{evolve_const, Spectrum, StateVector};
use serde::{Deserialize, Serialize};
use std::borrow::Cow;

/// Sites per edge summed by the boundary-leakage monitor.
pub const BOUNDARY_SITES: usize = 5;
/// Leakage above this flags the window as too narrow.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

/// `2√(2 ln 2)`: FWHM of a Gaussian in units of its standard deviation.
pub fn fwhm_factor() -> f64 {
    2.0 * (2.0 * std::f64::consts::LN_2).sqrt()
}

/// Photon-number distribution at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFrame {
    pub t: f64,
    /// Photon number of `p[0]`.
    pub offset: i64,
    pub p: Vec<f64>,
    pub center: f64,
    pub width_fwhm: f64,
}

/// Anything that carries a photon-number probability vector.
pub trait PhotonProbabilities {
    fn photon_offset(&self) -> i64;
    fn photon_probabilities(&self) -> Cow<'_, [f64]>;
}

impl PhotonProbabilities for DistributionFrame {
    fn photon_offset(&self) -> i64 {
        self.offset
    }
    fn photon_probabilities(&self) -> Cow<'_, [f64]> {
        Cow::Borrowed(&self.p)
    }
}

impl PhotonProbabilities for StateVector {
    fn photon_offset(&self) -> i64 {
        self.offset()
    }
    fn photon_probabilities(&self) -> Cow<'_, [f64]> {
        Cow::Owned(self.probabilities())
    }
}

fn mean_and_variance(offset: i64, weights: &[f64]) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    let mean_idx = weights.iter().enumerate().map(|(i, w)| i as f64 * w).sum::<f64>() / total;
    let var = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (i as f64 - mean_idx).powi(2) * w)
        .sum::<f64>()
        / total;
    (offset as f64 + mean_idx, var)
}

/// First moment `Σ n p_n`.
pub fn packet_center(x: &impl PhotonProbabilities) -> f64 {
    mean_and_variance(x.photon_offset(), &x.photon_probabilities()).0
}

/// FWHM of the amplitude envelope `|ψ_n| = √p_n`, from its second central
/// moment: `2√(2 ln 2)·σ`. For `e^{-α²(n-n0)²/2}` this is `2√(2 ln 2)/α`.
pub fn packet_width_fwhm(x: &impl PhotonProbabilities) -> f64 {
    let envelope: Vec<f64> = x.photon_probabilities().iter().map(|p| p.sqrt()).collect();
    let (_, var) = mean_and_variance(x.photon_offset(), &envelope);
    fwhm_factor() * var.sqrt()
}

/// `P(n) = |⟨g,n|ψ⟩|² + |⟨e,n|ψ⟩|²`; chain index equals photon number in both
/// sectors, so this is the weighted sum of the two sector distributions.
pub fn photon_distribution(state: &SectorState, t: f64) -> Result<DistributionFrame> {
    state.odd.window()?;
    let _ = state.even.inner(&state.odd)?;
    let p: Vec<f64> = state
        .even
        .amplitudes()
        .iter()
        .zip(state.odd.amplitudes())
        .map(|(e, o)| state.weights.even * e.norm_sqr() + state.weights.odd * o.norm_sqr())
        .collect();
    let mut frame = DistributionFrame {
        t,
        offset: state.even.offset(),
        p,
        center: 0.0,
        width_fwhm: 0.0,
    };
    frame.center = packet_center(&frame);
    frame.width_fwhm = packet_width_fwhm(&frame);
    Ok(frame)
}

/// Overlaps of `evolved` with the two free Bloch oscillations
/// `e^{-iH_0 t}ψ(0)` and `e^{-iH_0 (t + T_B/2)}ψ(0)`.
pub fn bo_overlap_probabilities(
    initial: &StateVector,
    spec_h0: &Spectrum,
    evolved: &StateVector,
    t: f64,
    t_b: f64,
) -> Result<(f64, f64)> {
    let ref_a = evolve_const(initial, spec_h0, t)?;
    let ref_b = evolve_const(initial, spec_h0, t + 0.5 * t_b)?;
    Ok((ref_a.inner(evolved)?.norm_sqr(), ref_b.inner(evolved)?.norm_sqr()))
}

/// [`bo_overlap_probabilities`] per parity sector, weighted by the sector
/// weights. Sectors carry opposite signs of γ, so amplitudes are not summed
/// across sectors: that would cancel the transferred part.
pub fn sector_overlap_probabilities(
    initial: &SectorState,
    spec_h0: &Spectrum,
    evolved: &SectorState,
    t: f64,
    t_b: f64,
) -> Result<(f64, f64)> {
    let mut pa = 0.0;
    let mut pb = 0.0;
    for (w, init, ev) in [
        (initial.weights.even, &initial.even, &evolved.even),
        (initial.weights.odd, &initial.odd, &evolved.odd),
    ] {
        if w == 0.0 {
            continue;
        }
        let (a, b) = bo_overlap_probabilities(init, spec_h0, ev, t, t_b)?;
        pa += w * a;
        pb += w * b;
    }
    Ok((pa, pb))
}

/// Conservation diagnostics of a two-sector state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationRecord {
    pub norm: f64,
    /// `w_λ ‖ψ_λ‖²`; constant in time under parity-conserving evolution.
    pub sector_weights: SectorWeights,
    /// Weighted probability on the `BOUNDARY_SITES` outermost sites per edge.
    pub boundary_leakage: f64,
    /// `⟨H_λ⟩` per sector.
    pub energies: SectorWeights,
}

impl ConservationRecord {
    pub fn leakage_ok(&self) -> bool {
        self.boundary_leakage < LEAKAGE_LIMIT
    }
}

fn edge_probability(state: &StateVector) -> f64 {
    let p = state.amplitudes();
    let k = BOUNDARY_SITES.min(p.len() / 2);
    p[..k].iter().chain(&p[p.len() - k..]).map(|a| a.norm_sqr()).sum()
}

pub fn conservation_monitor(
    state: &SectorState,
    h_even: &ChainHamiltonian,
    h_odd: &ChainHamiltonian,
) -> Result<ConservationRecord> {
    let w_even = state.weights.even * state.even.norm_sqr();
    let w_odd = state.weights.odd * state.odd.norm_sqr();
    let energy = |h: &ChainHamiltonian, s: &StateVector| -> Result<f64> {
        let n2 = s.norm_sqr();
        if n2 == 0.0 {
            // still validate the shape
            h.expectation(s)
        } else {
            Ok(h.expectation(s)? / n2)
        }
    };
    Ok(ConservationRecord {
        norm: w_even + w_odd,
        sector_weights: SectorWeights {
            even: w_even,
            odd: w_odd,
        },
        boundary_leakage: state.weights.even * edge_probability(&state.even)
            + state.weights.odd * edge_probability(&state.odd),
        energies: SectorWeights {
            even: energy(h_even, &state.even)?,
            odd: energy(h_odd, &state.odd)?,
        },
    })
}
