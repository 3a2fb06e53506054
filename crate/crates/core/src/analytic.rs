//! Closed-form predictor for the amplitude-modulated Bloch oscillation.
//!
//! In the Wannier-Stark basis of the uniform chain, the staggered atomic term
//! reduces (secular approximation) to a parity-dependent energy shift ±γ with
//! `γ = (Ω/2) J_0(L)`. A `k0 = 0` Gaussian then splits into two Bloch
//! oscillations half a period apart whose weights follow cos²(γt) and
//! sin²(γt).

use crate::bessel::{bessel_j, MAX_ORDER};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Window};
use crate::propagate::{evolve_const, Spectrum, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const SUPPORT_EDGE_LIMIT: f64 = 1e-14;

/// Real-space amplitudes `J_{n-m}(L/2)` of the Wannier-Stark state `m` over
/// the window (entry `i` is photon number `window.lo() + i`).
pub fn wannier_stark_amplitudes(m: i64, l: f64, window: Window) -> Result<Vec<f64>> {
    let x = 0.5 * l.abs();
    let amp = |n: i64| -> Result<f64> {
        let order = n - m;
        if order.unsigned_abs() > u64::from(MAX_ORDER) {
            // J_k(x) for |k| > 256 ≥ 2x is below 1e-60; treat as zero.
            if x <= 0.5 * f64::from(MAX_ORDER) {
                return Ok(0.0);
            }
            return Err(Error::Domain {
                function: "wannier_stark_amplitudes",
                detail: format!("order {order} at argument {x}"),
            });
        }
        let v = bessel_j(order as i32, x)?;
        // J_k(-x) = (-1)^k J_k(x)
        Ok(if l < 0.0 && order % 2 != 0 { -v } else { v })
    };
    let edge = amp(window.lo())?.abs().max(amp(window.hi())?.abs());
    if edge >= SUPPORT_EDGE_LIMIT {
        return Err(Error::Support { m, edge_amplitude: edge });
    }
    window.photon_numbers().map(amp).collect()
}

/// Envelope transition rate `γ = (Ω/2) J_0(L)`.
pub fn gamma(omega_atom: f64, l: f64) -> Result<f64> {
    Ok(0.5 * omega_atom * bessel_j(0, l.abs())?)
}

/// Diagonal element `exp(-i[mω + (-1)^m γ]t)` of the reduced propagator in
/// the Wannier-Stark basis.
pub fn reduced_propagator_phase(m: i64, t: f64, omega: f64, gam: f64) -> Complex64 {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    // mωt is reduced modulo 2π first: m can be ~10⁴.
    let winding = ((m as f64) * omega * t).rem_euclid(2.0 * PI);
    Complex64::from_polar(1.0, -(winding + sign * gam * t))
}

/// Centers `(n_a, n_b)` of the two packets for a `k0 = 0` start at `n0`.
pub fn predict_centers(n0: f64, l: f64, omega: f64, t: f64) -> (f64, f64) {
    let half = 0.5 * omega * t;
    (n0 - l * half.sin().powi(2), n0 - l * half.cos().powi(2))
}

/// Packet weights `(cos²γt, sin²γt)`.
pub fn predict_probabilities(gam: f64, t: f64) -> (f64, f64) {
    let c = (gam * t).cos().powi(2);
    (c, 1.0 - c)
}

/// `ΔE = 2Ωg√n̄ cos k0` between a packet and its π-shifted partner.
pub fn energy_gap(omega_atom: f64, g: f64, n_bar: f64, k0: f64) -> f64 {
    2.0 * omega_atom * g * n_bar.sqrt() * k0.cos()
}

/// `B_π = e^{-iH_0 T_B/2}` applied to `state`: shifts the packet by
/// `-L cos k0` and its momentum by π.
pub fn boost_reference(state: &StateVector, spec_h0: &Spectrum, t_b: f64) -> Result<StateVector> {
    evolve_const(state, spec_h0, 0.5 * t_b)
}

/// Analytic trajectory bundle for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoPrediction {
    pub gamma: f64,
    pub bloch_period: f64,
    pub l: f64,
    pub omega: f64,
    /// Initial center used for `n_a`, `n_b`.
    pub n0: f64,
    /// Position shift of the counterpart packet, `-L cos k0`.
    pub n_pi: f64,
    pub alpha: f64,
}

impl BoPrediction {
    /// Prediction for constant `Ω = params.omega_atom`.
    pub fn new(params: &ModelParams) -> Result<Self> {
        let l = params.bloch_extent();
        Ok(BoPrediction {
            gamma: gamma(params.omega_atom, l)?,
            bloch_period: params.bloch_period(),
            l,
            omega: params.omega,
            n0: params.n0,
            n_pi: -l * params.k0.cos(),
            alpha: params.alpha,
        })
    }

    pub fn n_a(&self, t: f64) -> f64 {
        predict_centers(self.n0, self.l, self.omega, t).0
    }

    pub fn n_b(&self, t: f64) -> f64 {
        predict_centers(self.n0, self.l, self.omega, t).1
    }

    pub fn p_a(&self, t: f64) -> f64 {
        predict_probabilities(self.gamma, t).0
    }

    pub fn p_b(&self, t: f64) -> f64 {
        predict_probabilities(self.gamma, t).1
    }

    /// `P(n, t)` over `window`, normalized by the discrete Gaussian sum at t = 0.
    pub fn distribution(&self, t: f64, window: Window) -> Vec<f64> {
        let a2 = self.alpha * self.alpha;
        let gauss = |n: i64, c: f64| (-a2 * (n as f64 - c).powi(2)).exp();
        let r: f64 = window.photon_numbers().map(|n| gauss(n, self.n0)).sum();
        let (pa, pb) = predict_probabilities(self.gamma, t);
        let (na, nb) = (self.n_a(t), self.n_b(t));
        window
            .photon_numbers()
            .map(|n| (gauss(n, na) * pa + gauss(n, nb) * pb) / r)
            .collect()
    }
}

/// `P(n, t)` at a single photon number.
pub fn predict_distribution(n: i64, t: f64, params: &ModelParams, gam: f64) -> f64 {
    let pred = BoPrediction {
        gamma: gam,
        bloch_period: params.bloch_period(),
        l: params.bloch_extent(),
        omega: params.omega,
        n0: params.n0,
        n_pi: -params.bloch_extent() * params.k0.cos(),
        alpha: params.alpha,
    };
    if !params.window.contains(n) {
        return 0.0;
    }
    let i = (n - params.window.lo()) as usize;
    pred.distribution(t, params.window)[i]
}
