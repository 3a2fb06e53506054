//! Photon-number dynamics of the quantum Rabi model at large photon number.
//!
//! The Hamiltonian splits into two parity sectors, each a tight-binding chain
//! over photon number with a linear potential of slope ω. A wave packet in
//! such a chain performs Bloch oscillations of extent `L = -4g√n̄/ω` and
//! period `T_B = 2π/ω`; the staggered term `±Ω/2` couples the packet to its
//! counterpart half a period ahead with rate `γ = (Ω/2) J0(L)`.
//!
//! Units: ω = 1 internally, so `T_B = 2π`. Photon numbers are absolute; every
//! state carries the photon number of its first amplitude.

pub mod analytic;
pub mod bessel;
pub mod error;
pub mod model;
pub mod observables;
pub mod propagate;
pub mod schedules;
pub mod simulation;

pub use analytic::{BoPrediction, gamma};
pub use bessel::{bessel_j, j0_zero};
pub use error::{Error, Result};
pub use model::{
    ChainHamiltonian, ChainKind, ModelParams, ParitySector, SectorState, SectorWeights, ValidityReport, Window,
};
pub use observables::{ConservationRecord, DistributionFrame};
pub use propagate::{eigendecompose, evolve_const, evolve_schedule, SectorChain, Spectrum, StateVector, Trajectory};
pub use schedules::DriveSchedule;
pub use simulation::{run, RunRecord, RunSpec, Sample};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
