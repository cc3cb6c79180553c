//! Tripod-EIT ground-state cooling of trapped-ion chains.
//!
//! The crate is organised bottom-up:
//!
//! * [`atom_model`]: four-level tripod Hamiltonian, dressed states of the
//!   effective Λ system and the motional sideband coupling.
//! * [`steady_state`]: Liouvillian construction, steady-state and time
//!   evolution solvers, absorption spectra and closed-form Λ results.
//! * [`cooling`]: phonon-number limits, cooling dynamics, parameter scans
//!   and probe-detuning optimisation.
//! * [`ion_chain`]: linear Coulomb crystals, transverse normal modes and
//!   Lamb-Dicke factors.
//! * [`spectroscopy`]: sideband thermometry, AC-Stark calibration,
//!   Debye-Waller Rabi flopping and least-squares fits.
//!
//! Frequencies that enter the atomic physics are expressed in units of the
//! natural linewidth Γ throughout. Conversions to laboratory units live in
//! [`units`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom_model;
pub mod cooling;
pub mod error;
pub mod fit;
pub mod grid;
pub mod ion_chain;
pub mod spectroscopy;
pub mod steady_state;
pub mod units;

pub use atom_model::{
    build_hamiltonian, dressed_states, effective_sideband_coupling, lindblad_ops, DressedSystem,
    SidebandCoupling, TripodParams,
};
pub use cooling::{
    cooling_dynamics, optimize_probe_detuning, phonon_limit, scan_cooling, CoolingDynamics,
    CoolingResult, ScanCell, ScanGrid,
};
pub use error::{Error, Result};
pub use ion_chain::{
    equilibrium_positions, lamb_dicke_factors, transverse_modes, zigzag_margin, Beam, ModeSpectrum,
    TrapConfig,
};
pub use spectroscopy::{
    ac_stark_to_rabi, carrier_flop, debye_waller_rabi, fit_cooling_curve, fit_rabi, nbar_to_ratio,
    ratio_to_nbar, sideband_spectrum_model, CoolingFit, RabiFit, SidebandPair,
};
pub use steady_state::{
    absorption_spectrum, analytic_rho_ee, build_liouvillian, cooling_bandwidth, evolve,
    solve_steady_state, AbsorptionCurve, DensityMatrix, Liouvillian,
};

/// Complex scalar used for all density matrices and superoperators.
pub type C64 = num_complex::Complex64;
