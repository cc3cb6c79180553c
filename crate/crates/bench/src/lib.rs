//! Shared fixtures for the solver benchmarks.

use eitcool_core::TripodParams;

/// Parameters used by every benchmark: the resonant design point.
pub fn fixture() -> TripodParams {
    TripodParams::design_point()
}

/// Probe detuning grid of `n` points across the dark resonance.
pub fn probe_grid(p: &TripodParams, n: usize) -> Vec<f64> {
    eitcool_core::grid::linspace(p.delta_1 - 0.5, p.delta_1 + 0.5, n)
}
