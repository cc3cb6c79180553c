//! Steady-state phonon limits, cooling dynamics, parameter scans and
//! probe-detuning optimisation.
//!
//! Each motional mode is treated independently. Sideband absorption is read
//! off the steady-state excitation with the probe detuning shifted by ±ω,
//! all other parameters held fixed, and combined as
//!
//! ```text
//! n̄_ω = [ρ_ee(Δ₀) + ρ_ee(Δ₀ − ω)] / [ρ_ee(Δ₀ + ω) − ρ_ee(Δ₀ − ω)]
//! ```

use rayon::prelude::*;

use crate::atom_model::{lamb_dicke_violated, TripodParams};
use crate::error::{Error, Result};
use crate::steady_state::{analytic_rho_ee, golden_section_min, rho_ee_at};

/// Probe detuning accuracy of [`optimize_probe_detuning`] (units of Γ).
pub const PROBE_TOLERANCE: f64 = 1e-4;
/// Default number of coarse samples before golden-section refinement.
pub const DEFAULT_PROBE_RESOLUTION: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoolingStatus {
    Cooling,
    /// The lower sideband does not out-absorb the upper one.
    NotCooling,
}

/// Cooling limit of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingResult {
    /// Mode frequency, units of Γ.
    pub mode_freq: f64,
    /// Steady-state n̄; only meaningful when `status` is `Cooling`.
    pub nbar: f64,
    pub status: CoolingStatus,
    pub rho_ee_carrier: f64,
    /// ρ_ee(Δ₀ − ω).
    pub rho_ee_red: f64,
    /// ρ_ee(Δ₀ + ω).
    pub rho_ee_blue: f64,
}

impl CoolingResult {
    pub fn from_populations(mode_freq: f64, carrier: f64, red: f64, blue: f64) -> Self {
        let denom = blue - red;
        let (nbar, status) = if denom > 0.0 {
            ((carrier + red) / denom, CoolingStatus::Cooling)
        } else {
            (f64::INFINITY, CoolingStatus::NotCooling)
        };
        CoolingResult { mode_freq, nbar, status, rho_ee_carrier: carrier, rho_ee_red: red, rho_ee_blue: blue }
    }

    pub fn is_cooling(&self) -> bool {
        self.status == CoolingStatus::Cooling
    }

    pub fn nbar_ss(&self) -> Option<f64> {
        self.is_cooling().then_some(self.nbar)
    }

    /// ρ_ee(Δ₀ + ω) − ρ_ee(Δ₀ − ω).
    pub fn sideband_difference(&self) -> f64 {
        self.rho_ee_blue - self.rho_ee_red
    }

    /// Rate-equation cooling rate W = η²Γ[ρ_ee(Δ₀+ω) − ρ_ee(Δ₀−ω)] in 1/s,
    /// with `gamma` the linewidth in rad/s.
    pub fn cooling_rate(&self, eta: f64, gamma: f64) -> f64 {
        eta * eta * gamma * self.sideband_difference()
    }
}

/// Cooling limit of a mode at `mode_freq` (units of Γ) from the full master
/// equation.
pub fn phonon_limit(p: &TripodParams, mode_freq: f64) -> Result<CoolingResult> {
    p.validate()?;
    if !(mode_freq.is_finite() && mode_freq > 0.0) {
        return Err(Error::invalid("mode_freq", format!("must be > 0, got {mode_freq}")));
    }
    let carrier = rho_ee_at(p, p.delta_0)?;
    let red = rho_ee_at(p, p.delta_0 - mode_freq)?;
    let blue = rho_ee_at(p, p.delta_0 + mode_freq)?;
    Ok(CoolingResult::from_populations(mode_freq, carrier, red, blue))
}

/// Same combination evaluated with the closed-form Λ populations.
pub fn phonon_limit_analytic(p: &TripodParams, mode_freq: f64, simplified: bool) -> Result<CoolingResult> {
    if !(mode_freq.is_finite() && mode_freq > 0.0) {
        return Err(Error::invalid("mode_freq", format!("must be > 0, got {mode_freq}")));
    }
    let at = |d: f64| analytic_rho_ee(&p.with_delta_0(d), simplified).map(|r| r.value);
    let carrier = at(p.delta_0)?;
    let red = at(p.delta_0 - mode_freq)?;
    let blue = at(p.delta_0 + mode_freq)?;
    Ok(CoolingResult::from_populations(mode_freq, carrier, red, blue))
}

/// Exponential approach of n̄(t) to the cooling limit.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingDynamics {
    pub times: Vec<f64>,
    pub nbar: Vec<f64>,
    /// W in 1/s.
    pub rate: f64,
    pub limit: CoolingResult,
}

impl CoolingDynamics {
    /// 1/e cooling time 1/W in seconds.
    pub fn time_constant(&self) -> f64 {
        1.0 / self.rate
    }
}

/// n̄(t) = n̄_ss + (n̄₀ − n̄_ss)e^{−Wt} for times `t_grid` in seconds.
pub fn cooling_dynamics(
    p: &TripodParams,
    eta: f64,
    mode_freq: f64,
    nbar0: f64,
    t_grid: &[f64],
) -> Result<CoolingDynamics> {
    if !(nbar0.is_finite() && nbar0 >= 0.0) {
        return Err(Error::invalid("nbar0", format!("must be ≥ 0, got {nbar0}")));
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::invalid("eta", format!("must be ≥ 0, got {eta}")));
    }
    lamb_dicke_violated(eta, nbar0, 0.1);
    let limit = phonon_limit(p, mode_freq)?;
    let rate = limit.cooling_rate(eta, p.gamma);
    if !limit.is_cooling() || !(rate > 0.0) {
        return Err(Error::NotCooling);
    }
    let nbar = t_grid
        .iter()
        .map(|&t| limit.nbar + (nbar0 - limit.nbar) * (-rate * t).exp())
        .collect();
    Ok(CoolingDynamics { times: t_grid.to_vec(), nbar, rate, limit })
}

/// Best probe detuning for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptimum {
    pub delta_0: f64,
    pub nbar: f64,
}

/// Minimise n̄ over Δ₀ ∈ `window` (units of Γ).
///
/// The window is sampled at `resolution` points; the best cooling sample is
/// then refined by golden-section search on its neighbouring interval to
/// [`PROBE_TOLERANCE`]. Non-cooling points count as +∞.
pub fn optimize_probe_detuning(
    p: &TripodParams,
    mode_freq: f64,
    window: (f64, f64),
    resolution: usize,
) -> Result<ProbeOptimum> {
    let (lo, hi) = if window.0 <= window.1 { window } else { (window.1, window.0) };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("window", "bounds must be finite"));
    }
    let objective = |d: f64| -> Result<f64> {
        let r = phonon_limit(&p.with_delta_0(d), mode_freq)?;
        Ok(r.nbar_ss().unwrap_or(f64::INFINITY))
    };
    if lo == hi {
        let nbar = objective(lo)?;
        return if nbar.is_finite() {
            Ok(ProbeOptimum { delta_0: lo, nbar })
        } else {
            Err(Error::NoMinimumInWindow)
        };
    }
    let resolution = resolution.max(3);
    let grid = crate::grid::linspace(lo, hi, resolution);
    let values = grid.iter().map(|&d| objective(d)).collect::<Result<Vec<f64>>>()?;
    let (k, best) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, v)| (k, *v))
        .ok_or(Error::NoMinimumInWindow)?;
    if !best.is_finite() {
        return Err(Error::NoMinimumInWindow);
    }
    let a = grid[k.saturating_sub(1)];
    let b = grid[(k + 1).min(grid.len() - 1)];
    let (d, n) = golden_section_min(objective, a, b, PROBE_TOLERANCE)?;
    Ok(if n <= best { ProbeOptimum { delta_0: d, nbar: n } } else { ProbeOptimum { delta_0: grid[k], nbar: best } })
}

/// How the σ⁺ Rabi frequency follows Ω₁ across a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaPlus {
    /// Keep the base Ω₋₁.
    Fixed,
    /// Ω₋₁ = ratio · Ω₁.
    Proportional(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    /// Re-optimise Δ₀ for every Ω₁ before filling the row.
    pub optimize_probe: bool,
    /// Mode frequency the probe is optimised for (units of Γ).
    pub reference_mode: f64,
    pub probe_window: (f64, f64),
    pub probe_resolution: usize,
    pub sigma_plus: SigmaPlus,
}

impl ScanSettings {
    /// Probe optimised for `reference_mode` inside [Δ₁ − 0.1, Δ₁ + 0.3].
    pub fn optimized(p: &TripodParams, reference_mode: f64) -> Self {
        ScanSettings {
            optimize_probe: true,
            reference_mode,
            probe_window: (p.delta_1 - 0.1, p.delta_1 + 0.3),
            probe_resolution: DEFAULT_PROBE_RESOLUTION,
            sigma_plus: SigmaPlus::Fixed,
        }
    }

    pub fn fixed_probe() -> Self {
        ScanSettings {
            optimize_probe: false,
            reference_mode: 0.0,
            probe_window: (0.0, 0.0),
            probe_resolution: DEFAULT_PROBE_RESOLUTION,
            sigma_plus: SigmaPlus::Fixed,
        }
    }
}

/// One heatmap cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanCell {
    Cooling(f64),
    NotCooling,
    Failed(Error),
}

impl ScanCell {
    pub fn nbar(&self) -> Option<f64> {
        match self {
            ScanCell::Cooling(n) => Some(*n),
            _ => None,
        }
    }
}

/// n̄ over (Ω₁, ω).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub omega_axis: Vec<f64>,
    pub rabi_axis: Vec<f64>,
    /// `values[r][c]` is the cell at `rabi_axis[r]`, `omega_axis[c]`.
    pub values: Vec<Vec<ScanCell>>,
    /// Probe detuning used for each row (optimised or the base value).
    pub probe_detuning: Vec<f64>,
    /// Optimiser output per row when probe optimisation was requested.
    pub optimal_delta0: Vec<Option<ProbeOptimum>>,
}

impl ScanGrid {
    /// Smallest cooling n̄ of row `r` and its column.
    pub fn row_minimum(&self, r: usize) -> Option<(usize, f64)> {
        self.values[r]
            .iter()
            .enumerate()
            .filter_map(|(c, v)| v.nbar().map(|n| (c, n)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

fn row_params(p: &TripodParams, omega_1: f64, sigma_plus: SigmaPlus) -> TripodParams {
    let mut q = *p;
    q.omega_1 = omega_1;
    if let SigmaPlus::Proportional(ratio) = sigma_plus {
        q.omega_m1 = ratio * omega_1;
    }
    q
}

/// n̄ heatmap over pump Rabi frequency and mode frequency (units of Γ).
/// Cells are evaluated in parallel; failures are recorded per cell.
pub fn scan_cooling(
    p_base: &TripodParams,
    omega_axis: &[f64],
    rabi_axis: &[f64],
    settings: &ScanSettings,
) -> Result<ScanGrid> {
    p_base.validate()?;
    if omega_axis.is_empty() || rabi_axis.is_empty() {
        return Err(Error::invalid("axis", "scan axes must be nonempty"));
    }
    if omega_axis.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::invalid("omega_axis", "mode frequencies must be > 0"));
    }
    if rabi_axis.iter().any(|o| !(o.is_finite() && *o > 0.0)) {
        return Err(Error::invalid("rabi_axis", "Rabi frequencies must be > 0"));
    }

    let rows: Vec<(f64, Option<ProbeOptimum>)> = rabi_axis
        .par_iter()
        .map(|&o1| {
            let q = row_params(p_base, o1, settings.sigma_plus);
            if settings.optimize_probe {
                match optimize_probe_detuning(&q, settings.reference_mode, settings.probe_window, settings.probe_resolution) {
                    Ok(opt) => (opt.delta_0, Some(opt)),
                    Err(e) => {
                        log::warn!("probe optimisation failed at Ω₁ = {o1}: {e}");
                        (q.delta_0, None)
                    }
                }
            } else {
                (q.delta_0, None)
            }
        })
        .collect();

    let cells: Vec<ScanCell> = (0..rabi_axis.len() * omega_axis.len())
        .into_par_iter()
        .map(|idx| {
            let (r, c) = (idx / omega_axis.len(), idx % omega_axis.len());
            let q = row_params(p_base, rabi_axis[r], settings.sigma_plus).with_delta_0(rows[r].0);
            match phonon_limit(&q, omega_axis[c]) {
                Ok(res) => match res.nbar_ss() {
                    Some(n) => ScanCell::Cooling(n),
                    None => ScanCell::NotCooling,
                },
                Err(e) => ScanCell::Failed(e),
            }
        })
        .collect();

    let values = cells.chunks(omega_axis.len()).map(|row| row.to_vec()).collect();
    Ok(ScanGrid {
        omega_axis: omega_axis.to_vec(),
        rabi_axis: rabi_axis.to_vec(),
        values,
        probe_detuning: rows.iter().map(|r| r.0).collect(),
        optimal_delta0: rows.iter().map(|r| r.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_sidebands_do_not_cool() {
        let r = CoolingResult::from_populations(0.2, 0.01, 0.03, 0.03);
        assert_eq!(r.status, CoolingStatus::NotCooling);
        assert_eq!(r.nbar_ss(), None);
        let r = CoolingResult::from_populations(0.2, 0.0, 0.01, 0.03);
        assert_abs_diff_eq!(r.nbar, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mode_frequency_must_be_positive() {
        assert!(phonon_limit(&TripodParams::design_point(), 0.0).is_err());
        assert!(phonon_limit(&TripodParams::design_point(), -0.1).is_err());
    }

    #[test]
    fn resonant_design_gives_small_nbar() {
        let p = TripodParams::design_point();
        let ds = crate::atom_model::dressed_states(&p).unwrap();
        let r = phonon_limit(&p, ds.splitting()).unwrap();
        assert!(r.is_cooling());
        assert!(r.nbar < 0.2, "n̄ = {}", r.nbar);
    }

    #[test]
    fn dynamics_fixed_point_and_limit() {
        let p = TripodParams::design_point();
        let limit = phonon_limit(&p, 0.22).unwrap();
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 1e-4).collect();
        let d = cooling_dynamics(&p, 0.044, 0.22, limit.nbar, &t).unwrap();
        for n in &d.nbar {
            assert_abs_diff_eq!(*n, limit.nbar, epsilon = 1e-14);
        }
        let d = cooling_dynamics(&p, 0.044, 0.22, 5.0, &[0.0, 1.0]).unwrap();
        assert_eq!(d.nbar[0], 5.0);
        assert_abs_diff_eq!(d.nbar[1], limit.nbar, epsilon = 1e-9);
        assert!(cooling_dynamics(&p, 0.044, 0.22, -1.0, &t).is_err());
    }

    #[test]
    fn single_point_window() {
        let p = TripodParams::design_point();
        let opt = optimize_probe_detuning(&p, 0.22, (4.47, 4.47), 10).unwrap();
        assert_eq!(opt.delta_0, 4.47);
        assert_abs_diff_eq!(opt.nbar, phonon_limit(&p, 0.22).unwrap().nbar, epsilon = 1e-15);
    }

    #[test]
    fn design_valley_shape() {
        let p = TripodParams::design_point();
        let (w, n) = crate::grid::linspace(0.05, 0.3, 26)
            .into_iter()
            .map(|w| (w, phonon_limit(&p, w).unwrap().nbar))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(n < 0.2, "n̄_min = {n}");
        assert!((0.15..=0.3).contains(&w), "ω_min = {w}");
    }

    #[test]
    fn optimizer_is_resolution_independent() {
        let p = TripodParams::design_point();
        let a = optimize_probe_detuning(&p, 0.22, (4.37, 4.77), 41).unwrap();
        let b = optimize_probe_detuning(&p, 0.22, (4.37, 4.77), 82).unwrap();
        assert!((a.delta_0 - b.delta_0).abs() < 1e-3);
        for d in [-0.02, -0.01, 0.01, 0.02] {
            let off = phonon_limit(&p.with_delta_0(a.delta_0 + d), 0.22).unwrap().nbar;
            assert!(off > a.nbar);
        }
        let mid = phonon_limit(&p.with_delta_0(a.delta_0 + 0.01), 0.22).unwrap().nbar;
        let far = phonon_limit(&p.with_delta_0(a.delta_0 + 0.02), 0.22).unwrap().nbar;
        assert!(far > mid);
    }

    #[test]
    fn opposite_sigma_plus_detuning_cools_better() {
        let base = TripodParams::design_point();
        let alt = TripodParams { delta_m1: -4.47, ..base };
        let omegas = crate::grid::linspace(0.05, 0.35, 6);
        let rabis = crate::grid::linspace(1.0, 3.0, 6);
        let fixed = |ratio| ScanSettings { sigma_plus: SigmaPlus::Proportional(ratio), ..ScanSettings::fixed_probe() };
        let g_base = scan_cooling(&base, &omegas, &rabis, &fixed(0.35)).unwrap();
        let g_alt = scan_cooling(&alt, &omegas, &rabis, &fixed(1.0)).unwrap();
        let better = g_base
            .values
            .iter()
            .flatten()
            .zip(g_alt.values.iter().flatten())
            .filter(|(b, a)| a.nbar().unwrap_or(f64::INFINITY) < b.nbar().unwrap_or(f64::INFINITY))
            .count();
        assert!(better * 2 > omegas.len() * rabis.len(), "{better} cells");
    }

    #[test]
    fn dynamics_follow_closed_form() {
        let p = TripodParams::design_point();
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 2e-5).collect();
        let d = cooling_dynamics(&p, 0.044, 0.22, 3.0, &t).unwrap();
        for (ti, n) in t.iter().zip(&d.nbar) {
            let exact = d.limit.nbar + (3.0 - d.limit.nbar) * (-d.rate * ti).exp();
            assert!((n - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn single_cell_scan_matches_phonon_limit() {
        let p = TripodParams::design_point();
        let g = scan_cooling(&p, &[0.2], &[2.0], &ScanSettings::fixed_probe()).unwrap();
        let direct = phonon_limit(&p, 0.2).unwrap();
        assert_eq!(g.values[0][0], ScanCell::Cooling(direct.nbar));
        assert!(scan_cooling(&p, &[], &[2.0], &ScanSettings::fixed_probe()).is_err());
    }
}
