//! Thermometry and calibration: sideband ratios, synthetic sideband spectra,
//! AC-Stark Rabi calibration, Debye-Waller carrier flopping and the two
//! least-squares fits used on measured data.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fit::{levenberg_marquardt, LmOptions};
use crate::ion_chain::{lamb_dicke_factors, Beam, ModeSpectrum, TrapConfig};

/// n̄ = R/(1 − R) for a red/blue sideband ratio R ∈ [0, 1).
pub fn ratio_to_nbar(r: f64) -> Result<f64> {
    if !(r.is_finite() && (0.0..1.0).contains(&r)) {
        return Err(Error::RatioOutOfRange(r));
    }
    Ok(r / (1.0 - r))
}

/// R = n̄/(n̄ + 1).
pub fn nbar_to_ratio(nbar: f64) -> Result<f64> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::invalid("nbar", format!("must be ≥ 0, got {nbar}")));
    }
    Ok(nbar / (nbar + 1.0))
}

/// Measured red and blue sideband excitation of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandPair {
    /// rad/s.
    pub mode_freq: f64,
    pub p_lower: f64,
    pub p_upper: f64,
    pub sigma_lower: f64,
    pub sigma_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thermometry {
    pub ratio: f64,
    pub nbar: f64,
    pub nbar_err: f64,
}

impl SidebandPair {
    /// n̄ with first-order error propagation from the peak uncertainties.
    pub fn thermometry(&self) -> Result<Thermometry> {
        if !(self.p_upper > 0.0) {
            return Err(Error::invalid("p_upper", "upper sideband excitation must be > 0"));
        }
        let r = self.p_lower / self.p_upper;
        let nbar = ratio_to_nbar(r)?;
        let pu = self.p_upper;
        let sigma_r = ((self.sigma_lower / pu).powi(2) + (self.p_lower * self.sigma_upper / (pu * pu)).powi(2)).sqrt();
        Ok(Thermometry { ratio: r, nbar, nbar_err: sigma_r / (1.0 - r).powi(2) })
    }
}

/// Probe settings for the synthetic sideband spectrum. All in SI (rad/s, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub rabi: f64,
    pub duration: f64,
    /// Gaussian σ of each line.
    pub linewidth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSpectrum {
    /// Offsets from the carrier, rad/s, as requested.
    pub detunings: Vec<f64>,
    /// Excitation around −ω_m (∝ n̄_m).
    pub lower: Vec<f64>,
    /// Excitation around +ω_m (∝ n̄_m + 1).
    pub upper: Vec<f64>,
    /// Per-mode weak-probe strength (η̄_m Ωτ/2)², α modes first.
    pub strengths: Vec<f64>,
}

/// Weak-probe sideband spectrum of all 2N transverse modes with the Raman
/// beam. `nbars` lists n̄ per mode, α modes first, each branch in the order
/// of `spectrum`.
pub fn sideband_spectrum_model(
    spectrum: &ModeSpectrum,
    cfg: &TrapConfig,
    nbars: &[f64],
    probe: &ProbeSettings,
    detunings: &[f64],
) -> Result<SidebandSpectrum> {
    let freqs = spectrum.all_frequencies();
    if nbars.len() != freqs.len() {
        return Err(Error::invalid("nbars", format!("expected {} values, got {}", freqs.len(), nbars.len())));
    }
    if nbars.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(Error::invalid("nbars", "occupations must be ≥ 0"));
    }
    if !(probe.linewidth > 0.0) {
        return Err(Error::invalid("linewidth", "must be > 0"));
    }
    let etas = lamb_dicke_factors(spectrum, cfg, Beam::Raman);
    let n_ions = spectrum.n_ions() as f64;
    let strengths: Vec<f64> = etas
        .iter()
        .flat_map(|eta| {
            (0..eta.ncols()).map(move |m| {
                let mean_sq = eta.column(m).iter().map(|e| e * e).sum::<f64>() / n_ions;
                mean_sq * (0.5 * probe.rabi * probe.duration).powi(2)
            })
        })
        .collect();
    let peak_max = strengths.iter().zip(nbars).map(|(s, n)| s * (n + 1.0)).fold(0.0, f64::max);
    if peak_max > 0.5 {
        log::warn!("sideband probe is not weak: peak excitation {peak_max:.2}");
    }
    let line = |x: f64| (-0.5 * (x / probe.linewidth).powi(2)).exp();
    let mut lower = vec![0.0; detunings.len()];
    let mut upper = vec![0.0; detunings.len()];
    for ((w, s), n) in freqs.iter().zip(&strengths).zip(nbars) {
        for (k, d) in detunings.iter().enumerate() {
            lower[k] += s * n * line(d + w);
            upper[k] += s * (n + 1.0) * line(d - w);
        }
    }
    for v in lower.iter_mut().chain(upper.iter_mut()) {
        *v = v.min(1.0);
    }
    Ok(SidebandSpectrum { detunings: detunings.to_vec(), lower, upper, strengths })
}

/// Rabi frequency from a measured AC-Stark shift: Ω = 2√(δ_ac·Δ).
pub fn ac_stark_to_rabi(delta_ac: f64, detuning: f64) -> Result<f64> {
    if !(detuning.is_finite() && detuning != 0.0) {
        return Err(Error::invalid("detuning", "must be finite and nonzero"));
    }
    if !delta_ac.is_finite() {
        return Err(Error::invalid("delta_ac", "must be finite"));
    }
    if delta_ac == 0.0 {
        return Ok(0.0);
    }
    if delta_ac.signum() != detuning.signum() {
        return Err(Error::InconsistentSigns);
    }
    Ok(2.0 * (delta_ac * detuning).sqrt())
}

/// δ_ac = Ω²/4Δ.
pub fn rabi_to_ac_stark(rabi: f64, detuning: f64) -> Result<f64> {
    if !(detuning.is_finite() && detuning != 0.0) {
        return Err(Error::invalid("detuning", "must be finite and nonzero"));
    }
    Ok(rabi * rabi / (4.0 * detuning))
}

fn check_modes(etas: &[f64], nbars: &[f64]) -> Result<()> {
    if etas.len() != nbars.len() {
        return Err(Error::invalid("etas", format!("{} factors for {} occupations", etas.len(), nbars.len())));
    }
    if nbars.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(Error::invalid("nbars", "occupations must be ≥ 0"));
    }
    if etas.iter().any(|e| !e.is_finite()) {
        return Err(Error::invalid("etas", "must be finite"));
    }
    Ok(())
}

/// Ω̄ = Ω·exp[−Σ η_m²(n̄_m + ½)].
pub fn debye_waller_rabi(base: f64, etas: &[f64], nbars: &[f64]) -> Result<f64> {
    check_modes(etas, nbars)?;
    let s: f64 = etas.iter().zip(nbars).map(|(e, n)| e * e * (n + 0.5)).sum();
    let worst = etas.iter().zip(nbars).map(|(e, n)| e * e * (2.0 * n + 1.0)).fold(0.0, f64::max);
    if worst > 0.1 {
        log::warn!("Lamb-Dicke regime not satisfied: max η²(2n̄+1) = {worst:.3}");
    }
    Ok(base * (-s).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContrastModel {
    /// Π_m [1 + (η_m² n̄_m Ω̄t)²]^{−1/2}.
    Exact,
    /// 1 − ½(Ω̄t)² Σ η_m⁴ n̄_m², valid at short times.
    Quadratic,
}

/// Envelope C(t) of the carrier flop at effective Rabi frequency `rabi`.
pub fn flop_contrast(rabi: f64, t: f64, etas: &[f64], nbars: &[f64], model: ContrastModel) -> f64 {
    match model {
        ContrastModel::Exact => etas
            .iter()
            .zip(nbars)
            .map(|(e, n)| (1.0 + (e * e * n * rabi * t).powi(2)).powf(-0.5))
            .product(),
        ContrastModel::Quadratic => {
            let s: f64 = etas.iter().zip(nbars).map(|(e, n)| (e * e * n).powi(2)).sum();
            (1.0 - 0.5 * (rabi * t).powi(2) * s).clamp(-1.0, 1.0)
        }
    }
}

/// Thermally dephased carrier flop P↑(t) = [1 − C(t) cos(Ω̄t)]/2.
pub fn carrier_flop(
    base: f64,
    etas: &[f64],
    nbars: &[f64],
    t_grid: &[f64],
    model: ContrastModel,
) -> Result<Vec<f64>> {
    let rabi = debye_waller_rabi(base, etas, nbars)?;
    Ok(t_grid
        .iter()
        .map(|&t| 0.5 * (1.0 - flop_contrast(rabi, t, etas, nbars, model) * (rabi * t).cos()))
        .collect())
}

/// P(t) = [1 − (1 − A(Bt)²) cos(Bt)]/2 + P₀.
pub fn rabi_model(a: f64, b: f64, p0: f64, t: f64) -> f64 {
    let bt = b * t;
    0.5 * (1.0 - (1.0 - a * bt * bt) * bt.cos()) + p0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiFit {
    /// Dephasing coefficient A = ½ Σ η⁴n̄².
    pub a: f64,
    /// Effective Rabi frequency B = Ω̄, inverse time units of the input.
    pub b: f64,
    pub p0: f64,
    pub a_err: f64,
    pub b_err: f64,
    pub p0_err: f64,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingFit {
    pub nbar0: f64,
    pub nbar_ss: f64,
    /// None when the data carry no decay (constant n̄).
    pub tau: Option<f64>,
    /// (n̄₀ − n̄_ss)/τ.
    pub initial_rate: Option<f64>,
    pub degenerate: bool,
    pub residual_rms: f64,
}

fn check_data(t: &[f64], y: &[f64], sigma: Option<&[f64]>, min: usize) -> Result<Vec<f64>> {
    if t.len() != y.len() {
        return Err(Error::invalid("data", format!("{} times but {} values", t.len(), y.len())));
    }
    if t.len() < min {
        return Err(Error::InsufficientData(format!("need at least {min} samples, got {}", t.len())));
    }
    if t.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("data", "non-finite sample"));
    }
    match sigma {
        None => Ok(vec![1.0; t.len()]),
        Some(s) if s.len() != t.len() => Err(Error::invalid("sigma", "length differs from data")),
        Some(s) if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) => {
            Err(Error::invalid("sigma", "uncertainties must be > 0"))
        }
        Some(s) => Ok(s.iter().map(|v| 1.0 / v).collect()),
    }
}

/// Frequency with the largest periodogram power of the mean-removed data.
fn periodogram_peak(t: &[f64], y: &[f64]) -> Option<f64> {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let (tmin, tmax) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = tmax - tmin;
    let mut sorted = t.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min_dt = sorted.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    if !(span > 0.0 && min_dt.is_finite()) {
        return None;
    }
    let (lo, hi) = (PI / (2.0 * span), PI / min_dt);
    let n = 4000;
    (0..n)
        .map(|k| {
            let w = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let (mut c, mut s) = (0.0, 0.0);
            for (ti, yi) in t.iter().zip(y) {
                c += (yi - mean) * (w * ti).cos();
                s += (yi - mean) * (w * ti).sin();
            }
            (w, c * c + s * s)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(w, _)| w)
}

fn parameter_errors(cov: &Option<nalgebra::DMatrix<f64>>, cost: f64, m: usize, n: usize, weighted: bool) -> Vec<f64> {
    let scale = if weighted || m <= n { 1.0 } else { 2.0 * cost / (m - n) as f64 };
    match cov {
        Some(c) => (0..n).map(|k| (c[(k, k)] * scale).max(0.0).sqrt()).collect(),
        None => vec![f64::NAN; n],
    }
}

/// Fit [`rabi_model`] to carrier-flop data. The starting frequency is the
/// periodogram peak.
pub fn fit_rabi(t: &[f64], p: &[f64], sigma: Option<&[f64]>) -> Result<RabiFit> {
    let w = check_data(t, p, sigma, 8)?;
    let b0 = periodogram_peak(t, p).ok_or_else(|| Error::InsufficientData("no time span".into()))?;
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    let resid = |x: &[f64]| -> Vec<f64> {
        t.iter().zip(p).zip(&w).map(|((ti, pi), wi)| wi * (rabi_model(x[0], x[1], x[2], *ti) - pi)).collect()
    };
    let opts = LmOptions::default();
    let mut best = None;
    for f in [1.0, 0.97, 1.03, 0.9, 1.1, 0.8, 1.25] {
        if let Ok(rep) = levenberg_marquardt(resid, &[0.0, b0 * f, mean - 0.5], &opts) {
            if best.as_ref().is_none_or(|b: &crate::fit::LmReport| rep.cost < b.cost) {
                best = Some(rep);
            }
        }
    }
    let rep = best.ok_or_else(|| Error::FitDiverged("no starting point converged".into()))?;
    let errs = parameter_errors(&rep.covariance, rep.cost, t.len(), 3, sigma.is_some());
    let mut b = rep.params[1];
    if b < 0.0 {
        // The model is even in B.
        b = -b;
    }
    Ok(RabiFit {
        a: rep.params[0],
        b,
        p0: rep.params[2],
        a_err: errs[0],
        b_err: errs[1],
        p0_err: errs[2],
        residual_rms: (2.0 * rep.cost / t.len() as f64).sqrt(),
    })
}

/// Fit n̄(t) = n̄_ss + (n̄₀ − n̄_ss)e^{−t/τ}.
pub fn fit_cooling_curve(t: &[f64], nbar: &[f64], sigma: Option<&[f64]>) -> Result<CoolingFit> {
    let w = check_data(t, nbar, sigma, 4)?;
    let (ymin, ymax) = nbar.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let scale = ymax.abs().max(ymin.abs()).max(1e-300);
    if (ymax - ymin) <= 1e-12 * scale {
        let mean = nbar.iter().sum::<f64>() / nbar.len() as f64;
        return Ok(CoolingFit {
            nbar0: mean,
            nbar_ss: mean,
            tau: None,
            initial_rate: None,
            degenerate: true,
            residual_rms: 0.0,
        });
    }
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[a].total_cmp(&t[b]));
    let (first, last) = (nbar[order[0]], nbar[*order.last().unwrap()]);
    let span = t[*order.last().unwrap()] - t[order[0]];
    let tau0 = order
        .iter()
        .find(|&&k| ((nbar[k] - last) / (first - last)) < (-1f64).exp())
        .map(|&k| (t[k] - t[order[0]]).max(span / 20.0))
        .unwrap_or(span / 3.0)
        .max(f64::MIN_POSITIVE);
    let resid = |x: &[f64]| -> Vec<f64> {
        t.iter()
            .zip(nbar)
            .zip(&w)
            .map(|((ti, ni), wi)| wi * (x[1] + (x[0] - x[1]) * (-ti / x[2]).exp() - ni))
            .collect()
    };
    let rep = levenberg_marquardt(resid, &[first, last, tau0], &LmOptions::default())?;
    let [n0, nss, tau] = [rep.params[0], rep.params[1], rep.params[2]];
    if !(tau > 0.0) {
        return Err(Error::FitDiverged(format!("time constant {tau} is not positive")));
    }
    Ok(CoolingFit {
        nbar0: n0,
        nbar_ss: nss,
        tau: Some(tau),
        initial_rate: Some((n0 - nss) / tau),
        degenerate: false,
        residual_rms: (2.0 * rep.cost / t.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion_chain::transverse_modes;
    use crate::units::mhz_to_angular;
    use approx::assert_relative_eq;

    #[test]
    fn ratio_round_trip() {
        assert_eq!(ratio_to_nbar(0.5).unwrap(), 1.0);
        assert_eq!(ratio_to_nbar(0.0).unwrap(), 0.0);
        assert!(matches!(ratio_to_nbar(1.0), Err(Error::RatioOutOfRange(_))));
        assert!(ratio_to_nbar(-0.1).is_err());
        for n in [0.0, 0.05, 1.0, 37.5] {
            assert_relative_eq!(ratio_to_nbar(nbar_to_ratio(n).unwrap()).unwrap(), n, max_relative = 1e-12);
        }
    }

    #[test]
    fn thermometry_error_propagation() {
        let pair = SidebandPair { mode_freq: 1.0, p_lower: 0.1, p_upper: 0.2, sigma_lower: 0.01, sigma_upper: 0.0 };
        let th = pair.thermometry().unwrap();
        assert_eq!(th.nbar, 1.0);
        // dn/dR = 1/(1−R)² = 4, σ_R = 0.05.
        assert_relative_eq!(th.nbar_err, 0.2, max_relative = 1e-12);
    }

    #[test]
    fn ac_stark_calibration() {
        assert_relative_eq!(ac_stark_to_rabi(0.25, 4.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(ac_stark_to_rabi(-0.25, -4.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(ac_stark_to_rabi(0.0, 4.0).unwrap(), 0.0);
        assert!(matches!(ac_stark_to_rabi(0.25, -4.0), Err(Error::InconsistentSigns)));
        assert!(ac_stark_to_rabi(0.25, 0.0).is_err());
        let d = rabi_to_ac_stark(3.0, 7.0).unwrap();
        assert_relative_eq!(ac_stark_to_rabi(d, 7.0).unwrap(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn debye_waller_limits() {
        assert_eq!(debye_waller_rabi(2.0, &[], &[]).unwrap(), 2.0);
        assert_eq!(debye_waller_rabi(2.0, &[0.0, 0.0], &[3.0, 1.0]).unwrap(), 2.0);
        let r = debye_waller_rabi(1.0, &[0.1], &[0.0]).unwrap();
        assert_relative_eq!(r, (-0.005f64).exp(), max_relative = 1e-15);
        assert!(debye_waller_rabi(1.0, &[0.1], &[]).is_err());
    }

    #[test]
    fn flop_without_coupling_is_pure_cosine() {
        let t = [0.0, 0.3, 1.1, 2.0];
        let p = carrier_flop(1.5, &[0.0], &[2.0], &t, ContrastModel::Exact).unwrap();
        for (ti, pi) in t.iter().zip(&p) {
            assert_relative_eq!(*pi, 0.5 * (1.0 - (1.5 * ti).cos()), epsilon = 1e-15);
        }
    }

    #[test]
    fn rabi_fit_recovers_parameters() {
        let (a, b, p0) = (0.012, 2.3, 0.01);
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let p: Vec<f64> = t.iter().map(|&t| rabi_model(a, b, p0, t)).collect();
        let fit = fit_rabi(&t, &p, None).unwrap();
        assert_relative_eq!(fit.a, a, max_relative = 1e-6);
        assert_relative_eq!(fit.b, b, max_relative = 1e-6);
        assert_relative_eq!(fit.p0, p0, max_relative = 1e-6);
        assert!(matches!(fit_rabi(&t[..5], &p[..5], None), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn cooling_fit_round_trip_and_degenerate() {
        let t: Vec<f64> = (0..25).map(|i| i as f64 * 20e-6).collect();
        let n: Vec<f64> = t.iter().map(|&t| 0.08 + (7.0 - 0.08) * (-t / 48e-6).exp()).collect();
        let fit = fit_cooling_curve(&t, &n, None).unwrap();
        assert_relative_eq!(fit.tau.unwrap(), 48e-6, max_relative = 1e-8);
        assert_relative_eq!(fit.nbar_ss, 0.08, max_relative = 1e-8);
        assert_relative_eq!(fit.nbar0, 7.0, max_relative = 1e-8);
        let flat = fit_cooling_curve(&t, &vec![0.3; t.len()], None).unwrap();
        assert!(flat.degenerate);
        assert_eq!(flat.tau, None);
    }

    #[test]
    fn five_ion_spectrum_resolves_all_modes() {
        let cfg = TrapConfig { n_ions: 5, ..Default::default() };
        let s = transverse_modes(&cfg).unwrap();
        let probe = ProbeSettings { rabi: mhz_to_angular(0.05), duration: 20e-6, linewidth: mhz_to_angular(0.003) };
        let freqs = s.all_frequencies();
        let lo = freqs.iter().copied().fold(f64::INFINITY, f64::min) - mhz_to_angular(0.05);
        let hi = freqs.iter().copied().fold(0.0, f64::max) + mhz_to_angular(0.05);
        let grid: Vec<f64> = crate::grid::linspace(lo, hi, 20001);
        let spec = sideband_spectrum_model(&s, &cfg, &[0.5; 10], &probe, &grid).unwrap();
        let floor = 0.05 * spec.upper.iter().copied().fold(0.0, f64::max);
        let peaks = spec.upper.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2] && w[1] > floor).count();
        assert_eq!(peaks, 10);
        assert!(spec.strengths.iter().all(|s| *s > 0.0 && s * 1.5 < 0.5));
    }
}
