//! Linear Coulomb crystals: equilibrium positions, transverse normal modes
//! and Lamb-Dicke factors.
//!
//! Positions are solved in units of ℓ = (e²/4πε₀Mω_ax²)^{1/3}, where the
//! axial equilibrium condition reads u_i − Σ_{j≠i} sgn(u_i−u_j)/(u_i−u_j)² = 0.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::units;

const POSITION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    pub n_ions: usize,
    /// Axial trap frequency, rad/s.
    pub omega_ax: f64,
    /// Transverse α trap frequency, rad/s.
    pub omega_alpha: f64,
    /// Transverse β trap frequency, rad/s.
    pub omega_beta: f64,
    /// kg.
    pub ion_mass: f64,
    /// Angle between the effective wavevector and the β axis, radians.
    pub beam_angle: f64,
    pub wavelength_eit: f64,
    pub wavelength_raman: f64,
}

impl Default for TrapConfig {
    fn default() -> Self {
        TrapConfig {
            n_ions: 1,
            omega_ax: units::mhz_to_angular(0.3),
            omega_alpha: units::mhz_to_angular(4.45),
            omega_beta: units::mhz_to_angular(4.30),
            ion_mass: units::YB171_MASS,
            beam_angle: 40f64.to_radians(),
            wavelength_eit: units::WAVELENGTH_EIT,
            wavelength_raman: units::WAVELENGTH_RAMAN,
        }
    }
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_ions == 0 {
            return Err(Error::invalid("n_ions", "need at least one ion"));
        }
        for (name, v) in [
            ("omega_ax", self.omega_ax),
            ("omega_alpha", self.omega_alpha),
            ("omega_beta", self.omega_beta),
            ("ion_mass", self.ion_mass),
            ("wavelength_eit", self.wavelength_eit),
            ("wavelength_raman", self.wavelength_raman),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if !self.beam_angle.is_finite() {
            return Err(Error::invalid("beam_angle", "must be finite"));
        }
        if !(self.omega_alpha > self.omega_beta && self.omega_beta > self.omega_ax) {
            return Err(Error::invalid(
                "trap frequencies",
                format!(
                    "need ω_α > ω_β > ω_ax, got {} > {} > {}",
                    self.omega_alpha, self.omega_beta, self.omega_ax
                ),
            ));
        }
        Ok(())
    }

    /// ℓ in metres.
    pub fn length_scale(&self) -> f64 {
        let e2 = units::ELEMENTARY_CHARGE * units::ELEMENTARY_CHARGE;
        (e2 / (4.0 * std::f64::consts::PI * units::EPSILON_0 * self.ion_mass * self.omega_ax * self.omega_ax)).cbrt()
    }
}

fn coulomb_energy(u: &[f64]) -> f64 {
    let mut e = 0.5 * u.iter().map(|x| x * x).sum::<f64>();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let d = (u[i] - u[j]).abs();
            if d == 0.0 {
                return f64::INFINITY;
            }
            e += 1.0 / d;
        }
    }
    e
}

fn ordered(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[0] < w[1])
}

/// Dimensionless equilibrium positions, ascending, for `n` ions.
pub fn scaled_equilibrium(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n_ions", "need at least one ion"));
    }
    if n == 1 {
        return Ok(vec![0.0]);
    }
    // Uniform seed with roughly the right central spacing.
    let spacing = 2.0 * (n as f64).powf(-0.56);
    let half = 0.5 * spacing * (n - 1) as f64;
    let mut u: Vec<f64> = (0..n).map(|i| -half + spacing * i as f64).collect();

    let mut converged = false;
    for _ in 0..200 {
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            g[i] = u[i];
            h[(i, i)] = 1.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = u[i] - u[j];
                let ad = d.abs();
                g[i] -= d.signum() / (ad * ad);
                let c = 2.0 / (ad * ad * ad);
                h[(i, i)] += c;
                h[(i, j)] -= c;
            }
        }
        if g.amax() < POSITION_TOLERANCE {
            converged = true;
            break;
        }
        let step = h.cholesky().ok_or(Error::NoConvergence { what: "equilibrium positions" })?.solve(&(-&g));
        let e0 = coulomb_energy(&u);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + alpha * b).collect();
            if ordered(&trial) && coulomb_energy(&trial) <= e0 + 1e-14 * e0.abs() {
                u = trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                return Err(Error::NoConvergence { what: "equilibrium positions" });
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "equilibrium positions" });
    }
    // Enforce the reflection symmetry the exact solution has.
    let sym: Vec<f64> = (0..n).map(|i| 0.5 * (u[i] - u[n - 1 - i])).collect();
    Ok(sym)
}

/// Equilibrium positions in metres, ascending.
pub fn equilibrium_positions(cfg: &TrapConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let l = cfg.length_scale();
    Ok(scaled_equilibrium(cfg.n_ions)?.into_iter().map(|u| u * l).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransverseAxis {
    Alpha,
    Beta,
}

/// Normal modes of one transverse direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBranch {
    pub axis: TransverseAxis,
    /// Single-ion trap frequency of this direction, rad/s.
    pub trap_freq: f64,
    /// Mode frequencies, rad/s, descending (COM first).
    pub frequencies: Vec<f64>,
    /// Column m is the normalised participation vector b_{im} of mode m.
    pub eigenvectors: DMatrix<f64>,
    /// Trace of the Hessian, rad²/s²; equals Σ ω_m².
    pub hessian_trace: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    /// Scaled equilibrium positions.
    pub positions: Vec<f64>,
    pub alpha: ModeBranch,
    pub beta: ModeBranch,
}

impl ModeSpectrum {
    pub fn n_ions(&self) -> usize {
        self.positions.len()
    }

    pub fn branches(&self) -> [&ModeBranch; 2] {
        [&self.alpha, &self.beta]
    }

    /// All 2N mode frequencies, α first.
    pub fn all_frequencies(&self) -> Vec<f64> {
        self.alpha.frequencies.iter().chain(&self.beta.frequencies).copied().collect()
    }
}

/// Transverse Hessian in units of ω_ax².
fn transverse_hessian(u: &[f64], ratio_sq: f64) -> DMatrix<f64> {
    let n = u.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            ratio_sq - (0..n).filter(|&k| k != i).map(|k| (u[i] - u[k]).abs().powi(-3)).sum::<f64>()
        } else {
            (u[i] - u[j]).abs().powi(-3)
        }
    })
}

/// Eigenvalues (descending) and eigenvectors of the transverse Hessian.
fn hessian_modes(u: &[f64], ratio_sq: f64) -> (Vec<f64>, DMatrix<f64>, f64) {
    let h = transverse_hessian(u, ratio_sq);
    let trace = h.trace();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = DMatrix::zeros(u.len(), u.len());
    for (m, &k) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(k).into_owned();
        // Sign convention: largest component positive.
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col = -col;
        }
        vecs.set_column(m, &col);
    }
    (values, vecs, trace)
}

fn branch(u: &[f64], cfg: &TrapConfig, axis: TransverseAxis) -> Result<ModeBranch> {
    let trap_freq = match axis {
        TransverseAxis::Alpha => cfg.omega_alpha,
        TransverseAxis::Beta => cfg.omega_beta,
    };
    let ratio_sq = (trap_freq / cfg.omega_ax).powi(2);
    let (lambdas, eigenvectors, trace) = hessian_modes(u, ratio_sq);
    let w2 = cfg.omega_ax * cfg.omega_ax;
    if let Some(&worst) = lambdas.last() {
        if worst <= 0.0 {
            return Err(Error::UnstableChain { value: worst * w2 });
        }
    }
    Ok(ModeBranch {
        axis,
        trap_freq,
        frequencies: lambdas.iter().map(|l| cfg.omega_ax * l.sqrt()).collect(),
        eigenvectors,
        hessian_trace: trace * w2,
    })
}

/// Transverse normal modes of both directions.
pub fn transverse_modes(cfg: &TrapConfig) -> Result<ModeSpectrum> {
    cfg.validate()?;
    let u = scaled_equilibrium(cfg.n_ions)?;
    let alpha = branch(&u, cfg, TransverseAxis::Alpha)?;
    let beta = branch(&u, cfg, TransverseAxis::Beta)?;
    Ok(ModeSpectrum { positions: u, alpha, beta })
}

/// Lowest β-mode ω² over ω_β²; ≤ 0 means the linear chain has buckled.
pub fn zigzag_margin(cfg: &TrapConfig) -> Result<f64> {
    cfg.validate()?;
    let u = scaled_equilibrium(cfg.n_ions)?;
    let ratio_sq = (cfg.omega_beta / cfg.omega_ax).powi(2);
    let (lambdas, _, _) = hessian_modes(&u, ratio_sq);
    Ok(lambdas.last().copied().unwrap_or(ratio_sq) / ratio_sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beam {
    /// Single-photon EIT wavevector at the cooling wavelength.
    Eit,
    /// Counter-propagating Raman pair, Δk = 2k.
    Raman,
}

impl Beam {
    pub fn wavevector(self, cfg: &TrapConfig) -> f64 {
        match self {
            Beam::Eit => units::wavenumber(cfg.wavelength_eit),
            Beam::Raman => 2.0 * units::wavenumber(cfg.wavelength_raman),
        }
    }
}

/// η_{im} = k·proj·√(ħ/2Mω_m)·b_{im} for [α, β]; rows are ions, columns modes.
///
/// The effective wavevector makes angle `beam_angle` with β, so it projects
/// by sin on α and cos on β.
pub fn lamb_dicke_factors(spectrum: &ModeSpectrum, cfg: &TrapConfig, beam: Beam) -> [DMatrix<f64>; 2] {
    let k = beam.wavevector(cfg);
    let one = |b: &ModeBranch, proj: f64| {
        let mut eta = b.eigenvectors.clone();
        for (m, w) in b.frequencies.iter().enumerate() {
            let scale = k * proj * (units::HBAR / (2.0 * cfg.ion_mass * w)).sqrt();
            eta.column_mut(m).scale_mut(scale);
        }
        eta
    };
    [one(&spectrum.alpha, cfg.beam_angle.sin()), one(&spectrum.beta, cfg.beam_angle.cos())]
}

/// Lamb-Dicke factor of a single ion with full projection: k·√(ħ/2Mω).
pub fn single_ion_eta(wavevector: f64, mass: f64, omega: f64) -> f64 {
    wavevector * (units::HBAR / (2.0 * mass * omega)).sqrt()
}
