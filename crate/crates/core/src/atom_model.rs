//! Four-level tripod atom driven by the EIT pump and probe beams.
//!
//! Basis order is fixed everywhere in this crate as
//! `(|−1⟩, |0⟩, |1⟩, |e⟩)`, see [`basis`]. All energies, detunings and Rabi
//! frequencies are in units of the natural linewidth Γ.

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};
use crate::units;
use crate::C64;

/// Indices of the bare states in the four-level basis.
pub mod basis {
    pub const MINUS_ONE: usize = 0;
    pub const ZERO: usize = 1;
    pub const PLUS_ONE: usize = 2;
    pub const EXCITED: usize = 3;
    pub const DIM: usize = 4;
    pub const GROUND: [usize; 3] = [MINUS_ONE, ZERO, PLUS_ONE];
}

/// Default tolerance on |Δ₀ − Δ₁| for the analytic dressed states.
pub const TWO_PHOTON_TOLERANCE: f64 = 1e-6;

/// Laser and atom configuration of the tripod.
///
/// Rabi frequencies and detunings are in units of Γ; detunings are positive
/// blue of the respective transition and appear on the diagonal of the
/// ground states. `gamma` and `delta_b` are angular frequencies (rad/s) and
/// only enter conversions to laboratory units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripodParams {
    /// σ⁻ pump coupling |1⟩ ↔ |e⟩.
    pub omega_1: f64,
    /// π probe coupling |0⟩ ↔ |e⟩.
    pub omega_0: f64,
    /// σ⁺ component coupling |−1⟩ ↔ |e⟩.
    pub omega_m1: f64,
    pub delta_1: f64,
    pub delta_0: f64,
    pub delta_m1: f64,
    /// Natural linewidth Γ (rad/s).
    pub gamma: f64,
    /// Zeeman splitting Δ_B of the |±1⟩ states from |0⟩ (rad/s).
    pub delta_b: f64,
}

impl Default for TripodParams {
    fn default() -> Self {
        TripodParams {
            omega_1: 0.0,
            omega_0: 0.0,
            omega_m1: 0.0,
            delta_1: 0.0,
            delta_0: 0.0,
            delta_m1: 0.0,
            gamma: units::default_gamma(),
            delta_b: units::mhz_to_angular(units::DEFAULT_ZEEMAN_MHZ),
        }
    }
}

impl TripodParams {
    /// Design point of the cooling scheme: Ω₁ = 2.0, Ω₀ = 0.35, Ω₋₁ = 0.7,
    /// Δ₀ = Δ₁ = 4.47, Δ₋₁ = 3.69.
    pub fn design_point() -> Self {
        TripodParams {
            omega_1: 2.0,
            omega_0: 0.35,
            omega_m1: 0.7,
            delta_1: 4.47,
            delta_0: 4.47,
            delta_m1: 3.69,
            ..Default::default()
        }
    }

    /// Settings of the single-ion cooling run: Ω₁ = 2.0, Ω₀ = 0.76,
    /// Ω₋₁ = 0.8, Δ₁ = 4.5, Δ₀ = 4.54, Δ₋₁ = 3.69.
    pub fn single_ion_run() -> Self {
        TripodParams {
            omega_1: 2.0,
            omega_0: 0.76,
            omega_m1: 0.8,
            delta_1: 4.5,
            delta_0: 4.54,
            delta_m1: 3.69,
            ..Default::default()
        }
    }

    pub fn with_delta_0(mut self, delta_0: f64) -> Self {
        self.delta_0 = delta_0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let rabi = [
            ("omega_1", self.omega_1),
            ("omega_0", self.omega_0),
            ("omega_m1", self.omega_m1),
        ];
        for (name, v) in rabi {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("Rabi frequency must be finite and ≥ 0, got {v}")));
            }
        }
        let det = [
            ("delta_1", self.delta_1),
            ("delta_0", self.delta_0),
            ("delta_m1", self.delta_m1),
            ("delta_b", self.delta_b),
        ];
        for (name, v) in det {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid("gamma", format!("linewidth must be > 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Zeeman splitting Δ_B in units of Γ.
    pub fn delta_b_over_gamma(&self) -> f64 {
        self.delta_b / self.gamma
    }

    /// |Δ₋₁ − (Δ₁ − 2Δ_B)| in units of Γ: how far the σ⁺ detuning is from the
    /// value implied by the Zeeman shift.
    pub fn zeeman_consistency(&self) -> f64 {
        (self.delta_m1 - (self.delta_1 - 2.0 * self.delta_b_over_gamma())).abs()
    }

    /// Ω = √(Ω₀² + Ω₁²).
    pub fn omega_bar(&self) -> f64 {
        self.omega_0.hypot(self.omega_1)
    }
}

/// Tripod Hamiltonian in the rotating frame (ħ = 1, units of Γ).
///
/// Ground-state detunings sit on the diagonal, each ground state couples to
/// |e⟩ with Ω_i/2. The result is Hermitian by construction.
pub fn build_hamiltonian(p: &TripodParams) -> Matrix4<C64> {
    let mut h = Matrix4::<C64>::zeros();
    let legs = [
        (basis::MINUS_ONE, p.delta_m1, p.omega_m1),
        (basis::ZERO, p.delta_0, p.omega_0),
        (basis::PLUS_ONE, p.delta_1, p.omega_1),
    ];
    for (i, delta, omega) in legs {
        h[(i, i)] = C64::new(delta, 0.0);
        let c = C64::new(omega / 2.0, 0.0);
        h[(i, basis::EXCITED)] = c;
        h[(basis::EXCITED, i)] = c.conj();
    }
    h
}

/// The 3×3 effective Λ Hamiltonian over `(|0⟩, |1⟩, |e⟩)`; Ω₋₁ is dropped.
pub fn lambda_hamiltonian(p: &TripodParams) -> Matrix3<C64> {
    let half0 = C64::new(p.omega_0 / 2.0, 0.0);
    let half1 = C64::new(p.omega_1 / 2.0, 0.0);
    let z = C64::new(0.0, 0.0);
    Matrix3::new(
        C64::new(p.delta_0, 0.0), z, half0,
        z, C64::new(p.delta_1, 0.0), half1,
        half0, half1, z,
    )
}

/// Spontaneous-emission collapse operators b_j = √(Γ/3)|j⟩⟨e| for
/// j = −1, 0, 1, in basis order.
pub fn lindblad_ops(gamma: f64) -> Result<[Matrix4<C64>; 3]> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("decay rate must be > 0, got {gamma}")));
    }
    let amp = C64::new((gamma / 3.0).sqrt(), 0.0);
    Ok(basis::GROUND.map(|j| {
        let mut b = Matrix4::zeros();
        b[(j, basis::EXCITED)] = amp;
        b
    }))
}

/// How the dressed eigenvectors were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DressedKind {
    /// Closed-form eigenstates, valid for Δ₀ = Δ₁.
    Analytic,
    /// Numeric diagonalisation of the Λ block.
    Numeric,
}

/// Dressed eigenstates of the effective Λ system over `(|0⟩, |1⟩, |e⟩)`.
///
/// Every eigenvector carries the phase that makes its largest-magnitude
/// component real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedSystem {
    pub kind: DressedKind,
    pub e_dark: f64,
    pub e_bright_plus: f64,
    pub e_bright_minus: f64,
    pub dark_vec: Vector3<C64>,
    pub bright_plus_vec: Vector3<C64>,
    pub bright_minus_vec: Vector3<C64>,
    /// Ω = √(Ω₀² + Ω₁²).
    pub omega_bar: f64,
    /// Ω′ = √(Δ² + Ω²).
    pub omega_prime: f64,
    /// Common detuning Δ used by the closed forms.
    pub delta: f64,
    omega_0: f64,
    omega_1: f64,
    // sign applied to (D, B+, B−) relative to the textbook closed forms
    signs: [f64; 3],
}

impl DressedSystem {
    /// E_{B+} − E_D, the dark-to-bright splitting that cooling is tuned to.
    pub fn splitting(&self) -> f64 {
        self.e_bright_plus - self.e_dark
    }

    /// Columns are |D⟩, |B+⟩, |B−⟩.
    pub fn eigenvectors(&self) -> Matrix3<C64> {
        Matrix3::from_columns(&[self.dark_vec, self.bright_plus_vec, self.bright_minus_vec])
    }

    /// Bare states expanded in the dressed basis.
    ///
    /// Row `r` holds the coefficients of bare state `r` (|0⟩, |1⟩, |e⟩) on
    /// (|D⟩, |B+⟩, |B−⟩). Only available for the closed-form system.
    pub fn bare_in_dressed(&self) -> Option<Matrix3<f64>> {
        if self.kind != DressedKind::Analytic {
            return None;
        }
        let (o0, o1, om, op, d) = (self.omega_0, self.omega_1, self.omega_bar, self.omega_prime, self.delta);
        let root2op = (2.0 * op).sqrt();
        let sm = (op - d).sqrt();
        let sp = (op + d).sqrt();
        let [sd, s_plus, s_minus] = self.signs;
        Some(Matrix3::new(
            sd * o1 / om, s_plus * o0 / (root2op * sm), -s_minus * o0 / (root2op * sp),
            -sd * o0 / om, s_plus * o1 / (root2op * sm), -s_minus * o1 / (root2op * sp),
            0.0, s_plus * om / (root2op * sp), s_minus * om / (root2op * sm),
        ))
    }
}

fn fix_phase(v: Vector3<C64>) -> (Vector3<C64>, C64) {
    let mut best = 0;
    for i in 1..3 {
        if v[i].norm() > v[best].norm() + 1e-14 {
            best = i;
        }
    }
    let n = v[best].norm();
    if n == 0.0 {
        return (v, C64::new(1.0, 0.0));
    }
    let phase = v[best].conj() / n;
    (v * phase, phase)
}

/// Closed-form dressed states of the effective Λ system, Δ ≡ Δ₀ = Δ₁.
///
/// Fails with [`Error::TwoPhotonMismatch`] when |Δ₀ − Δ₁| exceeds
/// [`TWO_PHOTON_TOLERANCE`]; use [`dressed_states_numeric`] there.
pub fn dressed_states(p: &TripodParams) -> Result<DressedSystem> {
    dressed_states_with_tolerance(p, TWO_PHOTON_TOLERANCE)
}

pub fn dressed_states_with_tolerance(p: &TripodParams, tolerance: f64) -> Result<DressedSystem> {
    p.validate()?;
    let omega_bar = p.omega_bar();
    if omega_bar == 0.0 {
        return Err(Error::DegenerateSystem);
    }
    let mismatch = (p.delta_0 - p.delta_1).abs();
    if mismatch > tolerance {
        return Err(Error::TwoPhotonMismatch { mismatch, tolerance });
    }
    let delta = p.delta_1;
    let (o0, o1) = (p.omega_0, p.omega_1);
    let op = delta.hypot(omega_bar);
    let re = |a: f64, b: f64, c: f64| Vector3::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0));

    let dark = re(o1, -o0, 0.0) / C64::new(omega_bar, 0.0);
    let plus = re(o0, o1, op - delta) / C64::new((2.0 * op * (op - delta)).sqrt(), 0.0);
    let minus = re(-o0, -o1, op + delta) / C64::new((2.0 * op * (op + delta)).sqrt(), 0.0);

    let (dark, sd) = fix_phase(dark);
    let (plus, sp) = fix_phase(plus);
    let (minus, sm) = fix_phase(minus);

    Ok(DressedSystem {
        kind: DressedKind::Analytic,
        e_dark: delta,
        e_bright_plus: 0.5 * (delta + op),
        e_bright_minus: 0.5 * (delta - op),
        dark_vec: dark,
        bright_plus_vec: plus,
        bright_minus_vec: minus,
        omega_bar,
        omega_prime: op,
        delta,
        omega_0: o0,
        omega_1: o1,
        signs: [sd.re, sp.re, sm.re],
    })
}

/// Dressed states from numeric diagonalisation of the Λ block; works for
/// Δ₀ ≠ Δ₁. Eigenstates are assigned by energy: B− lowest, D middle, B+
/// highest. `delta` and `omega_prime` are reported for Δ = Δ₁.
pub fn dressed_states_numeric(p: &TripodParams) -> Result<DressedSystem> {
    p.validate()?;
    let omega_bar = p.omega_bar();
    if omega_bar == 0.0 {
        return Err(Error::DegenerateSystem);
    }
    let eig = lambda_hamiltonian(p).symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vec = |k: usize| fix_phase(eig.eigenvectors.column(order[k]).into_owned()).0;
    Ok(DressedSystem {
        kind: DressedKind::Numeric,
        e_dark: eig.eigenvalues[order[1]],
        e_bright_plus: eig.eigenvalues[order[2]],
        e_bright_minus: eig.eigenvalues[order[0]],
        dark_vec: vec(1),
        bright_plus_vec: vec(2),
        bright_minus_vec: vec(0),
        omega_bar,
        omega_prime: p.delta_1.hypot(omega_bar),
        delta: p.delta_1,
        omega_0: p.omega_0,
        omega_1: p.omega_1,
        signs: [1.0; 3],
    })
}

/// Effective first-order sideband coupling between |D, n⟩ and |B+, n∓1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandCoupling {
    /// Ω_f = −Ω₀Ω₁ / √(2Ω′(Ω′ + Δ)), units of Γ.
    pub omega_f: f64,
    pub eta: f64,
    /// E_{B+} − E_D = (Ω′ − Δ)/2, units of Γ.
    pub splitting: f64,
    /// |splitting − mode frequency|, units of Γ.
    pub mode_mismatch: f64,
}

impl SidebandCoupling {
    /// Sideband Rabi frequency ηΩ_f for the |D, n⟩ ↔ |B+, n−1⟩ transition
    /// at n = 1.
    pub fn sideband_rabi(&self) -> f64 {
        self.eta * self.omega_f
    }
}

/// Effective sideband coupling of the pump leg to one motional mode.
///
/// `mode_freq` is in units of Γ. Uses Δ = Δ₁ and ignores Ω₋₁.
pub fn effective_sideband_coupling(p: &TripodParams, eta: f64, mode_freq: f64) -> Result<SidebandCoupling> {
    p.validate()?;
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::invalid("eta", format!("must be ≥ 0, got {eta}")));
    }
    let omega_bar = p.omega_bar();
    if omega_bar == 0.0 {
        return Err(Error::DegenerateSystem);
    }
    let delta = p.delta_1;
    let op = delta.hypot(omega_bar);
    let omega_f = -p.omega_0 * p.omega_1 / (2.0 * op * (op + delta)).sqrt();
    let splitting = 0.5 * (op - delta);
    Ok(SidebandCoupling {
        omega_f,
        eta,
        splitting,
        mode_mismatch: (splitting - mode_freq).abs(),
    })
}

/// Lamb-Dicke advisory: true (and a warning is logged) when η²(n̄ + ½)
/// exceeds `limit`.
pub fn lamb_dicke_violated(eta: f64, nbar: f64, limit: f64) -> bool {
    let x = eta * eta * (nbar + 0.5);
    if x > limit {
        log::warn!("outside the Lamb-Dicke regime: η²(n̄+½) = {x:.3} > {limit}");
        true
    } else {
        false
    }
}
