//! Lindblad master equation for the tripod: Liouvillian, steady states,
//! time evolution, absorption spectra and the closed-form Λ results.
//!
//! Density matrices are vectorised by stacking columns, so that
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`. With that convention
//!
//! ```text
//! L = −i(I ⊗ H − Hᵀ ⊗ I) + Σ_j [ b̄_j ⊗ b_j − ½ I ⊗ b_j†b_j − ½ (b_j†b_j)ᵀ ⊗ I ]
//! ```

use nalgebra::{DMatrix, DVector, Matrix4};
use rayon::prelude::*;
use std::f64::consts::SQRT_2;

use crate::atom_model::{basis, build_hamiltonian, TripodParams};
use crate::error::{Error, Result};
use crate::C64;

/// Relative singular-value threshold below which a Liouvillian direction
/// counts as part of the null space.
pub const NULL_SPACE_TOLERANCE: f64 = 1e-10;
/// Required ‖L·vec(ρ_ss)‖ for an accepted steady state.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// RK4 is stable on the negative real axis up to ≈2.78; keep a margin.
pub const STABILITY_LIMIT: f64 = 2.5;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// Which levels take part in the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelScheme {
    /// All four levels; |e⟩ decays to each ground state at Γ/3.
    Tripod,
    /// Closed Λ over (|0⟩, |1⟩, |e⟩); |e⟩ decays to |0⟩ and |1⟩ at Γ/2 each
    /// and |−1⟩ stays empty.
    Lambda,
}

impl LevelScheme {
    /// With no σ⁺ light the |−1⟩ level is a population trap, so an undriven
    /// σ⁺ leg selects the closed Λ.
    pub fn for_params(p: &TripodParams) -> Self {
        if p.omega_m1 == 0.0 {
            LevelScheme::Lambda
        } else {
            LevelScheme::Tripod
        }
    }

    pub fn levels(self) -> &'static [usize] {
        match self {
            LevelScheme::Tripod => &[basis::MINUS_ONE, basis::ZERO, basis::PLUS_ONE, basis::EXCITED],
            LevelScheme::Lambda => &[basis::ZERO, basis::PLUS_ONE, basis::EXCITED],
        }
    }
}

/// State of the tripod over `(|−1⟩, |0⟩, |1⟩, |e⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix4<C64>,
}

impl DensityMatrix {
    /// Checked constructor: Hermitian, unit trace and positive semidefinite
    /// within the crate tolerances.
    pub fn new(entries: Matrix4<C64>) -> Result<Self> {
        let rho = DensityMatrix { entries };
        let scale = entries.norm().max(1.0);
        if rho.hermiticity_error() > HERMITIAN_TOL * scale {
            return Err(Error::invalid("rho", "not Hermitian"));
        }
        if (rho.trace() - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid("rho", format!("trace {} ≠ 1", rho.trace())));
        }
        if rho.min_eigenvalue() < -POSITIVITY_TOL {
            return Err(Error::invalid("rho", "negative eigenvalue"));
        }
        Ok(rho)
    }

    pub(crate) fn from_unchecked(entries: Matrix4<C64>) -> Self {
        DensityMatrix { entries }
    }

    /// Pure state |k⟩⟨k| for basis index `k`.
    pub fn basis_state(k: usize) -> Self {
        let mut m = Matrix4::zeros();
        m[(k, k)] = C64::new(1.0, 0.0);
        DensityMatrix { entries: m }
    }

    pub fn excited() -> Self {
        Self::basis_state(basis::EXCITED)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix { entries: Matrix4::identity() * C64::new(0.25, 0.0) }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.entries
    }

    pub fn population(&self, k: usize) -> f64 {
        self.entries[(k, k)].re
    }

    /// Excited-state population ρ_ee.
    pub fn rho_ee(&self) -> f64 {
        self.population(basis::EXCITED)
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.entries - self.entries.adjoint()).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.entries - other.entries).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Generator of the master equation acting on column-stacked density
/// matrices restricted to the active levels.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    matrix: DMatrix<C64>,
    levels: Vec<usize>,
    hamiltonian_norm: f64,
    params: Option<TripodParams>,
}

impl Liouvillian {
    /// Assemble `−i[H, ·] + Σ D[b]` from an `n × n` Hamiltonian and collapse
    /// operators over the given active levels of the four-level basis.
    pub fn from_parts(h: &DMatrix<C64>, collapse: &[DMatrix<C64>], levels: Vec<usize>) -> Result<Self> {
        let n = levels.len();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::invalid("hamiltonian", "dimension does not match active levels"));
        }
        if collapse.iter().any(|b| b.nrows() != n || b.ncols() != n) {
            return Err(Error::invalid("collapse", "dimension does not match active levels"));
        }
        let id = DMatrix::<C64>::identity(n, n);
        let minus_i = C64::new(0.0, -1.0);
        let half = C64::new(0.5, 0.0);
        let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * minus_i;
        for b in collapse {
            let bdb = b.adjoint() * b;
            l += b.conjugate().kronecker(b);
            l -= id.kronecker(&bdb) * half;
            l -= bdb.transpose().kronecker(&id) * half;
        }
        Ok(Liouvillian { matrix: l, levels, hamiltonian_norm: h.norm(), params: None })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Active levels as indices into the four-level basis.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn params(&self) -> Option<&TripodParams> {
        self.params.as_ref()
    }

    pub fn hamiltonian_norm(&self) -> f64 {
        self.hamiltonian_norm
    }

    /// Restrict a 4×4 matrix to the active levels and stack its columns.
    pub fn vectorize(&self, m: &Matrix4<C64>) -> DVector<C64> {
        let n = self.dim();
        DVector::from_fn(n * n, |k, _| m[(self.levels[k % n], self.levels[k / n])])
    }

    /// Inverse of [`Liouvillian::vectorize`], padding inactive levels with 0.
    pub fn unvectorize(&self, v: &DVector<C64>) -> Matrix4<C64> {
        let n = self.dim();
        let mut m = Matrix4::zeros();
        for (k, z) in v.iter().enumerate() {
            m[(self.levels[k % n], self.levels[k / n])] = *z;
        }
        m
    }

    /// dρ/dt for the given state.
    pub fn apply(&self, rho: &Matrix4<C64>) -> Matrix4<C64> {
        self.unvectorize(&(&self.matrix * self.vectorize(rho)))
    }

    /// Recommended oracle step 0.002 / max(Γ, ‖H‖), with Γ = 1.
    pub fn default_step(&self) -> f64 {
        0.002 / self.hamiltonian_norm.max(1.0)
    }

    fn trace_positions(&self) -> impl Iterator<Item = usize> {
        let n = self.dim();
        (0..n).map(move |i| i * (n + 1))
    }
}

/// Liouvillian of the tripod with Γ = 1; the level scheme follows
/// [`LevelScheme::for_params`].
pub fn build_liouvillian(p: &TripodParams) -> Result<Liouvillian> {
    build_liouvillian_with(p, LevelScheme::for_params(p), 1.0)
}

/// Liouvillian for an explicit level scheme and decay rate (units of Γ).
/// A decay rate of 0 leaves the bare commutator.
pub fn build_liouvillian_with(p: &TripodParams, scheme: LevelScheme, decay: f64) -> Result<Liouvillian> {
    p.validate()?;
    if !(decay.is_finite() && decay >= 0.0) {
        return Err(Error::invalid("decay", format!("must be ≥ 0, got {decay}")));
    }
    let levels = scheme.levels().to_vec();
    let n = levels.len();
    let h4 = build_hamiltonian(p);
    let h = DMatrix::from_fn(n, n, |r, c| h4[(levels[r], levels[c])]);
    let excited = n - 1;
    let channels = n - 1;
    let collapse: Vec<DMatrix<C64>> = if decay > 0.0 {
        let amp = C64::new((decay / channels as f64).sqrt(), 0.0);
        (0..channels)
            .map(|j| {
                let mut b = DMatrix::zeros(n, n);
                b[(j, excited)] = amp;
                b
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut l = Liouvillian::from_parts(&h, &collapse, levels)?;
    l.params = Some(*p);
    Ok(l)
}

/// Steady state from the bordered system `[L; tr] x = [0; 1]`.
///
/// The null-space dimension is checked first from the singular values of
/// `L`; more than one stationary direction is reported as
/// [`Error::NonUniqueSteadyState`]. If the direct solve leaves a residual
/// above [`RESIDUAL_TOLERANCE`], the state is relaxed further by long-time
/// propagation before giving up with [`Error::NoConvergence`].
pub fn solve_steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let n2 = l.matrix.nrows();
    let sv = l.matrix.clone().singular_values();
    let scale = sv.max().max(1.0);
    let nullity = sv.iter().filter(|&&s| s <= NULL_SPACE_TOLERANCE * scale).count();
    if nullity > 1 {
        return Err(Error::NonUniqueSteadyState { nullity });
    }

    let mut bordered = DMatrix::<C64>::zeros(n2 + 1, n2);
    bordered.rows_mut(0, n2).copy_from(&l.matrix);
    for k in l.trace_positions() {
        bordered[(n2, k)] = C64::new(1.0, 0.0);
    }
    let mut rhs = DVector::<C64>::zeros(n2 + 1);
    rhs[n2] = C64::new(1.0, 0.0);
    let x = bordered
        .svd(true, true)
        .solve(&rhs, 1e-14 * scale)
        .map_err(|_| Error::NoConvergence { what: "bordered steady-state solve" })?;

    let rho = finish_state(l, &x);
    if residual(l, &rho) <= RESIDUAL_TOLERANCE {
        return Ok(rho);
    }
    // fallback: relax the direct solution further in time
    let relaxed = evolve(&rho, l, 1e6, l.default_step())?;
    let relaxed = normalized(l, &relaxed);
    if residual(l, &relaxed) <= RESIDUAL_TOLERANCE {
        Ok(relaxed)
    } else {
        Err(Error::NoConvergence { what: "steady-state relaxation" })
    }
}

/// ‖L·vec(ρ)‖ over the active levels.
pub fn residual(l: &Liouvillian, rho: &DensityMatrix) -> f64 {
    (&l.matrix * l.vectorize(rho.matrix())).norm()
}

fn finish_state(l: &Liouvillian, x: &DVector<C64>) -> DensityMatrix {
    let m = l.unvectorize(x);
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let tr = herm.trace();
    DensityMatrix::from_unchecked(herm / tr)
}

fn normalized(l: &Liouvillian, rho: &DensityMatrix) -> DensityMatrix {
    finish_state(l, &l.vectorize(rho.matrix()))
}

/// Single RK4 step for the linear system `v' = Lv` written as the matrix
/// polynomial `I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`.
fn rk4_step_matrix(l: &DMatrix<C64>, dt: f64) -> DMatrix<C64> {
    let n = l.nrows();
    let a = l * C64::new(dt, 0.0);
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut step = term.clone();
    for k in 1..=4 {
        term = &term * &a / C64::new(k as f64, 0.0);
        step += &term;
    }
    step
}

// Rounding in repeated squaring slowly breaks 1ᵀP = 1ᵀ; put it back.
fn restore_trace_preservation(p: &mut DMatrix<C64>, trace_rows: &[usize]) {
    let n = trace_rows.len() as f64;
    for c in 0..p.ncols() {
        let target = if trace_rows.contains(&c) { 1.0 } else { 0.0 };
        let sum: C64 = trace_rows.iter().map(|&r| p[(r, c)]).sum();
        let fix = (C64::new(target, 0.0) - sum) / C64::new(n, 0.0);
        for &r in trace_rows {
            p[(r, c)] += fix;
        }
    }
}

/// Fixed-step fourth-order propagation of `dvec(ρ)/dt = L·vec(ρ)` to time
/// `t` (units of 1/Γ).
///
/// The step count is applied by binary powering of the RK4 step matrix, so
/// very long horizons cost only O(log(t/dt)) matrix products. A final
/// partial step covers any remainder of `t/dt`.
pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, t: f64, dt: f64) -> Result<DensityMatrix> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be ≥ 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let norm = l.matrix.norm();
    if dt * norm > STABILITY_LIMIT {
        return Err(Error::StepTooLarge { dt, norm, limit: STABILITY_LIMIT });
    }
    let trace_rows: Vec<usize> = l.trace_positions().collect();
    let mut steps = (t / dt).floor() as u64;
    let remainder = (t - steps as f64 * dt).max(0.0);

    let mut v = l.vectorize(rho0.matrix());
    let mut base = rk4_step_matrix(&l.matrix, dt);
    while steps > 0 {
        if steps & 1 == 1 {
            v = &base * v;
        }
        steps >>= 1;
        if steps > 0 {
            base = &base * &base;
            restore_trace_preservation(&mut base, &trace_rows);
        }
    }
    if remainder > 0.0 {
        v = rk4_step_matrix(&l.matrix, remainder) * v;
    }
    Ok(DensityMatrix::from_unchecked(l.unvectorize(&v)))
}

/// Excited-state population versus probe detuning Δ₀.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionCurve {
    pub detunings: Vec<f64>,
    /// `None` where the steady-state solve failed; see `failures`.
    pub rho_ee: Vec<Option<f64>>,
    pub failures: Vec<(usize, Error)>,
}

impl AbsorptionCurve {
    /// Points that solved successfully.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.detunings.iter().zip(&self.rho_ee).filter_map(|(d, r)| r.map(|r| (*d, r)))
    }
}

/// Excited-state population with the probe detuning replaced by `delta_0`.
pub fn rho_ee_at(p: &TripodParams, delta_0: f64) -> Result<f64> {
    let l = build_liouvillian(&p.with_delta_0(delta_0))?;
    Ok(solve_steady_state(&l)?.rho_ee())
}

/// Default probe grid: 2001 points over [Δ₁ − 2, Δ₁ + 2].
pub fn default_delta0_grid(p: &TripodParams) -> Vec<f64> {
    crate::grid::linspace(p.delta_1 - 2.0, p.delta_1 + 2.0, 2001)
}

/// ρ_ee(Δ₀) from the full master equation at every grid point. Points are
/// evaluated in parallel; per-point solver failures are recorded.
pub fn absorption_spectrum(p: &TripodParams, delta0_grid: &[f64]) -> Result<AbsorptionCurve> {
    p.validate()?;
    if delta0_grid.is_empty() {
        return Err(Error::invalid("delta0_grid", "grid is empty"));
    }
    if delta0_grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("delta0_grid", "grid contains non-finite values"));
    }
    let results: Vec<Result<f64>> = delta0_grid.par_iter().map(|&d| rho_ee_at(p, d)).collect();
    let mut rho_ee = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => rho_ee.push(Some(v)),
            Err(e) => {
                rho_ee.push(None);
                failures.push((i, e));
            }
        }
    }
    Ok(AbsorptionCurve { detunings: delta0_grid.to_vec(), rho_ee, failures })
}

/// Closed-form ρ_ee with clipping diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRhoEe {
    pub value: f64,
    /// The raw expression left [0, 1] and was clipped.
    pub clipped: bool,
}

/// Closed-form excited-state population of the effective Λ system
/// (Ω₋₁ ignored), with δ ≡ Δ₀ − Δ₁ the two-photon detuning and Γ = 1.
///
/// The full form is the exact steady state of a closed Λ whose excited
/// state decays to |0⟩ and |1⟩ at Γ/2 each:
///
/// ```text
/// ρ_ee = 4δ²Ω₀²Ω₁²Γ / Z
/// Z = 8δ²Ω₀²Ω₁²Γ + 2δ²Γ³Ω² − 4Δ₀δΩ₁⁴Γ + ½Ω⁶Γ
///     + 8δ²Γ(Δ₁²Ω₀² + Δ₀²Ω₁²) + 4Δ₁δΩ₀⁴Γ
/// ```
///
/// `simplified` selects the weak-probe form
/// `δ²Ω₀² / (δ²Γ² + 4(Ω₁²/4 − δΔ₀)²)`, which is 1/2 of the full form's
/// weak-probe limit.
pub fn analytic_rho_ee(p: &TripodParams, simplified: bool) -> Result<AnalyticRhoEe> {
    p.validate()?;
    let g = 1.0;
    let (o0, o1, d0, d1) = (p.omega_0, p.omega_1, p.delta_0, p.delta_1);
    let delta = d0 - d1;
    if delta == 0.0 {
        return Ok(AnalyticRhoEe { value: 0.0, clipped: false });
    }
    let raw = if simplified {
        let x = o1 * o1 / 4.0 - delta * d0;
        delta * delta * o0 * o0 / (delta * delta * g * g + 4.0 * x * x)
    } else {
        let (o0s, o1s) = (o0 * o0, o1 * o1);
        let om2 = o0s + o1s;
        let d2 = delta * delta;
        let z = 8.0 * d2 * o1s * o0s * g + 2.0 * d2 * g.powi(3) * om2 - 4.0 * d0 * delta * o1s * o1s * g
            + 0.5 * om2.powi(3) * g
            + 8.0 * d2 * g * (d1 * d1 * o0s + d0 * d0 * o1s)
            + 4.0 * d1 * delta * o0s * o0s * g;
        4.0 * d2 * o0s * o1s * g / z
    };
    if !raw.is_finite() {
        return Err(Error::invalid("params", "closed form is singular here"));
    }
    let value = raw.clamp(0.0, 1.0);
    let clipped = value != raw;
    if clipped {
        log::debug!("analytic ρ_ee = {raw:.3e} clipped to {value}");
    }
    Ok(AnalyticRhoEe { value, clipped })
}

/// Probe detuning of the bright-state absorption maximum of the weak-probe
/// form, ½(√(Δ₁² + Ω₁²) + Δ₁).
pub fn bright_resonance(p: &TripodParams) -> f64 {
    0.5 * (p.delta_1.hypot(p.omega_1) + p.delta_1)
}

/// Cooling bandwidth in units of Γ.
///
/// `exact` evaluates
/// `½[2(1+√2)Δ₁ + √(Δ₁²+Ω₁²) − √(((3+2√2)Δ₁)² + Ω₁²)]`, the distance from
/// the bright resonance down to the sideband-dominance cutoff of the
/// weak-probe spectrum. Otherwise the quoted small-Ω₁ approximation
/// `(1+√2)/(3/2+√2) · Ω₁²/Δ₁` is returned; note that it does not agree
/// with the small-Ω₁ limit of the exact form, see
/// [`cooling_bandwidth_leading_order`].
pub fn cooling_bandwidth(p: &TripodParams, exact: bool) -> Result<f64> {
    p.validate()?;
    if !(p.delta_1 > 0.0) {
        return Err(Error::invalid("delta_1", "cooling bandwidth needs Δ₁ > 0"));
    }
    let (d1, o1) = (p.delta_1, p.omega_1);
    if exact {
        let k = 3.0 + 2.0 * SQRT_2;
        Ok(0.5 * (2.0 * (1.0 + SQRT_2) * d1 + d1.hypot(o1) - (k * d1).hypot(o1)))
    } else {
        Ok((1.0 + SQRT_2) / (1.5 + SQRT_2) * o1 * o1 / d1)
    }
}

/// Leading small-Ω₁ term of the exact bandwidth, (√2 − 1)/2 · Ω₁²/Δ₁.
pub fn cooling_bandwidth_leading_order(p: &TripodParams) -> Result<f64> {
    p.validate()?;
    if !(p.delta_1 > 0.0) {
        return Err(Error::invalid("delta_1", "cooling bandwidth needs Δ₁ > 0"));
    }
    Ok(0.5 * (SQRT_2 - 1.0) * p.omega_1 * p.omega_1 / p.delta_1)
}

/// Bandwidth located on the master-equation spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericBandwidth {
    /// Offset ω of the bright absorption maximum above the carrier Δ₀.
    pub peak: f64,
    /// Smallest ω above which ρ_ee(Δ₀+ω) ≥ 2ρ_ee(Δ₀−ω) holds up to the peak.
    pub cutoff: f64,
    pub width: f64,
}

/// Cooling bandwidth from the sideband-dominance condition applied to the
/// full master-equation spectrum around the carrier at `p.delta_0`.
pub fn numeric_cooling_bandwidth(p: &TripodParams) -> Result<NumericBandwidth> {
    p.validate()?;
    let carrier = p.delta_0;
    let blue = |w: f64| rho_ee_at(p, carrier + w);
    let red = |w: f64| rho_ee_at(p, carrier - w);

    let reach = (4.0 * (bright_resonance(p) - p.delta_1).abs()).max(1.0);
    let coarse: Vec<f64> = crate::grid::linspace(reach / 400.0, reach, 400);
    let values = coarse.par_iter().map(|&w| blue(w)).collect::<Result<Vec<f64>>>()?;
    let k = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or(Error::NoConvergence { what: "bright-peak search" })?;
    let lo = coarse[k.saturating_sub(1)];
    let hi = coarse[(k + 1).min(coarse.len() - 1)];
    let (peak, _) = golden_section_min(|w| blue(w).map(|v| -v), lo, hi, 1e-7)?;

    let dominance = |w: f64| -> Result<f64> { Ok(blue(w)? - 2.0 * red(w)?) };
    // walk down from the peak to the first point where dominance fails
    let samples = 400;
    let mut upper = peak;
    let mut lower = None;
    for i in 1..=samples {
        let w = peak * (1.0 - i as f64 / samples as f64);
        if w <= 0.0 {
            break;
        }
        if dominance(w)? < 0.0 {
            lower = Some(w);
            break;
        }
        upper = w;
    }
    let cutoff = match lower {
        None => 0.0,
        Some(mut a) => {
            let mut b = upper;
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if dominance(m)? < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
                if b - a < 1e-9 {
                    break;
                }
            }
            0.5 * (a + b)
        }
    };
    Ok(NumericBandwidth { peak, cutoff, width: peak - cutoff })
}

/// Golden-section minimisation of `f` on `[a, b]` to tolerance `tol`.
pub(crate) fn golden_section_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    if b - a <= tol {
        let x = 0.5 * (a + b);
        return Ok((x, f(x)?));
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}
