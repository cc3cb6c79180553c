//! Levenberg-Marquardt least squares with finite-difference Jacobians.
//!
//! Deterministic: no random restarts, fixed iteration order.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative cost decrease falls below this.
    pub cost_tolerance: f64,
    /// Stop when the relative step falls below this.
    pub step_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iterations: 500, cost_tolerance: 1e-15, step_tolerance: 1e-14, initial_damping: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// Half the sum of squared residuals.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Approximate parameter covariance (JᵀJ)⁻¹ at the solution, if regular.
    pub covariance: Option<DMatrix<f64>>,
}

fn eval<F>(f: &F, x: &[f64]) -> Result<DVector<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let r = DVector::from_vec(f(x));
    if r.iter().all(|v| v.is_finite()) {
        Ok(r)
    } else {
        Err(Error::FitDiverged("non-finite residual".into()))
    }
}

fn jacobian<F>(f: &F, x: &[f64], m: usize) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let mut j = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for k in 0..n {
        let h = 1e-7 * x[k].abs().max(1e-3);
        xp[k] = x[k] + h;
        let rp = eval(f, &xp)?;
        xp[k] = x[k] - h;
        let rm = eval(f, &xp)?;
        xp[k] = x[k];
        j.set_column(k, &((rp - rm) / (2.0 * h)));
    }
    Ok(j)
}

/// Minimise ½‖r(x)‖² starting from `x0`.
pub fn levenberg_marquardt<F>(residuals: F, x0: &[f64], opts: &LmOptions) -> Result<LmReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = eval(&residuals, &x)?;
    let m = r.len();
    if m < n {
        return Err(Error::InsufficientData(format!("{m} residuals for {n} parameters")));
    }
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = opts.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    let mut j = jacobian(&residuals, &x, m)?;

    while iterations < opts.max_iterations {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut accepted = false;
        let mut small_step = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            small_step = step.norm() <= opts.step_tolerance * (xnorm + opts.step_tolerance);
            if let Ok(rt) = eval(&residuals, &trial) {
                let ct = 0.5 * rt.norm_squared();
                if ct <= cost {
                    let rel = (cost - ct) / cost.max(f64::MIN_POSITIVE);
                    x = trial;
                    r = rt;
                    cost = ct;
                    lambda = (lambda / 10.0).max(1e-15);
                    accepted = true;
                    if rel < opts.cost_tolerance {
                        converged = true;
                    }
                    break;
                }
            }
            if small_step {
                break;
            }
            lambda *= 10.0;
        }
        if converged || small_step || !accepted {
            converged = converged || small_step || cost == 0.0;
            if !accepted && !small_step && cost > 0.0 {
                // Damping exhausted: we are at a (possibly flat) minimum.
                converged = true;
            }
            break;
        }
        j = jacobian(&residuals, &x, m)?;
    }

    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::FitDiverged("non-finite parameters".into()));
    }
    let jf = jacobian(&residuals, &x, m)?;
    let covariance = (jf.transpose() * &jf).try_inverse();
    Ok(LmReport { params: x, cost, iterations, converged, covariance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential_exactly() {
        let t: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.5 * (-1.3 * t).exp() + 0.4).collect();
        let f = |p: &[f64]| t.iter().zip(&y).map(|(t, y)| p[0] * (-p[1] * t).exp() + p[2] - y).collect();
        let rep = levenberg_marquardt(f, &[1.0, 1.0, 0.0], &LmOptions::default()).unwrap();
        assert!(rep.converged);
        assert!((rep.params[0] - 2.5).abs() < 1e-9);
        assert!((rep.params[1] - 1.3).abs() < 1e-9);
        assert!((rep.params[2] - 0.4).abs() < 1e-9);
    }

    #[test]
    fn rosenbrock() {
        let f = |p: &[f64]| vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]];
        let rep = levenberg_marquardt(f, &[-1.2, 1.0], &LmOptions::default()).unwrap();
        assert!((rep.params[0] - 1.0).abs() < 1e-8, "{:?}", rep.params);
        assert!((rep.params[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn too_few_residuals() {
        let f = |p: &[f64]| vec![p[0] + p[1]];
        assert!(matches!(
            levenberg_marquardt(f, &[0.0, 0.0], &LmOptions::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn nan_model_diverges() {
        let f = |_: &[f64]| vec![f64::NAN, 1.0];
        assert!(matches!(levenberg_marquardt(f, &[0.0], &LmOptions::default()), Err(Error::FitDiverged(_))));
    }
}
