//! Observed convergence orders: the L1 kernel on a known function, and
//! temporal self-convergence of the schemes.

use crate::error::{Error, Result};
use crate::frac_kernel::{apply_frac_derivative, gamma, l1_weights_uniform, TimeMesh};
use crate::harness::config::RunConfig;
use crate::harness::presets::initial_field;
use crate::schemes::Stepper;
use crate::spectral::Field2D;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log step`.
    pub order: f64,
}

/// Least-squares slope of `log y` against `log x`; needs three points.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InsufficientPoints { need: 3, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// L1 derivative of `t^3` at `t_end` against the exact Caputo derivative
/// `6 t^{3-alpha} / Gamma(4 - alpha)`, for `dt0 / 2^k`, `k = 0..=halvings`.
pub fn kernel_convergence(alpha: f64, dt0: f64, halvings: usize, t_end: f64) -> Result<ConvergenceStudy> {
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    let exact = 6.0 * t_end.powf(3.0 - alpha) / gamma(4.0 - alpha);
    for k in 0..=halvings {
        let dt = dt0 / 2f64.powi(k as i32);
        let n = (t_end / dt).round() as usize;
        if n == 0 || ((n as f64) * dt - t_end).abs() > 1e-9 * t_end {
            return Err(Error::Domain(format!("t_end = {t_end} is not a multiple of dt = {dt}")));
        }
        let w = l1_weights_uniform(alpha, dt, n)?;
        let hist: Vec<f64> = (0..=n).map(|j| (j as f64 * dt).powi(3)).collect();
        errors.push((apply_frac_derivative(&hist, &w)? - exact).abs());
        steps.push(dt);
    }
    let order = least_squares_slope(&steps, &errors)?;
    Ok(ConvergenceStudy { steps, errors, order })
}

/// Time mesh family of a self-convergence study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeshFamily {
    Uniform,
    /// `t_j = (j/N)^r T`; refining `N` by an integer factor nests the meshes.
    Graded(f64),
}

impl MeshFamily {
    fn build(self, n: usize, t_end: f64) -> Result<TimeMesh> {
        match self {
            MeshFamily::Uniform => TimeMesh::uniform(t_end / n as f64, n),
            MeshFamily::Graded(r) => TimeMesh::graded(n, r, t_end),
        }
    }
}

/// Final field of `cfg`'s model, scheme, grid and initial data on `mesh`.
pub fn final_field(cfg: &RunConfig, mesh: TimeMesh) -> Result<Field2D> {
    let grid = cfg.grid()?;
    let mut stepper = Stepper::new(cfg.model_spec()?, cfg.scheme, cfg.alpha, grid)?.with_dealias(cfg.dealias);
    let mut state = stepper.init_state(initial_field(cfg, grid)?, mesh)?;
    stepper.run(&mut state, |_, _| Ok(()))?;
    Ok(state.current().clone())
}

/// Errors at `t_end` for `N` in `step_counts` against a reference with
/// `16 max(N)` steps; the error is the discrete `L^2` norm of the difference.
pub fn self_convergence(
    cfg: &RunConfig,
    t_end: f64,
    step_counts: &[usize],
    family: MeshFamily,
) -> Result<ConvergenceStudy> {
    if step_counts.len() < 3 {
        return Err(Error::InsufficientPoints {
            need: 3,
            got: step_counts.len(),
        });
    }
    let finest = *step_counts.iter().max().expect("nonempty");
    let reference = final_field(cfg, family.build(16 * finest, t_end)?)?;
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for &n in step_counts {
        let phi = final_field(cfg, family.build(n, t_end)?)?;
        errors.push(phi.sub(&reference)?.norm_sq().sqrt());
        steps.push(t_end / n as f64);
    }
    let order = least_squares_slope(&steps, &errors)?;
    Ok(ConvergenceStudy { steps, errors, order })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [0.1, 0.05, 0.025, 0.0125];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.7)).collect();
        assert!((least_squares_slope(&x, &y).unwrap() - 1.7).abs() < 1e-12);
        assert!(matches!(
            least_squares_slope(&x[..2], &y[..2]),
            Err(Error::InsufficientPoints { need: 3, got: 2 })
        ));
    }

    #[test]
    fn kernel_order_on_cubic() {
        for &alpha in &[0.3, 0.5, 0.8] {
            let s = kernel_convergence(alpha, 0.1, 4, 1.0).unwrap();
            assert!((s.order - (2.0 - alpha)).abs() <= 0.1, "alpha {alpha}: {}", s.order);
        }
    }
}
