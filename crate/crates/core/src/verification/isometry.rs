//! Monte Carlo check of the isometry for step integrands.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fbm::{increment_covariance, CylindricalFbmSample, FbmGenerator, FbmMethod, HurstParameter, IncrementGrid};
use crate::parallel::Executor;
use crate::seed::sample_seed;
use crate::stats::mean_and_std_error;

pub const MIN_ISOMETRY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryCheck {
    pub mc_lhs: f64,
    pub analytic_rhs: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl IsometryCheck {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.mc_lhs - self.analytic_rhs).abs() <= sigmas * self.std_error
    }
}

/// `sum_{i,j} <Psi_i, Psi_j>_HS * E[dW_i dW_j]`.
pub fn isometry_rhs(integrand: &[DMatrix<f64>], grid: &IncrementGrid, h: HurstParameter) -> Result<f64> {
    check_shapes(integrand, grid)?;
    let m = integrand.len();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let hs = integrand[i].dot(&integrand[j]);
            if hs != 0.0 {
                total += hs * increment_covariance(i, j, grid, h)?;
            }
        }
    }
    Ok(total)
}

fn check_shapes(integrand: &[DMatrix<f64>], grid: &IncrementGrid) -> Result<()> {
    if integrand.len() != grid.m_steps() {
        return domain(format!(
            "integrand has {} pieces, grid has {} intervals",
            integrand.len(),
            grid.m_steps()
        ));
    }
    let shape = integrand[0].shape();
    if shape.0 == 0 || shape.1 == 0 {
        return domain("integrand blocks must be nonempty");
    }
    if integrand.iter().any(|p| p.shape() != shape) {
        return domain("integrand blocks differ in shape");
    }
    Ok(())
}

/// Estimates `E|sum_i Psi_i dW_i|^2` for `Psi_i` mapping noise modes (columns)
/// to the target space (rows) and compares with [`isometry_rhs`].
pub fn check_ito_isometry(
    integrand: &[DMatrix<f64>],
    grid: &IncrementGrid,
    h: HurstParameter,
    samples: usize,
    seed: u64,
    method: FbmMethod,
    executor: &Executor,
) -> Result<IsometryCheck> {
    check_shapes(integrand, grid)?;
    if samples < MIN_ISOMETRY_SAMPLES {
        return domain(format!("need at least {MIN_ISOMETRY_SAMPLES} samples, got {samples}"));
    }
    let analytic_rhs = isometry_rhs(integrand, grid, h)?;
    let (rows, modes) = integrand[0].shape();
    let gen = FbmGenerator::new(*grid, h, method)?;
    let values = executor.try_map(samples, |s| {
        let w = CylindricalFbmSample::with_generator(&gen, modes, sample_seed(seed, s))?;
        let mut acc = DVector::<f64>::zeros(rows);
        for (i, psi) in integrand.iter().enumerate() {
            let dw = DVector::from_fn(modes, |k, _| w.increment(k, i));
            acc += psi * dw;
        }
        Ok(acc.norm_squared())
    })?;
    let (mc_lhs, std_error) = mean_and_std_error(&values)?;
    Ok(IsometryCheck {
        mc_lhs,
        analytic_rhs,
        std_error,
        samples,
    })
}
