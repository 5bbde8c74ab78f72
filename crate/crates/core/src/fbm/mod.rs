//! Fractional Brownian motion: covariance structure, exact samplers and
//! increment aggregation.
//!
//! Increments, not path values, are the canonical representation: the time
//! stepper consumes `w(t_{m+1}) - w(t_m)` directly.

mod cylindrical;
mod generator;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use cylindrical::{generate_cylindrical_fbm, CylindricalFbmSample};
pub use generator::{generate_scalar_fbm, FbmGenerator, FbmMethod};

/// Hurst index restricted to the persistent range `(1/2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstParameter {
    h: f64,
    alpha: f64,
}

impl HurstParameter {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.5 && h < 1.0) {
            return domain(format!("hurst must be in (0.5, 1), got {h}"));
        }
        Ok(Self {
            h,
            alpha: h * (2.0 * h - 1.0),
        })
    }

    pub fn value(&self) -> f64 {
        self.h
    }

    /// `H (2H - 1)`, the constant in front of the kernel.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl TryFrom<f64> for HurstParameter {
    type Error = Error;
    fn try_from(h: f64) -> Result<Self> {
        Self::new(h)
    }
}

impl std::str::FromStr for HurstParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let h: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("hurst must be a number, got {s:?}")))?;
        Self::new(h)
    }
}

impl std::fmt::Display for HurstParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.h)
    }
}

impl From<HurstParameter> for f64 {
    fn from(h: HurstParameter) -> f64 {
        h.h
    }
}

/// Uniform time grid of `m_steps` steps of size `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementGrid {
    m_steps: usize,
    tau: f64,
    horizon: f64,
}

impl IncrementGrid {
    pub fn new(m_steps: usize, tau: f64) -> Result<Self> {
        if m_steps == 0 {
            return domain("grid needs at least one step");
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return domain(format!("step size must be positive, got {tau}"));
        }
        Ok(Self {
            m_steps,
            tau,
            horizon: m_steps as f64 * tau,
        })
    }

    /// Grid with `tau = horizon / m_steps`.
    pub fn over_horizon(m_steps: usize, horizon: f64) -> Result<Self> {
        if m_steps == 0 {
            return domain("grid needs at least one step");
        }
        Self::new(m_steps, horizon / m_steps as f64)
    }

    pub fn m_steps(&self) -> usize {
        self.m_steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Grid point `t_i = i * tau`.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.tau
    }

    /// The grid obtained by merging `ratio` consecutive steps.
    pub fn coarsen(&self, ratio: usize) -> Result<Self> {
        if ratio == 0 || !self.m_steps.is_multiple_of(ratio) {
            return domain(format!(
                "{} steps are not divisible by ratio {ratio}",
                self.m_steps
            ));
        }
        Self::new(self.m_steps / ratio, self.tau * ratio as f64)
    }
}

/// Increments of one scalar fBm on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarFbmIncrements {
    pub grid: IncrementGrid,
    pub values: Vec<f64>,
    pub hurst: HurstParameter,
    pub seed: u64,
}

impl ScalarFbmIncrements {
    /// Path values `w(t_0) = 0, w(t_1), ..., w(t_M)`.
    pub fn path(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.values.iter().map(|dw| {
                acc += dw;
                acc
            }))
            .collect()
    }
}

/// `R_H(s, t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_covariance(s: f64, t: f64, h: HurstParameter) -> Result<f64> {
    if s < 0.0 || t < 0.0 {
        return domain(format!("covariance arguments must be nonnegative, got ({s}, {t})"));
    }
    let two_h = 2.0 * h.value();
    Ok(0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h)))
}

/// `phi(y) = H (2H - 1) |y|^{2H - 2}`, singular at zero.
pub fn kernel_phi(y: f64, h: HurstParameter) -> Result<f64> {
    if y == 0.0 {
        return domain("kernel phi is singular at 0");
    }
    Ok(h.alpha() * y.abs().powf(2.0 * h.value() - 2.0))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(k: usize, h: HurstParameter) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let two_h = 2.0 * h.value();
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

/// `E[dw_i dw_j]` for increments on `grid`.
pub fn increment_covariance(
    i: usize,
    j: usize,
    grid: &IncrementGrid,
    h: HurstParameter,
) -> Result<f64> {
    let m = grid.m_steps();
    if i >= m || j >= m {
        return domain(format!("step index ({i}, {j}) outside grid of {m} steps"));
    }
    Ok(grid.tau().powf(2.0 * h.value()) * fgn_autocovariance(i.abs_diff(j), h))
}

/// Dense increment covariance matrix, row-major.
pub fn increment_covariance_matrix(grid: &IncrementGrid, h: HurstParameter) -> Vec<f64> {
    let m = grid.m_steps();
    let scale = grid.tau().powf(2.0 * h.value());
    let acf: Vec<f64> = (0..m).map(|k| scale * fgn_autocovariance(k, h)).collect();
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            out[i * m + j] = acf[i.abs_diff(j)];
        }
    }
    out
}

/// Sums `ratio` consecutive fine increments, left to right.
pub fn aggregate_increments(
    fine: &ScalarFbmIncrements,
    ratio: usize,
) -> Result<ScalarFbmIncrements> {
    let grid = fine.grid.coarsen(ratio)?;
    let values = fine
        .values
        .chunks_exact(ratio)
        .map(|c| c.iter().fold(0.0, |acc, v| acc + v))
        .collect();
    Ok(ScalarFbmIncrements {
        grid,
        values,
        hurst: fine.hurst,
        seed: fine.seed,
    })
}
