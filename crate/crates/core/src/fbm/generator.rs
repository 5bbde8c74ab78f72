use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{fgn_autocovariance, HurstParameter, IncrementGrid, ScalarFbmIncrements};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Relative threshold below which negative circulant eigenvalues count as
/// rounding noise.
const EMBEDDING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FbmMethod {
    /// Dense Cholesky factor of the increment covariance. O(M^3) setup.
    Cholesky,
    /// Circulant embedding of fractional Gaussian noise. O(M log M).
    Circulant,
}

impl fmt::Display for FbmMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FbmMethod::Cholesky => "cholesky",
            FbmMethod::Circulant => "circulant",
        })
    }
}

impl FromStr for FbmMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cholesky" => Ok(FbmMethod::Cholesky),
            "circulant" => Ok(FbmMethod::Circulant),
            other => Err(Error::Domain(format!(
                "unknown fbm method {other:?} (expected cholesky or circulant)"
            ))),
        }
    }
}

enum Kernel {
    /// Row-major packed lower triangle of the unit-step covariance factor.
    Cholesky { lower: Vec<f64> },
    Circulant {
        sqrt_eigs: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// Precomputed sampler for one `(grid, hurst, method)` triple.
///
/// Immutable after construction; a single generator can be shared across
/// threads and every draw is a pure function of the seed.
pub struct FbmGenerator {
    grid: IncrementGrid,
    hurst: HurstParameter,
    method: FbmMethod,
    scale: f64,
    kernel: Kernel,
}

impl fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FbmGenerator")
            .field("grid", &self.grid)
            .field("hurst", &self.hurst)
            .field("method", &self.method)
            .finish()
    }
}

impl FbmGenerator {
    pub fn new(grid: IncrementGrid, hurst: HurstParameter, method: FbmMethod) -> Result<Self> {
        let m = grid.m_steps();
        let kernel = match method {
            FbmMethod::Cholesky => {
                let cov = DMatrix::from_fn(m, m, |i, j| fgn_autocovariance(i.abs_diff(j), hurst));
                let chol = cov.cholesky().ok_or_else(|| {
                    Error::Internal("increment covariance is not positive definite".into())
                })?;
                let l = chol.l();
                let mut lower = Vec::with_capacity(m * (m + 1) / 2);
                for i in 0..m {
                    for j in 0..=i {
                        lower.push(l[(i, j)]);
                    }
                }
                Kernel::Cholesky { lower }
            }
            FbmMethod::Circulant => {
                let n = 2 * m;
                let mut row: Vec<Complex<f64>> = (0..n)
                    .map(|k| {
                        let lag = if k <= m { k } else { n - k };
                        Complex::new(fgn_autocovariance(lag, hurst), 0.0)
                    })
                    .collect();
                let fft = FftPlanner::new().plan_fft_forward(n);
                fft.process(&mut row);
                let max = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
                let min = row.iter().map(|c| c.re).fold(f64::MAX, f64::min);
                if min < -EMBEDDING_TOLERANCE * max {
                    return Err(Error::Internal(format!(
                        "circulant embedding has negative eigenvalue {min:e} (max {max:e})"
                    )));
                }
                let sqrt_eigs = row
                    .iter()
                    .map(|c| (c.re.max(0.0) / n as f64).sqrt())
                    .collect();
                Kernel::Circulant { sqrt_eigs, fft }
            }
        };
        Ok(Self {
            grid,
            hurst,
            method,
            scale: grid.tau().powf(hurst.value()),
            kernel,
        })
    }

    pub fn grid(&self) -> &IncrementGrid {
        &self.grid
    }

    pub fn hurst(&self) -> HurstParameter {
        self.hurst
    }

    pub fn method(&self) -> FbmMethod {
        self.method
    }

    /// Writes one draw of the increments into `out` (length `m_steps`).
    pub fn sample_into(&self, seed: u64, out: &mut [f64]) {
        let m = self.grid.m_steps();
        assert_eq!(out.len(), m, "output buffer length");
        let mut rng = rng_from_seed(seed);
        match &self.kernel {
            Kernel::Cholesky { lower } => {
                let z: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
                let mut offset = 0;
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &lower[offset..offset + i + 1];
                    *o = self.scale * row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
                    offset += i + 1;
                }
            }
            Kernel::Circulant { sqrt_eigs, fft } => {
                let mut buf: Vec<Complex<f64>> = sqrt_eigs
                    .iter()
                    .map(|&s| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                for (o, c) in out.iter_mut().zip(&buf) {
                    *o = self.scale * c.re;
                }
            }
        }
    }

    pub fn sample(&self, seed: u64) -> ScalarFbmIncrements {
        let mut values = vec![0.0; self.grid.m_steps()];
        self.sample_into(seed, &mut values);
        ScalarFbmIncrements {
            grid: self.grid,
            values,
            hurst: self.hurst,
            seed,
        }
    }
}

/// One exact draw of fBm increments on `grid`.
pub fn generate_scalar_fbm(
    grid: IncrementGrid,
    hurst: HurstParameter,
    seed: u64,
    method: FbmMethod,
) -> Result<ScalarFbmIncrements> {
    Ok(FbmGenerator::new(grid, hurst, method)?.sample(seed))
}
