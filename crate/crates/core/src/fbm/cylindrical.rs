use serde::{Deserialize, Serialize};

use super::{aggregate_increments, FbmGenerator, FbmMethod, HurstParameter, IncrementGrid, ScalarFbmIncrements};
use crate::error::{domain, Result};
use crate::seed::mode_seed;

/// `K` independent scalar fBm increment rows on a shared grid.
///
/// Row `k` is drawn from `mode_seed(base_seed, k)` alone, so a sample with
/// more modes extends one with fewer without changing the shared rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylindricalFbmSample {
    pub base_seed: u64,
    pub per_mode: Vec<ScalarFbmIncrements>,
}

impl CylindricalFbmSample {
    /// Draws `modes` rows with a prepared generator.
    pub fn with_generator(gen: &FbmGenerator, modes: usize, base_seed: u64) -> Result<Self> {
        if modes == 0 {
            return domain("cylindrical fBm needs at least one mode");
        }
        let per_mode = (0..modes)
            .map(|k| gen.sample(mode_seed(base_seed, k)))
            .collect();
        Ok(Self { base_seed, per_mode })
    }

    pub fn modes(&self) -> usize {
        self.per_mode.len()
    }

    pub fn grid(&self) -> &IncrementGrid {
        &self.per_mode[0].grid
    }

    pub fn hurst(&self) -> HurstParameter {
        self.per_mode[0].hurst
    }

    /// Increment of mode `k` (0-based) over step `m`.
    #[inline]
    pub fn increment(&self, k: usize, m: usize) -> f64 {
        self.per_mode[k].values[m]
    }

    /// Every row aggregated by `ratio`.
    pub fn aggregate(&self, ratio: usize) -> Result<Self> {
        let per_mode = self
            .per_mode
            .iter()
            .map(|row| aggregate_increments(row, ratio))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base_seed: self.base_seed,
            per_mode,
        })
    }

    /// The first `modes` rows.
    pub fn truncate_modes(&self, modes: usize) -> Result<Self> {
        if modes == 0 || modes > self.modes() {
            return domain(format!(
                "cannot keep {modes} of {} noise modes",
                self.modes()
            ));
        }
        Ok(Self {
            base_seed: self.base_seed,
            per_mode: self.per_mode[..modes].to_vec(),
        })
    }
}

pub fn generate_cylindrical_fbm(
    modes: usize,
    grid: IncrementGrid,
    hurst: HurstParameter,
    base_seed: u64,
    method: FbmMethod,
) -> Result<CylindricalFbmSample> {
    let gen = FbmGenerator::new(grid, hurst, method)?;
    CylindricalFbmSample::with_generator(&gen, modes, base_seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::generate_scalar_fbm;

    fn setup() -> (IncrementGrid, HurstParameter) {
        (
            IncrementGrid::new(32, 1.0 / 32.0).unwrap(),
            HurstParameter::new(0.75).unwrap(),
        )
    }

    #[test]
    fn single_mode_is_scalar_draw() {
        let (g, h) = setup();
        for method in [FbmMethod::Cholesky, FbmMethod::Circulant] {
            let cyl = generate_cylindrical_fbm(1, g, h, 11, method).unwrap();
            let scalar = generate_scalar_fbm(g, h, mode_seed(11, 0), method).unwrap();
            assert_eq!(cyl.per_mode[0], scalar);
        }
    }

    #[test]
    fn extending_modes_keeps_prefix() {
        let (g, h) = setup();
        let a = generate_cylindrical_fbm(8, g, h, 5, FbmMethod::Circulant).unwrap();
        let b = generate_cylindrical_fbm(16, g, h, 5, FbmMethod::Circulant).unwrap();
        assert_eq!(a.per_mode[..], b.per_mode[..8]);
        assert_eq!(b.truncate_modes(8).unwrap(), a);
        assert!(b.truncate_modes(17).is_err());
        assert!(generate_cylindrical_fbm(0, g, h, 5, FbmMethod::Circulant).is_err());
    }

    #[test]
    fn rows_are_uncorrelated() {
        let g = IncrementGrid::new(4, 0.25).unwrap();
        let h = HurstParameter::new(0.75).unwrap();
        let gen = FbmGenerator::new(g, h, FbmMethod::Circulant).unwrap();
        let n = 10_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for seed in 0..n {
            let cyl = CylindricalFbmSample::with_generator(&gen, 3, seed).unwrap();
            let p = cyl.increment(0, 2) * cyl.increment(2, 2);
            s += p;
            s2 += p * p;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "{mean} (se {se})");
    }

    #[test]
    fn aggregation_applies_to_every_row() {
        let (g, h) = setup();
        let cyl = generate_cylindrical_fbm(3, g, h, 2, FbmMethod::Circulant).unwrap();
        let coarse = cyl.aggregate(8).unwrap();
        assert_eq!(coarse.grid().m_steps(), 4);
        for k in 0..3 {
            let total: f64 = cyl.per_mode[k].values.iter().sum();
            let coarse_total: f64 = coarse.per_mode[k].values.iter().sum();
            assert!((total - coarse_total).abs() < 1e-12);
        }
    }
}
