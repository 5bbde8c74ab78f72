//! Coupled-noise Monte Carlo convergence studies.
//!
//! Every sample draws one fine noise path. Temporal studies aggregate its
//! increments onto coarser grids, spatial studies feed its leading modes to
//! smaller Galerkin spaces, so each resolution sees the same Brownian
//! realization as the reference run.

mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fbm::{CylindricalFbmSample, FbmGenerator};
use crate::parallel::Executor;
use crate::presets::Preset;
use crate::seed::sample_seed;
use crate::solver::{solve_endpoint, SolverConfig};
use crate::spectral::SpectralState;
use crate::stats::RmsEstimate;

pub use crate::stats::{fit_slope, rms_error};
pub use report::{ErrorReport, StudyMetadata};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Spatial,
    Temporal,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Spatial => "spatial",
            Axis::Temporal => "temporal",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "space" | "spatial" => Ok(Axis::Spatial),
            "time" | "temporal" => Ok(Axis::Temporal),
            other => Err(Error::Domain(format!("unknown axis {other:?} (expected space or time)"))),
        }
    }
}

/// Protocol size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Paper,
}

/// One convergence study.
///
/// `fixed_other_axis` is the number of modes for a temporal study and the
/// number of time steps over the horizon for a spatial one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub axis: Axis,
    pub ladder: Vec<usize>,
    pub reference_resolution: usize,
    pub fixed_other_axis: usize,
    pub samples: usize,
    pub base_seed: u64,
    pub problem: SolverConfig,
}

impl ConvergenceStudy {
    /// Preset study at the given scale.
    pub fn preset(preset: Preset, axis: Axis, scale: Scale, base_seed: u64) -> Result<Self> {
        let (ladder, reference, fixed, samples) = match (axis, scale) {
            (Axis::Temporal, Scale::Desk) => (pow2(6..=10), 1 << 12, 1 << 6, 50),
            (Axis::Temporal, Scale::Paper) => (pow2(8..=12), 1 << 14, 1 << 7, 100),
            (Axis::Spatial, Scale::Desk) => (pow2(1..=5), 1 << 9, 200, 50),
            (Axis::Spatial, Scale::Paper) => (pow2(1..=5), 1 << 12, 200, 100),
        };
        let study = Self {
            axis,
            ladder,
            reference_resolution: reference,
            fixed_other_axis: fixed,
            samples,
            base_seed,
            problem: preset.config(1, 1)?,
        };
        study.validate()?;
        Ok(study)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ladder.len() < 3 {
            return domain(format!("ladder needs at least 3 resolutions, got {}", self.ladder.len()));
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) || self.ladder[0] == 0 {
            return domain("ladder must be positive and strictly increasing");
        }
        if self.samples < 2 {
            return domain("need at least 2 samples");
        }
        if self.fixed_other_axis == 0 {
            return domain("fixed axis resolution must be positive");
        }
        let reference = self.reference_resolution;
        if let Some(&r) = self.ladder.iter().find(|&&r| r >= reference) {
            return domain(format!("ladder entry {r} is not coarser than reference {reference}"));
        }
        if self.axis == Axis::Temporal {
            if !reference.is_power_of_two() {
                return domain(format!("reference step count {reference} is not a power of two"));
            }
            if let Some(&r) = self.ladder.iter().find(|r| !r.is_power_of_two()) {
                return domain(format!("ladder step count {r} is not a power of two"));
            }
        }
        Ok(())
    }

    /// Reference configuration: fine grid in the studied axis.
    pub fn reference_config(&self) -> Result<SolverConfig> {
        self.config_at(self.reference_resolution)
    }

    pub fn config_at(&self, resolution: usize) -> Result<SolverConfig> {
        let (modes, steps) = match self.axis {
            Axis::Temporal => (self.fixed_other_axis, resolution),
            Axis::Spatial => (resolution, self.fixed_other_axis),
        };
        Ok(self.problem.with_modes(modes)?.with_steps(steps))
    }

    /// `(2H + beta - 1) / 2` in tau, `2H + beta - 1` in N.
    pub fn theoretical_slope(&self) -> f64 {
        let r = 2.0 * self.problem.hurst.value() + self.problem.noise.beta() - 1.0;
        match self.axis {
            Axis::Temporal => r / 2.0,
            Axis::Spatial => r,
        }
    }

    pub fn sample_seeds(&self) -> Vec<u64> {
        (0..self.samples).map(|s| sample_seed(self.base_seed, s)).collect()
    }
}

fn pow2(exps: std::ops::RangeInclusive<u32>) -> Vec<usize> {
    exps.map(|e| 1usize << e).collect()
}

/// Per-sample `|X_ref(T) - X_r(T)|` for each resolution `r` in `ladder`.
fn sample_errors(
    study: &ConvergenceStudy,
    gen: &FbmGenerator,
    reference: &SolverConfig,
    coarse: &[SolverConfig],
    sample: usize,
) -> Result<Vec<f64>> {
    let run_error = |resolution: usize, e: Error| match e {
        Error::Internal(message) => Error::Run {
            sample,
            resolution,
            message,
        },
        other => other,
    };
    let noise_modes = reference.n_modes;
    let noise = CylindricalFbmSample::with_generator(gen, noise_modes, sample_seed(study.base_seed, sample))?;
    let exact = solve_endpoint(reference, &noise).map_err(|e| run_error(study.reference_resolution, e))?;
    coarse
        .iter()
        .map(|c| {
            let resolution = match study.axis {
                Axis::Temporal => c.m_steps,
                Axis::Spatial => c.n_modes,
            };
            let x = match study.axis {
                Axis::Temporal => solve_endpoint(c, &noise.aggregate(reference.m_steps / c.m_steps)?),
                Axis::Spatial => solve_endpoint(c, &noise),
            }
            .map_err(|e| run_error(resolution, e))?;
            Ok(difference_norm(&exact, &x))
        })
        .collect()
}

/// `|a - b|` in V, with the shorter state zero-padded.
fn difference_norm(a: &SpectralState, b: &SpectralState) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let d = a.coeffs.get(k).copied().unwrap_or(0.0) - b.coeffs.get(k).copied().unwrap_or(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// RMS error and its standard error at every ladder resolution.
pub fn measure_study_errors(study: &ConvergenceStudy, executor: &Executor) -> Result<Vec<RmsEstimate>> {
    study.validate()?;
    measure(study, &study.ladder, executor)
}

fn measure(study: &ConvergenceStudy, ladder: &[usize], executor: &Executor) -> Result<Vec<RmsEstimate>> {
    let reference = study.reference_config()?;
    let coarse = ladder
        .iter()
        .map(|&r| study.config_at(r))
        .collect::<Result<Vec<_>>>()?;
    let gen = FbmGenerator::new(reference.grid()?, reference.hurst, reference.fbm_method)?;
    let per_sample = executor.try_map(study.samples, |s| sample_errors(study, &gen, &reference, &coarse, s))?;
    (0..ladder.len())
        .map(|li| rms_error(&per_sample.iter().map(|row| row[li]).collect::<Vec<f64>>()))
        .collect()
}

fn run_study(study: &ConvergenceStudy, axis: Axis, executor: &Executor) -> Result<ErrorReport> {
    if study.axis != axis {
        return domain(format!("expected a {axis} study, got {}", study.axis));
    }
    let errors = measure_study_errors(study, executor)?;
    ErrorReport::from_measurements(study, &errors)
}

/// Error in `tau = T / M` for every ladder `M`, against `M_exact` steps.
pub fn run_temporal_study(study: &ConvergenceStudy, executor: &Executor) -> Result<ErrorReport> {
    run_study(study, Axis::Temporal, executor)
}

/// Error in `N` for every ladder `N`, against `N_exact` modes.
pub fn run_spatial_study(study: &ConvergenceStudy, executor: &Executor) -> Result<ErrorReport> {
    run_study(study, Axis::Spatial, executor)
}
