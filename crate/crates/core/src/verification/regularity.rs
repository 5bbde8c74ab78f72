//! Empirical time and space regularity of the discrete solution.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fbm::{CylindricalFbmSample, FbmGenerator};
use crate::parallel::Executor;
use crate::seed::sample_seed;
use crate::solver::{solve_endpoint, solve_recording, SolverConfig};
use crate::spectral::sobolev_norm_squared;
use crate::stats::{fit_slope, ols, rms_error};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub delta: f64,
    pub lag_times: Vec<f64>,
    pub rms_differences: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub fitted_exponent: f64,
    pub halfwidth: f64,
    /// `(2H + beta - 1 - delta) / 2`
    pub theoretical_exponent: f64,
    pub sample_count: usize,
}

impl RegularityReport {
    /// Fits the exponent of already measured RMS differences.
    pub fn from_measurements(
        delta: f64,
        lag_times: Vec<f64>,
        rms_differences: Vec<f64>,
        std_errors: Vec<f64>,
        theoretical_exponent: f64,
        sample_count: usize,
    ) -> Result<Self> {
        if lag_times.len() < 3 {
            return domain(format!("need at least 3 lags, got {}", lag_times.len()));
        }
        if lag_times.windows(2).any(|w| w[1] <= w[0]) {
            return domain("lag times must be strictly increasing");
        }
        let fit = fit_slope(&lag_times, &rms_differences)?;
        Ok(Self {
            delta,
            lag_times,
            rms_differences,
            std_errors,
            fitted_exponent: fit.slope,
            halfwidth: fit.halfwidth,
            theoretical_exponent,
            sample_count,
        })
    }
}

/// `2H + beta - 1`, the Sobolev threshold of the solution.
pub fn regularity_threshold(config: &SolverConfig) -> f64 {
    2.0 * config.hurst.value() + config.noise.beta() - 1.0
}

/// RMS of `|X(T) - X(T - lag tau)|_delta` over `samples` paths, fitted
/// against the lag time. Noise for sample `s` uses `sample_seed(base_seed, s)`.
pub fn estimate_time_regularity(
    config: &SolverConfig,
    delta: f64,
    lags: &[usize],
    samples: usize,
    executor: &Executor,
) -> Result<RegularityReport> {
    config.validate()?;
    let threshold = regularity_threshold(config);
    if !(0.0..threshold).contains(&delta) {
        return domain(format!("delta must lie in [0, {threshold}), got {delta}"));
    }
    if lags.len() < 3 {
        return domain(format!("need at least 3 lags, got {}", lags.len()));
    }
    if lags.windows(2).any(|w| w[1] <= w[0]) || lags[0] == 0 {
        return domain("lags must be positive and strictly increasing");
    }
    if let Some(&l) = lags.iter().find(|&&l| l > config.m_steps) {
        return domain(format!("lag {l} exceeds {} steps", config.m_steps));
    }
    if samples < 2 {
        return domain("need at least 2 samples");
    }
    let m = config.m_steps;
    let mut indices = vec![m];
    indices.extend(lags.iter().map(|l| m - l));
    let gen = FbmGenerator::new(config.grid()?, config.hurst, config.fbm_method)?;
    let eigs = config.operator.eigenvalues();
    // per sample: squared delta-norm of X(T) - X(T - lag) for every lag
    let per_sample = executor.try_map(samples, |s| {
        let noise = CylindricalFbmSample::with_generator(&gen, config.n_modes, sample_seed(config.base_seed, s))?;
        let states = solve_recording(config, &noise, &indices)?;
        let end = &states[0].coeffs;
        Ok(states[1..]
            .iter()
            .map(|x| {
                let diff: Vec<f64> = end.iter().zip(&x.coeffs).map(|(a, b)| a - b).collect();
                sobolev_norm_squared(eigs, delta, &diff).sqrt()
            })
            .collect::<Vec<f64>>())
    })?;
    let mut rms = Vec::with_capacity(lags.len());
    let mut se = Vec::with_capacity(lags.len());
    for li in 0..lags.len() {
        let column: Vec<f64> = per_sample.iter().map(|row| row[li]).collect();
        let e = rms_error(&column)?;
        rms.push(e.rms);
        se.push(e.std_error);
    }
    let tau = config.tau();
    RegularityReport::from_measurements(
        delta,
        lags.iter().map(|&l| l as f64 * tau).collect(),
        rms,
        se,
        (threshold - delta) / 2.0,
        samples,
    )
}

/// Growth test for one Sobolev index across the mode ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevVerdict {
    pub delta: f64,
    pub rms_norms: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Slope of log(increment of mean squared norm) vs log N; `None` when
    /// fewer than two increments are positive.
    pub increment_slope: Option<f64>,
    pub grows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceRegularityReport {
    pub ladder: Vec<usize>,
    pub threshold: f64,
    pub verdicts: Vec<SobolevVerdict>,
    pub sample_count: usize,
}

/// Decides growth from mean squared norms along the ladder. A convergent
/// series has block increments that shrink with N; a divergent one has
/// increments that grow.
pub fn sobolev_growth(ladder: &[usize], mean_squares: &[f64]) -> (Option<f64>, bool) {
    let points: Vec<(f64, f64)> = ladder[1..]
        .iter()
        .zip(mean_squares.windows(2))
        .filter(|(_, w)| w[1] > w[0])
        .map(|(&n, w)| ((n as f64).ln(), (w[1] - w[0]).ln()))
        .collect();
    if points.len() < 2 {
        return (None, false);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let (slope, _) = ols(&xs, &ys);
    (Some(slope), slope > 0.0)
}

/// RMS `|X^N(T)|_delta` across the mode ladder, each N driven by the first
/// N rows of one shared noise sample.
pub fn estimate_space_regularity(
    config: &SolverConfig,
    deltas: &[f64],
    ladder: &[usize],
    samples: usize,
    executor: &Executor,
) -> Result<SpaceRegularityReport> {
    if ladder.len() < 3 || ladder.windows(2).any(|w| w[1] <= w[0]) || ladder[0] == 0 {
        return domain("ladder needs at least 3 strictly increasing positive entries");
    }
    if deltas.iter().any(|d| d.is_nan() || *d < 0.0) {
        return domain("delta must be nonnegative");
    }
    if samples < 2 {
        return domain("need at least 2 samples");
    }
    let n_max = *ladder.last().expect("nonempty");
    let configs = ladder
        .iter()
        .map(|&n| config.with_modes(n))
        .collect::<Result<Vec<_>>>()?;
    for c in &configs {
        c.validate()?;
    }
    let gen = FbmGenerator::new(config.grid()?, config.hurst, config.fbm_method)?;
    // per sample: [ladder][delta] squared norms
    let per_sample = executor.try_map(samples, |s| {
        let noise = CylindricalFbmSample::with_generator(&gen, n_max, sample_seed(config.base_seed, s))?;
        configs
            .iter()
            .map(|c| {
                let x = solve_endpoint(c, &noise)?;
                let eigs = c.operator.eigenvalues();
                Ok(deltas
                    .iter()
                    .map(|&d| sobolev_norm_squared(eigs, d, &x.coeffs))
                    .collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let n = samples as f64;
    let verdicts = deltas
        .iter()
        .enumerate()
        .map(|(di, &delta)| {
            let mut rms_norms = Vec::new();
            let mut std_errors = Vec::new();
            let mut mean_squares = Vec::new();
            for li in 0..ladder.len() {
                let norms: Vec<f64> = per_sample.iter().map(|p| p[li][di].sqrt()).collect();
                let e = rms_error(&norms)?;
                rms_norms.push(e.rms);
                std_errors.push(e.std_error);
                mean_squares.push(per_sample.iter().map(|p| p[li][di]).sum::<f64>() / n);
            }
            let (increment_slope, grows) = sobolev_growth(ladder, &mean_squares);
            Ok(SobolevVerdict {
                delta,
                rms_norms,
                std_errors,
                increment_slope,
                grows,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpaceRegularityReport {
        ladder: ladder.to_vec(),
        threshold: regularity_threshold(config),
        verdicts,
        sample_count: samples,
    })
}
