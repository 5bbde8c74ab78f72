use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Utc;
use serde::{Deserialize, Serialize};

use super::{Axis, ConvergenceStudy};
use crate::error::{domain, Result};
use crate::fbm::FbmMethod;
use crate::stats::{fit_slope, RmsEstimate};

/// Study parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyMetadata {
    pub axis: Axis,
    pub noise_kind: String,
    pub hurst: f64,
    pub beta: f64,
    pub horizon: f64,
    pub ladder: Vec<usize>,
    pub reference_resolution: usize,
    pub fixed_other_axis: usize,
    pub samples: usize,
    pub base_seed: u64,
    pub sample_seeds: Vec<u64>,
    /// `aggregation` (temporal) or `mode-prefix` (spatial).
    pub noise_coupling: String,
    pub fbm_method: FbmMethod,
    pub problem_digest: String,
    /// Whether RMS errors decrease toward the reference; not enforced.
    pub monotone: bool,
    pub version: String,
    /// UTC, `%Y%m%dT%H%M%SZ`.
    pub created: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub resolutions: Vec<usize>,
    pub rms_errors: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Decay exponent: slope against `tau` (temporal) or minus the slope
    /// against `N` (spatial).
    pub fitted_slope: f64,
    pub slope_confidence_halfwidth: f64,
    pub theoretical_slope: f64,
    pub metadata: StudyMetadata,
}

impl ErrorReport {
    pub fn from_measurements(study: &ConvergenceStudy, errors: &[RmsEstimate]) -> Result<Self> {
        if errors.len() != study.ladder.len() {
            return domain("one error estimate per ladder entry required");
        }
        let rms_errors: Vec<f64> = errors.iter().map(|e| e.rms).collect();
        let std_errors: Vec<f64> = errors.iter().map(|e| e.std_error).collect();
        let horizon = study.problem.horizon;
        let (abscissae, sign): (Vec<f64>, f64) = match study.axis {
            Axis::Temporal => (study.ladder.iter().map(|&m| horizon / m as f64).collect(), 1.0),
            Axis::Spatial => (study.ladder.iter().map(|&n| n as f64).collect(), -1.0),
        };
        let fit = fit_slope(&abscissae, &rms_errors)?;
        let monotone = rms_errors.windows(2).all(|w| w[1] < w[0]);
        let metadata = StudyMetadata {
            axis: study.axis,
            noise_kind: study.problem.noise.kind().name().to_string(),
            hurst: study.problem.hurst.value(),
            beta: study.problem.noise.beta(),
            horizon,
            ladder: study.ladder.clone(),
            reference_resolution: study.reference_resolution,
            fixed_other_axis: study.fixed_other_axis,
            samples: study.samples,
            base_seed: study.base_seed,
            sample_seeds: study.sample_seeds(),
            noise_coupling: match study.axis {
                Axis::Temporal => "aggregation",
                Axis::Spatial => "mode-prefix",
            }
            .to_string(),
            fbm_method: study.problem.fbm_method,
            problem_digest: study.reference_config()?.digest(),
            monotone,
            version: env!("CARGO_PKG_VERSION").to_string(),
            created: Utc::now().format("%Y%m%dT%H%M%SZ").to_string(),
        };
        Ok(Self {
            resolutions: study.ladder.clone(),
            rms_errors,
            std_errors,
            fitted_slope: sign * fit.slope,
            slope_confidence_halfwidth: fit.halfwidth,
            theoretical_slope: study.theoretical_slope(),
            metadata,
        })
    }

    /// `<axis>_<noisekind>_H<h>_<timestamp>`
    pub fn file_stem(&self) -> String {
        format!(
            "{}_{}_H{}_{}",
            self.metadata.axis, self.metadata.noise_kind, self.metadata.hurst, self.metadata.created
        )
    }

    /// `resolution,rms_error,std_error` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("resolution,rms_error,std_error\n");
        for ((r, e), s) in self.resolutions.iter().zip(&self.rms_errors).zip(&self.std_errors) {
            out.push_str(&format!("{r},{e:.16e},{s:.16e}\n"));
        }
        out
    }

    /// Writes the CSV and the JSON sidecar into `dir`; returns both paths.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let stem = self.file_stem();
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        fs::write(&csv, self.to_csv())?;
        let mut f = fs::File::create(&json)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok((csv, json))
    }
}
