use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fbm::HurstParameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// `Q = I`: every mode has unit amplitude.
    Identity,
    /// `q_1 = 0`, `q_n = 1 / (n ln(n)^2)` for `n >= 2`; trace class.
    TraceClassLogsq,
    /// No noise.
    Zero,
    Custom,
}

impl NoiseKind {
    fn amplitude(&self, n: usize) -> Option<f64> {
        match self {
            NoiseKind::Identity => Some(1.0),
            NoiseKind::TraceClassLogsq => Some(if n < 2 {
                0.0
            } else {
                let nf = n as f64;
                let l = nf.ln();
                (nf * l * l).recip().sqrt()
            }),
            NoiseKind::Zero => Some(0.0),
            NoiseKind::Custom => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Identity => "identity",
            NoiseKind::TraceClassLogsq => "trace",
            NoiseKind::Zero => "zero",
            NoiseKind::Custom => "custom",
        }
    }
}

/// `Phi = Q^{1/2}` acting diagonally: mode `n` is scaled by `phi_n`.
///
/// `beta` is the regularity exponent with `||A^{(beta-1)/2} Phi||_{HS}`
/// finite. For [`NoiseKind::Identity`] on the unit interval that condition
/// holds for every `beta < 1/2` only; the stored value is then the
/// supremum `1/2` and [`DiagonalNoiseOperator::beta_attained`] is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalNoiseOperator {
    amplitudes: Vec<f64>,
    beta: f64,
    kind: NoiseKind,
}

fn check_beta(beta: f64, hurst: HurstParameter) -> Result<()> {
    let lo = 1.0 - 2.0 * hurst.value();
    if !(beta > lo && beta <= 1.0) {
        return domain(format!("beta must be in ({lo}, 1], got {beta}"));
    }
    Ok(())
}

impl DiagonalNoiseOperator {
    fn from_kind(kind: NoiseKind, n_modes: usize, beta: f64, hurst: HurstParameter) -> Result<Self> {
        if n_modes == 0 {
            return domain("noise operator needs at least one mode");
        }
        check_beta(beta, hurst)?;
        Ok(Self {
            amplitudes: (1..=n_modes).map(|n| kind.amplitude(n).unwrap_or(0.0)).collect(),
            beta,
            kind,
        })
    }

    /// Space-time white-in-space noise, `beta = 1/2` (supremum).
    pub fn identity(n_modes: usize, hurst: HurstParameter) -> Result<Self> {
        Self::from_kind(NoiseKind::Identity, n_modes, 0.5, hurst)
    }

    /// Trace-class covariance with `beta = 1`.
    pub fn trace_class_logsq(n_modes: usize, hurst: HurstParameter) -> Result<Self> {
        Self::from_kind(NoiseKind::TraceClassLogsq, n_modes, 1.0, hurst)
    }

    pub fn custom(amplitudes: Vec<f64>, beta: f64, hurst: HurstParameter) -> Result<Self> {
        if amplitudes.is_empty() {
            return domain("noise operator needs at least one mode");
        }
        if amplitudes.iter().any(|a| a.is_nan() || *a < 0.0 || !a.is_finite()) {
            return domain("noise amplitudes must be finite and nonnegative");
        }
        check_beta(beta, hurst)?;
        Ok(Self {
            amplitudes,
            beta,
            kind: NoiseKind::Custom,
        })
    }

    /// `Phi = 0` on `n_modes` modes.
    pub fn zero(n_modes: usize, hurst: HurstParameter) -> Result<Self> {
        Self::from_kind(NoiseKind::Zero, n_modes, 1.0, hurst)
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_attained(&self) -> bool {
        self.kind != NoiseKind::Identity
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == 0.0)
    }

    /// `phi_n` for 1-based `n`, extended past the stored modes for the
    /// built-in kinds.
    pub fn amplitude(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        self.amplitudes
            .get(n - 1)
            .copied()
            .or_else(|| self.kind.amplitude(n))
    }

    pub fn with_modes(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("noise operator needs at least one mode");
        }
        match (1..=n).map(|k| self.amplitude(k)).collect::<Option<Vec<_>>>() {
            Some(amplitudes) => Ok(Self {
                amplitudes,
                beta: self.beta,
                kind: self.kind,
            }),
            None => domain(format!(
                "custom noise has {} amplitudes, {n} requested",
                self.len()
            )),
        }
    }
}
