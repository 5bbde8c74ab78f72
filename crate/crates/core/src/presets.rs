//! Built-in test problems: the stochastic heat equation on (0, 1) with
//! `sin` nonlinearity, `u(0, x) = sin(pi x)` and `H = 3/4`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::{FbmMethod, HurstParameter};
use crate::solver::SolverConfig;
use crate::spectral::{DiagonalNoiseOperator, NemytskiiMap, SpectralOperator, SpectralState};

pub const PRESET_HURST: f64 = 0.75;
pub const PRESET_HORIZON: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// Space-time white-in-space noise, `Q = I`.
    #[serde(rename = "she-identity")]
    SheIdentity,
    /// Trace-class noise with `q_1 = 0`, `q_n = 1 / (n ln^2 n)`.
    #[serde(rename = "she-trace")]
    SheTrace,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::SheIdentity, Preset::SheTrace];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::SheIdentity => "she-identity",
            Preset::SheTrace => "she-trace",
        }
    }

    pub fn hurst(&self) -> HurstParameter {
        HurstParameter::new(PRESET_HURST).expect("preset Hurst is valid")
    }

    pub fn noise(&self, n_modes: usize) -> Result<DiagonalNoiseOperator> {
        match self {
            Preset::SheIdentity => DiagonalNoiseOperator::identity(n_modes, self.hurst()),
            Preset::SheTrace => DiagonalNoiseOperator::trace_class_logsq(n_modes, self.hurst()),
        }
    }

    /// The problem on `n_modes` modes with `m_steps` steps up to `T = 1`.
    pub fn config(&self, n_modes: usize, m_steps: usize) -> Result<SolverConfig> {
        let mut initial = vec![0.0; n_modes];
        if let Some(first) = initial.first_mut() {
            // <sin(pi x), sqrt(2) sin(pi x)>
            *first = std::f64::consts::FRAC_1_SQRT_2;
        }
        let config = SolverConfig {
            n_modes,
            m_steps,
            horizon: PRESET_HORIZON,
            hurst: self.hurst(),
            operator: SpectralOperator::dirichlet_laplacian(n_modes)?,
            noise: self.noise(n_modes)?,
            nonlinearity: NemytskiiMap::pointwise_sin(),
            initial: SpectralState::new(initial, 0.0),
            base_seed: DEFAULT_SEED,
            fbm_method: FbmMethod::Circulant,
        };
        config.validate()?;
        Ok(config)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown preset {s:?} (expected she-identity or she-trace)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussRule;
    use std::f64::consts::PI;

    #[test]
    fn initial_coefficient_is_projection_of_sine() {
        let c = Preset::SheIdentity.config(4, 8).unwrap();
        let projected = GaussRule::default().integrate(0.0, 1.0, |x| (PI * x).sin() * 2f64.sqrt() * (PI * x).sin());
        assert!((c.initial.coeffs[0] - projected).abs() < 1e-14);
        assert!((c.initial.coeffs[0] - 0.7071068).abs() < 1e-7);
        assert_eq!(&c.initial.coeffs[1..], &[0.0; 3]);
    }

    #[test]
    fn trace_amplitudes() {
        let c = Preset::SheTrace.config(3, 8).unwrap();
        let phi = c.noise.amplitudes();
        assert_eq!(phi[0], 0.0);
        // mpmath: (2 ln^2 2)^{-1/2}
        assert!((phi[1] - 1.0201394465967895).abs() < 1e-15);
        assert_eq!(c.noise.beta(), 1.0);
        let id = Preset::SheIdentity.config(3, 8).unwrap();
        assert!(id.noise.amplitudes().iter().all(|a| *a == 1.0));
    }

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.name()));
        }
        assert!("she".parse::<Preset>().is_err());
    }
}
