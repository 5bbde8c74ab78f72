//! Spectral Galerkin + linear implicit Euler discretization
//!
//! `X_{m+1} = R(tau A_N) (X_m + tau P_N F(X_m) + P_N Phi dW_m)` with
//! `R(z) = 1/(1+z)`, plus the oracles used to check it in the linear case.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::fbm::{CylindricalFbmSample, FbmMethod, HurstParameter, IncrementGrid};
use crate::spectral::{
    rational_step_factor, DiagonalNoiseOperator, NemytskiiMap, NemytskiiWorkspace,
    SpectralOperator, SpectralState,
};

/// Everything needed to run one discretized path.
///
/// The step size is always `horizon / m_steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_modes: usize,
    pub m_steps: usize,
    pub horizon: f64,
    pub hurst: HurstParameter,
    pub operator: SpectralOperator,
    pub noise: DiagonalNoiseOperator,
    pub nonlinearity: NemytskiiMap,
    pub initial: SpectralState,
    pub base_seed: u64,
    pub fbm_method: FbmMethod,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.n_modes;
        if n == 0 || self.m_steps == 0 {
            return domain("need at least one mode and one step");
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return domain(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.operator.len() != n || self.noise.len() != n || self.initial.len() != n {
            return domain(format!(
                "dimension mismatch: n_modes {n}, operator {}, noise {}, initial {}",
                self.operator.len(),
                self.noise.len(),
                self.initial.len()
            ));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.horizon / self.m_steps as f64
    }

    pub fn grid(&self) -> Result<IncrementGrid> {
        IncrementGrid::over_horizon(self.m_steps, self.horizon)
    }

    /// Same problem with `m_steps` time steps.
    pub fn with_steps(&self, m_steps: usize) -> Self {
        Self {
            m_steps,
            ..self.clone()
        }
    }

    /// Same problem on `n` modes. Extending needs extension rules for the
    /// operator and noise; the initial value is zero-padded or projected.
    pub fn with_modes(&self, n: usize) -> Result<Self> {
        let mut initial = self.initial.coeffs.clone();
        initial.resize(n, 0.0);
        Ok(Self {
            n_modes: n,
            operator: self.operator.with_modes(n)?,
            noise: self.noise.with_modes(n)?,
            initial: SpectralState::new(initial, self.initial.time),
            ..self.clone()
        })
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn check_noise(&self, noise: &CylindricalFbmSample) -> Result<()> {
        if noise.modes() < self.n_modes {
            return domain(format!(
                "noise has {} modes, {} required",
                noise.modes(),
                self.n_modes
            ));
        }
        let g = noise.grid();
        if g.m_steps() != self.m_steps || !same_step(g.tau(), self.tau()) {
            return domain(format!(
                "noise grid ({} steps of {}) does not match solver ({} steps of {})",
                g.m_steps(),
                g.tau(),
                self.m_steps,
                self.tau()
            ));
        }
        if noise.hurst() != self.hurst {
            return domain("noise and solver Hurst parameters differ");
        }
        Ok(())
    }
}

fn same_step(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// All iterates `X_0, ..., X_M` of one path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<SpectralState>,
    pub config_digest: String,
}

/// Advances coefficient vectors by one implicit Euler step.
pub struct Stepper<'a> {
    tau: f64,
    factors: Vec<f64>,
    amplitudes: &'a [f64],
    nonlinearity: NemytskiiMap,
    workspace: Option<NemytskiiWorkspace>,
    drift: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(
        op: &SpectralOperator,
        noise: &'a DiagonalNoiseOperator,
        nonlinearity: NemytskiiMap,
        tau: f64,
    ) -> Result<Self> {
        if op.len() != noise.len() {
            return domain("operator and noise dimensions differ");
        }
        let n = op.len();
        Ok(Self {
            tau,
            factors: rational_step_factor(op, tau)?,
            amplitudes: noise.amplitudes(),
            nonlinearity,
            workspace: (!nonlinearity.is_zero()).then(|| NemytskiiWorkspace::new(n)),
            drift: vec![0.0; n],
        })
    }

    /// `x <- R(tau A)(x + tau F(x) + Phi dW)`, with `dw(n)` the increment of
    /// noise mode `n` (0-based).
    #[inline]
    pub fn step(&mut self, x: &mut [f64], dw: impl Fn(usize) -> f64) {
        match self.workspace.as_mut() {
            Some(ws) => {
                ws.evaluate(&self.nonlinearity, x, &mut self.drift);
                for (n, xn) in x.iter_mut().enumerate() {
                    *xn = self.factors[n]
                        * (*xn + self.tau * self.drift[n] + self.amplitudes[n] * dw(n));
                }
            }
            None => {
                for (n, xn) in x.iter_mut().enumerate() {
                    *xn = self.factors[n] * (*xn + self.amplitudes[n] * dw(n));
                }
            }
        }
    }
}

/// One step of the scheme from `x` with per-mode increments `dw`.
pub fn implicit_euler_step(
    x: &SpectralState,
    tau: f64,
    op: &SpectralOperator,
    f: &NemytskiiMap,
    noise: &DiagonalNoiseOperator,
    dw: &[f64],
) -> Result<SpectralState> {
    let n = x.len();
    if op.len() != n || noise.len() != n || dw.len() != n {
        return domain(format!(
            "dimension mismatch: state {n}, operator {}, noise {}, increments {}",
            op.len(),
            noise.len(),
            dw.len()
        ));
    }
    let mut stepper = Stepper::new(op, noise, *f, tau)?;
    let mut coeffs = x.coeffs.clone();
    stepper.step(&mut coeffs, |k| dw[k]);
    Ok(SpectralState::new(coeffs, x.time + tau))
}

/// Runs the scheme and hands every iterate `(m, coeffs)` to `visit`.
fn run(
    config: &SolverConfig,
    noise: &CylindricalFbmSample,
    mut visit: impl FnMut(usize, &[f64]),
) -> Result<Vec<f64>> {
    config.validate()?;
    config.check_noise(noise)?;
    let mut stepper = Stepper::new(&config.operator, &config.noise, config.nonlinearity, config.tau())?;
    let mut x = config.initial.coeffs.clone();
    visit(0, &x);
    for m in 0..config.m_steps {
        stepper.step(&mut x, |k| noise.increment(k, m));
        visit(m + 1, &x);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Internal(format!(
            "non-finite state after {} steps",
            config.m_steps
        )));
    }
    Ok(x)
}

/// Full trajectory `X_0..X_M`.
pub fn solve_path(config: &SolverConfig, noise: &CylindricalFbmSample) -> Result<Trajectory> {
    let tau = config.tau();
    let t0 = config.initial.time;
    let mut states = Vec::with_capacity(config.m_steps + 1);
    run(config, noise, |m, x| {
        states.push(SpectralState::new(x.to_vec(), t0 + m as f64 * tau))
    })?;
    Ok(Trajectory {
        states,
        config_digest: config.digest(),
    })
}

/// Final iterate `X_M` only.
pub fn solve_endpoint(config: &SolverConfig, noise: &CylindricalFbmSample) -> Result<SpectralState> {
    let x = run(config, noise, |_, _| {})?;
    Ok(SpectralState::new(x, config.initial.time + config.horizon))
}

/// Iterates at the requested step indices, in the order given.
pub fn solve_recording(
    config: &SolverConfig,
    noise: &CylindricalFbmSample,
    indices: &[usize],
) -> Result<Vec<SpectralState>> {
    if let Some(&bad) = indices.iter().find(|&&i| i > config.m_steps) {
        return domain(format!("step index {bad} beyond {} steps", config.m_steps));
    }
    let tau = config.tau();
    let t0 = config.initial.time;
    let mut out: Vec<Option<SpectralState>> = vec![None; indices.len()];
    run(config, noise, |m, x| {
        for (slot, &i) in out.iter_mut().zip(indices) {
            if i == m {
                *slot = Some(SpectralState::new(x.to_vec(), t0 + m as f64 * tau));
            }
        }
    })?;
    Ok(out.into_iter().map(|s| s.expect("every index visited")).collect())
}

/// `sum_j e^{-lambda (t - s_j)} dw_j` over the first `steps` increments,
/// left-endpoint rule.
fn convolve_mode(lambda: f64, tau: f64, increments: &[f64], steps: usize) -> f64 {
    let decay = (-lambda * tau).exp();
    increments[..steps]
        .iter()
        .fold(0.0, |acc, dw| decay * (acc + dw))
}

/// Exact-semigroup oracle for the linear problem (`F = 0`), evaluated with
/// noise on a grid `R` times finer than the config's.
pub fn linear_mild_reference(
    config: &SolverConfig,
    fine_noise: &CylindricalFbmSample,
) -> Result<SpectralState> {
    config.validate()?;
    if !config.nonlinearity.is_zero() {
        return domain("linear reference requires F = 0");
    }
    let g = fine_noise.grid();
    let m_fine = g.m_steps();
    if !m_fine.is_multiple_of(config.m_steps) || !same_step(g.tau() * (m_fine / config.m_steps) as f64, config.tau()) {
        return domain(format!(
            "fine noise grid ({m_fine} steps of {}) is not a refinement of {} steps of {}",
            g.tau(),
            config.m_steps,
            config.tau()
        ));
    }
    if fine_noise.modes() < config.n_modes {
        return domain("fine noise has too few modes");
    }
    let t = config.horizon;
    let coeffs = (0..config.n_modes)
        .map(|n| {
            let lambda = config.operator.eigenvalues()[n];
            let det = (-lambda * t).exp() * config.initial.coeffs[n];
            let phi = config.noise.amplitudes()[n];
            if phi == 0.0 {
                det
            } else {
                det + phi * convolve_mode(lambda, g.tau(), &fine_noise.per_mode[n].values, m_fine)
            }
        })
        .collect();
    Ok(SpectralState::new(coeffs, config.initial.time + t))
}

/// Left-endpoint approximation of `int_0^t E(t-s) Phi dW(s)` at
/// `t = t_index * tau`.
pub fn stochastic_convolution(
    op: &SpectralOperator,
    noise: &DiagonalNoiseOperator,
    hurst: HurstParameter,
    grid: &IncrementGrid,
    sample: &CylindricalFbmSample,
    t_index: usize,
) -> Result<SpectralState> {
    if t_index > grid.m_steps() {
        return domain(format!("time index {t_index} beyond {} steps", grid.m_steps()));
    }
    if op.len() != noise.len() || sample.modes() < op.len() {
        return domain("operator, noise and sample dimensions disagree");
    }
    if sample.grid().m_steps() != grid.m_steps() || !same_step(sample.grid().tau(), grid.tau()) {
        return domain("sample grid does not match");
    }
    if sample.hurst() != hurst {
        return domain("sample Hurst parameter does not match");
    }
    let coeffs = (0..op.len())
        .map(|n| {
            let phi = noise.amplitudes()[n];
            if phi == 0.0 {
                0.0
            } else {
                phi * convolve_mode(op.eigenvalues()[n], grid.tau(), &sample.per_mode[n].values, t_index)
            }
        })
        .collect();
    Ok(SpectralState::new(coeffs, grid.time(t_index)))
}
