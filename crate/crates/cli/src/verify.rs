use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use fspde::fbm::{FbmMethod, HurstParameter, IncrementGrid};
use fspde::presets::{Preset, DEFAULT_SEED};
use fspde::seed::{derive_seed, rng_from_seed};
use fspde::verification::{
    check_ito_isometry, check_lambda_phi_bound, check_phi_cell_integral, estimate_space_regularity,
    estimate_time_regularity, fit_smoothing_exponent, regularity_threshold, IsometryCheck, RegularityReport,
    SpaceRegularityReport,
};
use fspde::Executor;

use crate::commands::{preset_noise, Context};
use crate::settings::List;
use crate::{CliError, IsometryArgs, RegularityArgs, VerifyArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Isometry,
    Phi,
    LambdaPhi,
    Regularity,
    All,
}

impl Suite {
    const NAMES: [(Suite, &'static str); 5] = [
        (Suite::Isometry, "isometry"),
        (Suite::Phi, "phi"),
        (Suite::LambdaPhi, "lambda-phi"),
        (Suite::Regularity, "regularity"),
        (Suite::All, "all"),
    ];

    fn name(self) -> &'static str {
        Self::NAMES.iter().find(|(s, _)| *s == self).expect("every suite is named").1
    }

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Phi, Suite::LambdaPhi, Suite::Isometry, Suite::Regularity],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::NAMES
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(suite, _)| *suite)
            .ok_or_else(|| format!("unknown suite {s:?} (expected isometry, phi, lambda-phi, regularity or all)"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub data: serde_json::Value,
}

fn check(suite: Suite, name: String, pass: bool, detail: String, data: impl Serialize) -> Result<Check, CliError> {
    Ok(Check {
        suite: suite.name().into(),
        name,
        pass,
        detail,
        data: serde_json::to_value(data)?,
    })
}

fn h(v: f64) -> HurstParameter {
    HurstParameter::new(v).expect("literal Hurst index in range")
}

const HURSTS: [f64; 3] = [0.55, 0.75, 0.95];

fn phi_suite() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for hv in HURSTS {
        let mut cells = Vec::new();
        for j in 1..=10 {
            cells.push(check_phi_cell_integral(j, j, h(hv)));
            for k in 1..=10 {
                cells.push(check_phi_cell_integral(j + k, j, h(hv)));
                cells.push(check_phi_cell_integral(j, j + k, h(hv)));
            }
        }
        let max_rel = cells.iter().map(|c| c.relative_error()).fold(0.0, f64::max);
        let diagonal = cells.iter().filter(|c| c.i == c.j).all(|c| c.analytic == 1.0);
        let bound = cells.iter().all(|c| c.bound_holds());
        out.push(check(
            Suite::Phi,
            format!("unit cells H={hv}"),
            max_rel <= 1e-6 && diagonal && bound,
            format!("max relative error {max_rel:.2e} (tol 1e-6), diagonal exact: {diagonal}, bound holds: {bound}"),
            &cells,
        )?);
    }
    Ok(out)
}

fn lambda_phi_suite() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let lambdas = [10.0, 1e2, 1e3, 1e4];
    for t in [1.0, 10.0] {
        for (k1, k2) in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)] {
            let values = lambdas
                .iter()
                .map(|&l| check_lambda_phi_bound(l, t, k1, k2, h(0.75)))
                .collect::<Result<Vec<f64>, _>>()?;
            let worst = values.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            out.push(check(
                Suite::LambdaPhi,
                format!("plateau t={t} kappa=({k1},{k2})"),
                worst <= 2.0,
                format!("values {:.4}..{:.4}, max successive ratio {worst:.4} (tol 2)", values[0], values[3]),
                &values,
            )?);
        }
    }
    let eigs: Vec<f64> = (1..=100).map(|n| (n as f64 * std::f64::consts::PI).powi(2)).collect();
    let ells: Vec<f64> = (1..=8).map(|k| k as f64 * 1e-3).collect();
    for delta in [0.0, 0.5, 0.75] {
        let fit = fit_smoothing_exponent(&eigs, delta, &ells, h(0.75))?;
        let err = (fit.fitted_exponent - fit.theoretical_exponent).abs();
        out.push(check(
            Suite::LambdaPhi,
            format!("smoothing exponent delta={delta}"),
            err <= 0.05,
            format!("fitted {:.4}, expected {:.4} (tol 0.05)", fit.fitted_exponent, fit.theoretical_exponent),
            &fit,
        )?);
    }
    Ok(out)
}

fn isometry_suite(samples: usize, seed: u64, exec: &Executor) -> Result<Vec<Check>, CliError> {
    let grid = IncrementGrid::over_horizon(8, 1.0)?;
    let mut rng = rng_from_seed(derive_seed(seed, 2));
    let mut out = Vec::new();
    for case in 0..5u64 {
        let psi: Vec<DMatrix<f64>> = (0..8)
            .map(|_| DMatrix::from_fn(3, 2, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        for method in [FbmMethod::Cholesky, FbmMethod::Circulant] {
            let c = check_ito_isometry(&psi, &grid, h(0.75), samples, derive_seed(seed, case), method, exec)?;
            out.push(check(
                Suite::Isometry,
                format!("random integrand {case} ({method})"),
                c.within(3.0),
                format!(
                    "MC {:.5} vs analytic {:.5}, z {:+.2} (tol 3)",
                    c.mc_lhs,
                    c.analytic_rhs,
                    (c.mc_lhs - c.analytic_rhs) / c.std_error
                ),
                c,
            )?);
        }
    }
    Ok(out)
}

pub const PROBE_MODES: usize = 128;
pub const PROBE_STEPS: usize = 1 << 16;
pub const PROBE_LAGS: [usize; 5] = [8, 16, 32, 64, 128];
pub const PROBE_LADDER: [usize; 5] = [4, 8, 16, 32, 64];

#[derive(Debug, Clone, Serialize)]
struct RegularityPair {
    holder: RegularityReport,
    sobolev: SpaceRegularityReport,
}

fn regularity_suite(samples: usize, seed: u64, exec: &Executor) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for preset in Preset::ALL {
        let mut c = preset.config(PROBE_MODES, PROBE_STEPS)?;
        c.base_seed = seed;
        let holder = estimate_time_regularity(&c, 0.0, &PROBE_LAGS, samples, exec)?;
        let thr = regularity_threshold(&c);
        let sobolev = estimate_space_regularity(&c, &[thr - 0.1, thr + 0.1], &PROBE_LADDER, samples, exec)?;
        let holder_ok = (holder.fitted_exponent - holder.theoretical_exponent).abs() <= 0.1;
        out.push(check(
            Suite::Regularity,
            format!("{preset} Hölder exponent"),
            holder_ok,
            format!(
                "fitted {:.3} ± {:.3}, expected {:.3} (tol 0.1)",
                holder.fitted_exponent, holder.halfwidth, holder.theoretical_exponent
            ),
            &holder,
        )?);
        let (below, above) = (&sobolev.verdicts[0], &sobolev.verdicts[1]);
        out.push(check(
            Suite::Regularity,
            format!("{preset} Sobolev threshold {thr:.2}"),
            !below.grows && above.grows,
            format!(
                "delta {:.2} grows: {}, delta {:.2} grows: {} (expected false, true)",
                below.delta, below.grows, above.delta, above.grows
            ),
            &sobolev,
        )?);
    }
    Ok(out)
}

pub fn verify(mut ctx: Context, a: VerifyArgs) -> Result<(), CliError> {
    let s = &mut ctx.settings;
    let suite: Suite = s
        .get_opt("suite", a.suite)?
        .ok_or_else(|| CliError::Usage("--suite is required (isometry, phi, lambda-phi, regularity or all)".into()))?;
    let samples_flag: Option<usize> = s.get_opt("samples", a.samples)?;
    let seed: u64 = s.get("seed", a.seed, DEFAULT_SEED)?;
    s.finish()?;

    let mut checks = Vec::new();
    for part in suite.expand() {
        let found = match part {
            Suite::Phi => phi_suite()?,
            Suite::LambdaPhi => lambda_phi_suite()?,
            Suite::Isometry => isometry_suite(samples_flag.unwrap_or(10_000), seed, &ctx.executor)?,
            Suite::Regularity => regularity_suite(samples_flag.unwrap_or(50), seed, &ctx.executor)?,
            Suite::All => unreachable!("expanded above"),
        };
        for c in &found {
            println!("[{}] {}: {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.name, c.detail);
        }
        checks.extend(found);
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {}", c.suite, c.name))
        .collect();
    println!("{} of {} checks passed", checks.len() - failed.len(), checks.len());
    ctx.run.write_json(&format!("verify_{suite}.json"), &checks)?;
    let Context { settings, run, .. } = ctx;
    run.finish(settings.resolved(), Some(seed))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Checks(failed))
    }
}

#[derive(Debug, Serialize)]
struct IsometryOutput {
    preset: Preset,
    modes: usize,
    steps: usize,
    method: FbmMethod,
    check: IsometryCheck,
    z: f64,
    within_3_sigma: bool,
}

/// Checks the isometry for the weights of the discrete stochastic
/// convolution, `Psi_i = diag(phi_n e^{-lambda_n (T - t_i)})`.
pub fn isometry_check(ctx: &mut Context, a: IsometryArgs) -> Result<u64, CliError> {
    let s = &mut ctx.settings;
    let preset = s.get("preset", a.preset, Preset::SheTrace)?;
    let modes: usize = s.get("modes", a.modes, 4)?;
    let steps: usize = s.get("steps", a.steps, 16)?;
    let samples: usize = s.get("samples", a.samples, 10_000)?;
    let seed: u64 = s.get("seed", a.seed, DEFAULT_SEED)?;
    let method = s.get("method", a.method, FbmMethod::Cholesky)?;
    s.finish()?;

    let config = preset.config(modes, steps)?;
    let grid = config.grid()?;
    let noise = preset_noise(preset, modes, config.hurst)?;
    let lambdas = config.operator.eigenvalues();
    let psi: Vec<DMatrix<f64>> = (0..steps)
        .map(|i| {
            let lag = config.horizon - grid.time(i);
            DMatrix::from_fn(modes, modes, |r, c| {
                if r == c {
                    noise.amplitudes()[r] * (-lambdas[r] * lag).exp()
                } else {
                    0.0
                }
            })
        })
        .collect();
    let c = check_ito_isometry(&psi, &grid, config.hurst, samples, seed, method, &ctx.executor)?;
    let z = (c.mc_lhs - c.analytic_rhs) / c.std_error;
    println!(
        "E|sum Psi dW|^2: Monte Carlo {:.6e} ± {:.1e}, analytic {:.6e}, z {z:+.2}",
        c.mc_lhs, c.std_error, c.analytic_rhs
    );
    let output = IsometryOutput {
        preset,
        modes,
        steps,
        method,
        check: c,
        z,
        within_3_sigma: c.within(3.0),
    };
    ctx.run.write_json("isometry_check.json", &output)?;
    Ok(seed)
}

pub fn regularity_check(ctx: &mut Context, a: RegularityArgs) -> Result<u64, CliError> {
    let s = &mut ctx.settings;
    let preset = s.get("preset", a.preset, Preset::SheTrace)?;
    let modes: usize = s.get("modes", a.modes, PROBE_MODES)?;
    let steps: usize = s.get("steps", a.steps, PROBE_STEPS)?;
    let lags = s.get("lags", a.lags, List(PROBE_LAGS.to_vec()))?;
    let delta: f64 = s.get("delta", a.delta, 0.0)?;
    let ladder = s.get("ladder", a.ladder, List(PROBE_LADDER.to_vec()))?;
    let deltas_flag = s.get_opt("deltas", a.deltas)?;
    let samples: usize = s.get("samples", a.samples, 50)?;
    let seed: u64 = s.get("seed", a.seed, DEFAULT_SEED)?;
    s.finish()?;

    let mut config = preset.config(modes, steps)?;
    config.base_seed = seed;
    let thr = regularity_threshold(&config);
    let deltas = deltas_flag.unwrap_or(List(vec![thr - 0.1, thr + 0.1]));
    ctx.settings.note("deltas", &deltas);

    let holder = estimate_time_regularity(&config, delta, &lags.0, samples, &ctx.executor)?;
    let sobolev = estimate_space_regularity(&config, &deltas.0, &ladder.0, samples, &ctx.executor)?;
    println!(
        "Hölder exponent in time (delta {delta}): {:.3} ± {:.3}, theory {:.3}",
        holder.fitted_exponent, holder.halfwidth, holder.theoretical_exponent
    );
    println!("Sobolev threshold 2H + beta - 1 = {thr:.3}");
    for v in &sobolev.verdicts {
        println!(
            "  delta {:.3}: {} (increment slope {})",
            v.delta,
            if v.grows { "grows" } else { "bounded" },
            v.increment_slope.map_or("n/a".into(), |s| format!("{s:+.3}"))
        );
    }
    ctx.run.write_json("regularity_check.json", &RegularityPair { holder, sobolev })?;
    Ok(seed)
}
