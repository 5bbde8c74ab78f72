use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use fspde::experiments::{run_spatial_study, run_temporal_study, Axis, ConvergenceStudy, Scale};
use fspde::fbm::{CylindricalFbmSample, FbmGenerator, FbmMethod, HurstParameter, IncrementGrid};
use fspde::presets::{Preset, DEFAULT_SEED, PRESET_HURST};
use fspde::seed::sample_seed;
use fspde::solver::{solve_path, SolverConfig};
use fspde::spectral::{sine_grid, sine_transform, DiagonalNoiseOperator, NemytskiiMap};
use fspde::Executor;

use crate::manifest::Run;
use crate::settings::Settings;
use crate::{verify, Cli, Command, ConvergeArgs, CliError, GenFbmArgs, SolveArgs};

pub const WORKERS_ENV: &str = "FSPDE_WORKERS";

/// Shared state of one invocation.
pub struct Context {
    pub settings: Settings,
    pub run: Run,
    pub executor: Executor,
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    let out_dir = PathBuf::from(settings.get(
        "out-dir",
        cli.out_dir.map(|p| p.to_string_lossy().into_owned()),
        ".".to_string(),
    )?);
    let env_workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV} must be a non-negative integer, got {v:?}")))?,
        Err(_) => 0,
    };
    let workers: usize = settings.get("workers", cli.workers, env_workers)?;
    let name = match &cli.command {
        Command::GenFbm(_) => "gen-fbm",
        Command::Solve(_) => "solve",
        Command::Converge(_) => "converge",
        Command::Verify(_) => "verify",
        Command::IsometryCheck(_) => "isometry-check",
        Command::RegularityCheck(_) => "regularity-check",
    };
    let mut ctx = Context {
        settings,
        run: Run::start(name, &out_dir)?,
        executor: Executor::with_workers(workers),
    };
    let seed = match cli.command {
        Command::GenFbm(a) => gen_fbm(&mut ctx, a)?,
        Command::Solve(a) => solve(&mut ctx, a)?,
        Command::Converge(a) => converge(&mut ctx, a)?,
        Command::Verify(a) => return verify::verify(ctx, a),
        Command::IsometryCheck(a) => verify::isometry_check(&mut ctx, a)?,
        Command::RegularityCheck(a) => verify::regularity_check(&mut ctx, a)?,
    };
    let Context { settings, run, .. } = ctx;
    run.finish(settings.resolved(), Some(seed))?;
    Ok(())
}

/// `{:.16e}` prints 17 significant digits, enough to round-trip an f64.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn gen_fbm(ctx: &mut Context, a: GenFbmArgs) -> Result<u64, CliError> {
    let s = &mut ctx.settings;
    let hurst = s.get("hurst", a.hurst, HurstParameter::new(PRESET_HURST)?)?;
    let steps: usize = s.get("steps", a.steps, 64)?;
    if steps == 0 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    let tau: f64 = s.get("tau", a.tau, 1.0 / steps as f64)?;
    let modes: usize = s.get("modes", a.modes, 1)?;
    if modes == 0 {
        return Err(CliError::Usage("modes must be at least 1".into()));
    }
    let seed: u64 = s.get("seed", a.seed, DEFAULT_SEED)?;
    let method = s.get("method", a.method, FbmMethod::Circulant)?;
    s.finish()?;

    let gen = FbmGenerator::new(IncrementGrid::new(steps, tau)?, hurst, method)?;
    let sample = CylindricalFbmSample::with_generator(&gen, modes, seed)?;
    let mut csv = String::new();
    for k in 0..modes {
        let row: Vec<String> = (0..steps).map(|m| num(sample.increment(k, m))).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let path = ctx.run.write("fbm_increments.csv", csv)?;
    println!("wrote {modes} x {steps} increments to {}", path.display());
    Ok(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseChoice {
    Preset,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftChoice {
    Sin,
    Zero,
}

macro_rules! choice {
    ($t:ty, $($variant:ident => $name:literal),+) => {
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(<$t>::$variant),)+
                    other => Err(format!("unknown value {other:?} (expected {})", [$($name),+].join(" or "))),
                }
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self {
                    $(<$t>::$variant => $name,)+
                })
            }
        }
    };
}

choice!(NoiseChoice, Preset => "preset", Zero => "zero");
choice!(DriftChoice, Sin => "sin", Zero => "zero");

/// Preset noise operator with a possibly different Hurst index.
pub fn preset_noise(preset: Preset, n: usize, hurst: HurstParameter) -> Result<DiagonalNoiseOperator, CliError> {
    Ok(match preset {
        Preset::SheIdentity => DiagonalNoiseOperator::identity(n, hurst)?,
        Preset::SheTrace => DiagonalNoiseOperator::trace_class_logsq(n, hurst)?,
    })
}

fn solve(ctx: &mut Context, a: SolveArgs) -> Result<u64, CliError> {
    let s = &mut ctx.settings;
    let preset = s.get("preset", a.preset, Preset::SheIdentity)?;
    let hurst = s.get("hurst", a.hurst, preset.hurst())?;
    let modes: usize = s.get("modes", a.modes, 64)?;
    let steps: usize = s.get("steps", a.steps, 1 << 12)?;
    let seed: u64 = s.get("seed", a.seed, DEFAULT_SEED)?;
    let method = s.get("method", a.method, FbmMethod::Circulant)?;
    let noise = s.get("noise", a.noise, NoiseChoice::Preset)?;
    let drift = s.get("nonlinearity", a.nonlinearity, DriftChoice::Sin)?;
    let trajectory = s.get("trajectory", a.trajectory.then_some(true), false)?;
    s.finish()?;

    let mut config: SolverConfig = preset.config(modes, steps)?;
    config.hurst = hurst;
    config.base_seed = seed;
    config.fbm_method = method;
    config.noise = match noise {
        NoiseChoice::Preset => preset_noise(preset, modes, hurst)?,
        NoiseChoice::Zero => DiagonalNoiseOperator::zero(modes, hurst)?,
    };
    if drift == DriftChoice::Zero {
        config.nonlinearity = NemytskiiMap::zero();
    }
    ctx.settings.note("config-digest", config.digest());

    let gen = FbmGenerator::new(config.grid()?, hurst, method)?;
    let w = CylindricalFbmSample::with_generator(&gen, modes, sample_seed(seed, 0))?;
    let path = solve_path(&config, &w)?;
    let end = path.states.last().expect("path has the initial state");

    let mut spectral = String::from("mode,coefficient\n");
    for (k, c) in end.coeffs.iter().enumerate() {
        writeln!(spectral, "{},{}", k + 1, num(*c)).unwrap();
    }
    ctx.run.write("solve_spectral.csv", spectral)?;

    let mut physical = String::from("x,u\n");
    let values = sine_transform(&end.coeffs);
    writeln!(physical, "{},{}", num(0.0), num(0.0)).unwrap();
    for (x, u) in sine_grid(modes).iter().zip(&values) {
        writeln!(physical, "{},{}", num(*x), num(*u)).unwrap();
    }
    writeln!(physical, "{},{}", num(1.0), num(0.0)).unwrap();
    ctx.run.write("solve_physical.csv", physical)?;

    if trajectory {
        let mut csv = String::from("time");
        for k in 1..=modes {
            write!(csv, ",c{k}").unwrap();
        }
        csv.push('\n');
        for state in &path.states {
            csv.push_str(&num(state.time));
            for c in &state.coeffs {
                csv.push(',');
                csv.push_str(&num(*c));
            }
            csv.push('\n');
        }
        ctx.run.write("solve_trajectory.csv", csv)?;
    }
    println!(
        "{preset}: {modes} modes, {steps} steps, first coefficient at T = {}: {}",
        config.horizon,
        num(end.coeffs[0])
    );
    Ok(seed)
}

fn converge(ctx: &mut Context, a: ConvergeArgs) -> Result<u64, CliError> {
    let s = &mut ctx.settings;
    let axis: Axis = s
        .get_opt("axis", a.axis)?
        .ok_or_else(|| CliError::Usage("--axis is required (space or time)".into()))?;
    let preset = s.get("preset", a.preset, Preset::SheIdentity)?;
    let paper = s.get("paper-scale", a.paper_scale.then_some(true), false)?;
    let seed: u64 = s.get("seed", a.seed, DEFAULT_SEED)?;
    let scale = if paper { Scale::Paper } else { Scale::Desk };
    let mut study = ConvergenceStudy::preset(preset, axis, scale, seed)?;
    study.samples = s.get("samples", a.samples, study.samples)?;
    s.finish()?;
    study.validate()?;
    ctx.settings.note("ladder", format!("{:?}", study.ladder));
    ctx.settings.note("reference-resolution", study.reference_resolution);
    ctx.settings.note("fixed-other-axis", study.fixed_other_axis);

    let report = match axis {
        Axis::Temporal => run_temporal_study(&study, &ctx.executor)?,
        Axis::Spatial => run_spatial_study(&study, &ctx.executor)?,
    };
    let (csv, json) = report.write_to(ctx.run.out_dir())?;
    ctx.run.record(&csv);
    ctx.run.record(&json);
    let unit = match axis {
        Axis::Temporal => "in tau",
        Axis::Spatial => "in N",
    };
    for ((r, e), se) in report.resolutions.iter().zip(&report.rms_errors).zip(&report.std_errors) {
        println!("  {r:>6}  rms error {e:.4e} (se {se:.1e})");
    }
    println!(
        "{axis} convergence, {preset}: fitted slope {:.3} ± {:.3}, theoretical slope {:?} ({unit})",
        report.fitted_slope, report.slope_confidence_halfwidth, report.theoretical_slope
    );
    Ok(seed)
}
