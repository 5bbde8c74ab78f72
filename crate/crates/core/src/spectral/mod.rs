//! Diagonal operators in the eigenbasis of `A`: semigroup, fractional
//! powers, the implicit Euler resolvent factor, Galerkin projection, noise
//! amplitudes and the norms used throughout.

mod nemytskii;
mod noise;
mod operator;
mod state;
pub mod transform;

pub use nemytskii::{apply_nemytskii, NemytskiiKind, NemytskiiMap, NemytskiiWorkspace};
pub use noise::{DiagonalNoiseOperator, NoiseKind};
pub use operator::{EigenFormula, SpectralOperator};
pub use state::SpectralState;
pub use transform::{inverse_sine_transform, sine_grid, sine_transform, SineTransform};

use crate::error::{domain, Result};

fn check_dims(op: &SpectralOperator, x: &SpectralState) -> Result<()> {
    if op.len() != x.len() {
        return domain(format!(
            "operator has {} modes, state has {}",
            op.len(),
            x.len()
        ));
    }
    Ok(())
}

/// `E(t) x = e^{-tA} x`.
pub fn semigroup_apply(op: &SpectralOperator, t: f64, x: &SpectralState) -> Result<SpectralState> {
    if t.is_nan() || t < 0.0 {
        return domain(format!("semigroup time must be nonnegative, got {t}"));
    }
    check_dims(op, x)?;
    if t == 0.0 {
        return Ok(x.clone());
    }
    let coeffs = x
        .coeffs
        .iter()
        .zip(op.eigenvalues())
        .map(|(c, l)| c * (-l * t).exp())
        .collect();
    Ok(SpectralState::new(coeffs, x.time + t))
}

/// `A^gamma x`, coefficientwise `lambda_n^gamma`.
pub fn fractional_power_apply(
    op: &SpectralOperator,
    gamma: f64,
    x: &SpectralState,
) -> Result<SpectralState> {
    check_dims(op, x)?;
    if gamma == 0.0 {
        return Ok(x.clone());
    }
    let coeffs = x
        .coeffs
        .iter()
        .zip(op.eigenvalues())
        .map(|(c, l)| c * l.powf(gamma))
        .collect();
    Ok(SpectralState::new(coeffs, x.time))
}

/// Per-mode multipliers `R(tau lambda_n) = 1 / (1 + tau lambda_n)`.
pub fn rational_step_factor(op: &SpectralOperator, tau: f64) -> Result<Vec<f64>> {
    if tau.is_nan() || tau <= 0.0 {
        return domain(format!("step size must be positive, got {tau}"));
    }
    Ok(op.eigenvalues().iter().map(|l| 1.0 / (1.0 + tau * l)).collect())
}

/// Galerkin projection `P_N`: keep the first `n_target` coefficients.
pub fn projection_truncate(x: &SpectralState, n_target: usize) -> Result<SpectralState> {
    if n_target > x.len() {
        return domain(format!(
            "cannot project {} coefficients onto {n_target} modes",
            x.len()
        ));
    }
    Ok(SpectralState::new(x.coeffs[..n_target].to_vec(), x.time))
}

/// Partial sum `sum_{n <= k_max} lambda_n^{beta - 1} phi_n^2`, i.e. the
/// squared Hilbert–Schmidt norm of `A^{(beta-1)/2} Phi` truncated at `k_max`.
pub fn noise_regularity_sum(
    op: &SpectralOperator,
    phi: &DiagonalNoiseOperator,
    beta: f64,
    k_max: usize,
) -> Result<f64> {
    if k_max == 0 {
        return domain("k_max must be at least 1");
    }
    let mut sum = 0.0;
    for n in 1..=k_max {
        let (Some(l), Some(a)) = (op.eigenvalue(n), phi.amplitude(n)) else {
            return domain(format!(
                "mode {n} unavailable: operator or noise has no extension rule"
            ));
        };
        if a != 0.0 {
            sum += l.powf(beta - 1.0) * a * a;
        }
    }
    Ok(sum)
}

/// Outcome of comparing two partial sums of [`noise_regularity_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityProbe {
    pub beta: f64,
    pub sum_low: f64,
    pub sum_high: f64,
    pub relative_change: f64,
}

impl AdmissibilityProbe {
    /// The partial sums moved by less than 1%.
    pub fn stabilized(&self) -> bool {
        self.relative_change < 0.01
    }
}

pub fn admissibility_probe(
    op: &SpectralOperator,
    phi: &DiagonalNoiseOperator,
    beta: f64,
    k_low: usize,
    k_high: usize,
) -> Result<AdmissibilityProbe> {
    let sum_low = noise_regularity_sum(op, phi, beta, k_low)?;
    let sum_high = noise_regularity_sum(op, phi, beta, k_high)?;
    Ok(AdmissibilityProbe {
        beta,
        sum_low,
        sum_high,
        relative_change: (sum_high - sum_low).abs() / sum_low.abs().max(f64::MIN_POSITIVE),
    })
}

pub fn l2_norm(x: &SpectralState) -> f64 {
    x.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `||x||_delta = ||A^{delta/2} x||`.
pub fn sobolev_norm(op: &SpectralOperator, delta: f64, x: &SpectralState) -> Result<f64> {
    check_dims(op, x)?;
    Ok(sobolev_norm_squared(op.eigenvalues(), delta, &x.coeffs).sqrt())
}

pub(crate) fn sobolev_norm_squared(eigenvalues: &[f64], delta: f64, coeffs: &[f64]) -> f64 {
    if delta == 0.0 {
        return coeffs.iter().map(|c| c * c).sum();
    }
    coeffs
        .iter()
        .zip(eigenvalues)
        .map(|(c, l)| l.powf(delta) * c * c)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::HurstParameter;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn lap(n: usize) -> SpectralOperator {
        SpectralOperator::dirichlet_laplacian(n).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> SpectralState {
        use rand::Rng;
        let mut rng = crate::seed::rng_from_seed(seed);
        SpectralState::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect(), 0.0)
    }

    #[test]
    fn semigroup_examples() {
        let op = lap(8);
        let x = random_state(8, 1);
        assert_eq!(semigroup_apply(&op, 0.0, &x).unwrap(), x);
        let e1 = SpectralState::unit(8, 1);
        let y = semigroup_apply(&op, 0.1, &e1).unwrap();
        assert!((y.coeffs[0] - 0.372_707_838_853_437_9).abs() < 1e-15);
        assert!((y.coeffs[0] - (-0.1 * PI * PI).exp()).abs() < 1e-16);
        assert!(semigroup_apply(&op, -1.0, &x).is_err());
        assert!(semigroup_apply(&lap(3), 1.0, &x).is_err());
    }

    #[test]
    fn semigroup_property() {
        let op = lap(16);
        let x = random_state(16, 2);
        let a = semigroup_apply(&op, 0.013, &semigroup_apply(&op, 0.021, &x).unwrap()).unwrap();
        let b = semigroup_apply(&op, 0.034, &x).unwrap();
        for (p, q) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((p - q).abs() <= 1e-14 * q.abs().max(f64::MIN_POSITIVE));
        }
        assert!(l2_norm(&b) <= l2_norm(&x));
    }

    #[test]
    fn fractional_power_examples() {
        let op = lap(4);
        let x = random_state(4, 3);
        assert_eq!(fractional_power_apply(&op, 0.0, &x).unwrap(), x);
        let back = fractional_power_apply(&op, -1.0, &fractional_power_apply(&op, 1.0, &x).unwrap())
            .unwrap();
        for (p, q) in back.coeffs.iter().zip(&x.coeffs) {
            assert!((p - q).abs() <= 1e-14 * q.abs());
        }
        let y = fractional_power_apply(&op, 0.5, &SpectralState::unit(4, 2)).unwrap();
        assert!((y.coeffs[1] - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rational_factor_examples() {
        let op = lap(5);
        let r = rational_step_factor(&op, 0.01).unwrap();
        assert!((r[0] - 1.0 / (1.0 + 0.01 * PI * PI)).abs() < 1e-16);
        assert!((r[0] - 0.910_169_837_646_275_3).abs() < 1e-15);
        assert!(r.windows(2).all(|w| w[1] < w[0]) && r.iter().all(|v| *v > 0.0 && *v < 1.0));
        let one = SpectralOperator::custom(vec![1.0], "unit").unwrap();
        assert_eq!(rational_step_factor(&one, 1.0).unwrap()[0], 0.5);
        let tiny = rational_step_factor(&one, 1e-300).unwrap()[0];
        assert_eq!(tiny, 1.0);
        assert!(rational_step_factor(&op, 0.0).is_err());
    }

    #[test]
    fn rational_function_bounds_on_unit_interval() {
        // stability with c = 1/2 and accuracy with C = 1/2 on a 10^4 grid
        for i in 0..=10_000 {
            let z = i as f64 / 10_000.0;
            let r = 1.0 / (1.0 + z);
            assert!(r <= (-z / 2.0).exp() + 1e-15, "stability at {z}");
            assert!((r - (-z).exp()).abs() <= z * z / 2.0 + 1e-15, "accuracy at {z}");
        }
    }

    #[test]
    fn projection_examples() {
        let x = random_state(6, 4);
        assert_eq!(projection_truncate(&x, 6).unwrap(), x);
        let e1 = SpectralState::unit(6, 1);
        for n in 1..=6 {
            assert_eq!(projection_truncate(&e1, n).unwrap().coeffs[0], 1.0);
        }
        assert!(projection_truncate(&x, 7).is_err());
    }

    #[test]
    fn projection_error_is_sharp_on_eigenvectors() {
        // ||(P_N - I) e_{N+1}|| = lambda_{N+1}^{-alpha/2} ||e_{N+1}||_alpha
        let op = lap(10);
        for n in 1..10 {
            let e = SpectralState::unit(10, n + 1);
            let kept = projection_truncate(&e, n).unwrap();
            let mut resid = e.clone();
            resid.coeffs[..n].iter_mut().zip(&kept.coeffs).for_each(|(r, k)| *r -= k);
            for alpha in [0.0, 1.0, 2.0] {
                let bound = op.eigenvalues()[n].powf(-alpha / 2.0) * sobolev_norm(&op, alpha, &e).unwrap();
                assert!((l2_norm(&resid) - bound).abs() < 1e-12, "N={n} alpha={alpha}");
            }
        }
    }

    #[test]
    fn norm_examples() {
        let op = lap(3);
        let e2 = SpectralState::unit(3, 2);
        assert_eq!(l2_norm(&e2), 1.0);
        let x = random_state(3, 9);
        assert_eq!(sobolev_norm(&op, 0.0, &x).unwrap(), l2_norm(&x));
        let s = sobolev_norm(&op, 1.0, &e2).unwrap();
        assert!((s - (4.0 * PI * PI).powf(0.5)).abs() < 1e-12);
        assert!((s - 6.283_185_3).abs() < 1e-7);
    }

    #[test]
    fn regularity_sum_identity_beta_zero_is_basel() {
        let h = HurstParameter::new(0.75).unwrap();
        let op = lap(1);
        let q = DiagonalNoiseOperator::identity(1, h).unwrap();
        let s = noise_regularity_sum(&op, &q, 0.0, 1_000_000).unwrap();
        assert!((s - 1.0 / 6.0).abs() < 1e-6, "{s}");
    }

    #[test]
    fn regularity_sum_trace_class_beta_one() {
        let h = HurstParameter::new(0.75).unwrap();
        let op = lap(1);
        let q = DiagonalNoiseOperator::trace_class_logsq(1, h).unwrap();
        let sums: Vec<f64> = [1_000, 10_000, 100_000]
            .iter()
            .map(|&k| noise_regularity_sum(&op, &q, 1.0, k).unwrap())
            .collect();
        // independent partial-sum oracle for sum_{n>=2} 1/(n ln^2 n)
        let direct: f64 = (2..=100_000u32)
            .map(|n| {
                let n = n as f64;
                1.0 / (n * n.ln() * n.ln())
            })
            .sum();
        assert!((sums[2] - direct).abs() < 1e-12);
        assert!((sums[2] - 2.022_883_942_578_507).abs() < 1e-9, "{}", sums[2]);
        assert!(sums[0] < sums[1] && sums[1] < sums[2]);
        assert!(sums[2] - sums[1] < sums[1] - sums[0]);
    }

    #[test]
    fn identity_noise_diverges_above_one_half() {
        let h = HurstParameter::new(0.75).unwrap();
        let op = lap(1);
        let q = DiagonalNoiseOperator::identity(1, h).unwrap();
        let probe = admissibility_probe(&op, &q, 0.6, 1_000, 10_000).unwrap();
        assert!(!probe.stabilized(), "{probe:?}");
        let fine = admissibility_probe(&op, &q, 0.0, 1_000, 10_000).unwrap();
        assert!(fine.stabilized());
    }

    #[test]
    fn custom_operator_has_no_tail() {
        let h = HurstParameter::new(0.75).unwrap();
        let op = SpectralOperator::custom(vec![1.0, 2.0], "c").unwrap();
        let q = DiagonalNoiseOperator::identity(2, h).unwrap();
        assert!(noise_regularity_sum(&op, &q, 0.0, 2).is_ok());
        assert!(noise_regularity_sum(&op, &q, 0.0, 3).is_err());
    }

    proptest! {
        #[test]
        fn smoothing_bound(seed in any::<u64>(), gi in 0usize..3, ti in 0usize..3) {
            let gamma = [0.25, 0.5, 1.0][gi];
            let t = [1e-3, 1e-2, 1e-1][ti];
            let op = lap(64);
            let x = random_state(64, seed);
            let y = fractional_power_apply(&op, gamma, &semigroup_apply(&op, t, &x).unwrap()).unwrap();
            let sup = (gamma / std::f64::consts::E).powf(gamma);
            prop_assert!(l2_norm(&y) <= sup * t.powf(-gamma) * l2_norm(&x) * (1.0 + 1e-12));
        }
    }
}
