//! Sine transform between eigen-coefficients and values on the interior
//! grid `x_k = k / (N + 1)`, `k = 1..=N`.
//!
//! Forward: `u_k = sum_n c_n sqrt(2) sin(n pi x_k)`.
//! Inverse: `c_n = sqrt(2) / (N + 1) sum_k u_k sin(n pi x_k)`.
//! With this pair `sum_k u_k^2 = (N + 1) sum_n c_n^2`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rustdct::{Dst1, DctPlanner};

/// Fast DST-I based transform of fixed length.
#[derive(Clone)]
pub struct SineTransform {
    n: usize,
    plan: Arc<dyn Dst1<f64>>,
}

impl fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineTransform").field("n", &self.n).finish()
    }
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "sine transform needs at least one point");
        Self {
            n,
            plan: DctPlanner::new().plan_dst1(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scratch_len(&self) -> usize {
        self.plan.get_scratch_len()
    }

    /// Coefficients to grid values, in place.
    pub fn forward_in_place(&self, buf: &mut [f64], scratch: &mut [f64]) {
        // rustdct's FFT-backed DST-I reads scratch it never writes; stale
        // values feed back and grow geometrically over repeated calls.
        scratch.fill(0.0);
        self.plan.process_dst1_with_scratch(buf, scratch);
        buf.iter_mut().for_each(|v| *v *= SQRT_2);
    }

    /// Grid values to coefficients, in place.
    pub fn inverse_in_place(&self, buf: &mut [f64], scratch: &mut [f64]) {
        scratch.fill(0.0);
        self.plan.process_dst1_with_scratch(buf, scratch);
        let s = SQRT_2 / (self.n + 1) as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }

    pub fn forward(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        let mut scratch = vec![0.0; self.scratch_len()];
        self.forward_in_place(&mut buf, &mut scratch);
        buf
    }

    pub fn inverse(&self, values: &[f64]) -> Vec<f64> {
        let mut buf = values.to_vec();
        let mut scratch = vec![0.0; self.scratch_len()];
        self.inverse_in_place(&mut buf, &mut scratch);
        buf
    }
}

/// Interior collocation points `k / (N + 1)`.
pub fn sine_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

pub fn sine_transform(coeffs: &[f64]) -> Vec<f64> {
    SineTransform::new(coeffs.len()).forward(coeffs)
}

pub fn inverse_sine_transform(values: &[f64]) -> Vec<f64> {
    SineTransform::new(values.len()).inverse(values)
}

/// O(N^2) reference for [`sine_transform`].
pub fn sine_transform_direct(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    (1..=n)
        .map(|k| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * SQRT_2 * (PI * ((i + 1) * k) as f64 / (n + 1) as f64).sin())
                .sum()
        })
        .collect()
}

/// O(N^2) reference for [`inverse_sine_transform`].
pub fn inverse_sine_transform_direct(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let s = SQRT_2 / (n + 1) as f64;
    (1..=n)
        .map(|m| {
            s * values
                .iter()
                .enumerate()
                .map(|(k, u)| u * (PI * ((k + 1) * m) as f64 / (n + 1) as f64).sin())
                .sum::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reused_scratch_is_stable() {
        for n in [64usize, 100, 128] {
            let t = SineTransform::new(n);
            let mut scratch = vec![0.0; t.scratch_len()];
            let x: Vec<f64> = (0..n).map(|k| ((k * 7 % 5) as f64 - 2.0) * 0.3).collect();
            let first = t.forward(&x);
            for _ in 0..200 {
                let mut b = x.clone();
                t.forward_in_place(&mut b, &mut scratch);
                assert_eq!(b, first, "n = {n}");
                t.inverse_in_place(&mut b, &mut scratch);
            }
        }
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
        num / den.max(f64::MIN_POSITIVE)
    }

    #[test]
    fn single_mode_value() {
        let u = sine_transform(&[1.0]);
        assert!((u[0] - SQRT_2).abs() < 1e-15);
        assert_eq!(sine_grid(1), vec![0.5]);
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(
            n in prop::sample::select(vec![1usize, 7, 64, 127]),
            seed in any::<u64>()
        ) {
            use rand::Rng;
            let mut rng = crate::seed::rng_from_seed(seed);
            let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t = SineTransform::new(n);
            let u = t.forward(&c);
            let back = t.inverse(&u);
            prop_assert!(rel_err(&back, &c) < 1e-12);
            prop_assert!(rel_err(&u, &sine_transform_direct(&c)) < 1e-12);
            prop_assert!(rel_err(&back, &inverse_sine_transform_direct(&u)) < 1e-12);
            let cu: f64 = u.iter().map(|v| v * v).sum();
            let cc: f64 = c.iter().map(|v| v * v).sum();
            prop_assert!((cu / (n + 1) as f64 - cc).abs() <= 1e-12 * cc);
        }
    }
}
