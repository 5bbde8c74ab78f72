use serde::{Deserialize, Serialize};

/// Solution coefficients `<X(t), e_n>` for `n = 1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralState {
    pub coeffs: Vec<f64>,
    pub time: f64,
}

impl SpectralState {
    pub fn new(coeffs: Vec<f64>, time: f64) -> Self {
        Self { coeffs, time }
    }

    pub fn zeros(n: usize, time: f64) -> Self {
        Self::new(vec![0.0; n], time)
    }

    /// Unit mass on 1-based `mode`.
    pub fn unit(n: usize, mode: usize) -> Self {
        let mut s = Self::zeros(n, 0.0);
        s.coeffs[mode - 1] = 1.0;
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}
