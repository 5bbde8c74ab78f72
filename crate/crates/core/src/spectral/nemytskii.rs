use serde::{Deserialize, Serialize};

use super::transform::SineTransform;
use super::SpectralState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NemytskiiKind {
    Zero,
    /// `F(u) = L u`.
    IdentityScaled,
    /// `F(u)(x) = sin(u(x))`, evaluated by collocation on the sine grid.
    PointwiseSin,
}

/// Drift `F` of the equation together with its Lipschitz bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NemytskiiMap {
    pub kind: NemytskiiKind,
    pub lipschitz_bound: f64,
}

impl NemytskiiMap {
    pub fn zero() -> Self {
        Self {
            kind: NemytskiiKind::Zero,
            lipschitz_bound: 0.0,
        }
    }

    pub fn identity_scaled(l: f64) -> Self {
        Self {
            kind: NemytskiiKind::IdentityScaled,
            lipschitz_bound: l.abs(),
        }
    }

    pub fn pointwise_sin() -> Self {
        Self {
            kind: NemytskiiKind::PointwiseSin,
            lipschitz_bound: 1.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kind == NemytskiiKind::Zero
    }
}

/// Reusable buffers for evaluating `F` on states of a fixed size.
#[derive(Debug, Clone)]
pub struct NemytskiiWorkspace {
    transform: SineTransform,
    scratch: Vec<f64>,
}

impl NemytskiiWorkspace {
    pub fn new(n: usize) -> Self {
        let transform = SineTransform::new(n);
        let scratch = vec![0.0; transform.scratch_len()];
        Self { transform, scratch }
    }

    pub fn len(&self) -> usize {
        self.transform.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes the coefficients of `F(x)` into `out`.
    pub fn evaluate(&mut self, f: &NemytskiiMap, coeffs: &[f64], out: &mut [f64]) {
        debug_assert_eq!(coeffs.len(), out.len());
        match f.kind {
            NemytskiiKind::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            NemytskiiKind::IdentityScaled => {
                for (o, c) in out.iter_mut().zip(coeffs) {
                    *o = f.lipschitz_bound * c;
                }
            }
            NemytskiiKind::PointwiseSin => {
                out.copy_from_slice(coeffs);
                self.transform.forward_in_place(out, &mut self.scratch);
                out.iter_mut().for_each(|v| *v = v.sin());
                self.transform.inverse_in_place(out, &mut self.scratch);
            }
        }
    }
}

pub fn apply_nemytskii(f: &NemytskiiMap, x: &SpectralState) -> SpectralState {
    let mut out = vec![0.0; x.len()];
    if !x.is_empty() {
        NemytskiiWorkspace::new(x.len()).evaluate(f, &x.coeffs, &mut out);
    }
    SpectralState::new(out, x.time)
}
