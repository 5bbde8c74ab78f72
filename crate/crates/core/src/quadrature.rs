//! Gauss–Legendre rules on intervals and tensor-product squares.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes per axis used by the verification integrals.
pub const DEFAULT_NODES: usize = 32;

#[derive(Debug, Clone)]
pub struct GaussRule {
    pairs: Vec<(f64, f64)>,
}

impl GaussRule {
    pub fn new(nodes: usize) -> Self {
        let degree = NonZeroUsize::new(nodes.max(1)).unwrap();
        let rule = GaussLegendre::new(degree);
        Self {
            pairs: rule.as_node_weight_pairs().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Tensor-product rule over `[a0, b0] × [a1, b1]`.
    pub fn integrate_2d(
        &self,
        (a0, b0): (f64, f64),
        (a1, b1): (f64, f64),
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> f64 {
        let mut total = 0.0;
        for (x, wx) in self.mapped(a0, b0) {
            let mut inner = 0.0;
            for (y, wy) in self.mapped(a1, b1) {
                inner += wy * f(x, y);
            }
            total += wx * inner;
        }
        total
    }
}

impl Default for GaussRule {
    fn default() -> Self {
        Self::new(DEFAULT_NODES)
    }
}
