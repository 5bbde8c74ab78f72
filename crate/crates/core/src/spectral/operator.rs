use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Closed-form eigenvalue rule used to extend an operator past its stored
/// truncation (tail sums, admissibility probes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenFormula {
    /// `lambda_n = n^2 pi^2`, the Dirichlet Laplacian on `(0, 1)`.
    DirichletUnitInterval,
}

impl EigenFormula {
    pub fn eigenvalue(&self, n: usize) -> f64 {
        match self {
            EigenFormula::DirichletUnitInterval => {
                let x = n as f64 * PI;
                x * x
            }
        }
    }
}

/// Self-adjoint positive operator given by its eigenvalues in the basis
/// `e_1, e_2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralOperator {
    eigenvalues: Vec<f64>,
    label: String,
    formula: Option<EigenFormula>,
}

impl SpectralOperator {
    /// `-d^2/dx^2` on `(0, 1)` with homogeneous Dirichlet conditions,
    /// eigenfunctions `sqrt(2) sin(n pi x)`.
    pub fn dirichlet_laplacian(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return domain("operator needs at least one mode");
        }
        let formula = EigenFormula::DirichletUnitInterval;
        Ok(Self {
            eigenvalues: (1..=n_modes).map(|n| formula.eigenvalue(n)).collect(),
            label: "dirichlet-laplacian-(0,1)".into(),
            formula: Some(formula),
        })
    }

    /// Operator from explicit eigenvalues; tail sums are unavailable.
    pub fn custom(eigenvalues: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return domain("operator needs at least one mode");
        }
        if eigenvalues[0].is_nan() || eigenvalues[0] <= 0.0 || eigenvalues.iter().any(|l| !l.is_finite()) {
            return domain("eigenvalues must be finite and strictly positive");
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return domain("eigenvalues must be nondecreasing");
        }
        Ok(Self {
            eigenvalues,
            label: label.into(),
            formula: None,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn formula(&self) -> Option<EigenFormula> {
        self.formula
    }

    /// `lambda_n` for 1-based `n`, extended by the closed form when stored
    /// values run out.
    pub fn eigenvalue(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        self.eigenvalues
            .get(n - 1)
            .copied()
            .or_else(|| self.formula.map(|f| f.eigenvalue(n)))
    }

    /// Same operator on the first `n` modes (or more, via the formula).
    pub fn with_modes(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("operator needs at least one mode");
        }
        let eigenvalues = (1..=n)
            .map(|k| self.eigenvalue(k))
            .collect::<Option<Vec<_>>>();
        match eigenvalues {
            Some(eigenvalues) => Ok(Self {
                eigenvalues,
                label: self.label.clone(),
                formula: self.formula,
            }),
            None => domain(format!(
                "operator {} has {} stored eigenvalues and no extension rule",
                self.label,
                self.len()
            )),
        }
    }
}
