//! Deterministic kernel integrals: unit cells of `phi`, the scaled
//! exponential-weighted integral and the semigroup smoothing integral.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fbm::{fgn_autocovariance, kernel_phi, HurstParameter};
use crate::quadrature::GaussRule;
use crate::stats::fit_slope;

/// `int_0^1 int_0^1 phi(u + i - v - j) du dv` in closed form and by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiCellCheck {
    pub i: usize,
    pub j: usize,
    pub analytic: f64,
    /// Off-diagonal cells only.
    pub quadrature: Option<f64>,
    /// `max(i, j)^{2H-1} / 2`, off-diagonal cells only.
    pub bound: Option<f64>,
}

impl PhiCellCheck {
    pub fn relative_error(&self) -> f64 {
        self.quadrature
            .map_or(0.0, |q| (q - self.analytic).abs() / self.analytic.abs())
    }

    pub fn bound_holds(&self) -> bool {
        self.bound.is_none_or(|b| self.analytic <= b)
    }
}

pub fn check_phi_cell_integral(i: usize, j: usize, h: HurstParameter) -> PhiCellCheck {
    if i == j {
        return PhiCellCheck {
            i,
            j,
            analytic: 1.0,
            quadrature: None,
            bound: None,
        };
    }
    let k = i.abs_diff(j);
    PhiCellCheck {
        i,
        j,
        analytic: fgn_autocovariance(k, h),
        quadrature: Some(phi_cell_quadrature(k, h)),
        bound: Some(0.5 * (i.max(j) as f64).powf(2.0 * h.value() - 1.0)),
    }
}

fn phi(y: f64, h: HurstParameter) -> f64 {
    kernel_phi(y, h).expect("kernel argument is nonzero")
}

/// Cell at offset `k >= 1`. For `k >= 2` the integrand is smooth; the
/// `k = 1` cell has an integrable corner singularity at `u = 0, v = 1`.
fn phi_cell_quadrature(k: usize, h: HurstParameter) -> f64 {
    let rule = GaussRule::default();
    if k >= 2 {
        let k = k as f64;
        return rule.integrate_2d((0.0, 1.0), (0.0, 1.0), |u, v| phi(u + k - v, h));
    }
    // a = u, b = 1 - v, so the argument is a + b. Both triangles are equal by
    // symmetry; on b <= a put b = a t (Duffy) and a = p^{1/(2H)}, which
    // absorbs the remaining a^{2H-1} factor.
    let two_h = 2.0 * h.value();
    2.0 * rule.integrate_2d((0.0, 1.0), (0.0, 1.0), |p, t| {
        let a = p.powf(1.0 / two_h);
        let jacobian = a * a / (two_h * p);
        phi(a + a * t, h) * jacobian
    })
}

/// Breakpoints `top * 2^-k`, `k = 0..levels`, ascending, preceded by 0.
fn geometric_breaks(top: f64, levels: i32) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=levels).rev().map(|k| top * 0.5f64.powi(k)).collect();
    b.insert(0, 0.0);
    b
}

/// `int_0^1 r^a e^{-v(1+r)} (1-r)^{2H-2} dr`.
fn inner_r(v: f64, a: i32, h: HurstParameter, rule: &GaussRule) -> f64 {
    let e = 2.0 * h.value() - 1.0;
    let q = 1.0 / e;
    let f = |r: f64| r.powi(a) * (-v * (1.0 + r)).exp();
    let mut total = 0.0;
    // [0, 1/2]: smooth, graded toward r = 0 where e^{-vr} is steep
    for w in geometric_breaks(0.5, 6).windows(2) {
        total += rule.integrate(w[0], w[1], |r| f(r) * (1.0 - r).powf(e - 1.0));
    }
    // [1/2, 1]: 1 - r = w^q removes the endpoint singularity
    total += q * rule.integrate(0.0, 0.5f64.powf(e), |w| f(1.0 - w.powf(q)));
    total
}

/// Scaled triangle integral over `{0 <= u <= v <= theta}` in `lambda`-units.
fn triangle(theta: f64, k1: i32, k2: i32, h: HurstParameter, rule: &GaussRule) -> f64 {
    let s = (k1 + k2) as f64 + 2.0 * h.value() - 1.0;
    let top = theta.min(60.0);
    let breaks = geometric_breaks(top, 20);
    let g = |v: f64| v.powf(s) * inner_r(v, k1, h, rule);
    // first panel: v = b q^{1/(s+1)} absorbs v^s
    let b = breaks[1];
    let mut total = b.powf(s + 1.0) / (s + 1.0)
        * rule.integrate(0.0, 1.0, |q| inner_r(b * q.powf(1.0 / (s + 1.0)), k1, h, rule));
    for w in breaks[1..].windows(2) {
        total += rule.integrate(w[0], w[1], g);
    }
    total
}

/// `lambda^{2H+k1+k2} int_0^t int_0^t u^k1 v^k2 e^{-lambda(u+v)} phi(u-v) du dv`.
///
/// The value depends on `lambda t` only. Each half of the square is mapped
/// to `u = v r`, which separates the diagonal singularity.
pub fn check_lambda_phi_bound(
    lambda: f64,
    t: f64,
    kappa1: u8,
    kappa2: u8,
    h: HurstParameter,
) -> Result<f64> {
    if !(lambda > 0.0 && t > 0.0 && lambda.is_finite() && t.is_finite()) {
        return domain(format!("lambda and t must be positive, got {lambda}, {t}"));
    }
    if kappa1 > 1 || kappa2 > 1 {
        return domain("kappa must be 0 or 1");
    }
    let rule = GaussRule::default();
    let theta = lambda * t;
    let (k1, k2) = (kappa1 as i32, kappa2 as i32);
    Ok(h.alpha() * (triangle(theta, k1, k2, h, &rule) + triangle(theta, k2, k1, h, &rule)))
}

/// Single-mode value of
/// `int_s^t int_s^t <A^d E(t-u) x, A^d E(t-v) x> phi(u-v) du dv` for a unit
/// eigenvector with eigenvalue `lambda`, `t - s = ell`.
pub fn smoothing_integral(lambda: f64, ell: f64, delta: f64, h: HurstParameter) -> Result<f64> {
    Ok(lambda.powf(2.0 * (delta - h.value())) * check_lambda_phi_bound(lambda, ell, 0, 0, h)?)
}

/// Exponent fit of `sup_n smoothing_integral(lambda_n, ell)` against `ell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingExponentFit {
    pub delta: f64,
    pub ells: Vec<f64>,
    pub sup_values: Vec<f64>,
    pub fitted_exponent: f64,
    pub halfwidth: f64,
    /// `2(H - delta)`
    pub theoretical_exponent: f64,
}

pub fn fit_smoothing_exponent(
    eigenvalues: &[f64],
    delta: f64,
    ells: &[f64],
    h: HurstParameter,
) -> Result<SmoothingExponentFit> {
    if !(0.0..=h.value()).contains(&delta) {
        return domain(format!("delta must lie in [0, H], got {delta}"));
    }
    if eigenvalues.is_empty() {
        return domain("no eigenvalues");
    }
    let sup_values = ells
        .iter()
        .map(|&ell| {
            eigenvalues.iter().try_fold(0.0f64, |m, &l| {
                Ok(m.max(smoothing_integral(l, ell, delta, h)?))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_slope(ells, &sup_values)?;
    Ok(SmoothingExponentFit {
        delta,
        ells: ells.to_vec(),
        sup_values,
        fitted_exponent: fit.slope,
        halfwidth: fit.halfwidth,
        theoretical_exponent: 2.0 * (h.value() - delta),
    })
}
