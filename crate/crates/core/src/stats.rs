//! Monte Carlo aggregation and log-log slope fitting.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Root mean square of per-sample errors with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsEstimate {
    pub rms: f64,
    pub std_error: f64,
}

/// Mean and standard error of the mean, summed in index order.
pub fn mean_and_std_error(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return domain(format!("need at least 2 samples, got {}", xs.len()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// `rms = sqrt(mean e^2)`; SE is half the relative SE of the mean square.
pub fn rms_error(errors: &[f64]) -> Result<RmsEstimate> {
    if errors.iter().any(|e| !e.is_finite()) {
        return domain("non-finite error sample");
    }
    let squares: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let (ms, se_ms) = mean_and_std_error(&squares)?;
    let rms = ms.sqrt();
    let std_error = if ms > 0.0 { 0.5 * rms * se_ms / ms } else { 0.0 };
    Ok(RmsEstimate { rms, std_error })
}

/// Least-squares slope and its standard error; two points give SE 0.
pub(crate) fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    if xs.len() < 3 {
        return (slope, 0.0);
    }
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

/// Fitted exponent `p` in `y ~ x^p` with halfwidth `2 * SE`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub halfwidth: f64,
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return domain(format!("length mismatch: {} vs {}", xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return domain(format!("need at least 3 points, got {}", xs.len()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return domain("slope fit needs positive finite values");
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    if lx.iter().all(|x| *x == lx[0]) {
        return domain("slope fit needs at least two distinct abscissae");
    }
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, se) = ols(&lx, &ly);
    Ok(SlopeFit {
        slope,
        halfwidth: 2.0 * se,
    })
}
