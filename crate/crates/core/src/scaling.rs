//! Least-squares power-law fits.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `ln y = slope·ln x + intercept` by ordinary least squares.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        for v in [x, y] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive(v));
            }
        }
        logs.push((x.ln(), y.ln()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("x", "all abscissae are equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual: f64 = logs
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - residual / syy };
    Ok(LogLogFit { slope, intercept, r_squared })
}
