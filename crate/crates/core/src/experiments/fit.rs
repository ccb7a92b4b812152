use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Least-squares line through `(log2(1/δ), log2(value))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// `(δ, value)` pairs as given.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn fit_exponent(series: &[(f64, f64)]) -> Result<ExponentFit> {
    if series.len() < 3 {
        return Err(invalid("series", format!("{} points; at least 3 are needed", series.len())));
    }
    for &(d, v) in series {
        if !(d > 0.0 && d < 1.0) {
            return Err(invalid("series", format!("delta {d} outside (0, 1)")));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid("series", format!("value {v} is not positive")));
        }
    }
    let xs: Vec<f64> = series.iter().map(|&(d, _)| -d.log2()).collect();
    let ys: Vec<f64> = series.iter().map(|&(_, v)| v.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("series", "all deltas are equal"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(ExponentFit {
        points: series.to_vec(),
        slope,
        intercept,
        max_residual,
    })
}
