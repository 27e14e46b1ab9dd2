use serde::Serialize;

use crate::curve::CountingCurve;
use crate::error::{Error, Result};
use crate::numeric::linear_fit;

/// `log N(E) ≈ log m1 + m2 · E^{−p}` on a window, plus the model-free slope
/// of `log|log N|` against `log E`.
#[derive(Debug, Clone, Serialize)]
pub struct TailFit {
    pub window: (f64, f64),
    pub exponent: f64,
    pub points: usize,
    pub m1: f64,
    pub m2: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
    /// `None` when fewer than two points have `0 < N < 1`.
    pub double_log_slope: Option<f64>,
    pub double_log_r_squared: Option<f64>,
}

pub fn fit_tail(curve: &CountingCurve, window: (f64, f64), exponent: f64) -> Result<TailFit> {
    if !(window.0 < window.1) {
        return Err(Error::InvalidArgument(format!("empty window [{}, {}]", window.0, window.1)));
    }
    if !(exponent > 0.0) {
        return Err(Error::InvalidArgument(format!("tail exponent must be positive, got {exponent}")));
    }
    let pts: Vec<(f64, f64)> = curve
        .points()
        .filter(|&(e, v)| e >= window.0 && e <= window.1 && v > 0.0)
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.powf(-exponent)).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;

    let dl: Vec<(f64, f64)> = pts
        .iter()
        .filter(|p| p.1 < 1.0)
        .map(|p| (p.0.ln(), (-p.1.ln()).ln()))
        .collect();
    let (slope, r2) = if dl.len() >= 2 {
        let (a, b): (Vec<f64>, Vec<f64>) = dl.into_iter().unzip();
        match linear_fit(&a, &b) {
            Ok(f) => (Some(f.slope), Some(f.r_squared)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(TailFit {
        window,
        exponent,
        points: pts.len(),
        m1: fit.intercept.exp(),
        m2: fit.slope,
        r_squared: fit.r_squared,
        rms_residual: fit.rms_residual,
        double_log_slope: slope,
        double_log_r_squared: r2,
    })
}

/// `[E0, 10 E0]` where `E0` is the first grid energy with a positive value.
pub fn lowest_positive_decade(curve: &CountingCurve) -> Option<(f64, f64)> {
    curve.points().find(|&(_, v)| v > 0.0).map(|(e, _)| (e, 10.0 * e))
}
