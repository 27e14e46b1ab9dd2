//! Ensemble statistics, landscape-law constants and Lifshitz-tail fits.

mod law;
mod tail;

pub use law::{landscape_law_check, scale_grid, scaled_overlay, LandscapeLawReport, LowerWitness};
pub use tail::{fit_tail, lowest_positive_decade, TailFit};

use crate::curve::{CountingCurve, CurveKind};
use crate::error::{Error, Result};

/// Pointwise mean over realizations, with the standard error of the mean.
pub fn ensemble_mean(curves: &[CountingCurve]) -> Result<CountingCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidArgument("ensemble of zero curves".into()))?;
    if let Some(c) = curves.iter().find(|c| c.energies != first.energies) {
        return Err(Error::InvalidArgument(format!(
            "curves must share one energy grid ({} vs {} points)",
            c.energies.len(),
            first.energies.len()
        )));
    }
    let k = curves.len() as f64;
    let n = first.len();
    let mut mean = vec![0.0; n];
    let mut err = vec![0.0; n];
    for i in 0..n {
        let m = curves.iter().map(|c| c.values[i]).sum::<f64>() / k;
        mean[i] = m;
        if curves.len() > 1 {
            let var = curves.iter().map(|c| (c.values[i] - m).powi(2)).sum::<f64>() / (k - 1.0);
            err[i] = (var / k).sqrt();
        }
    }
    let mut out = CountingCurve::new(first.energies.clone(), mean, CurveKind::EnsembleMean)?;
    out.std_err = Some(err);
    Ok(out)
}
