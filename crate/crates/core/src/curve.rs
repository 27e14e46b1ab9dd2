//! Counting functions sampled on an energy grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Ids,
    Landscape,
    EnsembleMean,
}

impl CurveKind {
    pub fn label(self) -> &'static str {
        match self {
            CurveKind::Ids => "ids",
            CurveKind::Landscape => "landscape",
            CurveKind::EnsembleMean => "ensemble_mean",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingCurve {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: CurveKind,
    /// Per-point standard error, present on ensemble means.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_err: Option<Vec<f64>>,
}

impl CountingCurve {
    pub fn new(energies: Vec<f64>, values: Vec<f64>, kind: CurveKind) -> Result<Self> {
        check_grid(&energies)?;
        if values.len() != energies.len() {
            return Err(Error::DimensionMismatch {
                expected: energies.len(),
                got: values.len(),
            });
        }
        Ok(CountingCurve {
            energies,
            values,
            kind,
            std_err: None,
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.energies.iter().copied().zip(self.values.iter().copied())
    }
}

/// Energies must be finite and strictly ascending.
pub fn check_grid(energies: &[f64]) -> Result<()> {
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidArgument("energy grid contains a non-finite value".into()));
    }
    if energies.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("energy grid must be strictly ascending".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_grid() {
        assert!(CountingCurve::new(vec![1.0, 0.5], vec![0.0, 0.0], CurveKind::Ids).is_err());
        assert!(CountingCurve::new(vec![0.5, 1.0], vec![0.0], CurveKind::Ids).is_err());
        let c = CountingCurve::new(vec![0.5, 1.0], vec![0.1, 0.2], CurveKind::Landscape).unwrap();
        assert!(c.is_nondecreasing());
    }
}
