use serde::Serialize;

use crate::curve::{CountingCurve, CurveKind};
use crate::error::{Error, Result};

/// Geometric scale grid `2^{k/4}`, `k = 0..=24`, spanning `[1, 64]`.
pub fn scale_grid() -> Vec<f64> {
    (0..=24).map(|k| 2f64.powf(k as f64 / 4.0)).collect()
}

/// Constants for `c1 · N_u(c2 E) ≤ N(E)`: `c2 = 1/C` for the first grid `C`
/// admitting a positive `c1`, and the largest such `c1`.
#[derive(Debug, Clone, Serialize)]
pub struct LowerWitness {
    pub c1: f64,
    pub c2: f64,
    /// `N(E) − c1 · N_u(c2 E)` per energy.
    pub slack: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandscapeLawReport {
    pub model: String,
    pub energies: Vec<f64>,
    pub ids: Vec<f64>,
    pub nu: Vec<f64>,
    /// Least grid constant with `N(E) ≤ N_u(C E)` at every energy.
    pub c_up: Option<f64>,
    /// `N_u(C_up E) − N(E)` per energy when `c_up` exists.
    pub upper_slack: Vec<f64>,
    /// Smallest worst-case violation over the grid when no constant works.
    pub max_violation: f64,
    pub status: String,
    pub lower: Option<LowerWitness>,
}

impl LandscapeLawReport {
    pub fn upper_holds(&self) -> bool {
        self.c_up.is_some()
    }
}

/// Searches `scales` (ascending) for the least `C` with `N(E) ≤ N_u(C E)` on
/// the grid of `ids`, and for the lower constants `(c1, c2)`. `nu` evaluates
/// the landscape counting function at any energy.
pub fn landscape_law_check(
    model: &str,
    ids: &CountingCurve,
    nu: &(dyn Fn(f64) -> Result<f64> + Sync),
    scales: &[f64],
) -> Result<LandscapeLawReport> {
    if scales.is_empty() || scales.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::InvalidArgument("scale grid must be nonempty and positive".into()));
    }
    let energies = &ids.energies;
    let table = scales
        .iter()
        .map(|&c| energies.iter().map(|&e| nu(c * e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let nu_at_e = energies.iter().map(|&e| nu(e)).collect::<Result<Vec<_>>>()?;

    let mut c_up = None;
    let mut upper_slack = Vec::new();
    let mut best_violation = f64::INFINITY;
    for (c, row) in scales.iter().zip(&table) {
        let slack: Vec<f64> = row.iter().zip(&ids.values).map(|(u, n)| u - n).collect();
        let worst = slack.iter().copied().fold(f64::INFINITY, f64::min);
        // counts are ratios of integers; allow for rounding in ensemble means
        if worst >= -1e-12 {
            c_up = Some(*c);
            upper_slack = slack;
            best_violation = 0.0;
            break;
        }
        best_violation = best_violation.min(-worst);
    }

    let mut lower: Option<LowerWitness> = None;
    for c in scales {
        let c2 = 1.0 / c;
        let vals = energies.iter().map(|&e| nu(c2 * e)).collect::<Result<Vec<_>>>()?;
        let c1 = vals
            .iter()
            .zip(&ids.values)
            .filter(|(u, _)| **u > 0.0)
            .map(|(u, n)| n / u)
            .fold(f64::INFINITY, f64::min);
        if !c1.is_finite() || c1 <= 0.0 {
            continue;
        }
        let slack = vals.iter().zip(&ids.values).map(|(u, n)| n - c1 * u).collect();
        lower = Some(LowerWitness { c1, c2, slack });
        break;
    }

    let status = match c_up {
        Some(c) => format!("upper bound holds with C = {c:.4}"),
        None => format!("unbounded in grid (smallest max violation {best_violation:.3e})"),
    };
    Ok(LandscapeLawReport {
        model: model.to_string(),
        energies: energies.clone(),
        ids: ids.values.clone(),
        nu: nu_at_e,
        c_up,
        upper_slack,
        max_violation: best_violation,
        status,
        lower,
    })
}

/// `c1 · N_u(c2 E)` on the given grid.
pub fn scaled_overlay(
    energies: &[f64],
    nu: &(dyn Fn(f64) -> Result<f64> + Sync),
    c1: f64,
    c2: f64,
) -> Result<CountingCurve> {
    let values = energies.iter().map(|&e| nu(c2 * e).map(|v| c1 * v)).collect::<Result<Vec<_>>>()?;
    CountingCurve::new(energies.to_vec(), values, CurveKind::Landscape)
}
