use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LandscapeFunction;
use crate::curve::{check_grid, CountingCurve, CurveKind};
use crate::error::{Error, Result};
use crate::graph::{BallSearch, Covering};

/// How the ball radius shrinks with energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RadiusPolicy {
    /// `R = E^{-1/2}`.
    InvSqrt,
    /// `R = E^{-1/β}`, for graphs with walk dimension `β`.
    InvBeta { beta: f64 },
}

impl RadiusPolicy {
    pub fn radius(self, energy: f64) -> Result<f64> {
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::InvalidArgument(format!("energy must be positive, got {energy}")));
        }
        Ok(match self {
            RadiusPolicy::InvSqrt => energy.powf(-0.5),
            RadiusPolicy::InvBeta { beta } => energy.powf(-1.0 / beta),
        })
    }

    pub fn validate(self) -> Result<()> {
        match self {
            RadiusPolicy::InvBeta { beta } if !(beta > 0.0 && beta.is_finite()) => {
                Err(Error::InvalidArgument(format!("walk dimension must be positive, got {beta}")))
            }
            _ => Ok(()),
        }
    }
}

/// Sorted per-ball minima of `1/u` over `B ∩ A`.
fn ball_minima(u: &LandscapeFunction, cov: &Covering) -> Result<Vec<f64>> {
    let region = &u.region;
    let g = region.graph();
    let mut search = BallSearch::new(g);
    let mut members = Vec::new();
    let mut minima = Vec::with_capacity(cov.len());
    for &c in &cov.centers {
        search.collect(c, cov.radius, &mut members)?;
        let m = members
            .iter()
            .filter_map(|&x| region.local_index(x))
            .map(|i| 1.0 / u.values[i])
            .fold(f64::INFINITY, f64::min);
        if m.is_finite() {
            minima.push(m);
        }
    }
    minima.sort_by(f64::total_cmp);
    Ok(minima)
}

fn count_leq(sorted: &[f64], energy: f64) -> usize {
    sorted.partition_point(|&m| m <= energy)
}

/// `N_u(E) = #{B ∈ 𝒫 : min_{B∩A} 1/u ≤ E} / |A|` for a fixed covering.
pub fn landscape_counting(u: &LandscapeFunction, cov: &Covering, energy: f64) -> Result<f64> {
    let minima = ball_minima(u, cov)?;
    Ok(count_leq(&minima, energy) as f64 / u.region.len() as f64)
}

/// Evaluates `N_u` at arbitrary energies with the covering radius tied to
/// the energy. Coverings are keyed by `⌊R⌋` and built at that radius; below
/// `R = 1` the balls are single sites.
#[derive(Debug)]
pub struct LandscapeCounter<'u> {
    u: &'u LandscapeFunction,
    policy: RadiusPolicy,
    cache: Mutex<HashMap<u64, Arc<Vec<f64>>>>,
}

impl<'u> LandscapeCounter<'u> {
    pub fn new(u: &'u LandscapeFunction, policy: RadiusPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(LandscapeCounter {
            u,
            policy,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Covering radius used at `energy`: `⌊R(E)⌋`, or 0 for singletons.
    pub fn covering_radius(&self, energy: f64) -> Result<u64> {
        let r = self.policy.radius(energy)?;
        // radii beyond any region size behave alike; cap to keep keys finite
        Ok(r.min(1e12).floor() as u64)
    }

    fn minima(&self, key: u64) -> Result<Arc<Vec<f64>>> {
        if let Some(m) = self.cache.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let m = if key == 0 {
            let mut v = self.u.effective_potential();
            v.sort_by(f64::total_cmp);
            v
        } else {
            let cov = Covering::for_region(&self.u.region, key as f64)?;
            ball_minima(self.u, &cov)?
        };
        let m = Arc::new(m);
        self.cache.lock().unwrap().entry(key).or_insert_with(|| m.clone());
        Ok(m)
    }

    pub fn value(&self, energy: f64) -> Result<f64> {
        let key = self.covering_radius(energy)?;
        let m = self.minima(key)?;
        Ok(count_leq(&m, energy) as f64 / self.u.region.len() as f64)
    }

    /// Number of balls in the covering used at `energy`.
    pub fn ball_count(&self, energy: f64) -> Result<usize> {
        Ok(self.minima(self.covering_radius(energy)?)?.len())
    }

    /// Builds the coverings for all distinct radii in parallel, then evaluates.
    pub fn curve(&self, energies: &[f64]) -> Result<CountingCurve> {
        check_grid(energies)?;
        let mut keys = energies
            .iter()
            .map(|&e| self.covering_radius(e))
            .collect::<Result<Vec<_>>>()?;
        keys.sort_unstable();
        keys.dedup();
        keys.par_iter().map(|&k| self.minima(k).map(|_| ())).collect::<Result<Vec<_>>>()?;
        let values = energies.iter().map(|&e| self.value(e)).collect::<Result<Vec<_>>>()?;
        CountingCurve::new(energies.to_vec(), values, CurveKind::Landscape)
    }
}

pub fn counting_curve_landscape(u: &LandscapeFunction, energies: &[f64], policy: RadiusPolicy) -> Result<CountingCurve> {
    LandscapeCounter::new(u, policy)?.curve(energies)
}
