use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentConfig;
use crate::analysis::{
    ensemble_mean, fit_tail, landscape_law_check, lowest_positive_decade, scale_grid, scaled_overlay,
    LandscapeLawReport, TailFit,
};
use crate::curve::CountingCurve;
use crate::error::{Error, Result};
use crate::graph::Region;
use crate::landscape::{solve_landscape, uncertainty_identity_residual, LandscapeCounter, LandscapeFunction, SOLVE_TOL};
use crate::operator::{assemble, sample_disorder};
use crate::spectral::ids_curve;

/// Curves for one disorder realization.
#[derive(Debug, Clone)]
pub struct Realization {
    pub index: u64,
    pub ids: Option<CountingCurve>,
    pub nu: Option<CountingCurve>,
    pub landscape: Option<LandscapeFunction>,
    pub identity_residual: Option<f64>,
    pub law: Option<LandscapeLawReport>,
}

/// Which curve families to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub ids: bool,
    pub landscape: bool,
}

impl Stages {
    pub const ALL: Stages = Stages { ids: true, landscape: true };
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Overlay {
    pub c1: f64,
    pub c2: f64,
    pub curve: CountingCurve,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTime {
    pub stage: &'static str,
    pub seconds: f64,
}

/// Everything a run produces, before it is written to disk.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub region: Region,
    pub energies: Vec<f64>,
    pub realizations: Vec<Realization>,
    pub ids_mean: Option<CountingCurve>,
    pub nu_mean: Option<CountingCurve>,
    pub ensemble_law: Option<LandscapeLawReport>,
    pub tail_fits: Vec<(String, TailFit)>,
    pub tail_errors: Vec<(String, String)>,
    pub overlays: Vec<Overlay>,
    pub checks: Vec<Check>,
    pub times: Vec<StageTime>,
}

impl RunResult {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Timer(Vec<StageTime>, Instant);

impl Timer {
    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.0.push(StageTime {
            stage,
            seconds: (now - self.1).as_secs_f64(),
        });
        self.1 = now;
    }
}

fn mean_of(counters: &[LandscapeCounter<'_>], e: f64) -> Result<f64> {
    let mut s = 0.0;
    for c in counters {
        s += c.value(e)?;
    }
    Ok(s / counters.len() as f64)
}

/// Runs the whole experiment in memory. `region` may be passed in to reuse a
/// graph that was already built.
pub fn execute(cfg: &ExperimentConfig, region: Option<Region>, stages: Stages) -> Result<RunResult> {
    cfg.validate()?;
    let mut timer = Timer(Vec::new(), Instant::now());
    let region = match region {
        Some(r) => r,
        None => cfg.build_region().map_err(|e| e.in_stage("gen"))?,
    };
    timer.lap("gen");
    let energies = cfg.energy.energies();
    let disorder_cfg = cfg.disorder_config();

    let solved = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let d = sample_disorder(&region, &disorder_cfg, k).map_err(|e| e.in_stage("sample"))?;
            let op = assemble(&region, &d, cfg.boundary).map_err(|e| e.in_stage("assemble"))?;
            let ids = if stages.ids {
                Some(ids_curve(&op, &energies).map_err(|e| e.in_stage("ids"))?)
            } else {
                None
            };
            let (u, resid) = if stages.landscape {
                let u = solve_landscape(&op, SOLVE_TOL).map_err(|e| e.in_stage("solve"))?;
                let ones = vec![1.0; op.dim()];
                let r = uncertainty_identity_residual(&op, &u, &ones)?;
                (Some(u), Some(r))
            } else {
                (None, None)
            };
            Ok((k, ids, u, resid))
        })
        .collect::<Result<Vec<_>>>()?;
    timer.lap("solve");

    let mut ids_curves = Vec::with_capacity(solved.len());
    let mut landscapes = Vec::with_capacity(solved.len());
    let mut residuals = Vec::with_capacity(solved.len());
    for (_, ids, u, r) in solved {
        ids_curves.push(ids);
        landscapes.push(u);
        residuals.push(r);
    }
    let counters = landscapes
        .iter()
        .flatten()
        .map(|u| LandscapeCounter::new(u, cfg.radius))
        .collect::<Result<Vec<_>>>()?;
    let scales = scale_grid();
    let per_real = ids_curves
        .par_iter()
        .enumerate()
        .map(|(i, ids)| -> Result<_> {
            let Some(counter) = counters.get(i) else {
                return Ok((None, None));
            };
            let nu = counter.curve(&energies).map_err(|e| e.in_stage("landscape"))?;
            let law = match ids {
                Some(ids) => Some(
                    landscape_law_check(&cfg.name, ids, &|e| counter.value(e), &scales)
                        .map_err(|e| e.in_stage("compare"))?,
                ),
                None => None,
            };
            Ok((Some(nu), law))
        })
        .collect::<Result<Vec<_>>>()?;
    timer.lap("landscape");

    let mean = |curves: Vec<CountingCurve>| -> Result<Option<CountingCurve>> {
        if curves.is_empty() {
            Ok(None)
        } else {
            ensemble_mean(&curves).map(Some)
        }
    };
    let ids_mean = mean(ids_curves.iter().flatten().cloned().collect())?;
    let nu_mean = mean(per_real.iter().filter_map(|p| p.0.clone()).collect())?;

    let ensemble_law = match &ids_mean {
        Some(ids) if !counters.is_empty() => Some(
            landscape_law_check(&cfg.name, ids, &|e| mean_of(&counters, e), &scales).map_err(|e| e.in_stage("compare"))?,
        ),
        _ => None,
    };

    let mut overlays = Vec::new();
    if !counters.is_empty() {
        for o in &cfg.overlay {
            let curve = scaled_overlay(&energies, &|e| mean_of(&counters, e), o.c1, o.c2)?;
            overlays.push(Overlay {
                c1: o.c1,
                c2: o.c2,
                curve,
            });
        }
    }
    drop(counters);
    timer.lap("compare");

    let realizations: Vec<Realization> = ids_curves
        .into_iter()
        .zip(landscapes)
        .zip(residuals)
        .zip(per_real)
        .enumerate()
        .map(|(k, (((ids, u), r), (nu, law)))| Realization {
            index: k as u64,
            ids,
            nu,
            landscape: u,
            identity_residual: r,
            law,
        })
        .collect();

    let mut tail_fits = Vec::new();
    let mut tail_errors = Vec::new();
    for (label, curve) in [("ids_mean", &ids_mean), ("landscape_mean", &nu_mean)] {
        let Some(curve) = curve else { continue };
        let window = match cfg.tail.window {
            Some([lo, hi]) => Some((lo, hi)),
            None => lowest_positive_decade(curve),
        };
        let outcome = match window {
            Some(w) => fit_tail(curve, w, cfg.tail.exponent),
            None => Err(Error::TooFewPoints(0)),
        };
        match outcome {
            Ok(fit) => tail_fits.push((label.to_string(), fit)),
            Err(e) => tail_errors.push((label.to_string(), e.to_string())),
        }
    }
    timer.lap("fit");

    let checks = run_checks(&realizations, ensemble_law.as_ref());
    Ok(RunResult {
        config: cfg.clone(),
        region,
        energies,
        realizations,
        ids_mean,
        nu_mean,
        ensemble_law,
        tail_fits,
        tail_errors,
        overlays,
        checks,
        times: timer.0,
    })
}

fn run_checks(realizations: &[Realization], ensemble_law: Option<&LandscapeLawReport>) -> Vec<Check> {
    let mut checks = Vec::new();
    let ids: Vec<&CountingCurve> = realizations.iter().filter_map(|r| r.ids.as_ref()).collect();
    if !ids.is_empty() {
        let bad = ids
            .iter()
            .filter(|c| !c.is_nondecreasing() || c.values.iter().any(|v| !(0.0..=1.0).contains(v)))
            .count();
        checks.push(Check {
            name: "ids_monotone_in_unit_interval".into(),
            passed: bad == 0,
            detail: format!("{bad} of {} curves violate", ids.len()),
        });
    }
    let resid: Vec<f64> = realizations.iter().filter_map(|r| r.identity_residual).collect();
    if !resid.is_empty() {
        let worst = resid.iter().copied().fold(0.0, f64::max);
        checks.push(Check {
            name: "uncertainty_identity".into(),
            passed: worst <= 1e-8,
            detail: format!("max residual {worst:.3e}"),
        });
        let min_u = realizations
            .iter()
            .filter_map(|r| r.landscape.as_ref())
            .map(|u| u.min())
            .fold(f64::INFINITY, f64::min);
        checks.push(Check {
            name: "landscape_positive".into(),
            passed: min_u > 0.0,
            detail: format!("min u {min_u:.3e}"),
        });
    }
    let laws: Vec<&LandscapeLawReport> = realizations.iter().filter_map(|r| r.law.as_ref()).collect();
    if !laws.is_empty() {
        let failing = laws.iter().filter(|l| !l.upper_holds()).count();
        let worst_c = laws.iter().filter_map(|l| l.c_up).fold(0.0, f64::max);
        checks.push(Check {
            name: "landscape_law_upper_per_realization".into(),
            passed: failing == 0,
            detail: format!("{failing} realizations without C in [1, 64]; largest C {worst_c:.4}"),
        });
    }
    if let Some(l) = ensemble_law {
        checks.push(Check {
            name: "landscape_law_upper_ensemble".into(),
            passed: l.upper_holds(),
            detail: l.status.clone(),
        });
    }
    checks
}
