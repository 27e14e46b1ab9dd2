use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use super::ldlt::BandLdlt;
use super::sparse::SparseSymmetric;
use crate::curve::{check_grid, CountingCurve, CurveKind};
use crate::error::{Error, Result};
use crate::operator::JacobiOperator;

/// Pivots below this fraction of `‖H‖_∞` count as zero eigenvalues.
pub const PIVOT_TOL: f64 = 1e-10;

/// Largest operator handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InertiaResult {
    pub energy: f64,
    pub n_below: usize,
    pub n_at: usize,
    pub n_above: usize,
    /// Perturbation applied to `energy` after a breakdown; zero normally.
    pub shift: f64,
}

impl InertiaResult {
    /// Eigenvalues `≤ E`.
    pub fn count(&self) -> usize {
        self.n_below + self.n_at
    }
}

/// Reusable inertia counter: the matrix and its band ordering are computed
/// once and shared by every energy.
#[derive(Debug, Clone)]
pub struct InertiaCounter {
    matrix: SparseSymmetric,
    perm: Vec<usize>,
    tol: f64,
}

impl InertiaCounter {
    /// `rel_tol` is scaled by `‖H‖_∞` to give the absolute pivot window.
    pub fn new(op: &JacobiOperator, rel_tol: f64) -> Self {
        let matrix = SparseSymmetric::from_operator(op);
        let perm = matrix.band_ordering();
        let tol = rel_tol * matrix.norm_inf().max(f64::MIN_POSITIVE);
        InertiaCounter { matrix, perm, tol }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn bandwidth(&self) -> usize {
        self.matrix.bandwidth(&self.perm)
    }

    fn attempt(&self, e: f64) -> Result<InertiaResult> {
        let f = BandLdlt::factor(&self.matrix, &self.perm, e, self.tol)?;
        let i = f.inertia();
        Ok(InertiaResult {
            energy: e,
            n_below: i.negative,
            n_at: i.zero,
            n_above: i.positive,
            shift: 0.0,
        })
    }

    /// Inertia at `energy`, retrying with a tiny shift after a breakdown.
    fn raw(&self, energy: f64) -> Result<InertiaResult> {
        match self.attempt(energy) {
            Ok(r) => Ok(r),
            Err(first) => {
                let delta = 1e-12 * energy.abs().max(1.0);
                for shift in [delta, -delta] {
                    if let Ok(mut r) = self.attempt(energy + shift) {
                        r.energy = energy;
                        r.shift = shift;
                        return Ok(r);
                    }
                }
                Err(first)
            }
        }
    }

    /// Counts at `energy`. A pivot in the zero window may be a true eigenvalue
    /// or an unlucky elimination order, so the energy is then bracketed by
    /// `E ± δ` with clean factorizations and the difference taken as `n_at`.
    pub fn count(&self, energy: f64) -> Result<InertiaResult> {
        if !energy.is_finite() {
            return Err(Error::InvalidArgument(format!("energy {energy} is not finite")));
        }
        let first = self.raw(energy)?;
        if first.n_at == 0 {
            return Ok(first);
        }
        let mut delta = 10.0 * self.tol;
        for _ in 0..4 {
            let lo = self.raw(energy - delta)?;
            let hi = self.raw(energy + delta)?;
            if lo.n_at == 0 && hi.n_at == 0 && hi.n_below >= lo.n_below {
                return Ok(InertiaResult {
                    energy,
                    n_below: lo.n_below,
                    n_at: hi.n_below - lo.n_below,
                    n_above: hi.n_above,
                    shift: first.shift,
                });
            }
            delta *= 10.0;
        }
        Ok(first)
    }
}

/// Eigenvalue counts of `H^A` relative to `energy` by Sylvester's law.
pub fn count_leq(op: &JacobiOperator, energy: f64, rel_tol: f64) -> Result<InertiaResult> {
    InertiaCounter::new(op, rel_tol).count(energy)
}

/// `N^A(E) = #{λ ≤ E} / |A|` on an ascending grid, energies in parallel.
pub fn ids_curve(op: &JacobiOperator, energies: &[f64]) -> Result<CountingCurve> {
    check_grid(energies)?;
    let counter = InertiaCounter::new(op, PIVOT_TOL);
    let n = counter.dim() as f64;
    let values = energies
        .par_iter()
        .map(|&e| counter.count(e).map(|r| r.count() as f64 / n))
        .collect::<Result<Vec<_>>>()?;
    CountingCurve::new(energies.to_vec(), values, CurveKind::Ids)
}

/// All eigenvalues, ascending, from a dense symmetric eigensolver.
pub fn dense_spectrum(op: &JacobiOperator) -> Result<Vec<f64>> {
    if op.dim() > DENSE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "dense spectrum limited to {DENSE_LIMIT} vertices, operator has {}",
            op.dim()
        )));
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::{Graph, MetricKind, Region};
    use crate::operator::{assemble, BoundaryMode, Disorder};

    fn path_op(n: usize) -> JacobiOperator {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(n, &edges, MetricKind::GraphDistance).unwrap();
        let r = Region::whole(Arc::new(g));
        // Neumann on a path gives diag 1,2,...,2,1; add V to make it 2 everywhere
        let mut d = Disorder::free(&r);
        d.v[0] = 1.0;
        d.v[n - 1] = 1.0;
        assemble(&r, &d, BoundaryMode::Neumann).unwrap()
    }

    #[test]
    fn three_path_counts_at_two() {
        let op = path_op(3);
        let r = count_leq(&op, 2.0, PIVOT_TOL).unwrap();
        assert_eq!((r.n_below, r.n_at, r.n_above), (1, 1, 1));
        assert_eq!(r.shift, 0.0);
    }

    #[test]
    fn degenerate_eigenvalue_is_bracketed() {
        // K6 with free Neumann boundary: spectrum {0, 6 (×5)}
        let n = 6;
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let g = Graph::from_edges(n, &edges, MetricKind::GraphDistance).unwrap();
        let r = Region::whole(Arc::new(g));
        let op = assemble(&r, &Disorder::free(&r), BoundaryMode::Neumann).unwrap();
        let c = InertiaCounter::new(&op, PIVOT_TOL);
        let at6 = c.count(6.0).unwrap();
        assert_eq!((at6.n_below, at6.n_at, at6.n_above), (1, 5, 0));
        let at0 = c.count(0.0).unwrap();
        assert_eq!((at0.n_below, at0.n_at, at0.n_above), (0, 1, 5));
        assert_eq!(c.count(3.0).unwrap().count(), 1);
    }

    #[test]
    fn gershgorin_extremes() {
        let op = path_op(40);
        let (lo, hi) = op.gershgorin();
        assert_eq!(count_leq(&op, lo - 1e-3, PIVOT_TOL).unwrap().count(), 0);
        assert_eq!(count_leq(&op, hi + 1e-3, PIVOT_TOL).unwrap().count(), 40);
    }

    #[test]
    fn dense_three_path() {
        let ev = dense_spectrum(&path_op(3)).unwrap();
        let s = 2f64.sqrt();
        for (a, b) in ev.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_trace_identity() {
        let op = path_op(30);
        let ev = dense_spectrum(&op).unwrap();
        let trace: f64 = op.diag().iter().sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-8 * trace);
    }

    #[test]
    fn ids_curve_matches_closed_form() {
        // eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 25;
        let op = path_op(n);
        let energies: Vec<f64> = (1..40).map(|k| k as f64 * 0.1 + 0.013).collect();
        let curve = ids_curve(&op, &energies).unwrap();
        assert!(curve.is_nondecreasing());
        for (e, v) in curve.points() {
            let exact = (1..=n)
                .filter(|&k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos() <= e)
                .count();
            assert_eq!(v, exact as f64 / n as f64);
        }
    }
}
