use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Region;
use crate::operator::JacobiOperator;
use crate::spectral::{BandLdlt, SparseSymmetric};

/// Default stopping threshold for `‖H u − 1‖_∞`.
pub const SOLVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveMethod {
    ConjugateGradient,
    DirectFactorization,
}

/// The landscape `u = (H^A)^{-1} 1`, positive on the region.
#[derive(Debug, Clone)]
pub struct LandscapeFunction {
    pub region: Region,
    pub values: Vec<f64>,
    /// `‖H u − 1‖_∞` of the returned values.
    pub residual_norm: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

impl LandscapeFunction {
    /// Effective potential `1/u`.
    pub fn effective_potential(&self) -> Vec<f64> {
        self.values.iter().map(|u| 1.0 / u).collect()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn residual_inf(op: &JacobiOperator, u: &[f64], work: &mut [f64]) -> f64 {
    op.apply(u, work);
    work.iter().map(|y| (y - 1.0).abs()).fold(0.0, f64::max)
}

/// `H^A` is singular exactly when some cluster of positive bonds has zero
/// on-site excess `diag − μ^A_x` at every site.
fn check_invertible(op: &JacobiOperator) -> Result<()> {
    let n = op.dim();
    let sums = op.mu_sums();
    let scale = op.norm_inf().max(1.0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (&(i, j), &m) in op.edges().iter().zip(op.mu()) {
        if m > 0.0 {
            let (a, b) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
            parent[a] = b;
        }
    }
    let mut anchored = vec![false; n];
    for x in 0..n {
        if op.diag()[x] - sums[x] > 1e-14 * scale {
            let r = find(&mut parent, x);
            anchored[r] = true;
        }
    }
    let floating = (0..n).filter(|&x| find(&mut parent, x) == x && !anchored[x]).count();
    if floating > 0 {
        return Err(Error::NotInvertible(format!(
            "{floating} bond cluster(s) carry no potential or boundary term"
        )));
    }
    Ok(())
}

/// Jacobi-preconditioned conjugate gradient from `u = 0`.
fn pcg(op: &JacobiOperator, tol: f64, max_iter: usize) -> (Vec<f64>, usize, bool) {
    let n = op.dim();
    let inv_d: Vec<f64> = op.diag().iter().map(|d| 1.0 / d).collect();
    let mut u = vec![0.0; n];
    let mut r = vec![1.0; n];
    let mut z: Vec<f64> = inv_d.clone();
    let mut p = z.clone();
    let mut hp = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 0..max_iter {
        op.apply(&p, &mut hp);
        let php: f64 = p.iter().zip(&hp).map(|(a, b)| a * b).sum();
        if !(php > 0.0) {
            return (u, it, false);
        }
        let alpha = rz / php;
        for i in 0..n {
            u[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        if r.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= tol {
            return (u, it + 1, true);
        }
        for i in 0..n {
            z[i] = inv_d[i] * r[i];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    (u, max_iter, false)
}

fn direct(op: &JacobiOperator) -> Result<Vec<f64>> {
    let m = SparseSymmetric::from_operator(op);
    let perm = m.band_ordering();
    let f = BandLdlt::factor(&m, &perm, 0.0, 1e-14 * m.norm_inf())?;
    if f.inertia().positive != op.dim() {
        return Err(Error::NotInvertible("factorization met a zero pivot".into()));
    }
    let ones = vec![1.0; op.dim()];
    let mut u = f.solve(&ones)?;
    // one round of iterative refinement
    let mut hu = vec![0.0; op.dim()];
    op.apply(&u, &mut hu);
    let r: Vec<f64> = hu.iter().map(|y| 1.0 - y).collect();
    let du = f.solve(&r)?;
    for (a, b) in u.iter_mut().zip(du) {
        *a += b;
    }
    Ok(u)
}

/// Solves `H^A u = 1`: conjugate gradient with at most `10|A|` iterations,
/// then a banded direct solve if that does not reach `tol`.
pub fn solve_landscape(op: &JacobiOperator, tol: f64) -> Result<LandscapeFunction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    check_invertible(op)?;
    let n = op.dim();
    let mut work = vec![0.0; n];
    let (u, iterations, converged) = pcg(op, tol, 10 * n);
    let (values, method, residual) = {
        let res = residual_inf(op, &u, &mut work);
        if converged && res <= tol {
            (u, SolveMethod::ConjugateGradient, res)
        } else {
            let v = direct(op)?;
            let res_direct = residual_inf(op, &v, &mut work);
            if res_direct > tol {
                return Err(Error::NoConvergence {
                    iterations,
                    residual: res.min(res_direct),
                });
            }
            (v, SolveMethod::DirectFactorization, res_direct)
        }
    };
    if let Some(x) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NotInvertible(format!(
            "landscape is not positive at local vertex {x} (value {})",
            values[x]
        )));
    }
    Ok(LandscapeFunction {
        region: op.region().clone(),
        values,
        residual_norm: residual,
        iterations,
        method,
    })
}

/// `|lhs − rhs| / (1 + |lhs|)` for the identity
/// `⟨f, H f⟩ = Σ_{edges} μ_xy u(x) u(y) (f(x)/u(x) − f(y)/u(y))² + Σ_x f(x)²/u(x)`.
pub fn uncertainty_identity_residual(op: &JacobiOperator, u: &LandscapeFunction, f: &[f64]) -> Result<f64> {
    let n = op.dim();
    for len in [u.values.len(), f.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let mut hf = vec![0.0; n];
    op.apply(f, &mut hf);
    let lhs: f64 = f.iter().zip(&hf).map(|(a, b)| a * b).sum();
    let u = &u.values;
    let kinetic: f64 = op
        .edges()
        .iter()
        .zip(op.mu())
        .map(|(&(i, j), &m)| {
            let (i, j) = (i as usize, j as usize);
            m * u[i] * u[j] * (f[i] / u[i] - f[j] / u[j]).powi(2)
        })
        .sum();
    let potential: f64 = f.iter().zip(u).map(|(a, b)| a * a / b).sum();
    Ok((lhs - kinetic - potential).abs() / (1.0 + lhs.abs()))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::{Graph, MetricKind};
    use crate::operator::{assemble, sample_disorder, BoundaryMode, Disorder, DisorderConfig, MuDist, VDist};
    use crate::zoo::{build_band_graph, BandGraphSpec, Norm};

    fn interval(n: i64) -> Region {
        let g = Arc::new(build_band_graph(&BandGraphSpec::new(1, 1, n + 2, Norm::L1)).unwrap());
        Region::from_coords(g, |p| p[0] >= 1.0 && p[0] <= n as f64).unwrap()
    }

    /// Thomas algorithm for the constant tridiagonal system (2, −1).
    fn thomas(n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let m = 2.0 - if i > 0 { -c[i - 1] } else { 0.0 };
            c[i] = -1.0 / m;
            d[i] = (1.0 + if i > 0 { d[i - 1] } else { 0.0 }) / m;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            x[i] = d[i] - c[i] * if i + 1 < n { x[i + 1] } else { 0.0 };
        }
        x
    }

    #[test]
    fn path_landscape_closed_form() {
        let n = 60;
        let r = interval(n);
        let op = assemble(&r, &Disorder::free(&r), BoundaryMode::Dirichlet).unwrap();
        let u = solve_landscape(&op, SOLVE_TOL).unwrap();
        let oracle = thomas(n as usize);
        for (k, (&v, o)) in u.values.iter().zip(oracle).enumerate() {
            let x = (k + 1) as f64;
            let exact = x * (n as f64 + 1.0 - x) / 2.0;
            assert!((v - exact).abs() < 1e-8 * exact);
            assert!((o - exact).abs() < 1e-9 * exact);
        }
        assert!(u.residual_norm <= SOLVE_TOL);
    }

    #[test]
    fn large_potential_limit() {
        let r = interval(30);
        let mut d = Disorder::free(&r);
        d.v.iter_mut().for_each(|v| *v = 1e6);
        let op = assemble(&r, &d, BoundaryMode::Dirichlet).unwrap();
        let u = solve_landscape(&op, SOLVE_TOL).unwrap();
        for &v in &u.values {
            let approx = 1.0 / (2.0 + 1e6);
            assert!((v - approx).abs() < 1e-4 * approx);
        }
    }

    #[test]
    fn neumann_without_potential_is_singular() {
        let r = interval(10);
        let op = assemble(&r, &Disorder::free(&r), BoundaryMode::Neumann).unwrap();
        assert!(matches!(solve_landscape(&op, SOLVE_TOL), Err(Error::NotInvertible(_))));
        // a single positive site anchors the whole chain
        let mut d = Disorder::free(&r);
        d.v[4] = 0.5;
        let op = assemble(&r, &d, BoundaryMode::Neumann).unwrap();
        assert!(solve_landscape(&op, SOLVE_TOL).unwrap().min() > 0.0);
    }

    #[test]
    fn zero_bond_still_anchors_in_neumann_mode() {
        // Neumann path 0-1-2-3 with μ_12 = 0: the induced degree still counts
        // the bond, so sites 1 and 2 carry excess 1
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)], MetricKind::GraphDistance).unwrap();
        let r = Region::whole(Arc::new(g));
        let mut d = Disorder::free(&r);
        d.mu[1] = 0.0;
        d.v[0] = 1.0;
        let op = assemble(&r, &d, BoundaryMode::Neumann).unwrap();
        let u = solve_landscape(&op, SOLVE_TOL).unwrap();
        assert!(u.min() > 0.0);
    }

    #[test]
    fn identity_with_f_equal_u() {
        let r = interval(25);
        let cfg = DisorderConfig {
            mu: MuDist::Uniform01,
            v: VDist::Uniform { c: 1.0 },
            seed: 5,
        };
        let op = assemble(&r, &sample_disorder(&r, &cfg, 0).unwrap(), BoundaryMode::Dirichlet).unwrap();
        let u = solve_landscape(&op, SOLVE_TOL).unwrap();
        let res = uncertainty_identity_residual(&op, &u, &u.values).unwrap();
        assert!(res < 1e-10);
        // ⟨u, Hu⟩ = Σu
        let lhs = op.quadratic_form(&u.values).unwrap();
        assert!((lhs - u.values.iter().sum::<f64>()).abs() < 1e-8 * lhs);
    }

    #[test]
    fn identity_on_unit_vector_three_path() {
        // H = [[3,-1,0],[-1,3,-1],[0,-1,3]] (ambient degree 2, V = 1)
        let r = interval(3);
        let mut d = Disorder::free(&r);
        d.v = vec![1.0; 3];
        let op = assemble(&r, &d, BoundaryMode::Dirichlet).unwrap();
        let u = solve_landscape(&op, SOLVE_TOL).unwrap();
        // u = (4, 5, 4)/7
        for (a, b) in u.values.iter().zip([4.0 / 7.0, 5.0 / 7.0, 4.0 / 7.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        // f = e_0: ⟨f,Hf⟩ = 3 = μ u0 u1 (1/u0)² + 1/u0 = u1/u0 + 1/u0 = 5/4 + 7/4
        let f = [1.0, 0.0, 0.0];
        assert!(uncertainty_identity_residual(&op, &u, &f).unwrap() < 1e-12);
    }

    #[test]
    fn bernoulli_instance_uses_a_solver_and_stays_positive() {
        let r = interval(200);
        let cfg = DisorderConfig {
            mu: MuDist::Bernoulli { p: 0.5 },
            v: VDist::Zero,
            seed: 9,
        };
        let op = assemble(&r, &sample_disorder(&r, &cfg, 1).unwrap(), BoundaryMode::Dirichlet).unwrap();
        let u = solve_landscape(&op, SOLVE_TOL).unwrap();
        assert!(u.min() > 0.0);
        // 1/u ≤ deg + V
        for &v in &u.values {
            assert!(1.0 / v <= 2.0 + 1e-12);
        }
    }
}
