use nalgebra::DMatrix;
use serde::Serialize;

use super::ldlt::BandLdlt;
use super::sparse::SparseSymmetric;
use crate::error::{Error, Result};
use crate::graph::{exterior_boundary, Ball, BallSearch, Graph};
use crate::zoo::{build_band_graph, BandGraphSpec, Norm};

/// Green's function and Poisson kernel of the free Dirichlet Laplacian on a ball.
#[derive(Debug, Clone)]
pub struct BallKernel {
    pub ball: Ball,
    pub center: usize,
    /// `G(x, y)` indexed by positions in `ball.members`.
    pub green: DMatrix<f64>,
    /// `(y, P(ξ, y))` for `y` on the exterior boundary, sorted by vertex.
    pub poisson: Vec<(usize, f64)>,
}

impl BallKernel {
    pub fn poisson_mass(&self) -> f64 {
        self.poisson.iter().map(|(_, p)| p).sum()
    }

    pub fn green_at(&self, x: usize, y: usize) -> Option<f64> {
        let i = self.ball.members.binary_search(&x).ok()?;
        let j = self.ball.members.binary_search(&y).ok()?;
        Some(self.green[(i, j)])
    }
}

/// `−Δ^B` with the ambient degree on the diagonal, factored.
struct BallSystem {
    factor: BandLdlt,
}

impl BallSystem {
    fn new(g: &Graph, members: &[usize]) -> Result<BallSystem> {
        if let Some(&x) = members.iter().find(|&&x| g.is_truncated(x)) {
            return Err(Error::ExtentTooSmall(format!(
                "ball vertex {x} touches the generator boundary"
            )));
        }
        let mut off = Vec::new();
        for (i, &x) in members.iter().enumerate() {
            for &y in g.neighbors(x) {
                if let Ok(j) = members.binary_search(&(y as usize)) {
                    if i < j {
                        off.push((i as u32, j as u32, -1.0));
                    }
                }
            }
        }
        let m = SparseSymmetric {
            diag: members.iter().map(|&x| g.degree(x) as f64).collect(),
            off,
        };
        let perm = m.band_ordering();
        let factor = BandLdlt::factor(&m, &perm, 0.0, 1e-14)?;
        if factor.inertia().positive != members.len() {
            return Err(Error::NotInvertible("ball Laplacian is not positive definite".into()));
        }
        Ok(BallSystem { factor })
    }
}

fn check_center(ball: &Ball, center: usize) -> Result<usize> {
    ball.members
        .binary_search(&center)
        .map_err(|_| Error::InvalidArgument(format!("center {center} is not in the ball")))
}

/// `P(ξ, x) = Σ_{y∈B, y∼x} G(ξ, y)` for `x ∈ ∂B`, from one column of `G`.
fn poisson_from_column(g: &Graph, ball: &Ball, column: &[f64]) -> Result<Vec<(usize, f64)>> {
    let boundary = exterior_boundary(g, &ball.members)?;
    Ok(boundary
        .into_iter()
        .map(|x| {
            let p = g
                .neighbors(x)
                .iter()
                .filter_map(|&y| ball.members.binary_search(&(y as usize)).ok())
                .map(|j| column[j])
                .sum();
            (x, p)
        })
        .collect())
}

pub fn ball_green(g: &Graph, ball: &Ball, center: usize) -> Result<BallKernel> {
    let c = check_center(ball, center)?;
    let sys = BallSystem::new(g, &ball.members)?;
    let m = ball.len();
    let mut green = DMatrix::zeros(m, m);
    let mut e = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        let col = sys.factor.solve(&e)?;
        e[j] = 0.0;
        green.column_mut(j).copy_from_slice(&col);
    }
    let column: Vec<f64> = green.column(c).iter().copied().collect();
    let poisson = poisson_from_column(g, ball, &column)?;
    Ok(BallKernel {
        ball: ball.clone(),
        center,
        green,
        poisson,
    })
}

/// Poisson kernel `P_B(ξ, ·)` alone, at the cost of a single solve.
pub fn poisson_kernel(g: &Graph, ball: &Ball, center: usize) -> Result<Vec<(usize, f64)>> {
    let c = check_center(ball, center)?;
    let sys = BallSystem::new(g, &ball.members)?;
    let mut e = vec![0.0; ball.len()];
    e[c] = 1.0;
    let column = sys.factor.solve(&e)?;
    poisson_from_column(g, ball, &column)
}

/// 1D band graph with room for a ball of graph radius `r` plus its boundary,
/// and the id of the vertex at the origin.
fn band_line(w: usize, r: usize) -> Result<(Graph, usize)> {
    let extent = ((r + 2) * w) as i64;
    let g = build_band_graph(&BandGraphSpec::new(1, w, extent, Norm::L1))?;
    let origin = (0..g.vertex_count())
        .find(|&v| g.coords(v).is_some_and(|c| c[0] == 0.0))
        .ok_or_else(|| Error::MalformedGraph("band graph has no origin".into()))?;
    Ok((g, origin))
}

/// Smallest slack of each kernel inequality on the 1D band graph
/// `Γ_{1,W}`; a bound holds when its slack is nonnegative.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelBoundsReport {
    pub w: usize,
    pub r: usize,
    pub green_lower_slack: f64,
    pub green_upper_slack: f64,
    pub poisson_lower_slack: f64,
    pub poisson_upper_slack: f64,
    pub poisson_mass_error: f64,
}

impl KernelBoundsReport {
    pub fn min_slack(&self) -> f64 {
        self.green_lower_slack
            .min(self.green_upper_slack)
            .min(self.poisson_lower_slack)
            .min(self.poisson_upper_slack)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.min_slack() >= -tol
    }
}

/// Checks, on the ball `|x − ξ| ≤ rW`,
/// `(rW + 1 − |x−ξ|) / (2W³) ≤ G(ξ, x) ≤ (W + rW − |x−ξ|) / W²` and
/// `1/(2W³) ≤ P(ξ, x) ≤ 1` on its boundary.
pub fn band1d_kernel_bounds(w: usize, r: usize) -> Result<KernelBoundsReport> {
    if w == 0 || r == 0 {
        return Err(Error::InvalidArgument("need W >= 1 and r >= 1".into()));
    }
    let (g, xi) = band_line(w, r)?;
    let ball = BallSearch::new(&g).ball(xi, r as f64)?;
    let k = ball_green(&g, &ball, xi)?;
    let (wf, rw) = (w as f64, (r * w) as f64);
    let c = ball.members.binary_search(&xi).unwrap();
    let offset = |v: usize| (g.coords(v).unwrap()[0]).abs();
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for (j, &x) in ball.members.iter().enumerate() {
        let d = offset(x);
        let gx = k.green[(c, j)];
        lo = lo.min(gx - (rw + 1.0 - d) / (2.0 * wf.powi(3)));
        hi = hi.min((wf + rw - d) / (wf * wf) - gx);
    }
    let floor = 1.0 / (2.0 * wf.powi(3));
    let plo = k.poisson.iter().map(|&(_, p)| p - floor).fold(f64::INFINITY, f64::min);
    let phi = k.poisson.iter().map(|&(_, p)| 1.0 - p).fold(f64::INFINITY, f64::min);
    Ok(KernelBoundsReport {
        w,
        r,
        green_lower_slack: lo,
        green_upper_slack: hi,
        poisson_lower_slack: plo,
        poisson_upper_slack: phi,
        poisson_mass_error: (k.poisson_mass() - 1.0).abs(),
    })
}

/// Layered harmonic weight on the 1D band ball `B_r`:
/// `h(ξ, ξ) = 1/|B_r|` and `h(ξ, y) = |∂B_ρ| P_ρ(ξ, y) / |B_r|` for `y ∈ ∂B_ρ`.
#[derive(Debug, Clone, Serialize)]
pub struct HarmonicWeight {
    pub w: usize,
    pub r: usize,
    pub ball_size: usize,
    /// Signed offsets `y − ξ`, ascending.
    pub offsets: Vec<i64>,
    pub weights: Vec<f64>,
}

impl HarmonicWeight {
    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `1 / (|B_r| W²)`.
    pub fn lower_bound(&self) -> f64 {
        1.0 / (self.ball_size as f64 * (self.w * self.w) as f64)
    }

    pub fn weight_at(&self, offset: i64) -> Option<f64> {
        self.offsets.binary_search(&offset).ok().map(|i| self.weights[i])
    }
}

pub fn harmonic_weight_1d(w: usize, r: usize) -> Result<HarmonicWeight> {
    if w == 0 || r < 2 {
        return Err(Error::InvalidArgument("need W >= 1 and r >= 2".into()));
    }
    let (g, xi) = band_line(w, r)?;
    let mut search = BallSearch::new(&g);
    let size = search.ball(xi, r as f64)?.len();
    let pos = |v: usize| g.coords(v).unwrap()[0] as i64 - g.coords(xi).unwrap()[0] as i64;
    let mut entries = vec![(0i64, 1.0 / size as f64)];
    for rho in 0..r {
        let b = search.ball(xi, rho as f64)?;
        let p = poisson_kernel(&g, &b, xi)?;
        let layer = p.len() as f64;
        entries.extend(p.into_iter().map(|(y, py)| (pos(y), layer * py / size as f64)));
    }
    entries.sort_by_key(|&(o, _)| o);
    Ok(HarmonicWeight {
        w,
        r,
        ball_size: size,
        offsets: entries.iter().map(|e| e.0).collect(),
        weights: entries.iter().map(|e| e.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::ball;

    /// Harmonic extension of boundary data into the ball, by a dense solve.
    fn harmonic_extension(g: &Graph, b: &Ball, data: &[(usize, f64)]) -> Vec<f64> {
        let m = b.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut rhs = nalgebra::DVector::<f64>::zeros(m);
        for (i, &x) in b.members.iter().enumerate() {
            a[(i, i)] = g.degree(x) as f64;
            for &y in g.neighbors(x) {
                let y = y as usize;
                if let Ok(j) = b.members.binary_search(&y) {
                    a[(i, j)] = -1.0;
                } else {
                    rhs[i] += data.iter().find(|d| d.0 == y).unwrap().1;
                }
            }
        }
        a.lu().solve(&rhs).unwrap().iter().copied().collect()
    }

    #[test]
    fn path_green_matches_inverse() {
        // W = 1, r = 2: the ball is a 5-path, G = tridiag(−1, 2, −1)^{-1}
        let (g, xi) = band_line(1, 2).unwrap();
        let b = ball(&g, xi, 2.0).unwrap();
        assert_eq!(b.len(), 5);
        let k = ball_green(&g, &b, xi).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let (p, q) = (i.min(j) + 1, i.max(j) + 1);
                assert!((k.green[(i, j)] - (p * (6 - q)) as f64 / 6.0).abs() < 1e-13);
            }
        }
        assert!((k.green_at(xi, xi).unwrap() - 1.5).abs() < 1e-13);
        assert_eq!(k.poisson.len(), 2);
        for &(_, p) in &k.poisson {
            assert!((p - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_invariants_on_lattice_ball() {
        let g = build_band_graph(&BandGraphSpec::new(2, 1, 9, Norm::L1)).unwrap();
        let xi = (0..g.vertex_count()).find(|&v| g.coords(v).unwrap() == [0.0, 0.0]).unwrap();
        let b = ball(&g, xi, 5.0).unwrap();
        let k = ball_green(&g, &b, xi).unwrap();
        assert!((k.poisson_mass() - 1.0).abs() < 1e-10);
        let m = b.len();
        for i in 0..m {
            for j in 0..m {
                assert!(k.green[(i, j)] >= 0.0);
                assert!((k.green[(i, j)] - k.green[(j, i)]).abs() < 1e-12);
            }
        }
        // mean value property for harmonic functions, 50 random boundary data
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = b.members.binary_search(&xi).unwrap();
        for _ in 0..50 {
            let data: Vec<(usize, f64)> = k.poisson.iter().map(|&(y, _)| (y, rng.gen_range(-1.0..1.0))).collect();
            let f = harmonic_extension(&g, &b, &data);
            let mean: f64 = k.poisson.iter().zip(&data).map(|(p, d)| p.1 * d.1).sum();
            assert!((f[c] - mean).abs() < 1e-10);
        }
    }

    #[test]
    fn truncated_ball_is_rejected() {
        let g = build_band_graph(&BandGraphSpec::new(1, 2, 6, Norm::L1)).unwrap();
        let b = ball(&g, 0, 1.0).unwrap();
        assert!(matches!(ball_green(&g, &b, 0), Err(Error::ExtentTooSmall(_))));
    }

    #[test]
    fn band_bounds_small_cases() {
        for (w, r) in [(1, 5), (3, 10)] {
            let rep = band1d_kernel_bounds(w, r).unwrap();
            assert!(rep.holds(1e-10), "{rep:?}");
            assert!(rep.poisson_mass_error < 1e-10);
        }
        // W = 1: the lower Green bound is attained at the center
        let rep = band1d_kernel_bounds(1, 7).unwrap();
        assert!(rep.green_lower_slack.abs() < 1e-10);
    }

    #[test]
    fn harmonic_weight_mass_and_floor() {
        for w in 1..=3 {
            for r in [3, 6, 10] {
                let h = harmonic_weight_1d(w, r).unwrap();
                assert_eq!(h.ball_size, 2 * r * w + 1);
                assert_eq!(h.offsets.len(), h.ball_size);
                assert!((h.sum() - 1.0).abs() < 1e-10);
                assert!(h.min_weight() >= h.lower_bound() - 1e-10, "W={w} r={r}");
            }
        }
    }

    #[test]
    fn harmonic_weight_reproduces_harmonic_values() {
        let (w, r) = (2, 5);
        let h = harmonic_weight_1d(w, r).unwrap();
        let (g, xi) = band_line(w, r).unwrap();
        let b = ball(&g, xi, r as f64).unwrap();
        let boundary = exterior_boundary(&g, &b.members).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let data: Vec<(usize, f64)> = boundary.iter().map(|&y| (y, rng.gen_range(0.0..1.0))).collect();
            let f = harmonic_extension(&g, &b, &data);
            let x0 = g.coords(xi).unwrap()[0] as i64;
            let avg: f64 = b
                .members
                .iter()
                .zip(&f)
                .map(|(&v, fv)| h.weight_at(g.coords(v).unwrap()[0] as i64 - x0).unwrap() * fv)
                .sum();
            let c = b.members.binary_search(&xi).unwrap();
            assert!((avg - f[c]).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(band1d_kernel_bounds(0, 3).is_err());
        assert!(harmonic_weight_1d(1, 1).is_err());
    }
}
