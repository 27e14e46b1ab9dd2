use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Disorder;
use crate::error::{Error, Result};
use crate::graph::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryMode {
    /// Diagonal uses the ambient degree `deg_Γ(x)`.
    Dirichlet,
    /// Diagonal uses the degree inside the region `deg_A(x)`.
    Neumann,
}

/// `H^A f(x) = d(x) f(x) − Σ_{y∈A, y∼x} μ_xy f(y) + V_x f(x)`, with `d` the
/// ambient degree (Dirichlet) or the induced degree (Neumann).
#[derive(Debug, Clone)]
pub struct JacobiOperator {
    region: Region,
    mode: BoundaryMode,
    degree: Vec<f64>,
    potential: Vec<f64>,
    diag: Vec<f64>,
    edges: Vec<(u32, u32)>,
    mu: Vec<f64>,
    // symmetric CSR without the diagonal, values are −μ
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

pub fn assemble(region: &Region, disorder: &Disorder, mode: BoundaryMode) -> Result<JacobiOperator> {
    let n = region.len();
    if disorder.mu.len() != region.edges().len() {
        return Err(Error::DimensionMismatch {
            expected: region.edges().len(),
            got: disorder.mu.len(),
        });
    }
    if disorder.v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: disorder.v.len(),
        });
    }
    if let Some(&m) = disorder.mu.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::InvalidArgument(format!("bond strength {m} outside [0, 1]")));
    }
    if let Some(&v) = disorder.v.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("potential {v} is negative")));
    }
    let g = region.graph();
    let degree: Vec<f64> = match mode {
        BoundaryMode::Dirichlet => {
            if let Some(&x) = region.vertices().iter().find(|&&x| g.is_truncated(x)) {
                return Err(Error::ExtentTooSmall(format!(
                    "region vertex {x} lies on the generator boundary; its ambient degree is unknown"
                )));
            }
            (0..n).map(|i| region.ambient_degree(i) as f64).collect()
        }
        BoundaryMode::Neumann => (0..n).map(|i| region.induced_degree(i) as f64).collect(),
    };
    let diag = degree.iter().zip(&disorder.v).map(|(d, v)| d + v).collect();

    let mut counts = vec![0usize; n];
    for &(i, j) in region.edges() {
        counts[i as usize] += 1;
        counts[j as usize] += 1;
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    for c in &counts {
        row_ptr.push(row_ptr.last().unwrap() + c);
    }
    let nnz = *row_ptr.last().unwrap();
    let mut cols = vec![0u32; nnz];
    let mut vals = vec![0.0; nnz];
    let mut fill = row_ptr[..n].to_vec();
    for (&(i, j), &m) in region.edges().iter().zip(&disorder.mu) {
        for (r, c) in [(i, j), (j, i)] {
            let slot = fill[r as usize];
            cols[slot] = c;
            vals[slot] = -m;
            fill[r as usize] += 1;
        }
    }
    // sort each row by column for a canonical layout
    for r in 0..n {
        let (lo, hi) = (row_ptr[r], row_ptr[r + 1]);
        let mut row: Vec<(u32, f64)> = cols[lo..hi].iter().copied().zip(vals[lo..hi].iter().copied()).collect();
        row.sort_unstable_by_key(|&(c, _)| c);
        for (k, (c, v)) in row.into_iter().enumerate() {
            cols[lo + k] = c;
            vals[lo + k] = v;
        }
    }
    Ok(JacobiOperator {
        region: region.clone(),
        mode,
        degree,
        potential: disorder.v.clone(),
        diag,
        edges: region.edges().to_vec(),
        mu: disorder.mu.clone(),
        row_ptr,
        cols,
        vals,
    })
}

impl JacobiOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Induced edges `(i, j)`, `i < j`, in local indices.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Bond strengths, parallel to [`JacobiOperator::edges`].
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Off-diagonal entries of row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[lo..hi]
            .iter()
            .zip(&self.vals[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = self.diag[i] * x[i];
            for (c, v) in self.row(i) {
                acc += v * x[c];
            }
            *yi = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for (c, v) in self.row(i) {
                m[(i, c)] = v;
            }
        }
        m
    }

    /// `μ_x^A = Σ_{y∈A, y∼x} μ_xy` per vertex.
    pub fn mu_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim()];
        for (&(i, j), &m) in self.edges.iter().zip(&self.mu) {
            s[i as usize] += m;
            s[j as usize] += m;
        }
        s
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.diag[i].abs() + self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim() {
            let r: f64 = self.row(i).map(|(_, v)| v.abs()).sum();
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: f.len(),
            })
        }
    }

    /// `⟨f, H f⟩ = Σ_{edges} μ_xy (f(x) − f(y))² + Σ_x (d(x) − μ_x^A + V_x) f(x)²`.
    pub fn quadratic_form(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        let kinetic: f64 = self
            .edges
            .iter()
            .zip(&self.mu)
            .map(|(&(i, j), &m)| m * (f[i as usize] - f[j as usize]).powi(2))
            .sum();
        let sums = self.mu_sums();
        let onsite: f64 = (0..self.dim()).map(|x| (self.diag[x] - sums[x]) * f[x] * f[x]).sum();
        Ok(kinetic + onsite)
    }

    /// Both sides of the ε-cutoff inequality on the region:
    /// `Σ μ^ε (Δf)² ≤ Σ μ (Δf)² + 4ε/(1−ε) Σ_x (deg_A(x) − μ_x^A) f(x)²`,
    /// with `μ^ε = max(ε, μ)`.
    pub fn epsilon_cutoff_check(&self, f: &[f64], eps: f64) -> Result<(f64, f64)> {
        self.check_len(f)?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        let mut lhs = 0.0;
        let mut kinetic = 0.0;
        for (&(i, j), &m) in self.edges.iter().zip(&self.mu) {
            let d2 = (f[i as usize] - f[j as usize]).powi(2);
            lhs += m.max(eps) * d2;
            kinetic += m * d2;
        }
        let sums = self.mu_sums();
        let deficit: f64 = (0..self.dim())
            .map(|x| (self.region.induced_degree(x) as f64 - sums[x]) * f[x] * f[x])
            .sum();
        Ok((lhs, kinetic + 4.0 * eps / (1.0 - eps) * deficit))
    }

    /// MatrixMarket coordinate export (lower triangle, 1-based).
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        let n = self.dim();
        writeln!(out, "{n} {n} {}", n + self.edges.len())?;
        for i in 0..n {
            for (c, v) in self.row(i).filter(|&(c, _)| c < i) {
                writeln!(out, "{} {} {:e}", i + 1, c + 1, v)?;
            }
            writeln!(out, "{} {} {:e}", i + 1, i + 1, self.diag[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::{Graph, MetricKind};
    use crate::operator::{sample_disorder, DisorderConfig, MuDist, VDist};
    use crate::zoo::{build_band_graph, BandGraphSpec, Norm};

    fn segment(w: usize, lo: i64, hi: i64) -> Region {
        let extent = lo.abs().max(hi.abs()) + 2 * w as i64;
        let g = Arc::new(build_band_graph(&BandGraphSpec::new(1, w, extent, Norm::L1)).unwrap());
        Region::from_coords(g, |p| p[0] >= lo as f64 && p[0] <= hi as f64).unwrap()
    }

    fn path_graph(n: usize) -> Arc<Graph> {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Arc::new(Graph::from_edges(n, &edges, MetricKind::GraphDistance).unwrap())
    }

    #[test]
    fn band_laplacian_on_one_to_seven() {
        let r = segment(2, 1, 7);
        let h = assemble(&r, &Disorder::free(&r), BoundaryMode::Dirichlet).unwrap();
        #[rustfmt::skip]
        let expected = [
            [ 4., -1., -1.,  0.,  0.,  0.,  0.],
            [-1.,  4., -1., -1.,  0.,  0.,  0.],
            [-1., -1.,  4., -1., -1.,  0.,  0.],
            [ 0., -1., -1.,  4., -1., -1.,  0.],
            [ 0.,  0., -1., -1.,  4., -1., -1.],
            [ 0.,  0.,  0., -1., -1.,  4., -1.],
            [ 0.,  0.,  0.,  0., -1., -1.,  4.],
        ];
        let m = h.to_dense();
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(m[(i, j)], expected[i][j]);
            }
        }
    }

    #[test]
    fn single_vertex_dirichlet() {
        let r = segment(3, 0, 0);
        let d = Disorder {
            mu: vec![],
            v: vec![2.5],
        };
        let h = assemble(&r, &d, BoundaryMode::Dirichlet).unwrap();
        assert_eq!(h.to_dense()[(0, 0)], 6.0 + 2.5);
    }

    #[test]
    fn neumann_path_of_three() {
        let g = path_graph(3);
        let r = Region::whole(g);
        let h = assemble(&r, &Disorder::free(&r), BoundaryMode::Neumann).unwrap();
        let m = h.to_dense();
        let expected = [[1., -1., 0.], [-1., 2., -1.], [0., -1., 1.]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[(i, j)], expected[i][j]);
            }
        }
    }

    #[test]
    fn dirichlet_on_truncated_vertex_fails() {
        let g = Arc::new(build_band_graph(&BandGraphSpec::new(1, 2, 5, Norm::L1)).unwrap());
        let r = Region::whole(g);
        assert!(matches!(
            assemble(&r, &Disorder::free(&r), BoundaryMode::Dirichlet),
            Err(Error::ExtentTooSmall(_))
        ));
        assert!(assemble(&r, &Disorder::free(&r), BoundaryMode::Neumann).is_ok());
    }

    fn random_instance(seed: u64) -> JacobiOperator {
        let g = Arc::new(build_band_graph(&BandGraphSpec::new(2, 1, 7, Norm::L1)).unwrap());
        let r = Region::from_coords(g, |p| p[0].abs() <= 4.0 && p[1].abs() <= 3.0).unwrap();
        let cfg = DisorderConfig {
            mu: MuDist::Bernoulli { p: 0.5 },
            v: VDist::Uniform { c: 2.0 },
            seed,
        };
        assemble(&r, &sample_disorder(&r, &cfg, 0).unwrap(), BoundaryMode::Dirichlet).unwrap()
    }

    #[test]
    fn operator_is_symmetric() {
        let h = random_instance(3);
        let m = h.to_dense();
        assert_eq!(m, m.transpose());
        assert!(h.row(0).all(|(_, v)| (-1.0..=0.0).contains(&v)));
    }

    #[test]
    fn quadratic_form_matches_matvec() {
        let h = random_instance(11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let f: Vec<f64> = (0..h.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut hf = vec![0.0; h.dim()];
            h.apply(&f, &mut hf);
            let direct: f64 = f.iter().zip(&hf).map(|(a, b)| a * b).sum();
            let q = h.quadratic_form(&f).unwrap();
            assert!((q - direct).abs() <= 1e-12 * direct.abs().max(1.0));
            assert!(q >= 0.0);
        }
        let e0: Vec<f64> = (0..h.dim()).map(|i| if i == 4 { 1.0 } else { 0.0 }).collect();
        assert_eq!(h.quadratic_form(&e0).unwrap(), h.diag()[4]);
        assert!(h.quadratic_form(&[1.0]).is_err());
    }

    #[test]
    fn quadratic_form_on_five_vertex_path_by_hand() {
        // segment of Z with ambient degree 2; boundary vertices each lose one bond
        let r = segment(1, 0, 4);
        let h = assemble(&r, &Disorder::free(&r), BoundaryMode::Dirichlet).unwrap();
        let f = [1.0, -2.0, 0.5, 3.0, -1.0];
        let hand = (1.0f64 + 2.0).powi(2) + (-2.0f64 - 0.5).powi(2) + (0.5f64 - 3.0).powi(2) + (3.0f64 + 1.0).powi(2)
            + 1.0 * 1.0
            + 1.0 * 1.0;
        assert!((h.quadratic_form(&f).unwrap() - hand).abs() < 1e-12);
    }

    #[test]
    fn epsilon_cutoff_cases() {
        let r = segment(2, 0, 20);
        let free = assemble(&r, &Disorder::free(&r), BoundaryMode::Dirichlet).unwrap();
        let f: Vec<f64> = (0..r.len()).map(|i| (i as f64 * 0.7).sin()).collect();
        let (lhs, rhs) = free.epsilon_cutoff_check(&f, 0.3).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);

        let h = random_instance(2);
        let zero = vec![0.0; h.dim()];
        assert_eq!(h.epsilon_cutoff_check(&zero, 0.2).unwrap(), (0.0, 0.0));
        let f: Vec<f64> = (0..h.dim()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let (lhs, rhs) = h.epsilon_cutoff_check(&f, 0.2).unwrap();
        assert!(lhs <= rhs + 1e-12);
        assert!(h.epsilon_cutoff_check(&f, 1.0).is_err());
    }

    #[test]
    fn matrix_market_header() {
        let r = Region::whole(path_graph(3));
        let h = assemble(&r, &Disorder::free(&r), BoundaryMode::Neumann).unwrap();
        let mut buf = Vec::new();
        h.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("%%MatrixMarket matrix coordinate real symmetric"));
        assert_eq!(lines.next(), Some("3 3 5"));
        assert_eq!(lines.count(), 5);
    }
}
