use super::sparse::{invert, SparseSymmetric};
use crate::error::{Error, Result};

/// Growth bound for choosing a 2×2 pivot.
const ALPHA: f64 = 0.640_388_203_202_208_4; // (1 + √17) / 8

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pivot {
    One(f64),
    Two(f64, f64, f64),
}

/// Sign counts of the block-diagonal factor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl Inertia {
    fn record(&mut self, value: f64, tol: f64) {
        if value.abs() < tol {
            self.zero += 1;
        } else if value < 0.0 {
            self.negative += 1;
        } else {
            self.positive += 1;
        }
    }
}

/// `P (A − σI) Pᵀ = L D Lᵀ` in band storage, with `D` built from 1×1 and
/// adjacent 2×2 blocks. Pivots smaller than `tol` are counted as zero and
/// replaced by `tol` so elimination can continue.
#[derive(Debug, Clone)]
pub struct BandLdlt {
    n: usize,
    b: usize,
    perm: Vec<usize>,
    band: Vec<f64>,
    pivots: Vec<(usize, Pivot)>,
    inertia: Inertia,
}

impl BandLdlt {
    /// Factors `A − shift·I` under the ordering `perm` (new → old).
    pub fn factor(a: &SparseSymmetric, perm: &[usize], shift: f64, tol: f64) -> Result<BandLdlt> {
        let n = a.dim();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let b = a.bandwidth(perm);
        let inv = invert(perm);
        let w = b + 1;
        let mut band = vec![0.0; n * w];
        for (new, &old) in perm.iter().enumerate() {
            band[new * w + b] = a.diag[old] - shift;
        }
        for &(i, j, v) in &a.off {
            let (p, q) = (inv[i as usize], inv[j as usize]);
            let (r, c) = if p > q { (p, q) } else { (q, p) };
            band[r * w + b + c - r] += v;
        }
        let mut f = BandLdlt {
            n,
            b,
            perm: perm.to_vec(),
            band,
            pivots: Vec::new(),
            inertia: Inertia::default(),
        };
        f.eliminate(tol)?;
        Ok(f)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        // j ≤ i
        if i - j > self.b {
            0.0
        } else {
            self.band[i * (self.b + 1) + self.b + j - i]
        }
    }

    #[inline]
    fn slot(&mut self, i: usize, j: usize) -> &mut f64 {
        let b = self.b;
        &mut self.band[i * (b + 1) + b + j - i]
    }

    fn eliminate(&mut self, tol: f64) -> Result<()> {
        let (n, b) = (self.n, self.b);
        let mut col = vec![0.0; b + 2];
        let mut col2 = vec![0.0; b + 2];
        let mut k = 0;
        while k < n {
            let akk = self.at(k, k);
            let hi = (k + b).min(n - 1);
            let lambda = (k + 1..=hi).map(|i| self.at(i, k).abs()).fold(0.0, f64::max);
            let mut two = None;
            if k + 1 < n && akk.abs() < ALPHA * lambda {
                let (d21, d22) = (self.at(k + 1, k), self.at(k + 1, k + 1));
                let det = akk * d22 - d21 * d21;
                let m = akk.abs().max(d21.abs()).max(d22.abs());
                if det != 0.0 && det.abs() > akk.abs() * m && m >= tol {
                    two = Some((d21, d22));
                }
            }
            match two {
                None => {
                    let mut d = akk;
                    if !d.is_finite() {
                        return Err(Error::NotInvertible(format!("non-finite pivot at step {k}")));
                    }
                    self.inertia.record(d, tol);
                    if d.abs() < tol {
                        d = tol;
                    }
                    let len = hi - k;
                    for t in 0..len {
                        col[t] = self.at(k + 1 + t, k);
                    }
                    for t in 0..len {
                        let ci = col[t];
                        if ci == 0.0 {
                            continue;
                        }
                        let i = k + 1 + t;
                        let li = ci / d;
                        for s in 0..=t {
                            *self.slot(i, k + 1 + s) -= li * col[s];
                        }
                        *self.slot(i, k) = li;
                    }
                    self.pivots.push((k, Pivot::One(d)));
                    k += 1;
                }
                Some((d21, d22)) => {
                    let (d11, d21, d22) = clamp_block(akk, d21, d22, tol, &mut self.inertia);
                    let det = d11 * d22 - d21 * d21;
                    if !det.is_finite() || det == 0.0 {
                        return Err(Error::NotInvertible(format!("singular 2x2 pivot at step {k}")));
                    }
                    let (i11, i21, i22) = (d22 / det, -d21 / det, d11 / det);
                    let hi2 = (k + 1 + b).min(n - 1);
                    let len = hi2.saturating_sub(k + 1);
                    for t in 0..len {
                        let i = k + 2 + t;
                        col[t] = self.at(i, k);
                        col2[t] = self.at(i, k + 1);
                    }
                    for t in 0..len {
                        let (c1, c2) = (col[t], col2[t]);
                        if c1 == 0.0 && c2 == 0.0 {
                            continue;
                        }
                        let i = k + 2 + t;
                        let l1 = c1 * i11 + c2 * i21;
                        let l2 = c1 * i21 + c2 * i22;
                        for s in 0..=t {
                            *self.slot(i, k + 2 + s) -= l1 * col[s] + l2 * col2[s];
                        }
                        if i - k <= b {
                            *self.slot(i, k) = l1;
                        }
                        *self.slot(i, k + 1) = l2;
                    }
                    self.pivots.push((k, Pivot::Two(d11, d21, d22)));
                    k += 2;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.b
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    /// Number of 2×2 blocks used.
    pub fn two_by_two_count(&self) -> usize {
        self.pivots.iter().filter(|(_, p)| matches!(p, Pivot::Two(..))).count()
    }

    /// Solves `(A − σI) x = rhs` using the factors.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        let (n, b) = (self.n, self.b);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| rhs[old]).collect();
        // forward: L y = P rhs
        for &(k, p) in &self.pivots {
            let width = if matches!(p, Pivot::Two(..)) { 2 } else { 1 };
            for c in k..k + width {
                let yc = y[c];
                if yc == 0.0 {
                    continue;
                }
                for i in (k + width)..=(c + b).min(n - 1) {
                    y[i] -= self.at(i, c) * yc;
                }
            }
        }
        // block diagonal
        for &(k, p) in &self.pivots {
            match p {
                Pivot::One(d) => y[k] /= d,
                Pivot::Two(d11, d21, d22) => {
                    let det = d11 * d22 - d21 * d21;
                    let (a, c) = (y[k], y[k + 1]);
                    y[k] = (d22 * a - d21 * c) / det;
                    y[k + 1] = (d11 * c - d21 * a) / det;
                }
            }
        }
        // backward: Lᵀ x = y
        for &(k, p) in self.pivots.iter().rev() {
            let width = if matches!(p, Pivot::Two(..)) { 2 } else { 1 };
            for c in k..k + width {
                let mut s = 0.0;
                for i in (k + width)..=(c + b).min(n - 1) {
                    s += self.at(i, c) * y[i];
                }
                y[c] -= s;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        Ok(x)
    }
}

/// Counts the eigenvalues of a 2×2 pivot block; eigenvalues inside the zero
/// window are lifted to `tol`, mirroring the 1×1 treatment.
fn clamp_block(d11: f64, d21: f64, d22: f64, tol: f64, inertia: &mut Inertia) -> (f64, f64, f64) {
    let mean = 0.5 * (d11 + d22);
    let rad = (0.25 * (d11 - d22).powi(2) + d21 * d21).sqrt();
    let (e1, e2) = (mean - rad, mean + rad);
    inertia.record(e1, tol);
    inertia.record(e2, tol);
    if e1.abs() >= tol && e2.abs() >= tol {
        return (d11, d21, d22);
    }
    // eigenvector of e1 is (d21, e1 − d11), or (1, 0) when d21 = 0
    let (mut vx, mut vy) = if d21 != 0.0 { (d21, e1 - d11) } else if d11 <= d22 { (1.0, 0.0) } else { (0.0, 1.0) };
    let norm = vx.hypot(vy);
    vx /= norm;
    vy /= norm;
    let f1 = if e1.abs() < tol { tol } else { e1 };
    let f2 = if e2.abs() < tol { tol } else { e2 };
    // rebuild Q diag(f1, f2) Qᵀ with Q = [[vx, −vy], [vy, vx]]
    (
        f1 * vx * vx + f2 * vy * vy,
        (f1 - f2) * vx * vy,
        f1 * vy * vy + f2 * vx * vx,
    )
}
