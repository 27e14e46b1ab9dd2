use std::collections::VecDeque;

use crate::operator::JacobiOperator;

/// Symmetric matrix given by its diagonal and strict upper triangle.
#[derive(Debug, Clone)]
pub struct SparseSymmetric {
    pub diag: Vec<f64>,
    /// `(i, j, value)` with `i < j`.
    pub off: Vec<(u32, u32, f64)>,
}

impl SparseSymmetric {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Structural copy of `H^A`; zero bonds stay in the pattern.
    pub fn from_operator(op: &JacobiOperator) -> Self {
        let off = op
            .edges()
            .iter()
            .zip(op.mu())
            .map(|(&(i, j), &m)| (i.min(j), i.max(j), -m))
            .collect();
        SparseSymmetric {
            diag: op.diag().to_vec(),
            off,
        }
    }

    pub fn norm_inf(&self) -> f64 {
        let mut rows: Vec<f64> = self.diag.iter().map(|d| d.abs()).collect();
        for &(i, j, v) in &self.off {
            rows[i as usize] += v.abs();
            rows[j as usize] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, (d, xi)) in y.iter_mut().zip(self.diag.iter().zip(x)) {
            *yi = d * xi;
        }
        for &(i, j, v) in &self.off {
            y[i as usize] += v * x[j as usize];
            y[j as usize] += v * x[i as usize];
        }
    }

    fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.dim()];
        for &(i, j, _) in &self.off {
            adj[i as usize].push(j);
            adj[j as usize].push(i);
        }
        adj
    }

    /// Half-bandwidth of the pattern after relabelling by `perm` (new → old).
    pub fn bandwidth(&self, perm: &[usize]) -> usize {
        let inv = invert(perm);
        self.off
            .iter()
            .map(|&(i, j, _)| inv[i as usize].abs_diff(inv[j as usize]))
            .max()
            .unwrap_or(0)
    }

    /// Reverse Cuthill–McKee if it narrows the band, else the identity.
    pub fn band_ordering(&self) -> Vec<usize> {
        let rcm = reverse_cuthill_mckee(&self.adjacency());
        let plain: Vec<usize> = (0..self.dim()).collect();
        if self.bandwidth(&rcm) <= self.bandwidth(&plain) {
            rcm
        } else {
            plain
        }
    }
}

pub(crate) fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

fn bfs_levels(adj: &[Vec<u32>], start: usize, seen: &mut [bool], order: &mut Vec<usize>) {
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        let mut next: Vec<usize> = adj[x].iter().map(|&y| y as usize).filter(|&y| !seen[y]).collect();
        next.sort_by_key(|&y| (adj[y].len(), y));
        for y in next {
            seen[y] = true;
            queue.push_back(y);
        }
    }
}

/// Endpoint of a long BFS path through the component of `start`, found by
/// repeatedly jumping to a minimum-degree vertex of the last level.
fn peripheral(adj: &[Vec<u32>], start: usize) -> usize {
    let n = adj.len();
    let mut root = start;
    let mut best_depth = 0;
    for _ in 0..8 {
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut last = vec![root];
        let mut max_depth = 0;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                let y = y as usize;
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    if depth[y] > max_depth {
                        max_depth = depth[y];
                        last.clear();
                    }
                    if depth[y] == max_depth {
                        last.push(y);
                    }
                    queue.push_back(y);
                }
            }
        }
        if max_depth <= best_depth && root != start {
            break;
        }
        best_depth = max_depth;
        let cand = *last.iter().min_by_key(|&&y| (adj[y].len(), y)).unwrap();
        if cand == root {
            break;
        }
        root = cand;
    }
    root
}

pub(crate) fn reverse_cuthill_mckee(adj: &[Vec<u32>]) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&x| (adj[x].len(), x));
    for &s in &by_degree {
        if !seen[s] {
            let root = peripheral(adj, s);
            bfs_levels(adj, root, &mut seen, &mut order);
        }
    }
    order.reverse();
    order
}
