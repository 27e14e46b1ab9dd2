use std::collections::VecDeque;

use super::{norm_distance, Graph, MetricKind};
use crate::error::{Error, Result};

/// Closed metric ball `B(center, radius)`; members sorted by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

const GEOMETRIC_TIE_TOL: f64 = 1e-9;

/// Reusable ball enumerator. Keeps a visit-stamp array so repeated searches on
/// the same graph cost O(|ball| · degree) rather than O(|V|).
pub struct BallSearch<'g> {
    graph: &'g Graph,
    stamp: Vec<u32>,
    depth: Vec<u32>,
    epoch: u32,
    queue: VecDeque<usize>,
}

impl<'g> BallSearch<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let n = match graph.stacking() {
            Some(st) => st.base.vertex_count().max(graph.vertex_count()),
            None => graph.vertex_count(),
        };
        BallSearch {
            graph,
            stamp: vec![0; n],
            depth: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// Writes the members of `B(x, r)` into `out` (unsorted).
    pub fn collect(&mut self, x: usize, r: f64, out: &mut Vec<usize>) -> Result<()> {
        self.graph.check_vertex(x)?;
        if !(r >= 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius must be >= 0, got {r}")));
        }
        out.clear();
        match self.graph.metric_kind() {
            MetricKind::GraphDistance => {
                let g = self.graph;
                self.hop_ball(g, x, r.floor() as u32, out);
            }
            MetricKind::StackedComposite => {
                let st = self.graph.stacking().expect("stacked metric without stacking");
                let nb = st.base.vertex_count();
                let layers = st.layers;
                let base = st.base.clone();
                if r < 0.5 {
                    out.push(x);
                } else {
                    let mut base_ball = Vec::new();
                    self.hop_ball(&base, x % nb, r.floor() as u32, &mut base_ball);
                    for j in 0..layers {
                        out.extend(base_ball.iter().map(|&b| j * nb + b));
                    }
                }
            }
            kind => {
                let c = self.graph.coords(x).expect("geometric metric without coords");
                let tol = GEOMETRIC_TIE_TOL * (1.0 + r);
                for y in 0..self.graph.vertex_count() {
                    let p = self.graph.coords(y).unwrap();
                    if norm_distance(kind, c, p) <= r + tol {
                        out.push(y);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ball(&mut self, x: usize, r: f64) -> Result<Ball> {
        let mut members = Vec::new();
        self.collect(x, r, &mut members)?;
        members.sort_unstable();
        Ok(Ball {
            center: x,
            radius: r,
            members,
        })
    }

    fn hop_ball(&mut self, g: &Graph, x: usize, radius: u32, out: &mut Vec<usize>) {
        self.next_epoch();
        let epoch = self.epoch;
        self.stamp[x] = epoch;
        self.depth[x] = 0;
        self.queue.clear();
        self.queue.push_back(x);
        out.push(x);
        while let Some(v) = self.queue.pop_front() {
            let d = self.depth[v];
            if d == radius {
                continue;
            }
            for &w in g.neighbors(v) {
                let w = w as usize;
                if self.stamp[w] != epoch {
                    self.stamp[w] = epoch;
                    self.depth[w] = d + 1;
                    out.push(w);
                    self.queue.push_back(w);
                }
            }
        }
    }
}

/// All vertices within distance `r` of `x`.
pub fn ball(g: &Graph, x: usize, r: f64) -> Result<Ball> {
    BallSearch::new(g).ball(x, r)
}

fn membership(g: &Graph, set: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; g.vertex_count()];
    for &x in set {
        g.check_vertex(x)?;
        inside[x] = true;
    }
    Ok(inside)
}

/// `∂S = {x ∉ S : x ~ y for some y ∈ S}`, sorted.
pub fn exterior_boundary(g: &Graph, set: &[usize]) -> Result<Vec<usize>> {
    let inside = membership(g, set)?;
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for &x in set {
        for &y in g.neighbors(x) {
            let y = y as usize;
            if !inside[y] && !seen[y] {
                seen[y] = true;
                out.push(y);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `∂ⁱS = {x ∈ S : x ~ y for some y ∉ S}`, sorted.
pub fn interior_boundary(g: &Graph, set: &[usize]) -> Result<Vec<usize>> {
    let inside = membership(g, set)?;
    let mut out: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&x| g.neighbors(x).iter().any(|&y| !inside[y as usize]))
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{build_band_graph, BandGraphSpec, Norm};

    fn band1d(w: usize, extent: i64) -> Graph {
        build_band_graph(&BandGraphSpec::new(1, w, extent, Norm::L1)).unwrap()
    }

    fn vertex_at(g: &Graph, coord: &[f64]) -> usize {
        (0..g.vertex_count()).find(|&v| g.coords(v).unwrap() == coord).unwrap()
    }

    fn coords_of(g: &Graph, set: &[usize]) -> Vec<i64> {
        let mut c: Vec<i64> = set.iter().map(|&v| g.coords(v).unwrap()[0] as i64).collect();
        c.sort_unstable();
        c
    }

    #[test]
    fn unit_ball_in_band_graph_is_the_band() {
        let g = band1d(2, 10);
        let b = ball(&g, vertex_at(&g, &[0.0]), 1.0).unwrap();
        assert_eq!(coords_of(&g, &b.members), vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn zero_radius_ball_is_center() {
        let g = band1d(3, 10);
        let b = ball(&g, 4, 0.0).unwrap();
        assert_eq!(b.members, vec![4]);
        let b = ball(&g, 4, 0.99).unwrap();
        assert_eq!(b.members, vec![4]);
    }

    #[test]
    fn l1_ball_of_radius_two_in_square_lattice() {
        let g = build_band_graph(&BandGraphSpec::new(2, 1, 6, Norm::L1)).unwrap();
        let center = vertex_at(&g, &[0.0, 0.0]);
        // brute-force count of lattice points with |i|+|j| <= 2
        let mut expected = 0;
        for i in -2i64..=2 {
            for j in -2i64..=2 {
                if i.abs() + j.abs() <= 2 {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 13);
        assert_eq!(ball(&g, center, 2.0).unwrap().len(), expected);
        let geo = g.clone().with_metric(MetricKind::L1).unwrap();
        assert_eq!(ball(&geo, center, 2.0).unwrap().len(), expected);
    }

    #[test]
    fn invalid_center_is_an_argument_error() {
        let g = band1d(1, 3);
        assert!(matches!(ball(&g, 100, 1.0), Err(Error::InvalidVertex { .. })));
        assert!(ball(&g, 0, -1.0).is_err());
    }

    #[test]
    fn boundaries_of_a_segment() {
        let g = band1d(1, 10);
        let seg: Vec<usize> = (0..=5).map(|i| vertex_at(&g, &[i as f64])).collect();
        assert_eq!(coords_of(&g, &exterior_boundary(&g, &seg).unwrap()), vec![-1, 6]);
        assert_eq!(coords_of(&g, &interior_boundary(&g, &seg).unwrap()), vec![0, 5]);

        let g2 = band1d(2, 10);
        let seg: Vec<usize> = (0..=5).map(|i| vertex_at(&g2, &[i as f64])).collect();
        // brute force: neighbors of the segment that lie outside it
        let mut ext = Vec::new();
        let mut int = Vec::new();
        for x in -10i64..=10 {
            let in_seg = (0..=5).contains(&x);
            let touches = (0..=5).any(|y: i64| y != x && (x - y).abs() <= 2);
            let touches_out = (-10i64..=10).any(|y| !(0..=5).contains(&y) && (x - y).abs() <= 2 && y != x);
            if !in_seg && touches {
                ext.push(x);
            }
            if in_seg && touches_out {
                int.push(x);
            }
        }
        assert_eq!(ext, vec![-2, -1, 6, 7]);
        assert_eq!(coords_of(&g2, &exterior_boundary(&g2, &seg).unwrap()), ext);
        assert_eq!(coords_of(&g2, &interior_boundary(&g2, &seg).unwrap()), int);
    }

    #[test]
    fn boundaries_of_whole_graph_are_empty() {
        let g = band1d(2, 5);
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        assert!(exterior_boundary(&g, &all).unwrap().is_empty());
        assert!(interior_boundary(&g, &all).unwrap().is_empty());
    }
}
