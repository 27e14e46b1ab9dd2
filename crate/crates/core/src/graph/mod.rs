//! Finite graphs with an attached metric, balls, boundaries and regions.
//!
//! A [`Graph`] stands in for an infinite ambient graph: generators emit a patch
//! that is strictly larger than the region of interest and flag the vertices
//! whose neighbor lists were cut off by the patch edge ("truncated"). Anything
//! that needs the ambient degree of a vertex refuses truncated vertices.

mod ball;
mod covering;
mod region;
mod textio;
mod volume;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ball::{ball, exterior_boundary, interior_boundary, Ball, BallSearch};
pub use covering::{build_covering, measure_overlap, translation_covers, union_covers, Covering};
pub use region::Region;
pub use textio::{read_graph, write_graph};
pub use volume::{volume_growth_probe, VolumeGrowth, VolumeSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    GraphDistance,
    Euclidean,
    LInfinity,
    L1,
    StackedComposite,
}

impl MetricKind {
    pub fn is_geometric(self) -> bool {
        matches!(self, MetricKind::Euclidean | MetricKind::LInfinity | MetricKind::L1)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MetricKind::GraphDistance => "GraphDistance",
            MetricKind::Euclidean => "Euclidean",
            MetricKind::LInfinity => "LInfinity",
            MetricKind::L1 => "L1",
            MetricKind::StackedComposite => "StackedComposite",
        };
        f.write_str(s)
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GraphDistance" => Ok(MetricKind::GraphDistance),
            "Euclidean" => Ok(MetricKind::Euclidean),
            "LInfinity" => Ok(MetricKind::LInfinity),
            "L1" => Ok(MetricKind::L1),
            "StackedComposite" => Ok(MetricKind::StackedComposite),
            other => Err(Error::InvalidArgument(format!("unknown metric kind `{other}`"))),
        }
    }
}

/// Layer structure of a stacked graph `base × Z_M`. Vertex `(x, j)` has id
/// `j * base.vertex_count() + x`.
#[derive(Debug, Clone)]
pub struct Stacking {
    pub base: Arc<Graph>,
    pub layers: usize,
}

#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    dim: usize,
    coords: Option<Vec<f64>>,
    metric: MetricKind,
    max_degree: usize,
    truncated: Vec<bool>,
    stacking: Option<Stacking>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Duplicate edges are merged;
    /// self-loops and disconnected inputs are rejected.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)], metric: MetricKind) -> Result<Graph> {
        if vertex_count == 0 {
            return Err(Error::MalformedGraph("graph has no vertices".into()));
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidVertex {
                    vertex: u.max(v),
                    count: vertex_count,
                });
            }
            if u == v {
                return Err(Error::MalformedGraph(format!("self-loop at vertex {u}")));
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        let mut neighbors = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        let mut max_degree = 0;
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            max_degree = max_degree.max(list.len());
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        let g = Graph {
            offsets,
            neighbors,
            dim: 0,
            coords: None,
            metric,
            max_degree,
            truncated: vec![false; vertex_count],
            stacking: None,
        };
        let components = g.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(g)
    }

    /// Attaches per-vertex coordinates, `dim` reals per vertex.
    pub fn with_coords(mut self, dim: usize, coords: Vec<f64>) -> Result<Graph> {
        if dim == 0 || coords.len() != dim * self.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: dim * self.vertex_count(),
                got: coords.len(),
            });
        }
        self.dim = dim;
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn with_truncated(mut self, truncated: Vec<bool>) -> Result<Graph> {
        if truncated.len() != self.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: self.vertex_count(),
                got: truncated.len(),
            });
        }
        self.truncated = truncated;
        Ok(self)
    }

    pub(crate) fn with_stacking(mut self, stacking: Stacking) -> Graph {
        self.metric = MetricKind::StackedComposite;
        self.stacking = Some(stacking);
        self
    }

    /// Switches the metric used for balls. Geometric metrics need coordinates.
    pub fn with_metric(mut self, metric: MetricKind) -> Result<Graph> {
        if metric.is_geometric() && self.coords.is_none() {
            return Err(Error::InvalidArgument(format!("metric {metric} needs vertex coordinates")));
        }
        if metric == MetricKind::StackedComposite && self.stacking.is_none() {
            return Err(Error::InvalidArgument("stacked metric on a non-stacked graph".into()));
        }
        self.metric = metric;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.neighbors[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// `M_Γ`, the maximal vertex degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn metric_kind(&self) -> MetricKind {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self, x: usize) -> Option<&[f64]> {
        self.coords.as_ref().map(|c| &c[x * self.dim..(x + 1) * self.dim])
    }

    pub fn has_coords(&self) -> bool {
        self.coords.is_some()
    }

    /// True when the generator cut off part of this vertex's neighborhood.
    pub fn is_truncated(&self, x: usize) -> bool {
        self.truncated[x]
    }

    pub fn truncated_count(&self) -> usize {
        self.truncated.iter().filter(|&&t| t).count()
    }

    pub fn stacking(&self) -> Option<&Stacking> {
        self.stacking.as_ref()
    }

    pub fn are_adjacent(&self, x: usize, y: usize) -> bool {
        self.neighbors(x).binary_search(&(y as u32)).is_ok()
    }

    /// Stable key of the undirected edge `{x, y}`: the adjacency slot of the
    /// larger endpoint in the smaller endpoint's neighbor list.
    pub fn edge_key(&self, x: usize, y: usize) -> Option<usize> {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        self.neighbors(lo)
            .binary_search(&(hi as u32))
            .ok()
            .map(|pos| self.offsets[lo] + pos)
    }

    /// Undirected edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: x,
                count: self.vertex_count(),
            })
        }
    }

    /// Distance between two vertices under the graph's metric.
    pub fn distance(&self, x: usize, y: usize) -> Result<f64> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        match self.metric {
            MetricKind::GraphDistance => Ok(self.hop_distance(x, y) as f64),
            MetricKind::StackedComposite => {
                let st = self.stacking.as_ref().expect("stacked metric without stacking");
                let nb = st.base.vertex_count();
                let (bx, jx) = (x % nb, x / nb);
                let (by, jy) = (y % nb, y / nb);
                if bx == by {
                    Ok(if jx == jy { 0.0 } else { 0.5 })
                } else {
                    Ok(st.base.hop_distance(bx, by) as f64)
                }
            }
            kind => {
                let a = self.coords(x).expect("geometric metric without coords");
                let b = self.coords(y).expect("geometric metric without coords");
                Ok(norm_distance(kind, a, b))
            }
        }
    }

    fn hop_distance(&self, x: usize, y: usize) -> usize {
        if x == y {
            return 0;
        }
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[x] = 0;
        queue.push_back(x);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                let w = w as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    if w == y {
                        return dist[w];
                    }
                    queue.push_back(w);
                }
            }
        }
        usize::MAX
    }

    /// Connected components; returns a component label per vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    let w = w as usize;
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    fn component_count(&self) -> usize {
        self.components().0
    }

    /// Subgraph induced on `keep` (sorted, deduplicated), with coordinates and
    /// truncation flags carried over. Fails if the induced graph is disconnected.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        let mut index = vec![u32::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = i as u32;
        }
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &w in self.neighbors(v) {
                let j = index[w as usize];
                if j != u32::MAX && (j as usize) > i {
                    edges.push((i, j as usize));
                }
            }
        }
        let metric = if self.metric == MetricKind::StackedComposite {
            MetricKind::GraphDistance
        } else {
            self.metric
        };
        let mut g = Graph::from_edges(keep.len(), &edges, metric)?;
        if let Some(c) = &self.coords {
            let mut sub = Vec::with_capacity(keep.len() * self.dim);
            for &v in keep {
                sub.extend_from_slice(&c[v * self.dim..(v + 1) * self.dim]);
            }
            g = g.with_coords(self.dim, sub)?;
        }
        let truncated = keep
            .iter()
            .map(|&v| self.truncated[v] || self.degree(v) != g.degree(index[v] as usize))
            .collect();
        g.with_truncated(truncated)
    }
}

pub(crate) fn norm_distance(kind: MetricKind, a: &[f64], b: &[f64]) -> f64 {
    let diffs = a.iter().zip(b).map(|(p, q)| (p - q).abs());
    match kind {
        MetricKind::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        MetricKind::LInfinity => diffs.fold(0.0, f64::max),
        MetricKind::L1 => diffs.sum(),
        _ => unreachable!("not a coordinate norm"),
    }
}
