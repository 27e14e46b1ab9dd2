use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Graph, MetricKind};

/// Level-`ℓ` Sierpinski gasket graph: the unit triangles of the gasket of side
/// `2^ℓ` anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SierpinskiSpec {
    pub level: u32,
}

pub fn sierpinski_vertex_count(level: u32) -> usize {
    (3usize.pow(level + 1) + 3) / 2
}

/// Vertices are indexed in `(row, column)` order of the triangular lattice
/// coordinates; vertex 0 is the origin corner. The two far corners are flagged
/// truncated because the infinite gasket attaches further triangles there.
pub fn build_sierpinski(spec: &SierpinskiSpec) -> Result<Graph> {
    let level = spec.level;
    // lower-left corners of the unit triangles, lattice basis (1,0), (1/2, √3/2)
    let mut triangles: Vec<(i64, i64)> = vec![(0, 0)];
    for k in 1..=level {
        let half = 1i64 << (k - 1);
        let prev = std::mem::take(&mut triangles);
        for &(di, dj) in &[(0, 0), (half, 0), (0, half)] {
            triangles.extend(prev.iter().map(|&(i, j)| (i + di, j + dj)));
        }
    }
    let mut points: Vec<(i64, i64)> = triangles
        .iter()
        .flat_map(|&(i, j)| [(i, j), (i + 1, j), (i, j + 1)])
        .collect();
    points.sort_unstable_by_key(|&(i, j)| (j, i));
    points.dedup();
    let index: HashMap<(i64, i64), usize> = points.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut edges = Vec::with_capacity(3 * triangles.len());
    for &(i, j) in &triangles {
        let a = index[&(i, j)];
        let b = index[&(i + 1, j)];
        let c = index[&(i, j + 1)];
        edges.extend([(a, b), (b, c), (a, c)]);
    }
    let side = 1i64 << level;
    let h = 3f64.sqrt() / 2.0;
    let coords = points
        .iter()
        .flat_map(|&(i, j)| [i as f64 + 0.5 * j as f64, h * j as f64])
        .collect();
    let truncated = points.iter().map(|&p| p == (side, 0) || p == (0, side)).collect();
    Graph::from_edges(points.len(), &edges, MetricKind::GraphDistance)?
        .with_coords(2, coords)?
        .with_truncated(truncated)
}
