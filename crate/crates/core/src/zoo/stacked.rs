use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, MetricKind, Stacking};

/// `base × Z_M`: `M` copies of the base graph with vertical edges between
/// identical sites of adjacent copies.
#[derive(Debug, Clone)]
pub struct StackSpec {
    pub base: Arc<Graph>,
    pub layers: usize,
}

pub fn build_stacked(spec: &StackSpec) -> Result<Graph> {
    let base = &spec.base;
    let m = spec.layers;
    if m < 2 {
        return Err(Error::InvalidArgument(format!("a stack needs at least 2 layers, got {m}")));
    }
    let nb = base.vertex_count();
    let n = nb * m;
    let mut edges = Vec::with_capacity(m * base.edge_count() + (m - 1) * nb);
    for j in 0..m {
        edges.extend(base.edges().map(|(u, v)| (j * nb + u, j * nb + v)));
        if j + 1 < m {
            edges.extend((0..nb).map(|x| (j * nb + x, (j + 1) * nb + x)));
        }
    }
    let mut g = Graph::from_edges(n, &edges, MetricKind::GraphDistance)?;
    if base.has_coords() {
        let dim = base.dim() + 1;
        let mut coords = Vec::with_capacity(n * dim);
        for j in 0..m {
            for x in 0..nb {
                coords.extend_from_slice(base.coords(x).unwrap());
                coords.push(j as f64);
            }
        }
        g = g.with_coords(dim, coords)?;
    }
    let truncated = (0..n).map(|v| base.is_truncated(v % nb)).collect();
    Ok(g.with_truncated(truncated)?.with_stacking(Stacking {
        base: base.clone(),
        layers: m,
    }))
}
