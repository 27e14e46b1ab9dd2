use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MetricKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    LInfinity,
}

/// `Γ_{d,W}` restricted to the box `[-extent, extent]^d`: lattice points joined
/// whenever `0 < ‖x − y‖ ≤ W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandGraphSpec {
    pub d: usize,
    pub w: usize,
    pub extent: i64,
    pub norm: Norm,
}

impl BandGraphSpec {
    pub fn new(d: usize, w: usize, extent: i64, norm: Norm) -> Self {
        BandGraphSpec { d, w, extent, norm }
    }
}

fn within(norm: Norm, offset: &[i64], w: i64) -> bool {
    match norm {
        Norm::L1 => offset.iter().map(|c| c.abs()).sum::<i64>() <= w,
        Norm::L2 => offset.iter().map(|c| c * c).sum::<i64>() <= w * w,
        Norm::LInfinity => offset.iter().all(|c| c.abs() <= w),
    }
}

/// Offsets `δ ≠ 0` with `‖δ‖ ≤ W`.
fn band_offsets(d: usize, w: i64, norm: Norm) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let side = 2 * w + 1;
    let total = (side as usize).pow(d as u32);
    for k in 0..total {
        let mut rem = k as i64;
        let mut off = vec![0i64; d];
        for c in off.iter_mut().rev() {
            *c = rem % side - w;
            rem /= side;
        }
        if off.iter().any(|&c| c != 0) && within(norm, &off, w) {
            out.push(off);
        }
    }
    out
}

pub fn build_band_graph(spec: &BandGraphSpec) -> Result<Graph> {
    let BandGraphSpec { d, w, extent, norm } = *spec;
    if !(d == 1 || d == 2) {
        return Err(Error::InvalidArgument(format!("band graphs support d = 1 or 2, got {d}")));
    }
    if w == 0 {
        return Err(Error::InvalidArgument("bandwidth W must be >= 1".into()));
    }
    if extent < w as i64 {
        return Err(Error::InvalidArgument(format!("extent {extent} is smaller than W = {w}")));
    }
    let side = (2 * extent + 1) as usize;
    let n = side.pow(d as u32);
    let point = |v: usize| -> Vec<i64> {
        let mut rem = v;
        let mut p = vec![0i64; d];
        for c in p.iter_mut().rev() {
            *c = (rem % side) as i64 - extent;
            rem /= side;
        }
        p
    };
    let index = |p: &[i64]| -> Option<usize> {
        let mut v = 0usize;
        for &c in p {
            if c < -extent || c > extent {
                return None;
            }
            v = v * side + (c + extent) as usize;
        }
        Some(v)
    };
    let offsets = band_offsets(d, w as i64, norm);
    let mut edges = Vec::with_capacity(n * offsets.len() / 2);
    let mut truncated = vec![false; n];
    let mut coords = Vec::with_capacity(n * d);
    for v in 0..n {
        let p = point(v);
        coords.extend(p.iter().map(|&c| c as f64));
        for off in &offsets {
            let q: Vec<i64> = p.iter().zip(off).map(|(a, b)| a + b).collect();
            match index(&q) {
                Some(u) if u > v => edges.push((v, u)),
                Some(_) => {}
                None => truncated[v] = true,
            }
        }
    }
    Graph::from_edges(n, &edges, MetricKind::GraphDistance)?
        .with_coords(d, coords)?
        .with_truncated(truncated)
}
