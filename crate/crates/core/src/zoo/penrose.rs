//! Penrose rhombus (P3) tiling by Robinson-triangle deflation.
//!
//! Each half-rhombus is a triangle `(kind, A, B, C)` with apex `A` and equal
//! legs `AB = AC`; the base `BC` is the rhombus diagonal shared with the mirror
//! half. Legs are the rhombus sides, so they are the edges of the vertex graph.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MetricKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenroseSpec {
    pub generations: u32,
    /// Clip radius in units of the rhombus side.
    pub clip_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhombusKind {
    /// 36°/144° rhombus.
    Thin,
    /// 72°/108° rhombus.
    Fat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Half {
    kind: RhombusKind,
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
}

fn lerp(p: [f64; 2], q: [f64; 2], t: f64) -> [f64; 2] {
    [p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t]
}

const PHI: f64 = 1.618_033_988_749_895;

/// Five fat rhombi around the origin, each split into two halves along its
/// long diagonal.
fn sun() -> Vec<Half> {
    let mut out = Vec::with_capacity(10);
    for k in 0..5 {
        let axis = (2.0 * k as f64) * std::f64::consts::PI / 5.0;
        let side = |sign: f64| {
            let t = axis + sign * std::f64::consts::PI / 5.0;
            [t.cos(), t.sin()]
        };
        // tip of the rhombus on the long diagonal
        let tip = [PHI * axis.cos(), PHI * axis.sin()];
        for sign in [-1.0, 1.0] {
            out.push(Half {
                kind: RhombusKind::Fat,
                a: side(sign),
                b: [0.0, 0.0],
                c: tip,
            });
        }
    }
    out
}

fn deflate(tris: &[Half]) -> Vec<Half> {
    let mut out = Vec::with_capacity(3 * tris.len());
    for t in tris {
        let Half { a, b, c, .. } = *t;
        match t.kind {
            RhombusKind::Thin => {
                let p = lerp(a, b, 1.0 / PHI);
                out.push(Half {
                    kind: RhombusKind::Thin,
                    a: c,
                    b: p,
                    c: b,
                });
                out.push(Half {
                    kind: RhombusKind::Fat,
                    a: p,
                    b: c,
                    c: a,
                });
            }
            RhombusKind::Fat => {
                let q = lerp(b, a, 1.0 / PHI);
                let r = lerp(b, c, 1.0 / PHI);
                out.push(Half {
                    kind: RhombusKind::Fat,
                    a: r,
                    b: c,
                    c: a,
                });
                out.push(Half {
                    kind: RhombusKind::Fat,
                    a: q,
                    b: r,
                    c: b,
                });
                out.push(Half {
                    kind: RhombusKind::Thin,
                    a: r,
                    b: q,
                    c: a,
                });
            }
        }
    }
    out
}

/// Half-rhombi of the deflated sun, rescaled so rhombus sides have length 1.
fn patch(generations: u32) -> Vec<Half> {
    let mut tris = sun();
    for _ in 0..generations {
        tris = deflate(&tris);
    }
    let scale = PHI.powi(generations as i32);
    for t in &mut tris {
        for p in [&mut t.a, &mut t.b, &mut t.c] {
            p[0] *= scale;
            p[1] *= scale;
        }
    }
    tris
}

/// Radius of the largest disc inside the generated patch.
fn patch_inner_radius(generations: u32) -> f64 {
    // the outer boundary runs through the tips at distance φ from the origin;
    // the decagon through them has inradius φ·cos 18°
    PHI.powi(generations as i32 + 1) * (std::f64::consts::PI / 10.0).cos()
}

const GRID: f64 = 1e9;

fn grid_key(p: [f64; 2]) -> (i64, i64) {
    ((p[0] * GRID).round() as i64, (p[1] * GRID).round() as i64)
}

/// Deduplicates points on a 1e-9 grid, probing neighboring cells so that
/// points straddling a cell boundary still merge.
struct VertexPool {
    ids: HashMap<(i64, i64), usize>,
    points: Vec<[f64; 2]>,
}

impl VertexPool {
    fn id(&mut self, p: [f64; 2]) -> usize {
        let (kx, ky) = grid_key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(&id) = self.ids.get(&(kx + dx, ky + dy)) {
                    return id;
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.ids.insert((kx, ky), id);
        id
    }
}

/// Vertex graph of a Penrose rhombus patch clipped to a disc, keeping the
/// largest connected component. Vertices within distance 2 of the clip circle
/// (or of the generated patch's edge) are flagged truncated.
pub fn build_penrose(spec: &PenroseSpec) -> Result<Graph> {
    if spec.generations < 1 {
        return Err(Error::InvalidArgument("Penrose patch needs at least one deflation".into()));
    }
    if !(spec.clip_radius > 0.0) {
        return Err(Error::InvalidArgument(format!("clip radius must be positive, got {}", spec.clip_radius)));
    }
    let tris = patch(spec.generations);
    let mut pool = VertexPool {
        ids: HashMap::new(),
        points: Vec::new(),
    };
    let mut raw_edges = Vec::with_capacity(2 * tris.len());
    for t in &tris {
        let a = pool.id(t.a);
        let b = pool.id(t.b);
        let c = pool.id(t.c);
        raw_edges.push((a.min(b), a.max(b)));
        raw_edges.push((a.min(c), a.max(c)));
    }
    raw_edges.sort_unstable();
    raw_edges.dedup();

    let clip = spec.clip_radius.min(patch_inner_radius(spec.generations));
    let radius = |p: [f64; 2]| (p[0] * p[0] + p[1] * p[1]).sqrt();
    let inside: Vec<bool> = pool.points.iter().map(|&p| radius(p) <= clip + 1e-9).collect();

    // largest component of the clipped graph
    let n_all = pool.points.len();
    let mut adj = vec![Vec::new(); n_all];
    for &(u, v) in &raw_edges {
        if inside[u] && inside[v] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut label = vec![usize::MAX; n_all];
    let mut best: Option<(usize, usize)> = None;
    let mut comp = 0;
    for s in (0..n_all).filter(|&s| inside[s]) {
        if label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = comp;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = comp;
                    stack.push(w);
                }
            }
        }
        if best.is_none_or(|(_, sz)| size > sz) {
            best = Some((comp, size));
        }
        comp += 1;
    }
    let Some((keep_label, _)) = best else {
        return Err(Error::InvalidArgument(format!("clip radius {} leaves no vertices", spec.clip_radius)));
    };

    // stable order: by angle-free lexicographic position
    let mut kept: Vec<usize> = (0..n_all).filter(|&v| label[v] == keep_label).collect();
    kept.sort_by(|&u, &v| {
        let (p, q) = (pool.points[u], pool.points[v]);
        grid_key(p).cmp(&grid_key(q))
    });
    let mut new_id = vec![usize::MAX; n_all];
    for (i, &v) in kept.iter().enumerate() {
        new_id[v] = i;
    }
    let edges: Vec<(usize, usize)> = raw_edges
        .iter()
        .filter(|&&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
        .map(|&(u, v)| (new_id[u], new_id[v]))
        .collect();
    let coords = kept.iter().flat_map(|&v| pool.points[v]).collect();
    let truncated = kept.iter().map(|&v| radius(pool.points[v]) > clip - 2.0).collect();
    Graph::from_edges(kept.len(), &edges, MetricKind::GraphDistance)?
        .with_coords(2, coords)?
        .with_truncated(truncated)
}

/// A rhombus face of the tiling, as its four corners in cyclic order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rhombus {
    pub kind: RhombusKind,
    pub corners: [[f64; 2]; 4],
}

impl Rhombus {
    /// Interior angles in degrees, in corner order.
    pub fn angles(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            let p = self.corners[k];
            let prev = self.corners[(k + 3) % 4];
            let next = self.corners[(k + 1) % 4];
            let u = [prev[0] - p[0], prev[1] - p[1]];
            let v = [next[0] - p[0], next[1] - p[1]];
            let cos = (u[0] * v[0] + u[1] * v[1]) / ((u[0].hypot(u[1])) * (v[0].hypot(v[1])));
            *slot = cos.clamp(-1.0, 1.0).acos().to_degrees();
        }
        out
    }

    pub fn side_lengths(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            let p = self.corners[k];
            let q = self.corners[(k + 1) % 4];
            *slot = (p[0] - q[0]).hypot(p[1] - q[1]);
        }
        out
    }
}

/// Snapped lattice coordinates of a vertex.
type Key = (i64, i64);

/// Complete rhombus faces of the unclipped patch: pairs of half-rhombi that
/// share their base.
pub fn rhombus_faces(generations: u32) -> Vec<Rhombus> {
    let tris = patch(generations);
    let mut by_base: HashMap<(Key, Key), Vec<usize>> = HashMap::new();
    for (k, t) in tris.iter().enumerate() {
        let (kb, kc) = (grid_key_coarse(t.b), grid_key_coarse(t.c));
        let key = if kb <= kc { (kb, kc) } else { (kc, kb) };
        by_base.entry(key).or_default().push(k);
    }
    let mut faces: Vec<Rhombus> = by_base
        .values()
        .filter(|ks| ks.len() == 2)
        .map(|ks| {
            let (s, t) = (tris[ks[0]], tris[ks[1]]);
            Rhombus {
                kind: s.kind,
                corners: [s.a, s.b, t.a, s.c],
            }
        })
        .collect();
    faces.sort_by(|x, y| grid_key(x.corners[0]).cmp(&grid_key(y.corners[0])).then(grid_key(x.corners[2]).cmp(&grid_key(y.corners[2]))));
    faces
}

fn grid_key_coarse(p: [f64; 2]) -> (i64, i64) {
    ((p[0] * 1e6).round() as i64, (p[1] * 1e6).round() as i64)
}
