use std::sync::Arc;

use super::Graph;
use crate::error::{Error, Result};

const ABSENT: u32 = u32::MAX;

/// A finite vertex set `A` of an ambient graph, with its induced edges.
#[derive(Debug, Clone)]
pub struct Region {
    graph: Arc<Graph>,
    vertices: Vec<usize>,
    local: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Region {
    pub fn new(graph: Arc<Graph>, mut vertices: Vec<usize>) -> Result<Region> {
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("region must be nonempty".into()));
        }
        let mut local = vec![ABSENT; graph.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            graph.check_vertex(v)?;
            local[v] = i as u32;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in graph.neighbors(v) {
                let j = local[w as usize];
                if j != ABSENT && j as usize > i {
                    edges.push((i as u32, j));
                }
            }
        }
        Ok(Region {
            graph,
            vertices,
            local,
            edges,
        })
    }

    pub fn whole(graph: Arc<Graph>) -> Region {
        let all = (0..graph.vertex_count()).collect();
        Region::new(graph, all).expect("graphs are nonempty")
    }

    /// Vertices whose coordinates satisfy `keep`.
    pub fn from_coords(graph: Arc<Graph>, keep: impl Fn(&[f64]) -> bool) -> Result<Region> {
        if !graph.has_coords() {
            return Err(Error::InvalidArgument("graph has no coordinates".into()));
        }
        let vertices = (0..graph.vertex_count())
            .filter(|&v| keep(graph.coords(v).unwrap()))
            .collect();
        Region::new(graph, vertices)
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> usize {
        self.vertices[i]
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.local.len() && self.local[v] != ABSENT
    }

    pub fn local_index(&self, v: usize) -> Option<usize> {
        self.local.get(v).filter(|&&i| i != ABSENT).map(|&i| i as usize)
    }

    /// Induced edges as local index pairs `(i, j)`, `i < j`, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn ambient_degree(&self, i: usize) -> usize {
        self.graph.degree(self.vertices[i])
    }

    pub fn induced_degree(&self, i: usize) -> usize {
        let v = self.vertices[i];
        self.graph.neighbors(v).iter().filter(|&&w| self.contains(w as usize)).count()
    }

    /// Number of connected components of the induced subgraph.
    pub fn component_count(&self) -> usize {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            adj[i as usize].push(j as usize);
            adj[j as usize].push(i as usize);
        }
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}
