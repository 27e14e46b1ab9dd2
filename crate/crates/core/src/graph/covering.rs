use super::{BallSearch, Graph, Region};
use crate::error::{Error, Result};

/// Ball covering `{B(z_i, radius)}` of a target vertex set (the whole graph or
/// a region), with its measured overlap constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    pub radius: f64,
    pub centers: Vec<usize>,
    /// Max over target vertices of the number of covering balls containing it.
    pub overlap_constant: usize,
    domain: Vec<usize>,
}

impl Covering {
    /// Target vertex set, sorted.
    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Greedy maximal packing restricted to `region`; distances are measured
    /// in the ambient graph.
    pub fn for_region(region: &Region, radius: f64) -> Result<Covering> {
        greedy_covering(region.graph(), region.vertices().to_vec(), radius)
    }

    /// Per-target membership counts `#{i : x ∈ B(z_i, scale·radius)}`,
    /// indexed like [`Covering::domain`].
    pub fn membership_counts(&self, g: &Graph, scale: f64) -> Result<Vec<usize>> {
        let index = domain_index(g, &self.domain);
        let mut counts = vec![0usize; self.domain.len()];
        let mut search = BallSearch::new(g);
        let mut members = Vec::new();
        for &c in &self.centers {
            search.collect(c, scale * self.radius, &mut members)?;
            for &m in &members {
                if let Some(i) = index[m] {
                    counts[i] += 1;
                }
            }
        }
        Ok(counts)
    }

    /// Exhaustive union check: every target vertex lies in some ball.
    pub fn covers(&self, g: &Graph) -> Result<bool> {
        Ok(self.membership_counts(g, 1.0)?.iter().all(|&c| c > 0))
    }
}

fn domain_index(g: &Graph, domain: &[usize]) -> Vec<Option<usize>> {
    let mut index = vec![None; g.vertex_count()];
    for (i, &v) in domain.iter().enumerate() {
        index[v] = Some(i);
    }
    index
}

fn greedy_covering(g: &Graph, domain: Vec<usize>, radius: f64) -> Result<Covering> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("covering radius must be finite and >= 0, got {radius}")));
    }
    for &v in &domain {
        g.check_vertex(v)?;
    }
    let mut blocked = vec![false; g.vertex_count()];
    let mut search = BallSearch::new(g);
    let mut members = Vec::new();
    let mut centers = Vec::new();
    for &v in &domain {
        if blocked[v] {
            continue;
        }
        centers.push(v);
        search.collect(v, radius / 2.0, &mut members)?;
        for &m in &members {
            blocked[m] = true;
        }
    }
    let mut cov = Covering {
        radius,
        centers,
        overlap_constant: 0,
        domain,
    };
    cov.overlap_constant = cov.membership_counts(g, 1.0)?.into_iter().max().unwrap_or(0);
    Ok(cov)
}

/// Covering of the whole graph by `R`-balls: centers are accepted in vertex-id
/// order whenever no earlier center lies within `R/2`.
pub fn build_covering(g: &Graph, radius: f64) -> Result<Covering> {
    greedy_covering(g, (0..g.vertex_count()).collect(), radius)
}

/// Max over target vertices of the number of centers within `scale · radius`.
pub fn measure_overlap(g: &Graph, cov: &Covering, scale: f64) -> Result<usize> {
    if !(scale >= 1.0) {
        return Err(Error::InvalidArgument(format!("overlap scale must be >= 1, got {scale}")));
    }
    Ok(cov.membership_counts(g, scale)?.into_iter().max().unwrap_or(0))
}

/// Family of `R`-coverings whose `κR`-balls jointly cover the graph.
///
/// Each ball of an `R/2`-covering is filled with a maximal set of points whose
/// `κR/2`-balls are pairwise disjoint (the ball center first, then by id); the
/// j-th cover takes the j-th point from every such set, cycling through shorter
/// sets.
pub fn translation_covers(g: &Graph, radius: f64, kappa: f64) -> Result<Vec<Covering>> {
    translation_covers_on(g, (0..g.vertex_count()).collect(), radius, kappa)
}

pub(crate) fn translation_covers_on(g: &Graph, domain: Vec<usize>, radius: f64, kappa: f64) -> Result<Vec<Covering>> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidArgument(format!("kappa must lie in (0, 1), got {kappa}")));
    }
    if !(radius >= 1.0) {
        return Err(Error::InvalidArgument(format!("radius must be >= 1, got {radius}")));
    }
    let base = greedy_covering(g, domain.clone(), radius / 2.0)?;
    let in_domain = {
        let mut mask = vec![false; g.vertex_count()];
        domain.iter().for_each(|&v| mask[v] = true);
        mask
    };
    let small = kappa * radius / 2.0;
    let mut search = BallSearch::new(g);
    let mut occupied = vec![u32::MAX; g.vertex_count()];
    let mut probe = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(base.centers.len());
    for (gi, &z) in base.centers.iter().enumerate() {
        let tag = gi as u32;
        let mut candidates = search.ball(z, radius / 2.0)?.members;
        candidates.retain(|&v| in_domain[v] && v != z);
        candidates.insert(0, z);
        let mut chosen = Vec::new();
        for &y in &candidates {
            search.collect(y, small, &mut probe)?;
            if probe.iter().any(|&p| occupied[p] == tag) {
                continue;
            }
            chosen.push(y);
            for &p in &probe {
                occupied[p] = tag;
            }
        }
        groups.push(chosen);
    }
    let count = groups.iter().map(Vec::len).max().unwrap_or(0);
    (0..count)
        .map(|j| {
            let mut centers: Vec<usize> = groups.iter().map(|grp| grp[j % grp.len()]).collect();
            centers.sort_unstable();
            centers.dedup();
            let mut cov = Covering {
                radius,
                centers,
                overlap_constant: 0,
                domain: domain.clone(),
            };
            cov.overlap_constant = cov.membership_counts(g, 1.0)?.into_iter().max().unwrap_or(0);
            Ok(cov)
        })
        .collect()
}

/// True when the `κR`-balls around all centers of all covers cover the domain.
pub fn union_covers(g: &Graph, covers: &[Covering], kappa: f64) -> Result<bool> {
    let Some(first) = covers.first() else {
        return Ok(false);
    };
    let index = domain_index(g, first.domain());
    let mut hit = vec![false; first.domain().len()];
    let mut search = BallSearch::new(g);
    let mut members = Vec::new();
    for cov in covers {
        for &c in &cov.centers {
            search.collect(c, kappa * cov.radius, &mut members)?;
            for &m in &members {
                if let Some(i) = index[m] {
                    hit[i] = true;
                }
            }
        }
    }
    Ok(hit.into_iter().all(|h| h))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::MetricKind;
    use crate::zoo::{build_band_graph, BandGraphSpec, Norm};

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges, MetricKind::GraphDistance).unwrap()
    }

    /// Brute-force overlap: distances from every vertex to every center.
    fn brute_overlap(g: &Graph, cov: &Covering, scale: f64) -> usize {
        (0..g.vertex_count())
            .map(|v| {
                cov.centers
                    .iter()
                    .filter(|&&c| g.distance(c, v).unwrap() <= (scale * cov.radius).floor())
                    .count()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn segment_covering_spacing_and_overlap() {
        let g = path(100);
        let cov = build_covering(&g, 10.0).unwrap();
        for w in cov.centers.windows(2) {
            assert!(w[1] - w[0] >= 5);
        }
        assert!(cov.covers(&g).unwrap());
        let brute = brute_overlap(&g, &cov, 1.0);
        assert_eq!(cov.overlap_constant, brute);
        assert!(cov.overlap_constant <= 5);
        assert_eq!(measure_overlap(&g, &cov, 1.0).unwrap(), cov.overlap_constant);
        assert_eq!(measure_overlap(&g, &cov, 2.0).unwrap(), brute_overlap(&g, &cov, 2.0));
    }

    #[test]
    fn single_vertex_graph() {
        let g = Graph::from_edges(1, &[], MetricKind::GraphDistance).unwrap();
        let cov = build_covering(&g, 3.0).unwrap();
        assert_eq!(cov.centers, vec![0]);
        assert_eq!(cov.overlap_constant, 1);
    }

    #[test]
    fn square_lattice_covering_is_a_union_cover() {
        let g = build_band_graph(&BandGraphSpec::new(2, 1, 25, Norm::L1)).unwrap();
        assert_eq!(g.vertex_count(), 51 * 51);
        let cov = build_covering(&g, 5.0).unwrap();
        // independent set-union oracle
        let mut covered = vec![false; g.vertex_count()];
        for &c in &cov.centers {
            for v in 0..g.vertex_count() {
                let (a, b) = (g.coords(c).unwrap(), g.coords(v).unwrap());
                if (a[0] - b[0]).abs() + (a[1] - b[1]).abs() <= 5.0 {
                    covered[v] = true;
                }
            }
        }
        assert!(covered.iter().all(|&c| c));
        assert!(cov.covers(&g).unwrap());
    }

    #[test]
    fn disjoint_centers_have_overlap_one() {
        let g = path(9);
        let cov = build_covering(&g, 1.0).unwrap();
        // R = 1: every vertex is a center, each radius-1 ball holds <= 3 vertices
        assert_eq!(cov.centers.len(), 9);
        assert_eq!(cov.overlap_constant, 3);
        let cov0 = build_covering(&g, 0.5).unwrap();
        assert_eq!(cov0.overlap_constant, 1);
        assert_eq!(measure_overlap(&g, &cov0, 1.0).unwrap(), 1);
    }

    #[test]
    fn overlap_is_monotone_in_scale() {
        let g = path(200);
        let cov = build_covering(&g, 6.0).unwrap();
        let mut prev = 0;
        for s in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let o = measure_overlap(&g, &cov, s).unwrap();
            assert!(o >= prev);
            prev = o;
        }
        assert!(measure_overlap(&g, &cov, 0.5).is_err());
    }

    #[test]
    fn translation_covers_near_one() {
        let g = path(120);
        let covers = translation_covers(&g, 8.0, 0.99).unwrap();
        assert!((1..=2).contains(&covers.len()), "got {} covers", covers.len());
        assert!(union_covers(&g, &covers, 0.99).unwrap());
        for c in &covers {
            assert!(c.covers(&g).unwrap());
        }
    }

    #[test]
    fn translation_covers_small_kappa() {
        let g = path(150);
        let kappa = 0.25;
        let covers = translation_covers(&g, 8.0, kappa).unwrap();
        // volume-comparison bound with C_U/C_L = 3 on Z: 3 * 3 * kappa^-1
        assert!(covers.len() as f64 <= 9.0 / kappa);
        assert!(union_covers(&g, &covers, kappa).unwrap());
        for c in &covers {
            assert!(c.covers(&g).unwrap());
        }
        assert!(translation_covers(&g, 8.0, 1.0).is_err());
    }

    #[test]
    fn one_ball_region_gives_one_cover() {
        let g = Arc::new(path(7));
        let covers = translation_covers(&g, 20.0, 0.9).unwrap();
        assert_eq!(covers.len(), 1);
        assert!(covers[0].covers(&g).unwrap());
    }
}
