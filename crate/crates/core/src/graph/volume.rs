use serde::Serialize;

use super::{BallSearch, Graph};
use crate::error::{Error, Result};
use crate::numeric::linear_fit;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VolumeSample {
    pub center: usize,
    pub radius: f64,
    pub volume: usize,
}

/// Ball volumes plus the log-log regression `log|B| ≈ log c + α log r`.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeGrowth {
    pub samples: Vec<VolumeSample>,
    pub alpha: f64,
    pub log_prefactor: f64,
    /// RMS residual of the regression in log space.
    pub residual: f64,
}

pub fn volume_growth_probe(g: &Graph, centers: &[usize], radii: &[f64]) -> Result<VolumeGrowth> {
    if radii.iter().any(|&r| !(r >= 1.0)) {
        return Err(Error::InvalidArgument("probe radii must be >= 1".into()));
    }
    let mut search = BallSearch::new(g);
    let mut members = Vec::new();
    let mut samples = Vec::with_capacity(centers.len() * radii.len());
    for &c in centers {
        for &r in radii {
            search.collect(c, r, &mut members)?;
            samples.push(VolumeSample {
                center: c,
                radius: r,
                volume: members.len(),
            });
        }
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.radius.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| (s.volume as f64).ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(VolumeGrowth {
        samples,
        alpha: fit.slope,
        log_prefactor: fit.intercept,
        residual: fit.rms_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{build_band_graph, build_sierpinski, BandGraphSpec, Norm, SierpinskiSpec};

    fn center_of(g: &Graph) -> usize {
        (0..g.vertex_count())
            .find(|&v| g.coords(v).unwrap().iter().all(|&c| c == 0.0))
            .unwrap()
    }

    #[test]
    fn square_lattice_grows_quadratically() {
        let g = build_band_graph(&BandGraphSpec::new(2, 1, 40, Norm::L1)).unwrap();
        let c = center_of(&g);
        let vg = volume_growth_probe(&g, &[c], &[8.0, 16.0, 32.0]).unwrap();
        // exact ball counts 2r^2+2r+1
        for s in &vg.samples {
            let r = s.radius as usize;
            assert_eq!(s.volume, 2 * r * r + 2 * r + 1);
        }
        assert!((vg.alpha - 2.0).abs() < 0.1, "alpha {}", vg.alpha);
    }

    #[test]
    fn line_grows_linearly() {
        let g = build_band_graph(&BandGraphSpec::new(1, 1, 200, Norm::L1)).unwrap();
        let c = center_of(&g);
        let vg = volume_growth_probe(&g, &[c], &[8.0, 32.0, 128.0]).unwrap();
        assert!((vg.alpha - 1.0).abs() < 0.05);
    }

    #[test]
    fn gasket_growth_exponent() {
        let g = build_sierpinski(&SierpinskiSpec { level: 8 }).unwrap();
        let radii = [4.0, 8.0, 16.0, 32.0, 64.0];
        let vg = volume_growth_probe(&g, &[0], &radii).unwrap();
        let expected = 3f64.ln() / 2f64.ln();
        assert!((vg.alpha - expected).abs() < 0.1, "alpha {}", vg.alpha);
    }

    #[test]
    fn rejects_small_radii() {
        let g = build_band_graph(&BandGraphSpec::new(1, 1, 5, Norm::L1)).unwrap();
        assert!(volume_growth_probe(&g, &[0], &[0.5]).is_err());
    }
}
