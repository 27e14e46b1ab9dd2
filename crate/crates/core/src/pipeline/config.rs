use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{BallSearch, Graph, Region};
use crate::landscape::RadiusPolicy;
use crate::operator::{BoundaryMode, DisorderConfig, MuDist, VDist};
use crate::zoo::{
    build_band_graph, build_penrose, build_sierpinski, build_stacked, BandGraphSpec, Norm, PenroseSpec, SierpinskiSpec,
    StackSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    Band { d: usize, w: usize, extent: i64, norm: Norm },
    Sierpinski { level: u32 },
    Penrose { generations: u32, clip_radius: f64 },
    Stacked { base: Box<GraphSpec>, layers: usize },
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSpec::Band { d, w, extent, norm } => build_band_graph(&BandGraphSpec::new(*d, *w, *extent, *norm)),
            GraphSpec::Sierpinski { level } => build_sierpinski(&SierpinskiSpec { level: *level }),
            GraphSpec::Penrose {
                generations,
                clip_radius,
            } => build_penrose(&PenroseSpec {
                generations: *generations,
                clip_radius: *clip_radius,
            }),
            GraphSpec::Stacked { base, layers } => build_stacked(&StackSpec {
                base: Arc::new(base.build()?),
                layers: *layers,
            }),
        }
    }
}

/// Which vertices of the ambient graph form the region `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSpec {
    Whole,
    /// Every coordinate in `[lo, hi]`.
    Box { lo: f64, hi: f64 },
    /// Euclidean disc about the origin.
    Disc { radius: f64 },
    /// The level-`level` gasket at the origin corner of a larger gasket.
    Gasket { level: u32 },
    /// Metric ball about a vertex id.
    Ball { center: usize, radius: f64 },
}

impl RegionSpec {
    pub fn select(&self, g: Arc<Graph>) -> Result<Region> {
        const EPS: f64 = 1e-9;
        match *self {
            RegionSpec::Whole => Ok(Region::whole(g)),
            RegionSpec::Box { lo, hi } => Region::from_coords(g, |p| p.iter().all(|&c| c >= lo - EPS && c <= hi + EPS)),
            RegionSpec::Disc { radius } => {
                Region::from_coords(g, |p| p.iter().map(|c| c * c).sum::<f64>().sqrt() <= radius + EPS)
            }
            RegionSpec::Gasket { level } => {
                let side = 2f64.powi(level as i32);
                Region::from_coords(g, |p| p[0] + p[1] / 3f64.sqrt() <= side + EPS)
            }
            RegionSpec::Ball { center, radius } => {
                let members = BallSearch::new(&g).ball(center, radius)?.members;
                Region::new(g, members)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderLaws {
    pub mu: MuDist,
    pub v: VDist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl EnergyGrid {
    pub fn energies(&self) -> Vec<f64> {
        crate::numeric::log_grid(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    /// `p` in `log N ≈ log m1 + m2 E^{−p}`.
    pub exponent: f64,
    /// Fit window; the lowest positive decade of the curve when absent.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
}

impl Default for TailSpec {
    fn default() -> Self {
        TailSpec {
            exponent: 0.5,
            window: None,
        }
    }
}

/// `c1 · N_u(c2 E)` panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlaySpec {
    pub c1: f64,
    pub c2: f64,
}

/// Full-size graph and region, swapped in by `--paper-scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperScale {
    pub graph: GraphSpec,
    pub region: RegionSpec,
    #[serde(default)]
    pub realizations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub realizations: usize,
    pub boundary: BoundaryMode,
    pub graph: GraphSpec,
    pub region: RegionSpec,
    pub disorder: DisorderLaws,
    pub energy: EnergyGrid,
    pub radius: RadiusPolicy,
    #[serde(default)]
    pub tail: TailSpec,
    #[serde(default)]
    pub overlay: Vec<OverlaySpec>,
    #[serde(default)]
    pub paper_scale: Option<PaperScale>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.energy.min > 0.0) {
            return bad(format!("energy.min must be positive, got {}", self.energy.min));
        }
        if !(self.energy.max > self.energy.min) {
            return bad("energy.max must exceed energy.min".into());
        }
        if self.energy.points < 2 {
            return bad(format!("energy.points must be >= 2, got {}", self.energy.points));
        }
        if self.realizations < 1 {
            return bad("realizations must be >= 1".into());
        }
        if !(self.tail.exponent > 0.0) {
            return bad(format!("tail.exponent must be positive, got {}", self.tail.exponent));
        }
        self.radius.validate()?;
        self.disorder_config().validate()
    }

    pub fn disorder_config(&self) -> DisorderConfig {
        DisorderConfig {
            mu: self.disorder.mu,
            v: self.disorder.v,
            seed: self.seed,
        }
    }

    /// Swaps in the paper-scale graph and region, if the config has them.
    pub fn at_paper_scale(&self) -> Result<Self> {
        let ps = self
            .paper_scale
            .as_ref()
            .ok_or_else(|| Error::Config(format!("config '{}' has no [paper_scale] section", self.name)))?;
        let mut cfg = self.clone();
        cfg.graph = ps.graph.clone();
        cfg.region = ps.region.clone();
        if let Some(r) = ps.realizations {
            cfg.realizations = r;
        }
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn build_region(&self) -> Result<Region> {
        let g = Arc::new(self.graph.build()?);
        self.region.select(g)
    }
}
