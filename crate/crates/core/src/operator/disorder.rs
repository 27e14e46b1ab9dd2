use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Region;

/// Law of the bond strengths `μ_xy ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MuDist {
    ConstantOne,
    Uniform01,
    /// `μ = 1` with probability `p`, else `0`.
    Bernoulli { p: f64 },
    UniformOn { a: f64, b: f64 },
}

/// Law of the on-site potential `V_x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum VDist {
    Zero,
    /// Uniform on `[0, c]`.
    Uniform { c: f64 },
    /// `c` with probability `p`, else `0`.
    BernoulliScaled { p: f64, c: f64 },
    UniformOn { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderConfig {
    pub mu: MuDist,
    pub v: VDist,
    pub seed: u64,
}

impl DisorderConfig {
    /// `μ ≡ 1`, `V ≡ 0`: the free Laplacian.
    pub fn free() -> Self {
        DisorderConfig {
            mu: MuDist::ConstantOne,
            v: VDist::Zero,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self.mu {
            MuDist::Bernoulli { p } if !(0.0..=1.0).contains(&p) => return bad(format!("Bernoulli p = {p} outside [0, 1]")),
            MuDist::UniformOn { a, b } if !(0.0 <= a && a <= b && b <= 1.0) => {
                return bad(format!("bond law support [{a}, {b}] not inside [0, 1]"))
            }
            _ => {}
        }
        match self.v {
            VDist::Uniform { c } if !(c >= 0.0) => return bad(format!("potential scale {c} must be >= 0")),
            VDist::BernoulliScaled { p, c } if !((0.0..=1.0).contains(&p) && c >= 0.0) => {
                return bad(format!("invalid scaled Bernoulli potential (p = {p}, c = {c})"))
            }
            VDist::UniformOn { a, b } if !(0.0 <= a && a <= b) => return bad(format!("potential support [{a}, {b}] must be nonnegative")),
            _ => {}
        }
        Ok(())
    }
}

/// Sampled disorder on a region: one bond strength per induced edge (in
/// [`Region::edges`] order) and one potential value per region vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Disorder {
    pub mu: Vec<f64>,
    pub v: Vec<f64>,
}

impl Disorder {
    pub fn free(region: &Region) -> Disorder {
        Disorder {
            mu: vec![1.0; region.edges().len()],
            v: vec![0.0; region.len()],
        }
    }
}

/// Counter-based uniform stream: the draw for `key` depends only on
/// `(seed, stream, key)`, never on how many draws came before it.
struct KeyedUniform {
    rng: ChaCha8Rng,
}

impl KeyedUniform {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        KeyedUniform { rng }
    }

    fn draw(&mut self, key: usize) -> f64 {
        self.rng.set_word_pos(2 * key as u128);
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn draw_mu(dist: MuDist, u: f64) -> f64 {
    match dist {
        MuDist::ConstantOne => 1.0,
        MuDist::Uniform01 => u,
        MuDist::Bernoulli { p } => {
            if u < p {
                1.0
            } else {
                0.0
            }
        }
        MuDist::UniformOn { a, b } => a + (b - a) * u,
    }
}

fn draw_v(dist: VDist, u: f64) -> f64 {
    match dist {
        VDist::Zero => 0.0,
        VDist::Uniform { c } => c * u,
        VDist::BernoulliScaled { p, c } => {
            if u < p {
                c
            } else {
                0.0
            }
        }
        VDist::UniformOn { a, b } => a + (b - a) * u,
    }
}

/// Draws realization `realization` of the disorder. Bond draws are keyed by
/// the ambient edge key and potential draws by the ambient vertex id, so the
/// value at a site does not depend on the region or on evaluation order.
pub fn sample_disorder(region: &Region, cfg: &DisorderConfig, realization: u64) -> Result<Disorder> {
    cfg.validate()?;
    let g = region.graph();
    let mut bonds = KeyedUniform::new(cfg.seed, 2 * realization);
    let mut sites = KeyedUniform::new(cfg.seed, 2 * realization + 1);
    let mu = region
        .edges()
        .iter()
        .map(|&(i, j)| {
            let key = g
                .edge_key(region.vertex(i as usize), region.vertex(j as usize))
                .expect("region edges are graph edges");
            draw_mu(cfg.mu, bonds.draw(key))
        })
        .collect();
    let v = region.vertices().iter().map(|&x| draw_v(cfg.v, sites.draw(x))).collect();
    Ok(Disorder { mu, v })
}
