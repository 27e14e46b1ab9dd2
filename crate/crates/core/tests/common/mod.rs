#![allow(dead_code)]

use std::sync::Arc;

use graphscape::graph::{BallSearch, Graph, Region};
use graphscape::operator::{assemble, sample_disorder, BoundaryMode, DisorderConfig, JacobiOperator, MuDist, VDist};
use graphscape::zoo::{
    build_band_graph, build_penrose, build_sierpinski, build_stacked, BandGraphSpec, Norm, PenroseSpec, SierpinskiSpec,
    StackSpec,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mu(rng: &mut ChaCha8Rng) -> MuDist {
    match rng.gen_range(0..4) {
        0 => MuDist::ConstantOne,
        1 => MuDist::Uniform01,
        2 => MuDist::Bernoulli { p: rng.gen_range(0.2..0.9) },
        _ => MuDist::UniformOn { a: 0.1, b: 0.9 },
    }
}

pub fn random_v(rng: &mut ChaCha8Rng) -> VDist {
    match rng.gen_range(0..4) {
        0 => VDist::Zero,
        1 => VDist::Uniform { c: rng.gen_range(0.5..10.0) },
        2 => VDist::BernoulliScaled { p: 0.3, c: 4.0 },
        _ => VDist::UniformOn { a: 0.5, b: 2.0 },
    }
}

/// One ambient graph from the zoo, large enough to hold a 300-vertex ball.
pub fn random_graph(rng: &mut ChaCha8Rng) -> Arc<Graph> {
    let g = match rng.gen_range(0..6) {
        0 => build_band_graph(&BandGraphSpec::new(1, rng.gen_range(1..5), 200, Norm::L1)),
        1 => {
            let norm = *[Norm::L1, Norm::L2, Norm::LInfinity].choose(rng).unwrap();
            build_band_graph(&BandGraphSpec::new(2, rng.gen_range(1..3), 14, norm))
        }
        2 => build_sierpinski(&SierpinskiSpec { level: rng.gen_range(3..6) }),
        3 => build_penrose(&PenroseSpec {
            generations: 5,
            clip_radius: 12.0,
        }),
        4 => {
            let base = Arc::new(build_band_graph(&BandGraphSpec::new(1, 1, 60, Norm::L1)).unwrap());
            build_stacked(&StackSpec {
                base,
                layers: rng.gen_range(2..4),
            })
        }
        _ => build_band_graph(&BandGraphSpec::new(2, 1, 12, Norm::L1)),
    };
    Arc::new(g.unwrap())
}

/// Random operator with at most `max_n` vertices, mixing all disorder laws
/// and both boundary modes.
pub fn random_operator(rng: &mut ChaCha8Rng, max_n: usize) -> JacobiOperator {
    loop {
        let g = random_graph(rng);
        let center = rng.gen_range(0..g.vertex_count());
        let mut search = BallSearch::new(&g);
        let mut radius = rng.gen_range(1.0..12.0f64).floor();
        let mut members = search.ball(center, radius).unwrap().members;
        while members.len() > max_n && radius > 0.0 {
            radius -= 1.0;
            members = search.ball(center, radius).unwrap().members;
        }
        if members.len() > max_n || members.len() < 2 {
            continue;
        }
        let region = Region::new(g.clone(), members).unwrap();
        let cfg = DisorderConfig {
            mu: random_mu(rng),
            v: random_v(rng),
            seed: rng.gen(),
        };
        let disorder = sample_disorder(&region, &cfg, rng.gen_range(0..4)).unwrap();
        let mode = if rng.gen_bool(0.5) {
            BoundaryMode::Dirichlet
        } else {
            BoundaryMode::Neumann
        };
        match assemble(&region, &disorder, mode) {
            Ok(op) => return op,
            Err(_) => continue,
        }
    }
}
