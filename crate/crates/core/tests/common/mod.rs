#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randprox::admm::AdmmState;
use randprox::operators::{decompose, BlockVector};
use randprox::topology::{edge_cover, full_cover, ComponentCover, Graph};
use randprox::{CostFunction, Point, Problem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn g5() -> Graph {
    Graph::new(1..=5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap()
}

pub fn g5_defaults() -> Problem {
    let g = g5();
    let cover = edge_cover(&g).unwrap();
    let costs = (1..=5)
        .map(|v| CostFunction::quadratic(1.0, v as f64).unwrap())
        .collect();
    Problem::new(g, cover, costs, 1).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Point {
    (0..dim)
        .map(|_| rng.random_range(-scale..scale))
        .collect::<Vec<_>>()
        .into()
}

pub fn random_quadratics(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<CostFunction> {
    (0..n)
        .map(|_| {
            let a = rng.random_range(0.5..3.0);
            CostFunction::quadratic(a, random_point(rng, dim, 5.0)).unwrap()
        })
        .collect()
}

/// Mix of quadratic, zero and absolute-value costs (at least one quadratic).
pub fn random_mixed(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<CostFunction> {
    (0..n)
        .map(|v| match (v, rng.random_range(0..3)) {
            (0, _) | (_, 0) => {
                let a = rng.random_range(0.5..3.0);
                CostFunction::quadratic(a, random_point(rng, dim, 5.0)).unwrap()
            }
            (_, 1) => CostFunction::absolute_value(random_point(rng, dim, 5.0)).unwrap(),
            _ => CostFunction::Zero,
        })
        .collect()
}

pub fn g5_problem(costs: Vec<CostFunction>, dim: usize, full: bool) -> Problem {
    let g = g5();
    let cover = if full {
        full_cover(&g)
    } else {
        edge_cover(&g).unwrap()
    };
    Problem::new(g, cover, costs, dim).unwrap()
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph {
    let mut edges = Vec::new();
    for v in 2..=n as u32 {
        let parent = rng.random_range(1..v);
        edges.push((parent, v));
    }
    for _ in 0..extra {
        let a = rng.random_range(1..=n as u32);
        let b = rng.random_range(1..=n as u32);
        if a != b {
            edges.push((a, b));
        }
    }
    Graph::new(1..=n as u32, edges).unwrap()
}

pub fn random_zeta(
    rng: &mut ChaCha8Rng,
    cover: &ComponentCover,
    dim: usize,
    scale: f64,
) -> BlockVector {
    BlockVector::from_fn(cover, dim, || rng.random_range(-scale..scale))
}

/// A random ADMM state whose duals are mean-zero on every block.
pub fn random_state(rng: &mut ChaCha8Rng, problem: &Problem, rho: f64) -> AdmmState {
    let zeta = random_zeta(rng, problem.cover(), problem.dim(), 4.0);
    let dual = decompose(&zeta, rho, problem.cover()).unwrap();
    let x = (0..problem.num_vertices())
        .map(|_| random_point(rng, problem.dim(), 4.0))
        .collect();
    AdmmState::from_dual(dual, x)
}

pub fn max_abs_diff(a: &[Point], b: &[Point]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(p, q)| p.iter().zip(q.iter()).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}
