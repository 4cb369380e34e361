//! Distributed gradient descent with random-gossip averaging.
//!
//! On each activation of an edge `{v, w}` both endpoints take a gradient
//! step with size `gamma0 / sqrt(k)` (`k` is the global activation count,
//! starting at 1), then both adopt the average of the two results.

use crate::error::{Error, Result};
use crate::objectives::Point;
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq)]
pub struct DgdState {
    pub x: Vec<Point>,
    /// Activations performed so far; the next step uses `k + 1`.
    pub k: u64,
    pub gamma0: f64,
    pub primal_updates: u64,
}

impl DgdState {
    pub fn new(x: Vec<Point>, gamma0: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::InvalidCost(format!(
                "gamma0 must be positive and finite, got {gamma0}"
            )));
        }
        Ok(DgdState {
            x,
            k: 0,
            gamma0,
            primal_updates: 0,
        })
    }

    pub fn zeros(problem: &Problem, gamma0: f64) -> Result<Self> {
        DgdState::new(
            vec![Point::zeros(problem.dim()); problem.num_vertices()],
            gamma0,
        )
    }

    /// Step size used by the `k`-th activation (`k >= 1`).
    pub fn stepsize(&self, k: u64) -> f64 {
        self.gamma0 / (k as f64).sqrt()
    }

    pub fn step(&mut self, problem: &Problem, v: usize, w: usize) -> Result<()> {
        let graph = problem.graph();
        if v >= graph.len() || w >= graph.len() || !graph.has_edge(v, w) {
            return Err(Error::NotAnEdge {
                v: graph.labels().get(v).copied().unwrap_or(v as u32),
                w: graph.labels().get(w).copied().unwrap_or(w as u32),
            });
        }
        if self.x.len() != graph.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} iterates for {} vertices",
                self.x.len(),
                graph.len()
            )));
        }
        let k = self.k + 1;
        let gamma = self.stepsize(k);
        let descend = |u: usize| -> Result<Point> {
            let grad = problem
                .cost(u)
                .gradient(&self.x[u])?
                .ok_or(Error::NonsmoothAtPoint {
                    vertex: graph.label(u),
                })?;
            Ok(self.x[u]
                .iter()
                .zip(grad.iter())
                .map(|(x, g)| x - gamma * g)
                .collect::<Vec<_>>()
                .into())
        };
        let yv = descend(v)?;
        let yw = descend(w)?;
        let avg: Point = yv
            .iter()
            .zip(yw.iter())
            .map(|(a, b)| (a + b) / 2.0)
            .collect::<Vec<_>>()
            .into();
        self.x[v] = avg.clone();
        self.x[w] = avg;
        self.k = k;
        self.primal_updates += 2;
        Ok(())
    }
}

/// `edge` is a pair of vertex indices.
pub fn dgd_gossip_step(
    state: &DgdState,
    edge: (usize, usize),
    problem: &Problem,
) -> Result<DgdState> {
    let mut next = state.clone();
    next.step(problem, edge.0, edge.1)?;
    Ok(next)
}
