//! Synchronous and randomized asynchronous ADMM on a component cover.
//!
//! Every agent `v` holds `x(v)` and, for each component `l` containing it,
//! the dual `lambda_l(v)`. Each component holds the constant `zbar_l`.
//! Components average through whatever leader or pairwise exchange the
//! deployment provides; here averages are computed directly.

use crate::error::{check_rho, Error, Result};
use crate::objectives::Point;
use crate::operators::{lift, local_primal, BlockVector, DualPair};
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub x: Vec<Point>,
    pub lambda: BlockVector,
    pub zbar: Vec<Point>,
    pub k: u64,
    /// Cumulative number of prox evaluations.
    pub primal_updates: u64,
}

impl AdmmState {
    pub fn zeros(problem: &Problem) -> Self {
        let dim = problem.dim();
        AdmmState {
            x: vec![Point::zeros(dim); problem.num_vertices()],
            lambda: BlockVector::zeros(problem.cover(), dim),
            zbar: vec![Point::zeros(dim); problem.num_components()],
            k: 0,
            primal_updates: 0,
        }
    }

    /// State with the given dual pair and primal estimates, counters at zero.
    pub fn from_dual(dual: DualPair, x: Vec<Point>) -> Self {
        AdmmState {
            x,
            lambda: dual.lambda,
            zbar: dual.zbar,
            k: 0,
            primal_updates: 0,
        }
    }

    pub fn check_shape(&self, problem: &Problem) -> Result<()> {
        let dim = problem.dim();
        self.lambda.check_shape(problem.cover(), dim)?;
        if self.x.len() != problem.num_vertices() || self.zbar.len() != problem.num_components() {
            return Err(Error::ShapeMismatch(format!(
                "state has {} primal and {} component entries, problem has {} vertices and {} components",
                self.x.len(),
                self.zbar.len(),
                problem.num_vertices(),
                problem.num_components()
            )));
        }
        if let Some(p) = self.x.iter().chain(&self.zbar).find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(())
    }

    /// `zeta = lambda + rho * z`, the Douglas-Rachford iterate this state encodes.
    pub fn lift(&self, rho: f64) -> Result<BlockVector> {
        check_rho(rho)?;
        lift(&self.lambda, &self.zbar, rho)
    }

    pub fn is_finite(&self) -> bool {
        self.lambda.is_finite() && self.x.iter().chain(&self.zbar).all(Point::is_finite)
    }

    /// Largest `|sum_{v in A_l} lambda_l(v)|` over components and coordinates.
    pub fn max_dual_block_sum(&self) -> f64 {
        let dim = self.lambda.dim();
        (0..self.lambda.num_blocks())
            .flat_map(|l| {
                let block = self.lambda.block(l);
                (0..dim).map(move |i| block.iter().skip(i).step_by(dim).sum::<f64>().abs())
            })
            .fold(0.0, f64::max)
    }

    /// One synchronous iteration, in place.
    pub fn sync_step(&mut self, problem: &Problem, rho: f64) -> Result<()> {
        check_rho(rho)?;
        self.check_shape(problem)?;
        let dim = problem.dim();
        let cover = problem.cover();

        for v in 0..problem.num_vertices() {
            let members = cover.memberships(v);
            let count = members.len() as f64;
            let mut consensus = Point::zeros(dim);
            let mut drift = Point::zeros(dim);
            for &(l, pos) in members {
                for i in 0..dim {
                    consensus[i] += self.zbar[l][i];
                    drift[i] += self.lambda.entry(l, pos)[i];
                }
            }
            // Z(v) - B(v)
            let target: Vec<f64> = consensus
                .iter()
                .zip(drift.iter())
                .map(|(z, b)| z / count - b / (rho * count))
                .collect();
            self.x[v] = problem.cost(v).prox(rho * count, &target)?;
        }

        for l in 0..problem.num_components() {
            self.refresh_component(problem, l, rho);
        }
        self.k += 1;
        self.primal_updates += problem.num_vertices() as u64;
        Ok(())
    }

    /// One asynchronous iteration activating component `l`, in place.
    /// Only `x(v)` for `v in A_l`, `zbar_l` and `lambda_l` change.
    pub fn async_step(&mut self, problem: &Problem, l: usize, rho: f64) -> Result<()> {
        check_rho(rho)?;
        if l >= problem.num_components() {
            return Err(Error::IndexOutOfRange {
                index: l,
                len: problem.num_components(),
            });
        }
        self.check_shape(problem)?;
        let members = problem.cover().component(l);
        let fresh = members
            .iter()
            .map(|&v| local_primal(problem, rho, v, &self.lambda, &self.zbar))
            .collect::<Result<Vec<_>>>()?;
        for (&v, xv) in members.iter().zip(fresh) {
            self.x[v] = xv;
        }
        self.refresh_component(problem, l, rho);
        self.k += 1;
        self.primal_updates += members.len() as u64;
        Ok(())
    }

    /// Pairwise exchange on edge `{v, w}` (vertex indices) when the cover
    /// is the edge cover. Same update as [`AdmmState::async_step`] on that
    /// edge's component, written as the two agents perform it.
    pub fn gossip_step(&mut self, problem: &Problem, v: usize, w: usize, rho: f64) -> Result<()> {
        check_rho(rho)?;
        let graph = problem.graph();
        let not_an_edge = || Error::NotAnEdge {
            v: graph.labels().get(v).copied().unwrap_or(v as u32),
            w: graph.labels().get(w).copied().unwrap_or(w as u32),
        };
        if v >= graph.len() || w >= graph.len() {
            return Err(not_an_edge());
        }
        let l = graph.edge_index(v, w).ok_or_else(not_an_edge)?;
        if !problem.cover().is_edge_cover(graph) {
            return Err(Error::InvalidCover(
                "pairwise gossip steps need the edge cover".into(),
            ));
        }
        self.check_shape(problem)?;

        let xv = local_primal(problem, rho, v, &self.lambda, &self.zbar)?;
        let xw = local_primal(problem, rho, w, &self.lambda, &self.zbar)?;
        // Component l is {min(v, w), max(v, w)}; positions follow that order.
        let (pos_v, pos_w) = if v < w { (0, 1) } else { (1, 0) };
        for i in 0..problem.dim() {
            self.zbar[l][i] = (xv[i] + xw[i]) / 2.0;
            self.lambda.entry_mut(l, pos_v)[i] += rho * (xv[i] - xw[i]) / 2.0;
            self.lambda.entry_mut(l, pos_w)[i] += rho * (xw[i] - xv[i]) / 2.0;
        }
        self.x[v] = xv;
        self.x[w] = xw;
        self.k += 1;
        self.primal_updates += 2;
        Ok(())
    }

    /// `zbar_l = mean_{w in A_l} x(w)`, then `lambda_l(v) += rho (x(v) - zbar_l)`.
    fn refresh_component(&mut self, problem: &Problem, l: usize, rho: f64) {
        let members = problem.cover().component(l);
        let dim = problem.dim();
        let n = members.len() as f64;
        let mut mean = Point::zeros(dim);
        for &v in members {
            mean.iter_mut()
                .zip(self.x[v].iter())
                .for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        for (pos, &v) in members.iter().enumerate() {
            let entry = self.lambda.entry_mut(l, pos);
            for i in 0..dim {
                entry[i] += rho * (self.x[v][i] - mean[i]);
            }
        }
        self.zbar[l] = mean;
    }
}

pub fn sync_admm_step(state: &AdmmState, problem: &Problem, rho: f64) -> Result<AdmmState> {
    let mut next = state.clone();
    next.sync_step(problem, rho)?;
    Ok(next)
}

pub fn async_admm_step(
    state: &AdmmState,
    l: usize,
    problem: &Problem,
    rho: f64,
) -> Result<AdmmState> {
    let mut next = state.clone();
    next.async_step(problem, l, rho)?;
    Ok(next)
}

/// `edge` is a pair of vertex indices.
pub fn gossip_edge_step(
    state: &AdmmState,
    edge: (usize, usize),
    problem: &Problem,
    rho: f64,
) -> Result<AdmmState> {
    let mut next = state.clone();
    next.gossip_step(problem, edge.0, edge.1, rho)?;
    Ok(next)
}

/// `max_{v, w} ||x(v) - x(w)||`.
pub fn consensus_disagreement(x: &[Point]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in x.iter().enumerate() {
        for b in &x[i + 1..] {
            worst = worst.max(a.distance_sq(b).sqrt());
        }
    }
    worst
}
