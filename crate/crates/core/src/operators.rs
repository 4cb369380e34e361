//! Fixed-point machinery on the block space `Z = X^{A_1} x ... x X^{A_L}`.
//!
//! The Douglas-Rachford resolvent is evaluated block by block through its
//! primal form: split `zeta` into a mean-zero dual part `lambda` and
//! per-component constants `zbar`, run one local prox per agent, and
//! rebuild `lambda_l(v) + rho * x(v)`. Conjugate functions are never formed.

use crate::error::{check_rho, Error, Result};
use crate::harness::{ActivationProcess, ActivationRng};
use crate::objectives::Point;
use crate::problem::Problem;
use crate::topology::ComponentCover;

/// Dense storage for an element of `Z`: block `l` holds `|A_l|` points of
/// dimension `dim`, ordered like the vertices of `A_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    dim: usize,
    /// `offsets[l]..offsets[l + 1]` are the entry indices of block `l`.
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(cover: &ComponentCover, dim: usize) -> Self {
        let mut offsets = Vec::with_capacity(cover.len() + 1);
        offsets.push(0);
        for set in cover.components() {
            offsets.push(offsets.last().unwrap() + set.len());
        }
        let entries = *offsets.last().unwrap();
        BlockVector {
            dim,
            offsets,
            data: vec![0.0; entries * dim],
        }
    }

    /// Builds from per-block flat data (`|A_l| * dim` values each).
    pub fn from_blocks(cover: &ComponentCover, dim: usize, blocks: &[Vec<f64>]) -> Result<Self> {
        let mut out = BlockVector::zeros(cover, dim);
        if blocks.len() != out.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks given, cover has {} components",
                blocks.len(),
                out.num_blocks()
            )));
        }
        for (l, block) in blocks.iter().enumerate() {
            let target = out.block_mut(l);
            if block.len() != target.len() {
                return Err(Error::ShapeMismatch(format!(
                    "block {l} has {} values, expected {}",
                    block.len(),
                    target.len()
                )));
            }
            target.copy_from_slice(block);
        }
        Ok(out)
    }

    /// Builds with every scalar drawn from `fill`, in storage order.
    pub fn from_fn(cover: &ComponentCover, dim: usize, mut fill: impl FnMut() -> f64) -> Self {
        let mut out = BlockVector::zeros(cover, dim);
        out.data.iter_mut().for_each(|x| *x = fill());
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of points in block `l`.
    pub fn block_len(&self, l: usize) -> usize {
        self.offsets[l + 1] - self.offsets[l]
    }

    pub fn block(&self, l: usize) -> &[f64] {
        &self.data[self.offsets[l] * self.dim..self.offsets[l + 1] * self.dim]
    }

    pub fn block_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.data[self.offsets[l] * self.dim..self.offsets[l + 1] * self.dim]
    }

    /// The point stored for the `pos`-th vertex of component `l`.
    pub fn entry(&self, l: usize, pos: usize) -> &[f64] {
        let start = (self.offsets[l] + pos) * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn entry_mut(&mut self, l: usize, pos: usize) -> &mut [f64] {
        let start = (self.offsets[l] + pos) * self.dim;
        &mut self.data[start..start + self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn same_shape(&self, other: &BlockVector) -> bool {
        self.dim == other.dim && self.offsets == other.offsets
    }

    pub fn check_shape(&self, cover: &ComponentCover, dim: usize) -> Result<()> {
        let matches = self.dim == dim
            && self.num_blocks() == cover.len()
            && cover
                .components()
                .iter()
                .enumerate()
                .all(|(l, set)| self.block_len(l) == set.len());
        if matches {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                "block vector does not match the cover and dimension".into(),
            ))
        }
    }

    fn check_same_shape(&self, other: &BlockVector) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                "block vectors have different shapes".into(),
            ))
        }
    }

    pub fn sub(&self, other: &BlockVector) -> Result<BlockVector> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// `<zeta, eta> = sum_l <zeta_l, eta_l>`.
    pub fn dot(&self, other: &BlockVector) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum()
    }

    /// `zeta . eta = sum_l p_l^{-1} <zeta_l, eta_l>`, the norm under which
    /// randomized Gauss-Seidel iterates form a supermartingale.
    pub fn weighted_dot(&self, other: &BlockVector, law: &[f64]) -> Result<f64> {
        self.check_same_shape(other)?;
        if law.len() != self.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} blocks",
                law.len(),
                self.num_blocks()
            )));
        }
        Ok((0..self.num_blocks())
            .map(|l| {
                let dot: f64 = self
                    .block(l)
                    .iter()
                    .zip(other.block(l))
                    .map(|(a, b)| a * b)
                    .sum();
                dot / law[l]
            })
            .sum())
    }

    pub fn weighted_norm_sq(&self, law: &[f64]) -> Result<f64> {
        self.weighted_dot(self, law)
    }

    pub fn max_abs_diff(&self, other: &BlockVector) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Sums `n = entries.len() / dim` points of dimension `dim` into `out`
/// using pairwise (cascade) summation.
fn pairwise_sum_into(entries: &[f64], dim: usize, out: &mut [f64]) {
    let n = entries.len() / dim;
    if n <= 8 {
        out.iter_mut().for_each(|o| *o = 0.0);
        for chunk in entries.chunks_exact(dim) {
            out.iter_mut().zip(chunk).for_each(|(o, x)| *o += x);
        }
        return;
    }
    let half = n / 2;
    let mut right = vec![0.0; dim];
    pairwise_sum_into(&entries[..half * dim], dim, out);
    pairwise_sum_into(&entries[half * dim..], dim, &mut right);
    out.iter_mut().zip(&right).for_each(|(o, r)| *o += r);
}

fn block_mean(block: &[f64], dim: usize) -> Point {
    let mut mean = Point::zeros(dim);
    pairwise_sum_into(block, dim, &mut mean);
    let n = (block.len() / dim) as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// `zeta = lambda + rho * z` with `lambda` mean-zero on every block and
/// `z_l = zbar_l * 1_{A_l}` constant.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub lambda: BlockVector,
    pub zbar: Vec<Point>,
}

impl DualPair {
    /// Rebuilds `zeta = lambda + rho * z`.
    pub fn compose(&self, rho: f64) -> Result<BlockVector> {
        check_rho(rho)?;
        lift(&self.lambda, &self.zbar, rho)
    }
}

/// `zeta_l(v) = lambda_l(v) + rho * zbar_l`.
pub fn lift(lambda: &BlockVector, zbar: &[Point], rho: f64) -> Result<BlockVector> {
    if zbar.len() != lambda.num_blocks() {
        return Err(Error::ShapeMismatch(format!(
            "{} component constants for {} blocks",
            zbar.len(),
            lambda.num_blocks()
        )));
    }
    let dim = lambda.dim();
    let mut zeta = lambda.clone();
    for (l, z) in zbar.iter().enumerate() {
        if z.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: z.dim(),
            });
        }
        for entry in zeta.block_mut(l).chunks_exact_mut(dim) {
            entry
                .iter_mut()
                .zip(z.iter())
                .for_each(|(e, zi)| *e += rho * zi);
        }
    }
    Ok(zeta)
}

/// Splits `zeta` into `(lambda, z)`: `lambda_l = zeta_l - mean(zeta_l)` and
/// `zbar_l = mean(zeta_l) / rho`. `lambda` is also the resolvent of the
/// dual indicator operator at `zeta`.
pub fn decompose(zeta: &BlockVector, rho: f64, cover: &ComponentCover) -> Result<DualPair> {
    check_rho(rho)?;
    zeta.check_shape(cover, zeta.dim())?;
    let dim = zeta.dim();
    let mut lambda = zeta.clone();
    let mut zbar = Vec::with_capacity(zeta.num_blocks());
    for l in 0..zeta.num_blocks() {
        let mean = block_mean(zeta.block(l), dim);
        for entry in lambda.block_mut(l).chunks_exact_mut(dim) {
            entry.iter_mut().zip(mean.iter()).for_each(|(e, m)| *e -= m);
        }
        zbar.push(mean.iter().map(|m| m / rho).collect::<Vec<_>>().into());
    }
    Ok(DualPair { lambda, zbar })
}

/// Local primal update of agent `v`:
/// `prox_{f_v, rho |sigma(v)|}( (1/|sigma(v)|) sum_{m in sigma(v)} (zbar_m - lambda_m(v) / rho) )`.
pub(crate) fn local_primal(
    problem: &Problem,
    rho: f64,
    v: usize,
    lambda: &BlockVector,
    zbar: &[Point],
) -> Result<Point> {
    let members = problem.cover().memberships(v);
    let count = members.len() as f64;
    let mut u = Point::zeros(problem.dim());
    for &(m, pos) in members {
        let lam = lambda.entry(m, pos);
        for ((ui, zi), li) in u.iter_mut().zip(zbar[m].iter()).zip(lam) {
            *ui += zi - li / rho;
        }
    }
    u.iter_mut().for_each(|ui| *ui /= count);
    problem.cost(v).prox(rho * count, &u)
}

/// An operator `S` on `Z` that can be evaluated one block at a time.
pub trait FixedPointOperator {
    fn num_blocks(&self) -> usize;

    /// Block `l` of `S(zeta)`, as flat data.
    fn apply_block(&self, l: usize, zeta: &BlockVector) -> Result<Vec<f64>>;

    fn apply(&self, zeta: &BlockVector) -> Result<BlockVector> {
        let mut out = zeta.clone();
        for l in 0..self.num_blocks() {
            let block = self.apply_block(l, zeta)?;
            out.block_mut(l).copy_from_slice(&block);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityOperator {
    pub blocks: usize,
}

impl FixedPointOperator for IdentityOperator {
    fn num_blocks(&self) -> usize {
        self.blocks
    }

    fn apply_block(&self, l: usize, zeta: &BlockVector) -> Result<Vec<f64>> {
        Ok(zeta.block(l).to_vec())
    }
}

/// The resolvent `S = J_R` of the Douglas-Rachford operator for a
/// consensus problem. Its fixed points map to dual solutions via
/// [`decompose`], and the primal iterate they induce is the consensus
/// minimizer.
#[derive(Debug, Clone, Copy)]
pub struct DouglasRachford<'a> {
    problem: &'a Problem,
    rho: f64,
}

impl<'a> DouglasRachford<'a> {
    pub fn new(problem: &'a Problem, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(DouglasRachford { problem, rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    fn split(&self, zeta: &BlockVector) -> Result<DualPair> {
        zeta.check_shape(self.problem.cover(), self.problem.dim())?;
        decompose(zeta, self.rho, self.problem.cover())
    }

    /// Primal points `x(v)` induced by `zeta`, for every vertex.
    pub fn primal(&self, zeta: &BlockVector) -> Result<Vec<Point>> {
        let dual = self.split(zeta)?;
        (0..self.problem.num_vertices())
            .map(|v| local_primal(self.problem, self.rho, v, &dual.lambda, &dual.zbar))
            .collect()
    }

    fn assemble_block(
        &self,
        l: usize,
        lambda: &BlockVector,
        x: impl Fn(usize) -> Result<Point>,
    ) -> Result<Vec<f64>> {
        let mut out = lambda.block(l).to_vec();
        let dim = self.problem.dim();
        for (entry, &v) in out
            .chunks_exact_mut(dim)
            .zip(self.problem.cover().component(l))
        {
            let xv = x(v)?;
            entry
                .iter_mut()
                .zip(xv.iter())
                .for_each(|(e, xi)| *e += self.rho * xi);
        }
        Ok(out)
    }
}

impl FixedPointOperator for DouglasRachford<'_> {
    fn num_blocks(&self) -> usize {
        self.problem.num_components()
    }

    fn apply_block(&self, l: usize, zeta: &BlockVector) -> Result<Vec<f64>> {
        if l >= self.num_blocks() {
            return Err(Error::IndexOutOfRange {
                index: l,
                len: self.num_blocks(),
            });
        }
        let dual = self.split(zeta)?;
        self.assemble_block(l, &dual.lambda, |v| {
            local_primal(self.problem, self.rho, v, &dual.lambda, &dual.zbar)
        })
    }

    fn apply(&self, zeta: &BlockVector) -> Result<BlockVector> {
        let dual = self.split(zeta)?;
        let x = (0..self.problem.num_vertices())
            .map(|v| local_primal(self.problem, self.rho, v, &dual.lambda, &dual.zbar))
            .collect::<Result<Vec<_>>>()?;
        let mut out = zeta.clone();
        for l in 0..self.num_blocks() {
            let block = self.assemble_block(l, &dual.lambda, |v| Ok(x[v].clone()))?;
            out.block_mut(l).copy_from_slice(&block);
        }
        Ok(out)
    }
}

/// `S_hat_l(zeta)`: `zeta` with block `l` replaced by `S_l(zeta)`.
pub fn gs_hat_apply<S: FixedPointOperator + ?Sized>(
    op: &S,
    l: usize,
    zeta: &BlockVector,
) -> Result<BlockVector> {
    if l >= op.num_blocks() {
        return Err(Error::IndexOutOfRange {
            index: l,
            len: op.num_blocks(),
        });
    }
    let block = op.apply_block(l, zeta)?;
    let mut out = zeta.clone();
    out.block_mut(l).copy_from_slice(&block);
    Ok(out)
}

/// `k` iterations of `zeta <- S(zeta)`.
pub fn proximal_point_iterate<S: FixedPointOperator + ?Sized>(
    op: &S,
    zeta0: &BlockVector,
    iterations: usize,
) -> Result<BlockVector> {
    let mut zeta = zeta0.clone();
    for _ in 0..iterations {
        zeta = op.apply(&zeta)?;
    }
    Ok(zeta)
}

/// Randomized Gauss-Seidel: `zeta^{j+1} = S_hat_{xi^{j+1}}(zeta^j)` with
/// `xi` drawn i.i.d. from `activation`. Returns `zeta^0..=zeta^k`.
pub fn random_gs_iterate<S: FixedPointOperator + ?Sized>(
    op: &S,
    zeta0: &BlockVector,
    activation: &ActivationProcess,
    iterations: usize,
    seed: u64,
) -> Result<Vec<BlockVector>> {
    if activation.len() != op.num_blocks() {
        return Err(Error::InvalidDistribution(format!(
            "law over {} components, operator has {} blocks",
            activation.len(),
            op.num_blocks()
        )));
    }
    let mut rng = ActivationRng::new(seed);
    let mut trajectory = Vec::with_capacity(iterations + 1);
    trajectory.push(zeta0.clone());
    for _ in 0..iterations {
        let l = activation.draw(&mut rng);
        let next = gs_hat_apply(op, l, trajectory.last().unwrap())?;
        trajectory.push(next);
    }
    Ok(trajectory)
}
