use crate::error::{Error, Result};
use crate::objectives::{centralized_minimizer, CostFunction, Point};
use crate::topology::{validate_cover, ComponentCover, CoverReport, Graph};

/// A consensus problem `min_x sum_v f_v(x)` posed on a graph with a
/// validated component cover.
#[derive(Debug, Clone)]
pub struct Problem {
    graph: Graph,
    cover: ComponentCover,
    costs: Vec<CostFunction>,
    dim: usize,
    report: CoverReport,
}

impl Problem {
    /// `costs[v]` belongs to the vertex at index `v` of `graph`.
    pub fn new(
        graph: Graph,
        cover: ComponentCover,
        costs: Vec<CostFunction>,
        dim: usize,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCost("dimension must be at least 1".into()));
        }
        if costs.len() != graph.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} cost functions for {} vertices",
                costs.len(),
                graph.len()
            )));
        }
        for f in &costs {
            f.check()?;
            if let Some(d) = f.dim() {
                if d != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: d,
                    });
                }
            }
        }
        let report = validate_cover(&graph, &cover)?;
        Ok(Problem {
            graph,
            cover,
            costs,
            dim,
            report,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cover(&self) -> &ComponentCover {
        &self.cover
    }

    pub fn costs(&self) -> &[CostFunction] {
        &self.costs
    }

    pub fn cost(&self, v: usize) -> &CostFunction {
        &self.costs[v]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.len()
    }

    pub fn num_components(&self) -> usize {
        self.cover.len()
    }

    pub fn cover_report(&self) -> &CoverReport {
        &self.report
    }

    pub fn minimizer(&self) -> Result<Point> {
        centralized_minimizer(&self.costs, self.dim)
    }

    /// Same graph and costs with another cover.
    pub fn with_cover(&self, cover: ComponentCover) -> Result<Self> {
        Problem::new(self.graph.clone(), cover, self.costs.clone(), self.dim)
    }
}
