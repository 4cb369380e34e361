//! JSON experiment description. See `docs/config.md` for the schema.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{CostFunction, Point};
use crate::problem::Problem;
use crate::topology::{edge_cover, full_cover, ComponentCover, Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    SyncAdmm,
    AsyncAdmm,
    DgdGossip,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::SyncAdmm,
        Algorithm::AsyncAdmm,
        Algorithm::DgdGossip,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::SyncAdmm => "sync-admm",
            Algorithm::AsyncAdmm => "async-admm",
            Algorithm::DgdGossip => "dgd-gossip",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| {
                format!("unknown algorithm `{s}` (expected sync-admm, async-admm or dgd-gossip)")
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoverSpec {
    Full,
    #[default]
    Edges,
    Custom {
        custom_sets: Vec<Vec<VertexId>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ActivationSpec {
    Uniform,
    Explicit {
        p: Vec<f64>,
    },
    /// `q` defaults to the uniform wake law.
    NodeWakeup {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Vec<f64>>,
    },
}

impl Default for ActivationSpec {
    fn default() -> Self {
        ActivationSpec::NodeWakeup { q: None }
    }
}

/// Initial iterates. `lambda` lists one block per component in canonical
/// (sorted) component order, each block one point per member vertex in
/// ascending vertex order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zbar: Option<Vec<Point>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub cover: CoverSpec,
    /// One cost per vertex, in `graph.vertices` order.
    pub costs: Vec<CostFunction>,
    /// Inferred from the costs when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    pub algorithm: Algorithm,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_gamma0")]
    pub gamma0: f64,
    #[serde(default)]
    pub activation: ActivationSpec,
    /// Activations (async-admm, dgd-gossip) or iterations (sync-admm).
    pub budget: u64,
    #[serde(default = "default_record_every")]
    pub record_every: u64,
    #[serde(default)]
    pub seed: u64,
    /// Optional early stop once the squared error drops to this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitSpec>,
}

fn default_rho() -> f64 {
    1.0
}

fn default_gamma0() -> f64 {
    0.5
}

fn default_record_every() -> u64 {
    1
}

impl Default for ExperimentConfig {
    /// Five agents on `{1,2},{2,3},{3,4},{4,5},{5,3}`, edge cover,
    /// `f_v(x) = (x - v)^2`, asynchronous ADMM with `rho = 1`, uniform node
    /// wake-up, 5000 activations, seed 1.
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSpec {
                vertices: (1..=5).collect(),
                edges: vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 3)],
            },
            cover: CoverSpec::Edges,
            costs: (1..=5)
                .map(|v| CostFunction::Quadratic {
                    a: 1.0,
                    c: Point::from(v as f64),
                })
                .collect(),
            dimension: None,
            algorithm: Algorithm::AsyncAdmm,
            rho: default_rho(),
            gamma0: default_gamma0(),
            activation: ActivationSpec::default(),
            budget: 5000,
            record_every: 10,
            seed: 1,
            tolerance: None,
            init: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses JSON, reporting the field path of the first schema error.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::ConfigInvalid {
                path: if path == "." { "<root>".into() } else { path },
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_graph(&self) -> Result<Graph> {
        Graph::new(
            self.graph.vertices.iter().copied(),
            self.graph.edges.iter().copied(),
        )
    }

    /// Builds the cover without validating it against the graph.
    pub fn build_cover(&self, graph: &Graph) -> Result<ComponentCover> {
        match &self.cover {
            CoverSpec::Full => Ok(full_cover(graph)),
            CoverSpec::Edges => edge_cover(graph),
            CoverSpec::Custom { custom_sets } => ComponentCover::from_labels(graph, custom_sets),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
            .or_else(|| self.costs.iter().find_map(CostFunction::dim))
            .or_else(|| {
                self.init
                    .as_ref()
                    .and_then(|i| i.x.as_ref())
                    .and_then(|x| x.first())
                    .map(Point::dim)
            })
            .unwrap_or(1)
    }

    /// Graph, cover and costs as a validated problem. Errors carry the
    /// config path they stem from.
    pub fn build_problem(&self) -> Result<Problem> {
        let graph = self.build_graph().map_err(|e| e.at("graph"))?;
        let cover = self.build_cover(&graph).map_err(|e| e.at("cover"))?;
        for (i, f) in self.costs.iter().enumerate() {
            f.check().map_err(|e| e.at(format!("costs[{i}]")))?;
        }
        if self.costs.len() != graph.len() {
            return Err(Error::ConfigInvalid {
                path: "costs".into(),
                message: format!("{} costs for {} vertices", self.costs.len(), graph.len()),
            });
        }
        let dim = self.dimension();
        if dim == 0 {
            return Err(Error::ConfigInvalid {
                path: "dimension".into(),
                message: "dimension must be at least 1".into(),
            });
        }
        for (i, f) in self.costs.iter().enumerate() {
            if let Some(d) = f.dim() {
                if d != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: d,
                    }
                    .at(format!("costs[{i}]")));
                }
            }
        }
        Problem::new(graph, cover, self.costs.clone(), dim).map_err(|e| {
            let path = match e {
                Error::CoverIncomplete { .. }
                | Error::UnionDisconnected { .. }
                | Error::InvalidCover(_) => "cover",
                _ => "costs",
            };
            e.at(path)
        })
    }
}
