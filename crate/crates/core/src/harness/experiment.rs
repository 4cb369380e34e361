//! Seeded execution of one configured run.

use crate::admm::{consensus_disagreement, AdmmState};
use crate::baselines::DgdState;
use crate::config::{ActivationSpec, Algorithm, ExperimentConfig};
use crate::error::{Error, Result};
use crate::harness::activation::{node_wakeup_law, ActivationProcess, ActivationRng};
use crate::harness::metrics::{squared_error, MetricsRecord};
use crate::objectives::Point;
use crate::operators::BlockVector;
use crate::problem::Problem;

/// A validated configuration, ready to run any number of times.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    problem: Problem,
    /// Law over cover components (async-admm) or graph edges (dgd-gossip).
    activation: Option<ActivationProcess>,
    minimizer: Point,
}

impl Experiment {
    /// Validates `config`. Every error is a `CONFIG_INVALID` with the path
    /// of the offending field.
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let problem = config.build_problem()?;
        if !(config.rho.is_finite() && config.rho > 0.0) {
            return Err(Error::NonpositiveRho(config.rho).at("rho"));
        }
        if !(config.gamma0.is_finite() && config.gamma0 > 0.0) {
            return Err(Error::ConfigInvalid {
                path: "gamma0".into(),
                message: format!("must be positive and finite, got {}", config.gamma0),
            });
        }
        if config.record_every == 0 {
            return Err(Error::ConfigInvalid {
                path: "record_every".into(),
                message: "must be at least 1".into(),
            });
        }
        if let Some(tol) = config.tolerance {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::ConfigInvalid {
                    path: "tolerance".into(),
                    message: format!("must be finite and nonnegative, got {tol}"),
                });
            }
        }
        let activation = match config.algorithm {
            Algorithm::SyncAdmm => None,
            Algorithm::AsyncAdmm => Some(component_law(config, &problem)?),
            Algorithm::DgdGossip => Some(edge_law(config, &problem)?),
        };
        let minimizer = problem.minimizer().map_err(|e| e.at("costs"))?;
        let experiment = Experiment {
            config: config.clone(),
            problem,
            activation,
            minimizer,
        };
        experiment.initial_admm_state()?;
        Ok(experiment)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn activation(&self) -> Option<&ActivationProcess> {
        self.activation.as_ref()
    }

    pub fn minimizer(&self) -> &Point {
        &self.minimizer
    }

    fn initial_x(&self) -> Result<Vec<Point>> {
        let dim = self.problem.dim();
        let n = self.problem.num_vertices();
        match self.config.init.as_ref().and_then(|i| i.x.as_ref()) {
            None => Ok(vec![Point::zeros(dim); n]),
            Some(x) => {
                if x.len() != n {
                    return Err(Error::ConfigInvalid {
                        path: "init.x".into(),
                        message: format!("{} points for {n} vertices", x.len()),
                    });
                }
                check_points(x, dim, "init.x")?;
                Ok(x.clone())
            }
        }
    }

    fn initial_admm_state(&self) -> Result<AdmmState> {
        let mut state = AdmmState::zeros(&self.problem);
        state.x = self.initial_x()?;
        let Some(init) = &self.config.init else {
            return Ok(state);
        };
        let dim = self.problem.dim();
        let cover = self.problem.cover();
        if let Some(zbar) = &init.zbar {
            if zbar.len() != cover.len() {
                return Err(Error::ConfigInvalid {
                    path: "init.zbar".into(),
                    message: format!("{} points for {} components", zbar.len(), cover.len()),
                });
            }
            check_points(zbar, dim, "init.zbar")?;
            state.zbar = zbar.clone();
        }
        if let Some(lambda) = &init.lambda {
            let blocks: Vec<Vec<f64>> = lambda
                .iter()
                .enumerate()
                .map(|(l, block)| {
                    check_points(block, dim, &format!("init.lambda[{l}]"))?;
                    Ok(block.iter().flat_map(|p| p.iter().copied()).collect())
                })
                .collect::<Result<_>>()?;
            state.lambda =
                BlockVector::from_blocks(cover, dim, &blocks).map_err(|e| e.at("init.lambda"))?;
            for (l, block) in blocks.iter().enumerate() {
                let scale = block.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                for i in 0..dim {
                    let sum: f64 = block.iter().skip(i).step_by(dim).sum();
                    if sum.abs() > 1e-9 * scale + 1e-12 {
                        return Err(Error::ConfigInvalid {
                            path: format!("init.lambda[{l}]"),
                            message: format!(
                                "block must sum to zero, coordinate {i} sums to {sum}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(state)
    }

    fn record(&self, k: u64, primal_updates: u64, x: &[Point]) -> Result<MetricsRecord> {
        if x.iter().any(|p| !p.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "non-finite iterate after {k} steps of {}",
                self.config.algorithm
            )));
        }
        Ok(MetricsRecord {
            k,
            primal_updates,
            squared_error: squared_error(x, &self.minimizer),
            disagreement: consensus_disagreement(x),
            algorithm: self.config.algorithm.label().to_owned(),
            seed: self.config.seed,
        })
    }

    /// Runs the configured algorithm. Rows are recorded at `k = 0`, every
    /// `record_every` steps, and at the last step.
    pub fn run(&self) -> Result<Vec<MetricsRecord>> {
        match self.config.algorithm {
            Algorithm::SyncAdmm | Algorithm::AsyncAdmm => self.run_admm(),
            Algorithm::DgdGossip => self.run_dgd(),
        }
    }

    fn run_admm(&self) -> Result<Vec<MetricsRecord>> {
        let rho = self.config.rho;
        let mut state = self.initial_admm_state()?;
        let mut rng = ActivationRng::new(self.config.seed);
        self.drive(
            &mut || {
                match &self.activation {
                    Some(law) => state.async_step(&self.problem, law.draw(&mut rng), rho)?,
                    None => state.sync_step(&self.problem, rho)?,
                }
                if !state.is_finite() {
                    return Err(Error::NumericalFailure(format!(
                        "non-finite state at k = {}",
                        state.k
                    )));
                }
                Ok((state.primal_updates, state.x.clone()))
            },
            self.initial_x()?,
        )
    }

    fn run_dgd(&self) -> Result<Vec<MetricsRecord>> {
        let law = self.activation.as_ref().expect("dgd runs with an edge law");
        let mut state = DgdState::new(self.initial_x()?, self.config.gamma0)?;
        let mut rng = ActivationRng::new(self.config.seed);
        let edges = self.problem.graph().edges();
        self.drive(
            &mut || {
                let (v, w) = edges[law.draw(&mut rng)];
                state.step(&self.problem, v, w)?;
                Ok((state.primal_updates, state.x.clone()))
            },
            self.initial_x()?,
        )
    }

    fn drive(
        &self,
        step: &mut dyn FnMut() -> Result<(u64, Vec<Point>)>,
        x0: Vec<Point>,
    ) -> Result<Vec<MetricsRecord>> {
        let budget = self.config.budget;
        let every = self.config.record_every;
        let mut records = vec![self.record(0, 0, &x0)?];
        let mut done = self.reached_tolerance(&records[0]);
        let mut k = 0;
        while !done && k < budget {
            k += 1;
            let (updates, x) = step()?;
            let row = self.record(k, updates, &x)?;
            done = self.reached_tolerance(&row);
            if done || k % every == 0 || k == budget {
                records.push(row);
            }
        }
        Ok(records)
    }

    fn reached_tolerance(&self, row: &MetricsRecord) -> bool {
        self.config
            .tolerance
            .is_some_and(|tol| row.squared_error <= tol)
    }
}

fn check_points(points: &[Point], dim: usize, path: &str) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            }
            .at(format!("{path}[{i}]")));
        }
        if !p.is_finite() {
            return Err(Error::ConfigInvalid {
                path: format!("{path}[{i}]"),
                message: "values must be finite".into(),
            });
        }
    }
    Ok(())
}

fn component_law(config: &ExperimentConfig, problem: &Problem) -> Result<ActivationProcess> {
    let graph = problem.graph();
    match &config.activation {
        ActivationSpec::Uniform => ActivationProcess::uniform(problem.num_components()),
        ActivationSpec::Explicit { p } => {
            if p.len() != problem.num_components() {
                return Err(Error::ConfigInvalid {
                    path: "activation.p".into(),
                    message: format!(
                        "{} probabilities for {} components",
                        p.len(),
                        problem.num_components()
                    ),
                });
            }
            ActivationProcess::explicit(p.clone())
        }
        ActivationSpec::NodeWakeup { q } => {
            if !problem.cover().is_edge_cover(graph) {
                return Err(Error::ConfigInvalid {
                    path: "activation.mode".into(),
                    message: "node-wakeup activation needs the edge cover".into(),
                });
            }
            node_wakeup_law(graph, &wake_law(q, graph.len()))
        }
    }
    .map_err(|e| e.at("activation"))
}

fn edge_law(config: &ExperimentConfig, problem: &Problem) -> Result<ActivationProcess> {
    let graph = problem.graph();
    let edges = graph.edges().len();
    match &config.activation {
        ActivationSpec::Uniform => ActivationProcess::uniform(edges),
        ActivationSpec::Explicit { p } => {
            if p.len() != edges {
                return Err(Error::ConfigInvalid {
                    path: "activation.p".into(),
                    message: format!("{} probabilities for {edges} edges", p.len()),
                });
            }
            ActivationProcess::explicit(p.clone())
        }
        ActivationSpec::NodeWakeup { q } => node_wakeup_law(graph, &wake_law(q, graph.len())),
    }
    .map_err(|e| e.at("activation"))
}

fn wake_law(q: &Option<Vec<f64>>, n: usize) -> Vec<f64> {
    q.clone().unwrap_or_else(|| vec![1.0 / n as f64; n])
}

/// Validates `config` and runs it once.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricsRecord>> {
    Experiment::from_config(config)?.run()
}
