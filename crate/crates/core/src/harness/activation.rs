//! i.i.d. activation of components.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::topology::Graph;

/// Description of the generator behind every seeded run.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9), seed_from_u64(seed), stream 0; u = (next_u64 >> 11) * 2^-53";

const SUM_TOLERANCE: f64 = 1e-12;

/// Seeded source of uniform draws in `[0, 1)`. Streams split one seed into
/// independent sequences.
#[derive(Debug, Clone)]
pub struct ActivationRng {
    inner: ChaCha8Rng,
}

impl ActivationRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        ActivationRng { inner }
    }

    pub fn next_unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ActivationSource {
    Uniform,
    Explicit,
    NodeWakeup { q: Vec<f64> },
}

/// Law `(p_1..p_L)` of the activated component, all entries positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationProcess {
    law: Vec<f64>,
    cumulative: Vec<f64>,
    source: ActivationSource,
}

impl ActivationProcess {
    pub fn uniform(components: usize) -> Result<Self> {
        if components == 0 {
            return Err(Error::InvalidDistribution("no components".into()));
        }
        let p = 1.0 / components as f64;
        Self::build(vec![p; components], ActivationSource::Uniform)
    }

    pub fn explicit(law: Vec<f64>) -> Result<Self> {
        Self::build(law, ActivationSource::Explicit)
    }

    fn build(law: Vec<f64>, source: ActivationSource) -> Result<Self> {
        check_law(&law)?;
        let mut acc = 0.0;
        let cumulative = law
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(ActivationProcess {
            law,
            cumulative,
            source,
        })
    }

    pub fn law(&self) -> &[f64] {
        &self.law
    }

    pub fn source(&self) -> &ActivationSource {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.law.len()
    }

    pub fn is_empty(&self) -> bool {
        self.law.is_empty()
    }

    /// Inverse-CDF draw. Rounding slack past the last cumulative value falls
    /// on the last component.
    pub fn draw(&self, rng: &mut ActivationRng) -> usize {
        let u = rng.next_unit();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.law.len() - 1)
    }
}

fn check_law(law: &[f64]) -> Result<()> {
    if law.is_empty() {
        return Err(Error::InvalidDistribution("empty law".into()));
    }
    if let Some((l, p)) = law
        .iter()
        .enumerate()
        .find(|(_, p)| !(p.is_finite() && **p > 0.0))
    {
        return Err(Error::InvalidDistribution(format!(
            "p[{l}] = {p}; every component needs positive probability"
        )));
    }
    let total: f64 = law.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

/// Law on edges (in [`Graph::edges`] order) induced by agent `v` waking up
/// with probability `q_v` and calling a uniformly chosen neighbor:
/// `P[{v, w}] = q_v / |N_v| + q_w / |N_w|`.
pub fn node_wakeup_law(graph: &Graph, q: &[f64]) -> Result<ActivationProcess> {
    if q.len() != graph.len() {
        return Err(Error::InvalidQ(format!(
            "{} wake probabilities for {} vertices",
            q.len(),
            graph.len()
        )));
    }
    if let Some((v, qv)) = q
        .iter()
        .enumerate()
        .find(|(_, qv)| !(qv.is_finite() && **qv > 0.0))
    {
        return Err(Error::InvalidQ(format!(
            "q of vertex {} is {qv}",
            graph.label(v)
        )));
    }
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidQ(format!(
            "wake probabilities sum to {total}"
        )));
    }
    if graph.edges().is_empty() {
        return Err(Error::EmptyGraph);
    }
    if let Some(v) = (0..graph.len()).find(|&v| graph.degree(v) == 0) {
        return Err(Error::InvalidQ(format!(
            "vertex {} has no neighbor to call",
            graph.label(v)
        )));
    }
    // Single rounding of (q_v |N_w| + q_w |N_v|) / (|N_v| |N_w|).
    let law = graph
        .edges()
        .iter()
        .map(|&(v, w)| {
            let (dv, dw) = (graph.degree(v) as f64, graph.degree(w) as f64);
            (q[v] * dw + q[w] * dv) / (dv * dw)
        })
        .collect();
    ActivationProcess::build(law, ActivationSource::NodeWakeup { q: q.to_vec() })
}

/// One i.i.d. draw from `process`.
pub fn draw_activation(process: &ActivationProcess, rng: &mut ActivationRng) -> usize {
    process.draw(rng)
}
