//! Activation processes, seeded experiment runs and trace recording.

mod activation;
mod experiment;
mod metrics;

pub use activation::{
    draw_activation, node_wakeup_law, ActivationProcess, ActivationRng, ActivationSource,
    RNG_ALGORITHM,
};
pub use experiment::{run_experiment, Experiment};
pub use metrics::{
    format_real, read_trace, squared_error, trace_to_string, write_trace, MetricsRecord,
    TRACE_HEADER,
};
