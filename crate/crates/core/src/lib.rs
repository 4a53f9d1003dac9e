//! Load-balanced slate recommendation (LBRS) agents, a simulated user that
//! consumes slates under a time budget, and a harness for comparing agents on
//! reward and diversity.

pub mod agents;
pub mod config;
pub mod corpus;
pub mod environment;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod slate;
pub mod user;

pub use agents::{build_agent, Agent};
pub use config::{AgentKind, SimConfig};
pub use corpus::{build_corpus, Corpus, DocId, Document};
pub use error::{Error, Result};
pub use harness::{run_experiment, run_sweep, RunOptions, RunOutput, SweepParam, SweepSpec};
pub use metrics::{RunSummary, StepRecord};
pub use slate::Slate;
