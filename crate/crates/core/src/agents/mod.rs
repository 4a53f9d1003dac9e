//! Recommendation policies behind a common interface.

pub mod baselines;
pub mod lbrs;
pub mod threshold;

pub use baselines::{random_slate, EpsGreedyAgent, RandomAgent};
pub use lbrs::{LbrsAgent, LbrsVariant};

use crate::config::{AgentKind, SimConfig};
use crate::corpus::Corpus;
use crate::environment::ChoiceOutcome;
use crate::error::Result;
use crate::rng::SimRng;
use crate::slate::Slate;

/// A slate recommender. The harness calls [`Agent::start_session`] before
/// each user, then alternates [`Agent::recommend`] and [`Agent::observe`]
/// until the user's budget runs out.
pub trait Agent: Send {
    fn kind(&self) -> AgentKind;

    fn start_session(&mut self);

    fn recommend(&mut self, corpus: &Corpus, rng: &mut SimRng) -> Result<Slate>;

    fn observe(&mut self, _slate: &Slate, _outcome: &ChoiceOutcome) {}

    /// Number of exclusion sets cleared before their window ended.
    fn early_resets(&self) -> u64 {
        0
    }
}

impl Agent for LbrsAgent {
    fn kind(&self) -> AgentKind {
        match self.variant() {
            LbrsVariant::Basic => AgentKind::BasicLbrs,
            LbrsVariant::Priority => AgentKind::PriorityLbrs,
            LbrsVariant::Heterogeneous => AgentKind::HeteroLbrs,
        }
    }

    fn start_session(&mut self) {
        LbrsAgent::start_session(self)
    }

    fn recommend(&mut self, _corpus: &Corpus, rng: &mut SimRng) -> Result<Slate> {
        self.build_slate(rng)
    }

    fn early_resets(&self) -> u64 {
        LbrsAgent::early_resets(self)
    }
}

impl Agent for RandomAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Random
    }

    fn start_session(&mut self) {
        RandomAgent::start_session(self)
    }

    fn recommend(&mut self, corpus: &Corpus, rng: &mut SimRng) -> Result<Slate> {
        self.build_slate(corpus, rng)
    }
}

impl Agent for EpsGreedyAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::EpsGreedy
    }

    fn start_session(&mut self) {
        EpsGreedyAgent::start_session(self)
    }

    fn recommend(&mut self, _corpus: &Corpus, rng: &mut SimRng) -> Result<Slate> {
        Ok(self.build_slate(rng))
    }

    fn observe(&mut self, slate: &Slate, outcome: &ChoiceOutcome) {
        EpsGreedyAgent::observe(self, slate, outcome)
    }
}

pub fn build_agent(config: &SimConfig, corpus: &Corpus) -> Result<Box<dyn Agent>> {
    let agent: Box<dyn Agent> = match config.agent_kind {
        AgentKind::BasicLbrs => Box::new(LbrsAgent::new(LbrsVariant::Basic, config, corpus)?),
        AgentKind::PriorityLbrs => Box::new(LbrsAgent::new(LbrsVariant::Priority, config, corpus)?),
        AgentKind::HeteroLbrs => Box::new(LbrsAgent::new(LbrsVariant::Heterogeneous, config, corpus)?),
        AgentKind::Random => {
            if config.k > corpus.len() {
                return Err(crate::error::Error::config("k", "must not exceed M"));
            }
            Box::new(RandomAgent::new(config.k))
        }
        AgentKind::EpsGreedy => Box::new(EpsGreedyAgent::new(
            corpus.len(),
            config.k,
            config.epsilon,
            config.reward_click,
        )?),
    };
    Ok(agent)
}
