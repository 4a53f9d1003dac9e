use rayon::prelude::*;

use crate::agents::{build_agent, Agent};
use crate::config::SimConfig;
use crate::corpus::{build_corpus, Corpus};
use crate::environment;
use crate::error::Result;
use crate::metrics::{self, diversity_score, RunSummary, SessionStats, StepRecord};
use crate::rng::{stream_rng, Stream};
use crate::slate::Slate;
use crate::user::spawn_user;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Keep every step record.
    pub trace: bool,
    /// Run sessions one after another even when the agent allows parallelism.
    pub sequential: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: SimConfig,
    pub summary: RunSummary,
    /// Empty unless tracing was requested. Ordered by user, then step.
    pub trace: Vec<StepRecord>,
    pub early_resets: u64,
    pub ran_in_parallel: bool,
}

#[derive(Debug, Clone)]
pub struct SessionOutput {
    pub stats: SessionStats,
    pub trace: Vec<StepRecord>,
    pub early_resets: u64,
}

/// Whether a configuration may run its sessions concurrently.
pub fn allows_parallel(config: &SimConfig) -> bool {
    !config.agent_kind.shares_state_across_sessions() && config.session_local_t
}

/// Simulates `N` independent sessions against one corpus.
pub fn run_experiment(config: &SimConfig, options: RunOptions) -> Result<RunOutput> {
    config.validate()?;
    let corpus = build_corpus(config, &mut stream_rng(config.seed, Stream::Corpus, 0))?;
    let parallel = !options.sequential && allows_parallel(config);
    let users = config.users as u64;

    let sessions: Vec<SessionOutput> = if parallel {
        (0..users)
            .into_par_iter()
            .map(|user_id| {
                let mut agent = build_agent(config, &corpus)?;
                run_session(config, &corpus, agent.as_mut(), user_id, options.trace)
            })
            .collect::<Result<_>>()?
    } else {
        let mut agent = build_agent(config, &corpus)?;
        (0..users)
            .map(|user_id| run_session(config, &corpus, agent.as_mut(), user_id, options.trace))
            .collect::<Result<_>>()?
    };

    let early_resets = sessions.iter().map(|s| s.early_resets).sum();
    let stats: Vec<SessionStats> = sessions.iter().map(|s| s.stats.clone()).collect();
    let summary = metrics::summarize(&stats)?;
    let trace = sessions.into_iter().flat_map(|s| s.trace).collect();
    Ok(RunOutput {
        config: config.clone(),
        summary,
        trace,
        early_resets,
        ran_in_parallel: parallel,
    })
}

/// Runs one user's session until their budget drops below `len_doc`.
pub fn run_session(
    config: &SimConfig,
    corpus: &Corpus,
    agent: &mut dyn Agent,
    user_id: u64,
    keep_trace: bool,
) -> Result<SessionOutput> {
    let mut user = spawn_user(config, user_id, &mut stream_rng(config.seed, Stream::UserInit, user_id));
    let mut agent_rng = stream_rng(config.seed, Stream::Agent, user_id);
    let mut env_rng = stream_rng(config.seed, Stream::Environment, user_id);

    agent.start_session();
    let resets_before = agent.early_resets();
    let mut stats = SessionStats::new(user_id);
    let mut trace = Vec::new();
    let mut prev: Option<Slate> = None;

    while user.budget >= config.len_doc {
        let slate = agent.recommend(corpus, &mut agent_rng)?;
        let outcome = if slate.is_empty() {
            environment::skip(&mut user, config)?
        } else {
            environment::step(&mut user, &slate, corpus, config, &mut env_rng)?
        };
        agent.observe(&slate, &outcome);

        let ils = metrics::ils(&slate, corpus);
        let bls = match &prev {
            Some(p) if !p.is_empty() && !slate.is_empty() => Some(metrics::bls(p, &slate, corpus, config.k)?),
            _ => None,
        };
        let d_score = diversity_score(ils, bls, config);
        stats.record(outcome.reward, ils, bls, d_score);
        if keep_trace {
            trace.push(StepRecord {
                user_id,
                step: slate.step,
                slate: slate.items.clone(),
                chosen: outcome.chosen,
                reward: outcome.reward,
                ils,
                bls,
                d_score,
                budget_after: outcome.budget_after,
            });
        }
        prev = Some(slate);
    }

    Ok(SessionOutput {
        stats,
        trace,
        early_resets: agent.early_resets() - resets_before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AgentKind;

    fn small(agent_kind: AgentKind) -> SimConfig {
        SimConfig {
            users: 10,
            items: 20,
            k: 5,
            seed: 11,
            agent_kind,
            ..SimConfig::default()
        }
    }

    #[test]
    fn random_run_is_reproducible() {
        let config = small(AgentKind::Random);
        let a = run_experiment(&config, RunOptions::default()).unwrap();
        let b = run_experiment(&config, RunOptions::default()).unwrap();
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn no_clicks_without_choices() {
        for kind in AgentKind::ALL {
            let config = SimConfig {
                p_null: 1.0,
                ..small(kind)
            };
            let out = run_experiment(&config, RunOptions::default()).unwrap();
            assert_eq!(out.summary.avg_reward_per_step, 0.0);
            assert_eq!(out.summary.mean_session_length, 197.0);
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        for kind in AgentKind::ALL {
            let config = SimConfig { users: 40, items: 60, ..small(kind) };
            let par = run_experiment(&config, RunOptions { trace: true, sequential: false }).unwrap();
            let seq = run_experiment(&config, RunOptions { trace: true, sequential: true }).unwrap();
            assert_eq!(par.summary, seq.summary, "{kind}");
            assert_eq!(par.trace, seq.trace, "{kind}");
            assert_eq!(par.ran_in_parallel, kind != AgentKind::EpsGreedy);
        }
    }

    #[test]
    fn trace_matches_summary() {
        let config = small(AgentKind::HeteroLbrs);
        let out = run_experiment(&config, RunOptions { trace: true, sequential: false }).unwrap();
        assert_eq!(out.trace.len() as u64, out.summary.total_steps);
        assert_eq!(metrics::summarize_records(&out.trace).unwrap(), out.summary);
        for r in &out.trace {
            assert_eq!(r.slate.len(), config.k);
            assert!(r.reward == 0.0 || r.reward == config.reward_click);
            assert_eq!(r.reward == 0.0, r.chosen.is_none());
            assert_eq!(r.bls.is_none(), r.step == 1);
        }
    }

    #[test]
    fn invalid_config_is_reported_with_field() {
        let config = SimConfig { k: 30, ..small(AgentKind::Random) };
        let err = run_experiment(&config, RunOptions::default()).unwrap_err();
        assert!(err.to_string().contains("`k`"), "{err}");
    }

    #[test]
    fn probabilistic_slates_run_to_completion() {
        let config = SimConfig {
            deterministic_k: false,
            items: 100,
            ..small(AgentKind::BasicLbrs)
        };
        let out = run_experiment(&config, RunOptions { trace: true, sequential: false }).unwrap();
        assert!(out.trace.iter().any(|r| r.slate.len() != config.k));
    }

    #[test]
    fn global_step_counter_forces_sequential() {
        let config = SimConfig {
            session_local_t: false,
            ..small(AgentKind::BasicLbrs)
        };
        let out = run_experiment(&config, RunOptions::default()).unwrap();
        assert!(!out.ran_in_parallel);
    }
}
