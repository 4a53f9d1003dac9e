//! Simulation configuration.
//!
//! Field names in the on-disk form follow the symbols used throughout the
//! project documentation (`N`, `M`, `T`, `Q_max`, `B0`, ...). Every field has a
//! default, so a config file only needs the keys it changes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The recommendation policy driving a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    #[serde(rename = "b-lbrs")]
    BasicLbrs,
    #[serde(rename = "p-lbrs")]
    PriorityLbrs,
    #[serde(rename = "h-lbrs")]
    HeteroLbrs,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "eps-greedy")]
    EpsGreedy,
}

impl AgentKind {
    pub const ALL: [AgentKind; 5] = [
        AgentKind::BasicLbrs,
        AgentKind::PriorityLbrs,
        AgentKind::HeteroLbrs,
        AgentKind::Random,
        AgentKind::EpsGreedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::BasicLbrs => "b-lbrs",
            AgentKind::PriorityLbrs => "p-lbrs",
            AgentKind::HeteroLbrs => "h-lbrs",
            AgentKind::Random => "random",
            AgentKind::EpsGreedy => "eps-greedy",
        }
    }

    /// Agents whose state is shared between sessions of one run.
    pub fn shares_state_across_sessions(self) -> bool {
        matches!(self, AgentKind::EpsGreedy)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "blbrs" | "basic" => Ok(AgentKind::BasicLbrs),
            "plbrs" | "priority" => Ok(AgentKind::PriorityLbrs),
            "hlbrs" | "hetero" | "heterogeneous" => Ok(AgentKind::HeteroLbrs),
            "random" => Ok(AgentKind::Random),
            "epsgreedy" | "egreedy" | "epsilongreedy" => Ok(AgentKind::EpsGreedy),
            _ => Err(Error::config(
                "agent_kind",
                format!("unknown agent `{s}` (expected one of b-lbrs, p-lbrs, h-lbrs, random, eps-greedy)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    #[serde(rename = "N")]
    pub users: usize,
    #[serde(rename = "M")]
    pub items: usize,
    #[serde(rename = "T")]
    pub topics: usize,
    pub k: usize,
    /// Recommendation probability. `None` means `k / 100`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(rename = "Q_max")]
    pub q_max: f64,
    /// Interest-change coefficient.
    pub y: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "B0")]
    pub initial_budget: f64,
    pub len_doc: f64,
    pub len_null: f64,
    pub len_bonus: f64,
    pub p_null: f64,
    pub reward_click: f64,
    pub lambda: f64,
    pub q_threshold: f64,
    pub seed: u64,
    pub agent_kind: AgentKind,
    pub epsilon: f64,
    /// Fill every slate with exactly `k` items. When off, LBRS agents run a
    /// single election pass and slates have whatever size it produces.
    pub deterministic_k: bool,
    /// Reset the step counter and exclusion sets for every user. When off the
    /// LBRS state carries over between consecutive sessions and the run is
    /// forced to be sequential.
    pub session_local_t: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            users: 5000,
            items: 10_000,
            topics: 20,
            k: 5,
            p: None,
            q_max: 3.0,
            y: 0.3,
            gamma: 1.0,
            alpha: 1.0,
            beta: 1.0,
            initial_budget: 200.0,
            len_doc: 4.0,
            len_null: 1.0,
            len_bonus: 4.0,
            p_null: 0.5,
            reward_click: 4.0,
            lambda: 50.0,
            q_threshold: 2.0,
            seed: 0,
            agent_kind: AgentKind::BasicLbrs,
            epsilon: 0.1,
            deterministic_k: true,
            session_local_t: true,
        }
    }
}

fn check(ok: bool, field: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl SimConfig {
    pub fn p(&self) -> f64 {
        self.p.unwrap_or(self.k as f64 / 100.0)
    }

    pub fn q_min(&self) -> f64 {
        -self.q_max
    }

    /// Number of topics whose documents carry non-negative quality.
    pub fn high_topic_count(&self) -> usize {
        self.topics / 3
    }

    /// Largest utility any user can draw from any document.
    pub fn max_utility(&self) -> f64 {
        (1.0 - self.gamma) + self.gamma * self.q_max
    }

    pub fn validate(&self) -> Result<()> {
        check(self.users >= 1, "N", "must be at least 1")?;
        check(self.items >= 1, "M", "must be at least 1")?;
        check(self.topics >= 1, "T", "must be at least 1")?;
        check(self.topics <= u16::MAX as usize, "T", "is too large")?;
        check(self.items <= u32::MAX as usize, "M", "is too large")?;
        check(self.k >= 1, "k", "must be at least 1")?;
        check(self.k <= self.items, "k", "must not exceed M")?;
        let p = self.p();
        check(p.is_finite() && p > 0.0 && p <= 1.0, "p", "must lie in (0, 1]")?;
        check(self.q_max.is_finite() && self.q_max > 0.0, "Q_max", "must be positive")?;
        check(in_unit(self.y), "y", "must lie in [0, 1]")?;
        check(in_unit(self.gamma), "gamma", "must lie in [0, 1]")?;
        check(self.alpha.is_finite() && self.alpha >= 0.0, "alpha", "must be non-negative")?;
        check(self.beta.is_finite() && self.beta >= 0.0, "beta", "must be non-negative")?;
        check(
            self.initial_budget.is_finite() && self.initial_budget >= 0.0,
            "B0",
            "must be non-negative",
        )?;
        check(self.len_doc.is_finite() && self.len_doc > 0.0, "len_doc", "must be positive")?;
        check(self.len_null.is_finite() && self.len_null > 0.0, "len_null", "must be positive")?;
        check(
            self.len_bonus.is_finite() && self.len_bonus >= 0.0,
            "len_bonus",
            "must be non-negative",
        )?;
        check(in_unit(self.p_null), "p_null", "must lie in [0, 1]")?;
        check(
            self.reward_click.is_finite() && self.reward_click >= 0.0,
            "reward_click",
            "must be non-negative",
        )?;
        check(self.lambda.is_finite() && self.lambda >= 0.0, "lambda", "must be non-negative")?;
        check(self.q_threshold.is_finite(), "q_threshold", "must be finite")?;
        check(in_unit(self.epsilon), "epsilon", "must lie in [0, 1]")?;
        // Every consumed document must cost more budget than it can give back,
        // otherwise a session need not terminate.
        let max_bonus = crate::environment::bonus(self.max_utility(), self);
        check(
            self.len_doc > max_bonus,
            "len_doc",
            &format!("must exceed the largest possible bonus ({max_bonus:.6})"),
        )?;
        Ok(())
    }

    /// Parses a flat key-value TOML document. Unknown keys are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: SimConfig = toml::from_str(text)?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Sets one field from its textual form, using the on-disk key names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(field: &'static str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::config(field, format!("cannot parse `{value}`")))
        }
        fn flag(field: &'static str, value: &str) -> Result<bool> {
            match value.trim().to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(Error::config(field, format!("cannot parse `{value}` as a boolean"))),
            }
        }
        match key {
            "N" | "users" => self.users = num("N", value)?,
            "M" | "items" => self.items = num("M", value)?,
            "T" | "topics" => self.topics = num("T", value)?,
            "k" => self.k = num("k", value)?,
            "p" => self.p = Some(num("p", value)?),
            "Q_max" | "q_max" => self.q_max = num("Q_max", value)?,
            "y" => self.y = num("y", value)?,
            "gamma" => self.gamma = num("gamma", value)?,
            "alpha" => self.alpha = num("alpha", value)?,
            "beta" => self.beta = num("beta", value)?,
            "B0" | "initial_budget" => self.initial_budget = num("B0", value)?,
            "len_doc" => self.len_doc = num("len_doc", value)?,
            "len_null" => self.len_null = num("len_null", value)?,
            "len_bonus" => self.len_bonus = num("len_bonus", value)?,
            "p_null" => self.p_null = num("p_null", value)?,
            "reward_click" => self.reward_click = num("reward_click", value)?,
            "lambda" => self.lambda = num("lambda", value)?,
            "q_threshold" => self.q_threshold = num("q_threshold", value)?,
            "seed" => self.seed = num("seed", value)?,
            "agent_kind" | "agent" => self.agent_kind = value.parse()?,
            "epsilon" => self.epsilon = num("epsilon", value)?,
            "deterministic_k" => self.deterministic_k = flag("deterministic_k", value)?,
            "session_local_t" => self.session_local_t = flag("session_local_t", value)?,
            other => {
                return Err(Error::Config {
                    field: "key",
                    reason: format!("unknown configuration key `{other}`"),
                })
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let c = SimConfig::default();
        assert_eq!((c.users, c.items, c.k, c.topics), (5000, 10_000, 5, 20));
        assert_eq!(c.q_max, 3.0);
        assert_eq!(c.q_min(), -3.0);
        assert_eq!((c.y, c.alpha, c.beta, c.gamma), (0.3, 1.0, 1.0, 1.0));
        assert_eq!(c.initial_budget, 200.0);
        assert_eq!((c.len_doc, c.len_null, c.len_bonus), (4.0, 1.0, 4.0));
        assert_eq!((c.p_null, c.reward_click), (0.5, 4.0));
        assert_eq!(c.epsilon, 0.1);
        assert!((c.p() - 0.05).abs() < 1e-15);
        c.validate().unwrap();
    }

    #[test]
    fn p_follows_k_unless_set() {
        let mut c = SimConfig {
            k: 15,
            ..SimConfig::default()
        };
        assert!((c.p() - 0.15).abs() < 1e-15);
        c.set("p", "0.01").unwrap();
        assert_eq!(c.p(), 0.01);
    }

    #[test]
    fn validation_names_the_field() {
        let cases: Vec<(SimConfig, &str)> = vec![
            (SimConfig { items: 0, ..Default::default() }, "M"),
            (SimConfig { topics: 0, ..Default::default() }, "T"),
            (SimConfig { k: 0, ..Default::default() }, "k"),
            (SimConfig { items: 3, k: 4, ..Default::default() }, "k"),
            (SimConfig { p: Some(0.0), ..Default::default() }, "p"),
            (SimConfig { p: Some(1.5), ..Default::default() }, "p"),
            (SimConfig { p_null: 1.2, ..Default::default() }, "p_null"),
            (SimConfig { lambda: -1.0, ..Default::default() }, "lambda"),
            (SimConfig { gamma: 2.0, ..Default::default() }, "gamma"),
            (SimConfig { epsilon: -0.1, ..Default::default() }, "epsilon"),
            (SimConfig { len_doc: 3.0, ..Default::default() }, "len_doc"),
        ];
        for (config, field) in cases {
            match config.validate() {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected error on {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn toml_round_trip_uses_symbol_names() {
        let c = SimConfig {
            users: 10,
            agent_kind: AgentKind::HeteroLbrs,
            p: Some(0.02),
            ..Default::default()
        };
        let text = c.to_toml_string().unwrap();
        assert!(text.contains("N = 10"));
        assert!(text.contains("Q_max = 3.0"));
        assert!(text.contains("agent_kind = \"h-lbrs\""));
        assert_eq!(SimConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(SimConfig::from_toml_str("Nn = 3").is_err());
        let mut c = SimConfig::default();
        assert!(c.set("bogus", "1").is_err());
    }

    #[test]
    fn agent_names_parse_loosely() {
        for kind in AgentKind::ALL {
            assert_eq!(kind.name().parse::<AgentKind>().unwrap(), kind);
        }
        assert_eq!("B-LBRS".parse::<AgentKind>().unwrap(), AgentKind::BasicLbrs);
        assert_eq!("epsilon_greedy".parse::<AgentKind>().unwrap(), AgentKind::EpsGreedy);
        assert!("dqn".parse::<AgentKind>().is_err());
    }
}
