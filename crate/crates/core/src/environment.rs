//! Simulated user: choice among a slate, interest drift, budget accounting
//! and reward emission.
//!
//! A step resolves the null choice first (a Bernoulli draw with `p_null`);
//! otherwise one slate item is picked with probability proportional to
//! `interest + 1` in its topic. Consuming a document costs `len_doc` budget and
//! returns a bonus proportional to its utility; choosing nothing costs
//! `len_null`.

use rand::Rng;

use crate::config::SimConfig;
use crate::corpus::{Corpus, DocId, Document};
use crate::error::{Error, Result};
use crate::slate::Slate;
use crate::user::UserState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiceOutcome {
    /// `None` is the null item.
    pub chosen: Option<DocId>,
    pub reward: f64,
    pub budget_after: f64,
    pub session_over: bool,
}

/// Unnormalized choice weight of a document for a user. Interest lies in
/// `[-1, 1]`, so the weight lies in `[0, 2]`.
fn choice_weight(user: &UserState, doc: &Document) -> f64 {
    (user.interest_in(doc.topic) + 1.0).max(0.0)
}

pub fn choose<R: Rng + ?Sized>(
    user: &UserState,
    slate: &Slate,
    corpus: &Corpus,
    config: &SimConfig,
    rng: &mut R,
) -> Result<Option<DocId>> {
    if slate.is_empty() {
        return Err(Error::Contract("choose called with an empty slate".into()));
    }
    if rng.random::<f64>() < config.p_null {
        return Ok(None);
    }
    let weights: Vec<f64> = slate
        .items
        .iter()
        .map(|&id| choice_weight(user, corpus.get(id)))
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        let pick = rng.random_range(0..slate.len());
        return Ok(Some(slate.items[pick]));
    }
    let mut target = rng.random::<f64>() * total;
    for (&id, &w) in slate.items.iter().zip(&weights) {
        if target < w {
            return Ok(Some(id));
        }
        target -= w;
    }
    // Rounding can leave `target` marginally above the last weight.
    let last = slate
        .items
        .iter()
        .zip(&weights)
        .rev()
        .find(|(_, &w)| w > 0.0)
        .map(|(&id, _)| id)
        .expect("positive total weight");
    Ok(Some(last))
}

pub fn utility(user: &UserState, doc: &Document, config: &SimConfig) -> f64 {
    (1.0 - config.gamma) * user.interest_in(doc.topic) + config.gamma * doc.quality
}

/// Budget replenished after consuming a document of the given utility.
/// Negative for negative utility.
pub fn bonus(utility_value: f64, config: &SimConfig) -> f64 {
    (0.9 / 3.4) * config.len_bonus * utility_value
}

/// Interest drift after consuming a document of `topic`.
pub fn update_interest<R: Rng + ?Sized>(
    user: &mut UserState,
    topic: u16,
    config: &SimConfig,
    rng: &mut R,
) -> Result<()> {
    let slot = user
        .interest
        .get_mut(topic as usize)
        .ok_or_else(|| Error::Contract(format!("topic {topic} out of range")))?;
    let current = *slot;
    let delta = interest_delta(current, config.y);
    let raised = rng.random::<f64>() < (current + 1.0) / 2.0;
    let next = if raised { current + delta } else { current - delta };
    *slot = next.clamp(-1.0, 1.0);
    Ok(())
}

pub fn interest_delta(interest: f64, y: f64) -> f64 {
    (-y * interest.abs() + y) * -interest
}

fn finish(budget_after: f64, config: &SimConfig) -> bool {
    budget_after < config.len_doc
}

/// One interaction: the user picks from `slate`, budget and interest are
/// updated, and the reward is returned.
pub fn step<R: Rng + ?Sized>(
    user: &mut UserState,
    slate: &Slate,
    corpus: &Corpus,
    config: &SimConfig,
    rng: &mut R,
) -> Result<ChoiceOutcome> {
    if user.budget < config.len_doc {
        return Err(Error::Contract(format!(
            "step called with budget {} below len_doc {}",
            user.budget, config.len_doc
        )));
    }
    match choose(user, slate, corpus, config, rng)? {
        None => Ok(null_outcome(user, config)),
        Some(id) => {
            let doc = corpus.get(id);
            let gained = bonus(utility(user, doc, config), config);
            user.budget = user.budget - config.len_doc + gained;
            update_interest(user, doc.topic, config, rng)?;
            Ok(ChoiceOutcome {
                chosen: Some(id),
                reward: config.reward_click,
                budget_after: user.budget,
                session_over: finish(user.budget, config),
            })
        }
    }
}

/// A step in which nothing was shown; the user is charged the null cost.
pub fn skip(user: &mut UserState, config: &SimConfig) -> Result<ChoiceOutcome> {
    if user.budget < config.len_doc {
        return Err(Error::Contract("skip called on a finished session".into()));
    }
    Ok(null_outcome(user, config))
}

fn null_outcome(user: &mut UserState, config: &SimConfig) -> ChoiceOutcome {
    user.budget -= config.len_null;
    ChoiceOutcome {
        chosen: None,
        reward: 0.0,
        budget_after: user.budget,
        session_over: finish(user.budget, config),
    }
}
