//! Reference agents: uniform random slates and an epsilon-greedy bandit over
//! individual items.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;

use crate::corpus::{Corpus, DocId};
use crate::environment::ChoiceOutcome;
use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::slate::Slate;

/// `k` distinct items drawn uniformly without replacement.
pub fn random_slate<R: Rng + ?Sized>(corpus: &Corpus, k: usize, step: u64, rng: &mut R) -> Result<Slate> {
    let m = corpus.len();
    if m < k {
        return Err(Error::config("k", format!("slate size {k} exceeds corpus size {m}")));
    }
    let items = index::sample(rng, m, k)
        .into_iter()
        .map(|i| i as DocId)
        .collect();
    Ok(Slate::new(items, step))
}

#[derive(Debug, Clone)]
pub struct RandomAgent {
    k: usize,
    t: u64,
}

impl RandomAgent {
    pub fn new(k: usize) -> Self {
        Self { k, t: 1 }
    }

    pub fn start_session(&mut self) {
        self.t = 1;
    }

    pub fn build_slate(&mut self, corpus: &Corpus, rng: &mut SimRng) -> Result<Slate> {
        let slate = random_slate(corpus, self.k, self.t, rng)?;
        self.t += 1;
        Ok(slate)
    }
}

/// Ordering key: higher estimate first, then lower id.
#[derive(Debug, Clone, Copy)]
struct Ranked {
    value: f64,
    id: DocId,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| self.id.cmp(&other.id))
    }
}

/// Epsilon-greedy over items. Each slot independently explores (a uniformly
/// random unused item) with probability `epsilon`, otherwise takes the unused
/// item with the highest running-mean reward. Estimates persist across
/// sessions.
#[derive(Debug, Clone)]
pub struct EpsGreedyAgent {
    k: usize,
    epsilon: f64,
    reward_click: f64,
    estimates: Vec<f64>,
    counts: Vec<u64>,
    ranking: BTreeSet<Ranked>,
    t: u64,
}

impl EpsGreedyAgent {
    pub fn new(items: usize, k: usize, epsilon: f64, reward_click: f64) -> Result<Self> {
        if k > items {
            return Err(Error::config("k", format!("slate size {k} exceeds corpus size {items}")));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::config("epsilon", "must lie in [0, 1]"));
        }
        let ranking = (0..items as DocId).map(|id| Ranked { value: 0.0, id }).collect();
        Ok(Self {
            k,
            epsilon,
            reward_click,
            estimates: vec![0.0; items],
            counts: vec![0; items],
            ranking,
            t: 1,
        })
    }

    pub fn estimate(&self, id: DocId) -> f64 {
        self.estimates[id as usize]
    }

    pub fn count(&self, id: DocId) -> u64 {
        self.counts[id as usize]
    }

    /// Estimates persist; only the step counter restarts.
    pub fn start_session(&mut self) {
        self.t = 1;
    }

    pub fn build_slate(&mut self, rng: &mut SimRng) -> Slate {
        let m = self.estimates.len();
        let mut items: Vec<DocId> = Vec::with_capacity(self.k);
        for _ in 0..self.k {
            let pick = if rng.random::<f64>() < self.epsilon {
                loop {
                    let id = rng.random_range(0..m) as DocId;
                    if !items.contains(&id) {
                        break id;
                    }
                }
            } else {
                self.ranking
                    .iter()
                    .map(|r| r.id)
                    .find(|id| !items.contains(id))
                    .expect("k <= M leaves an unused item")
            };
            items.push(pick);
        }
        let slate = Slate::new(items, self.t);
        self.t += 1;
        slate
    }

    /// Credits the clicked item with the click reward and every other shown
    /// item with zero.
    pub fn observe(&mut self, slate: &Slate, outcome: &ChoiceOutcome) {
        for &id in &slate.items {
            let reward = if outcome.chosen == Some(id) { self.reward_click } else { 0.0 };
            self.record(id, reward);
        }
    }

    fn record(&mut self, id: DocId, reward: f64) {
        let i = id as usize;
        self.ranking.remove(&Ranked { value: self.estimates[i], id });
        self.counts[i] += 1;
        self.estimates[i] += (reward - self.estimates[i]) / self.counts[i] as f64;
        self.ranking.insert(Ranked { value: self.estimates[i], id });
    }
}
