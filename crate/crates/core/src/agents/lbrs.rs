//! Load-balanced slate construction.
//!
//! Items are scanned in a fresh random order every pass. Each eligible item
//! is elected when a uniform draw falls below its threshold and then joins the
//! exclusion set of its pool, where it stays until the pool's window wraps.
//! Passes repeat until the slate holds `k` items.
//!
//! The heterogeneous variant keeps two pools (items at or above the quality
//! threshold, and the rest), each with its own probability, window and
//! exclusion set. The basic and priority variants use a single pool.
//!
//! If a complete pass leaves the slate short and a pool has no electable item
//! left, that pool's exclusion set is cleared early (keeping the items already
//! on the slate). This never happens while `k * ceil(1/p)` is at most the pool
//! size; each occurrence is counted in [`LbrsAgent::early_resets`].

use rand::Rng;

use super::threshold::{election_threshold, hetero_probs, normalize_quality, window_len};
use crate::config::SimConfig;
use crate::corpus::{Corpus, DocId};
use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::slate::Slate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbrsVariant {
    Basic,
    Priority,
    Heterogeneous,
}

#[derive(Debug, Clone)]
struct Pool {
    p: f64,
    window: u64,
    /// Members currently excluded from election.
    excluded: Vec<DocId>,
}

impl Pool {
    fn new(p: f64) -> Self {
        Self {
            p,
            window: window_len(p),
            excluded: Vec::new(),
        }
    }
}

const HIGH: usize = 0;
const LOW: usize = 1;

#[derive(Debug, Clone)]
pub struct LbrsAgent {
    variant: LbrsVariant,
    k: usize,
    deterministic_k: bool,
    session_local_t: bool,
    pools: Vec<Pool>,
    pool_of: Vec<u8>,
    /// Per-item threshold multiplier: normalized quality for the priority
    /// variant, 1 otherwise.
    weight: Vec<f64>,
    excluded: Vec<bool>,
    order: Vec<DocId>,
    high_fraction: f64,
    t: u64,
    early_resets: u64,
}

impl LbrsAgent {
    pub fn new(variant: LbrsVariant, config: &SimConfig, corpus: &Corpus) -> Result<Self> {
        let m = corpus.len();
        if config.k > m {
            return Err(Error::config("k", format!("slate size {} exceeds corpus size {m}", config.k)));
        }
        let p = config.p();
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::config("p", "must lie in (0, 1]"));
        }
        let docs = corpus.documents();
        let weight = match variant {
            LbrsVariant::Priority => docs
                .iter()
                .map(|d| normalize_quality(d.quality, config.q_min(), config.q_max))
                .collect::<Result<Vec<_>>>()?,
            _ => vec![1.0; m],
        };
        let (pools, pool_of, high_fraction) = match variant {
            LbrsVariant::Heterogeneous => {
                let pool_of: Vec<u8> = docs
                    .iter()
                    .map(|d| if d.quality >= config.q_threshold { HIGH as u8 } else { LOW as u8 })
                    .collect();
                let high = pool_of.iter().filter(|&&x| x == HIGH as u8).count();
                let f = high as f64 / m as f64;
                let probs = hetero_probs(p, config.lambda, f);
                (vec![Pool::new(probs.high), Pool::new(probs.low)], pool_of, f)
            }
            _ => (vec![Pool::new(p)], vec![HIGH as u8; m], 1.0),
        };
        Ok(Self {
            variant,
            k: config.k,
            deterministic_k: config.deterministic_k,
            session_local_t: config.session_local_t,
            pools,
            pool_of,
            weight,
            excluded: vec![false; m],
            order: (0..m as DocId).collect(),
            high_fraction,
            t: 1,
            early_resets: 0,
        })
    }

    pub fn variant(&self) -> LbrsVariant {
        self.variant
    }

    /// The step at which the next slate will be issued.
    pub fn step(&self) -> u64 {
        self.t
    }

    /// Fraction of the corpus in the high pool (1 for single-pool variants).
    pub fn high_fraction(&self) -> f64 {
        self.high_fraction
    }

    /// Recommendation probability of each pool, high pool first.
    pub fn pool_probabilities(&self) -> Vec<f64> {
        self.pools.iter().map(|p| p.p).collect()
    }

    pub fn early_resets(&self) -> u64 {
        self.early_resets
    }

    pub fn is_excluded(&self, item: DocId) -> bool {
        self.excluded[item as usize]
    }

    pub fn is_high(&self, item: DocId) -> bool {
        self.pool_of[item as usize] as usize == HIGH
    }

    /// Election threshold of `item` at the current step.
    pub fn threshold(&self, item: DocId) -> f64 {
        let i = item as usize;
        if self.excluded[i] {
            return 0.0;
        }
        let pool = &self.pools[self.pool_of[i] as usize];
        election_threshold(pool.p, self.t) * self.weight[i]
    }

    /// Starts a new user session. With session-local steps the counter and the
    /// exclusion sets are reset; otherwise the state carries over.
    pub fn start_session(&mut self) {
        if !self.session_local_t {
            return;
        }
        self.t = 1;
        for pool in 0..self.pools.len() {
            self.clear_pool(pool);
        }
        for (i, slot) in self.order.iter_mut().enumerate() {
            *slot = i as DocId;
        }
    }

    pub fn build_slate(&mut self, rng: &mut SimRng) -> Result<Slate> {
        let t = self.t;
        let mut thresholds = [0.0; 2];
        for (slot, pool) in thresholds.iter_mut().zip(&self.pools) {
            *slot = election_threshold(pool.p, t);
        }
        let mut items = Vec::with_capacity(self.k);
        if self.deterministic_k {
            self.fill(&mut items, thresholds, rng)?;
        } else {
            self.single_pass(&mut items, thresholds, rng);
        }
        for pool in 0..self.pools.len() {
            if t.is_multiple_of(self.pools[pool].window) {
                self.clear_pool(pool);
            }
        }
        self.t += 1;
        Ok(Slate::new(items, t))
    }

    fn fill(&mut self, items: &mut Vec<DocId>, thresholds: [f64; 2], rng: &mut SimRng) -> Result<()> {
        let m = self.order.len();
        loop {
            // A pool is open when a pass met one of its items, eligible with a
            // positive threshold, that was not elected.
            let mut open = [false; 2];
            for pos in 0..m {
                let j = rng.random_range(pos..m);
                self.order.swap(pos, j);
                let item = self.order[pos] as usize;
                if self.excluded[item] {
                    continue;
                }
                let pool = self.pool_of[item] as usize;
                let threshold = thresholds[pool] * self.weight[item];
                if threshold <= 0.0 {
                    continue;
                }
                if rng.random::<f64>() < threshold {
                    self.exclude(item, pool);
                    items.push(item as DocId);
                    if items.len() == self.k {
                        return Ok(());
                    }
                } else {
                    open[pool] = true;
                }
            }
            let mut cleared = false;
            for pool in 0..self.pools.len() {
                if !open[pool] && self.reset_early(pool, items) {
                    cleared = true;
                }
            }
            if !cleared && !open.iter().any(|&o| o) {
                return Err(Error::Contract(format!(
                    "only {} of {} slate positions can be filled: no electable items remain",
                    items.len(),
                    self.k
                )));
            }
        }
    }

    fn single_pass(&mut self, items: &mut Vec<DocId>, thresholds: [f64; 2], rng: &mut SimRng) {
        let m = self.order.len();
        for pos in 0..m {
            let j = rng.random_range(pos..m);
            self.order.swap(pos, j);
            let item = self.order[pos] as usize;
            if self.excluded[item] {
                continue;
            }
            let pool = self.pool_of[item] as usize;
            let threshold = thresholds[pool] * self.weight[item];
            if threshold > 0.0 && rng.random::<f64>() < threshold {
                self.exclude(item, pool);
                items.push(item as DocId);
            }
        }
    }

    fn exclude(&mut self, item: usize, pool: usize) {
        self.excluded[item] = true;
        self.pools[pool].excluded.push(item as DocId);
    }

    fn clear_pool(&mut self, pool: usize) {
        for id in self.pools[pool].excluded.drain(..) {
            self.excluded[id as usize] = false;
        }
    }

    /// Clears `pool` except for items already on the slate. Returns whether any
    /// item became eligible again.
    fn reset_early(&mut self, pool: usize, on_slate: &[DocId]) -> bool {
        let restorable = self.pools[pool]
            .excluded
            .iter()
            .any(|id| !on_slate.contains(id));
        if !restorable {
            return false;
        }
        self.clear_pool(pool);
        for &id in on_slate {
            if self.pool_of[id as usize] as usize == pool {
                self.exclude(id as usize, pool);
            }
        }
        self.early_resets += 1;
        true
    }
}
