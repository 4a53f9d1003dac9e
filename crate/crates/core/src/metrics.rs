//! Accuracy and diversity metrics.
//!
//! Similarity between two documents is the cosine of their feature vectors,
//! a topic one-hot block followed by a quality-class one-hot block (class by
//! sign of quality, zero counted as high). Both blocks are unit vectors, so
//! the cosine is `(same_topic + same_class) / 2`.
//!
//! All diversity scores are similarities: lower means more diverse.

use crate::config::SimConfig;
use crate::corpus::{Corpus, DocId, Document};
use crate::error::{Error, Result};
use crate::slate::Slate;

pub fn item_similarity(a: &Document, b: &Document) -> f64 {
    let topic = (a.topic == b.topic) as u8 as f64;
    let class = (a.is_high_class() == b.is_high_class()) as u8 as f64;
    (topic + class) / 2.0
}

/// Intra-list similarity: mean similarity over ordered pairs of distinct
/// positions. `None` for slates shorter than two.
pub fn ils(slate: &Slate, corpus: &Corpus) -> Option<f64> {
    let n = slate.len();
    if n < 2 {
        return None;
    }
    let docs: Vec<&Document> = slate.items.iter().map(|&id| corpus.get(id)).collect();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += item_similarity(docs[i], docs[j]);
        }
    }
    // every unordered pair appears twice among the ordered ones
    Some(2.0 * total / (n * (n - 1)) as f64)
}

/// Between-list similarity of consecutive slates. An item repeated from `prev`
/// in `next` contributes `k` to both numerator and denominator instead of its
/// similarity and 1.
pub fn bls(prev: &Slate, next: &Slate, corpus: &Corpus, k: usize) -> Result<f64> {
    bls_by(prev, next, k, |i, j| item_similarity(corpus.get(i), corpus.get(j)))
}

/// [`bls`] with an arbitrary similarity between distinct items.
pub fn bls_by(prev: &Slate, next: &Slate, k: usize, mut sim: impl FnMut(DocId, DocId) -> f64) -> Result<f64> {
    if prev.is_empty() || next.is_empty() {
        return Err(Error::Contract("between-list similarity needs two non-empty slates".into()));
    }
    let k = k as f64;
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for &i in &prev.items {
        for &j in &next.items {
            if i == j {
                numerator += k;
                denominator += k;
            } else {
                numerator += sim(i, j);
                denominator += 1.0;
            }
        }
    }
    Ok(numerator / denominator)
}

/// Combined diversity score `(alpha * ILS + beta * BLS) / 2`. A step without a
/// predecessor scores its ILS alone; a step whose slate is too short for ILS
/// scores its BLS alone.
pub fn diversity_score(ils: Option<f64>, bls: Option<f64>, config: &SimConfig) -> Option<f64> {
    match (ils, bls) {
        (Some(i), Some(b)) => Some((config.alpha * i + config.beta * b) / 2.0),
        (Some(i), None) => Some(i),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

/// One step of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub user_id: u64,
    pub step: u64,
    pub slate: Vec<DocId>,
    pub chosen: Option<DocId>,
    pub reward: f64,
    pub ils: Option<f64>,
    pub bls: Option<f64>,
    pub d_score: Option<f64>,
    pub budget_after: f64,
}

/// Running totals for one session.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionStats {
    pub user_id: u64,
    pub steps: u64,
    pub total_reward: f64,
    pub diversity_sum: f64,
    pub diversity_steps: u64,
    pub ils_sum: f64,
    pub ils_steps: u64,
    pub bls_sum: f64,
    pub bls_steps: u64,
}

impl SessionStats {
    pub fn new(user_id: u64) -> Self {
        Self {
            user_id,
            ..Self::default()
        }
    }

    pub fn record(&mut self, reward: f64, ils: Option<f64>, bls: Option<f64>, d_score: Option<f64>) {
        self.steps += 1;
        self.total_reward += reward;
        if let Some(d) = d_score {
            self.diversity_sum += d;
            self.diversity_steps += 1;
        }
        if let Some(i) = ils {
            self.ils_sum += i;
            self.ils_steps += 1;
        }
        if let Some(b) = bls {
            self.bls_sum += b;
            self.bls_steps += 1;
        }
    }

    pub fn push(&mut self, record: &StepRecord) {
        self.record(record.reward, record.ils, record.bls, record.d_score);
    }

    fn mean(sum: f64, n: u64) -> Option<f64> {
        (n > 0).then(|| sum / n as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub users: usize,
    pub total_steps: u64,
    /// Total reward over total steps.
    pub avg_reward_per_step: f64,
    /// Total reward over users.
    pub avg_cumulative_reward_per_session: f64,
    /// Total diversity score over steps that have one.
    pub avg_diversity: f64,
    pub avg_ils: f64,
    pub avg_bls: f64,
    pub mean_session_length: f64,
    /// 95% confidence half-widths over per-user values.
    pub ci_reward_step: f64,
    pub ci_reward_session: f64,
    pub ci_diversity: f64,
    pub ci_ils: f64,
    pub ci_bls: f64,
    pub ci_session_length: f64,
}

/// `1.96 * s / sqrt(n)` with the sample standard deviation; zero below two values.
pub fn ci_half_width(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    1.96 * var.sqrt() / (n as f64).sqrt()
}

fn ratio(sum: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn summarize(sessions: &[SessionStats]) -> Result<RunSummary> {
    if sessions.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let total_steps: u64 = sessions.iter().map(|s| s.steps).sum();
    let total_reward: f64 = sessions.iter().map(|s| s.total_reward).sum();
    let sum_of = |f: fn(&SessionStats) -> (f64, u64)| {
        sessions.iter().map(f).fold((0.0, 0u64), |(a, b), (x, y)| (a + x, b + y))
    };
    let (d_sum, d_n) = sum_of(|s| (s.diversity_sum, s.diversity_steps));
    let (i_sum, i_n) = sum_of(|s| (s.ils_sum, s.ils_steps));
    let (b_sum, b_n) = sum_of(|s| (s.bls_sum, s.bls_steps));

    let per_user = |f: fn(&SessionStats) -> Option<f64>| -> Vec<f64> { sessions.iter().filter_map(f).collect() };
    let reward_step = per_user(|s| SessionStats::mean(s.total_reward, s.steps));
    let reward_session = per_user(|s| Some(s.total_reward));
    let diversity = per_user(|s| SessionStats::mean(s.diversity_sum, s.diversity_steps));
    let ils = per_user(|s| SessionStats::mean(s.ils_sum, s.ils_steps));
    let bls = per_user(|s| SessionStats::mean(s.bls_sum, s.bls_steps));
    let length = per_user(|s| Some(s.steps as f64));

    let users = sessions.len();
    Ok(RunSummary {
        users,
        total_steps,
        avg_reward_per_step: ratio(total_reward, total_steps),
        avg_cumulative_reward_per_session: total_reward / users as f64,
        avg_diversity: ratio(d_sum, d_n),
        avg_ils: ratio(i_sum, i_n),
        avg_bls: ratio(b_sum, b_n),
        mean_session_length: total_steps as f64 / users as f64,
        ci_reward_step: ci_half_width(&reward_step),
        ci_reward_session: ci_half_width(&reward_session),
        ci_diversity: ci_half_width(&diversity),
        ci_ils: ci_half_width(&ils),
        ci_bls: ci_half_width(&bls),
        ci_session_length: ci_half_width(&length),
    })
}

/// Summarizes a flat step trace, grouping records by user.
pub fn summarize_records(records: &[StepRecord]) -> Result<RunSummary> {
    let mut sessions: Vec<SessionStats> = Vec::new();
    let mut sorted: Vec<&StepRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.user_id, r.step));
    for record in sorted {
        match sessions.last_mut() {
            Some(s) if s.user_id == record.user_id => s.push(record),
            _ => {
                let mut s = SessionStats::new(record.user_id);
                s.push(record);
                sessions.push(s);
            }
        }
    }
    summarize(&sessions)
}
