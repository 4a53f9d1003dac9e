//! Documents and the corpus they are recommended from.

use rand::Rng;

use crate::config::SimConfig;
use crate::error::{Error, Result};

pub type DocId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Document {
    pub id: DocId,
    pub topic: u16,
    pub quality: f64,
}

impl Document {
    /// Quality class used by the similarity metric. Zero-quality documents
    /// count as high.
    pub fn is_high_class(&self) -> bool {
        self.quality >= 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    topics: usize,
    high_topic_count: usize,
    q_max: f64,
}

impl Corpus {
    /// Builds a corpus from explicit documents. Ids must be `0..len` in order,
    /// topics below `topics`, and qualities within `[-q_max, q_max]`.
    pub fn from_documents(documents: Vec<Document>, topics: usize, q_max: f64) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::config("M", "corpus must not be empty"));
        }
        if topics == 0 {
            return Err(Error::config("T", "must be at least 1"));
        }
        for (i, d) in documents.iter().enumerate() {
            if d.id as usize != i {
                return Err(Error::Contract(format!("document at index {i} has id {}", d.id)));
            }
            if d.topic as usize >= topics {
                return Err(Error::Contract(format!(
                    "document {i} has topic {} but only {topics} topics exist",
                    d.topic
                )));
            }
            if !(d.quality.abs() <= q_max) {
                return Err(Error::Contract(format!(
                    "document {i} has quality {} outside [-{q_max}, {q_max}]",
                    d.quality
                )));
            }
        }
        Ok(Self {
            documents,
            topics,
            high_topic_count: topics / 3,
            q_max,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn get(&self, id: DocId) -> &Document {
        &self.documents[id as usize]
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn high_topic_count(&self) -> usize {
        self.high_topic_count
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    /// Fraction of documents with quality at or above `threshold`.
    pub fn fraction_at_or_above(&self, threshold: f64) -> f64 {
        let count = self.documents.iter().filter(|d| d.quality >= threshold).count();
        count as f64 / self.documents.len() as f64
    }
}

/// Draws `M` documents: topic uniform over `0..T`, quality uniform on
/// `[0, Q_max]` for the first `floor(T/3)` topics and on `[-Q_max, 0]` for the rest.
pub fn build_corpus<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Corpus> {
    if config.items == 0 {
        return Err(Error::config("M", "must be at least 1"));
    }
    if config.topics == 0 {
        return Err(Error::config("T", "must be at least 1"));
    }
    if config.topics > u16::MAX as usize || config.items > u32::MAX as usize {
        return Err(Error::config("T", "corpus dimensions are too large"));
    }
    let high = config.high_topic_count();
    let q_max = config.q_max;
    let documents = (0..config.items)
        .map(|i| {
            let topic = rng.random_range(0..config.topics);
            let quality = if topic < high {
                rng.random_range(0.0..=q_max)
            } else {
                rng.random_range(-q_max..=0.0)
            };
            Document {
                id: i as DocId,
                topic: topic as u16,
                quality,
            }
        })
        .collect();
    Corpus::from_documents(documents, config.topics, q_max)
}
