use crate::corpus::DocId;

/// The ordered list of items shown at one step of a session.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Slate {
    pub items: Vec<DocId>,
    /// Session step at which the slate was issued.
    pub step: u64,
}

impl Slate {
    pub fn new(items: Vec<DocId>, step: u64) -> Self {
        Self { items, step }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, id: DocId) -> bool {
        self.items.contains(&id)
    }

    pub fn has_duplicates(&self) -> bool {
        let mut sorted = self.items.clone();
        sorted.sort_unstable();
        sorted.windows(2).any(|w| w[0] == w[1])
    }
}
