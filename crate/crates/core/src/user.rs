use rand::Rng;

use crate::config::SimConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct UserState {
    pub user_id: u64,
    /// Interest per topic, each in `[-1, 1]`.
    pub interest: Vec<f64>,
    /// Remaining time budget.
    pub budget: f64,
}

impl UserState {
    pub fn interest_in(&self, topic: u16) -> f64 {
        self.interest[topic as usize]
    }
}

/// A fresh user: interests i.i.d. uniform on `[-1, 1]`, full budget.
pub fn spawn_user<R: Rng + ?Sized>(config: &SimConfig, user_id: u64, rng: &mut R) -> UserState {
    let interest = (0..config.topics)
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    UserState {
        user_id,
        interest,
        budget: config.initial_budget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    #[test]
    fn spawn_has_full_budget_and_bounded_interest() {
        let config = SimConfig::default();
        for id in 0..50 {
            let user = spawn_user(&config, id, &mut stream_rng(3, Stream::UserInit, id));
            assert_eq!(user.budget, 200.0);
            assert_eq!(user.user_id, id);
            assert_eq!(user.interest.len(), 20);
            assert!(user.interest.iter().all(|i| (-1.0..=1.0).contains(i)));
        }
    }

    #[test]
    fn same_seed_and_id_same_user() {
        let config = SimConfig::default();
        let a = spawn_user(&config, 17, &mut stream_rng(3, Stream::UserInit, 17));
        let b = spawn_user(&config, 17, &mut stream_rng(3, Stream::UserInit, 17));
        let c = spawn_user(&config, 18, &mut stream_rng(3, Stream::UserInit, 18));
        assert_eq!(a, b);
        assert_ne!(a.interest, c.interest);
    }
}
