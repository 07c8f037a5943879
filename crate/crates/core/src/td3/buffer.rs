use rand::Rng;

use crate::env::{ACTION_DIM, STATE_DIM};

/// `(s, a, r, s', d)` in normalised units. `id` is the insertion index,
/// used to check that samples only ever come from stored transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: [f64; STATE_DIM],
    pub action: [f64; ACTION_DIM],
    pub reward: f64,
    pub next_state: [f64; STATE_DIM],
    pub done: bool,
    pub id: u64,
}

/// Fixed-capacity FIFO ring.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    data: Vec<Transition>,
    cursor: usize,
    next_id: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            data: Vec::with_capacity(capacity.min(1 << 16)),
            cursor: 0,
            next_id: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Total insertions so far, including overwritten ones.
    pub fn inserted(&self) -> u64 {
        self.next_id
    }

    /// Stores a transition (its `id` is overwritten) and returns the id.
    pub fn push(&mut self, mut t: Transition) -> u64 {
        t.id = self.next_id;
        self.next_id += 1;
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
        t.id
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.data.iter()
    }

    /// Uniform sample with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Transition> {
        if self.data.is_empty() {
            return Vec::new();
        }
        (0..n)
            .map(|_| self.data[rng.random_range(0..self.data.len())])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;

    fn tr(r: f64) -> Transition {
        Transition {
            state: [0.0; STATE_DIM],
            action: [0.0; ACTION_DIM],
            reward: r,
            next_state: [0.0; STATE_DIM],
            done: false,
            id: 0,
        }
    }

    #[test]
    fn fifo_overwrite_at_capacity() {
        let mut b = ReplayBuffer::new(5);
        for k in 0..12 {
            b.push(tr(k as f64));
            assert!(b.len() <= 5);
        }
        let mut ids: Vec<u64> = b.iter().map(|t| t.id).collect();
        ids.sort();
        assert_eq!(ids, vec![7, 8, 9, 10, 11]);
        assert!(b.iter().all(|t| t.reward == t.id as f64));
    }

    #[test]
    fn samples_come_from_stored_transitions() {
        let mut b = ReplayBuffer::new(50);
        for k in 0..80 {
            b.push(tr(k as f64));
        }
        let stored: Vec<u64> = b.iter().map(|t| t.id).collect();
        let mut rng = rng_for(0, "s");
        for t in b.sample(500, &mut rng) {
            assert!(stored.contains(&t.id));
            assert!(t.id >= 30);
        }
        assert!(ReplayBuffer::new(3).sample(4, &mut rng).is_empty());
    }
}
