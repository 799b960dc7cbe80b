use std::cmp::Reverse;
use std::collections::{BTreeSet, VecDeque};

/// Bounded FIFO of `(confidence, seq)` pairs with an ordered view for
/// rank queries. Ranks are by descending confidence, then ascending `seq`.
#[derive(Debug, Clone)]
pub struct BoundaryWindow {
    capacity: usize,
    fifo: VecDeque<(f64, u64)>,
    ranked: BTreeSet<(Reverse<u64>, u64)>,
}

// Non-negative finite floats order like their bit patterns.
fn key(confidence: f64) -> u64 {
    debug_assert!(confidence >= 0.0);
    (confidence + 0.0).to_bits()
}

impl BoundaryWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        Self {
            capacity,
            fifo: VecDeque::with_capacity(capacity),
            ranked: BTreeSet::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    /// Appends an entry, evicting the oldest when full. `confidence` is
    /// clamped to `[0, 1]`.
    pub fn push(&mut self, confidence: f64, seq: u64) {
        let c = confidence.clamp(0.0, 1.0);
        if self.fifo.len() == self.capacity {
            if let Some((old, old_seq)) = self.fifo.pop_front() {
                self.ranked.remove(&(Reverse(key(old)), old_seq));
            }
        }
        self.fifo.push_back((c, seq));
        self.ranked.insert((Reverse(key(c)), seq));
    }

    /// The `n`-th highest confidence (1-based), or the highest when fewer
    /// than `n` entries are held. `None` for an empty window or `n == 0`.
    pub fn nth_highest(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        let idx = if n > self.ranked.len() { 0 } else { n - 1 };
        self.ranked.iter().nth(idx).map(|(Reverse(bits), _)| f64::from_bits(*bits))
    }

    /// Entries in arrival order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.fifo.iter().copied()
    }
}
