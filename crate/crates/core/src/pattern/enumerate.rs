//! Best-first enumeration of patterns in ascending accumulated weight.
//!
//! Every nonempty pattern has exactly one parent: drop its largest rank when
//! that rank directly follows the previous one (or is rank 1 on its own),
//! otherwise decrement the largest rank. Children are therefore "append the
//! next rank" and "increment the largest rank". With nondecreasing weights a
//! child never precedes its parent, so popping a min-heap seeded with the
//! empty pattern yields patterns in sorted order while the frontier grows by
//! at most one entry per emission.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{sum_weights, tie_order, RankPattern, Schedule, WeightFunction, MAX_N};
use crate::error::{Error, Result};

/// How equal accumulated weights are ordered.
#[derive(Debug, Clone)]
pub enum TieRule {
    /// Smaller support, then lexicographic rank sets.
    Ranks,
    /// Smaller support, then lexicographic sets of positions, where
    /// `position_of[r - 1]` is the position holding rank `r`. Requires that
    /// equal weights of adjacent ranks come with ascending positions.
    Positions(Vec<u8>),
}

struct Node {
    weight: f64,
    ranks: Vec<u8>,
    /// Sorted positions, only for [`TieRule::Positions`].
    positions: Option<Vec<u8>>,
}

impl Node {
    fn key_cmp(&self, other: &Node) -> Ordering {
        self.weight.total_cmp(&other.weight).then_with(|| match (&self.positions, &other.positions) {
            (Some(a), Some(b)) => tie_order(a, b),
            _ => tie_order(&self.ranks, &other.ranks),
        })
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Streams all `2^n` patterns in nondecreasing accumulated weight.
pub struct PatternEnumerator<'g> {
    gamma: Cow<'g, [f64]>,
    tie: TieRule,
    heap: BinaryHeap<Node>,
}

impl<'g> PatternEnumerator<'g> {
    pub fn new(gamma: impl Into<Cow<'g, [f64]>>, tie: TieRule) -> Self {
        let gamma = gamma.into();
        debug_assert!(gamma.windows(2).all(|w| w[0] <= w[1]));
        assert!(gamma.len() <= MAX_N);
        if let TieRule::Positions(p) = &tie {
            assert_eq!(p.len(), gamma.len());
        }
        let mut e = PatternEnumerator {
            gamma,
            tie,
            heap: BinaryHeap::new(),
        };
        e.push(Vec::new());
        e
    }

    pub fn for_weights(wf: &'g WeightFunction) -> Self {
        Self::new(wf.gamma(), TieRule::Ranks)
    }

    fn push(&mut self, ranks: Vec<u8>) {
        let weight = sum_weights(&ranks, &self.gamma);
        let positions = match &self.tie {
            TieRule::Ranks => None,
            TieRule::Positions(pos_of) => {
                let mut p: Vec<u8> = ranks.iter().map(|&r| pos_of[r as usize - 1]).collect();
                p.sort_unstable();
                Some(p)
            }
        };
        self.heap.push(Node {
            weight,
            ranks,
            positions,
        });
    }

    /// Number of patterns waiting in the frontier.
    pub fn frontier_len(&self) -> usize {
        self.heap.len()
    }

    /// Next pattern and its accumulated weight.
    pub fn next_weighted(&mut self) -> Option<(RankPattern, f64)> {
        let node = self.heap.pop()?;
        let n = self.gamma.len() as u8;
        let last = node.ranks.last().copied().unwrap_or(0);
        if last < n {
            let mut append = node.ranks.clone();
            append.push(last + 1);
            self.push(append);
            if last > 0 {
                let mut bump = node.ranks.clone();
                *bump.last_mut().unwrap() += 1;
                self.push(bump);
            }
        }
        Some((RankPattern::from_sorted_unchecked(node.ranks), node.weight))
    }
}

impl Iterator for PatternEnumerator<'_> {
    type Item = RankPattern;

    fn next(&mut self) -> Option<RankPattern> {
        self.next_weighted().map(|(p, _)| p)
    }
}

/// The first `count` patterns for `wf` over block length `n`.
pub fn enumerate_schedule(wf: &WeightFunction, n: usize, count: usize) -> Result<Schedule> {
    if wf.n() != n {
        return Err(Error::invalid(format!(
            "weight function has length {}, expected {n}",
            wf.n()
        )));
    }
    if n == 0 || n > MAX_N {
        return Err(Error::invalid(format!("n={n} outside 1..={MAX_N}")));
    }
    let total = if n >= 64 { u64::MAX } else { 1u64 << n };
    if count == 0 || count as u64 > total {
        return Err(Error::invalid(format!(
            "count {count} outside 1..=2^{n}"
        )));
    }
    let patterns: Vec<RankPattern> = PatternEnumerator::for_weights(wf).take(count).collect();
    Schedule::new(n, wf.kind().label(), patterns)
}
