//! Every way of placing `k` center copies on `|S|` representing points.
//!
//! A composition is a count vector `p` with `sum(p) = k` and each entry at most
//! a per-slot cap. The stream order reads each composition as the sorted
//! multiset of slot indices it selects (`(1,0,1)` is `{0, 2}`) and lists those
//! multisets in increasing lexicographic order. On the count vectors this is
//! decreasing lexicographic order: `(2,0,0), (1,1,0), (1,0,1), (0,2,0), ...`.
//!
//! Stream positions are ranks; [`unrank`] jumps directly to any position so
//! contiguous rank ranges can be generated independently.

use serde::{Deserialize, Serialize};

/// Center multiset over the representing set: `counts[i]` copies of `s_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition(pub Vec<usize>);

impl Composition {
    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Slot indices with multiplicity, nondecreasing.
    pub fn as_multiset(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
            .collect()
    }
}

/// Number of compositions of `k` into `size` parts each in `0..=per_slot_cap`.
///
/// Saturates at `u128::MAX`.
pub fn count_compositions(size: usize, k: usize, per_slot_cap: usize) -> u128 {
    CountTable::new(size, k, per_slot_cap).total()
}

/// `ways[pos][rem]`: fillings of slots `pos..size` summing to `rem`.
struct CountTable {
    size: usize,
    k: usize,
    cap: usize,
    ways: Vec<u128>,
}

impl CountTable {
    fn new(size: usize, k: usize, cap: usize) -> Self {
        let width = k + 1;
        let mut ways = vec![0u128; (size + 1) * width];
        ways[size * width] = 1;
        for pos in (0..size).rev() {
            for rem in 0..=k {
                let mut acc = 0u128;
                for v in 0..=rem.min(cap) {
                    acc = acc.saturating_add(ways[(pos + 1) * width + rem - v]);
                }
                ways[pos * width + rem] = acc;
            }
        }
        CountTable { size, k, cap, ways }
    }

    fn get(&self, pos: usize, rem: usize) -> u128 {
        self.ways[pos * (self.k + 1) + rem]
    }

    fn total(&self) -> u128 {
        self.get(0, self.k)
    }
}

/// The composition at position `rank` of the stream, or `None` past the end.
pub fn unrank(size: usize, k: usize, per_slot_cap: usize, rank: u128) -> Option<Composition> {
    let table = CountTable::new(size, k, per_slot_cap);
    unrank_with(&table, rank)
}

fn unrank_with(table: &CountTable, mut rank: u128) -> Option<Composition> {
    if rank >= table.total() {
        return None;
    }
    let mut counts = vec![0; table.size];
    let mut rem = table.k;
    for pos in 0..table.size {
        // larger counts come first
        for v in (0..=rem.min(table.cap)).rev() {
            let block = table.get(pos + 1, rem - v);
            if rank < block {
                counts[pos] = v;
                rem -= v;
                break;
            }
            rank -= block;
        }
    }
    debug_assert_eq!(rem, 0);
    Some(Composition(counts))
}

/// Streaming generator over compositions, in constant memory per step.
#[derive(Debug, Clone)]
pub struct Compositions {
    cap: usize,
    current: Option<Vec<usize>>,
    remaining: u128,
}

impl Compositions {
    /// The full stream.
    pub fn new(size: usize, k: usize, per_slot_cap: usize) -> Self {
        let total = count_compositions(size, k, per_slot_cap);
        Self::range(size, k, per_slot_cap, 0, total)
    }

    /// Positions `start..end` of the stream.
    pub fn range(size: usize, k: usize, per_slot_cap: usize, start: u128, end: u128) -> Self {
        let table = CountTable::new(size, k, per_slot_cap);
        let end = end.min(table.total());
        let current = if start < end {
            unrank_with(&table, start).map(|c| c.0)
        } else {
            None
        };
        Compositions {
            cap: per_slot_cap,
            current,
            remaining: end.saturating_sub(start),
        }
    }

    fn advance(&mut self) {
        let Some(counts) = self.current.as_mut() else {
            return;
        };
        let size = counts.len();
        // rightmost slot that can give one unit to its suffix
        let mut suffix_sum = counts[size - 1];
        for i in (0..size - 1).rev() {
            let room = self.cap * (size - i - 1);
            if counts[i] > 0 && suffix_sum < room {
                counts[i] -= 1;
                let mut rem = suffix_sum + 1;
                for c in counts.iter_mut().skip(i + 1) {
                    *c = rem.min(self.cap);
                    rem -= *c;
                }
                return;
            }
            suffix_sum += counts[i];
        }
        self.current = None;
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        if self.remaining == 0 {
            return None;
        }
        let out = Composition(self.current.clone()?);
        self.remaining -= 1;
        if self.remaining > 0 {
            self.advance();
        }
        Some(out)
    }
}

pub fn enumerate_compositions(size: usize, k: usize, per_slot_cap: usize) -> Compositions {
    Compositions::new(size, k, per_slot_cap)
}

/// Splits `0..total` into at most `parts` contiguous rank ranges of nearly
/// equal length.
pub fn chunk_ranges(total: u128, parts: usize) -> Vec<(u128, u128)> {
    let parts = (parts.max(1) as u128).min(total.max(1));
    let base = total / parts;
    let extra = total % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for p in 0..parts {
        let len = base + u128::from(p < extra);
        out.push((start, start + len));
        start += len;
    }
    out
}
