//! Subset enumeration and a bitmask view of neighbourhoods for the
//! dedicated-node test.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::graph::{Graph, NodeId};

/// Default upper bound on the size of any exhaustively enumerated set.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Visit every `k`-combination of `0..n` in lexicographic order.
pub fn for_each_combination<B>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if k > n {
        return ControlFlow::Continue(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        // advance to the next combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                break;
            }
        }
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Visit every nonempty subset of `0..n`, by size ascending and then
/// lexicographically.
pub fn for_each_subset_by_size<B>(
    n: usize,
    mut f: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    for k in 1..=n {
        for_each_combination(n, k, &mut f)?;
    }
    ControlFlow::Continue(())
}

/// Neighbourhood rows of a graph packed as bit masks over its vertices.
pub(crate) struct NeighborMasks {
    words: usize,
    /// vertex id -> bit position
    bit_of: BTreeMap<NodeId, usize>,
    rows: BTreeMap<NodeId, Vec<u64>>,
}

impl NeighborMasks {
    pub(crate) fn new(g: &Graph) -> NeighborMasks {
        let vertices = g.vertices();
        let words = vertices.len().div_ceil(64).max(1);
        let bit_of: BTreeMap<NodeId, usize> =
            vertices.iter().enumerate().map(|(b, &v)| (v, b)).collect();
        let rows = g
            .states()
            .iter()
            .map(|&s| {
                let mut row = vec![0u64; words];
                for v in g.neighbors(s).expect("state") {
                    let b = bit_of[v];
                    row[b / 64] |= 1 << (b % 64);
                }
                (s, row)
            })
            .collect();
        NeighborMasks { words, bit_of, rows }
    }

    pub(crate) fn scratch(&self) -> Scratch {
        Scratch {
            once: vec![0; self.words],
            twice: vec![0; self.words],
            members: vec![0; self.words],
        }
    }

    /// Resolve a list of states to their rows once, for repeated queries.
    pub(crate) fn rows_for<'a>(&'a self, states: &[NodeId]) -> Vec<(&'a [u64], usize)> {
        states
            .iter()
            .map(|s| (self.rows[s].as_slice(), self.bit_of[s]))
            .collect()
    }

    /// True when some vertex outside `alpha` is adjacent to exactly one member.
    pub(crate) fn has_dedicated<'r>(
        &self,
        alpha: impl IntoIterator<Item = (&'r [u64], usize)>,
        scratch: &mut Scratch,
    ) -> bool {
        scratch.once.fill(0);
        scratch.twice.fill(0);
        scratch.members.fill(0);
        for (row, bit) in alpha {
            for w in 0..self.words {
                scratch.twice[w] |= scratch.once[w] & row[w];
                scratch.once[w] |= row[w];
            }
            scratch.members[bit / 64] |= 1 << (bit % 64);
        }
        (0..self.words)
            .any(|w| scratch.once[w] & !scratch.twice[w] & !scratch.members[w] != 0)
    }
}

pub(crate) struct Scratch {
    once: Vec<u64>,
    twice: Vec<u64>,
    members: Vec<u64>,
}
