//! Directed configuration model multigraphs.
//!
//! A [`Digraph`] is a bijection from tails (out half-edges) to heads (in
//! half-edges). Loops and parallel edges are kept.

mod explore;
mod gw;
mod lazy;

pub use explore::{bfs_neighborhood, explore, tree_excess_event, Neighborhood, TreeExcessReport};
pub use gw::{coupled_exploration, sample_gw_tree, sample_gw_tree_with, CouplingOutcome, MarkedTree, TreeNode};
pub use lazy::{sequential_generate, LazyMatching, Priority};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::degseq::BiDegreeSequence;
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
}

/// Read access to a (possibly partial) matching. Fixed graphs answer from
/// their matching; [`LazyMatching`] samples unrevealed pairs on demand.
pub trait Reveal {
    fn seq(&self) -> &BiDegreeSequence;
    fn tail_owner(&self, tail: usize) -> usize;
    fn head_owner(&self, head: usize) -> usize;
    /// Head matched to `tail`.
    fn head_of(&mut self, tail: usize) -> usize;
    /// Tail matched to `head`.
    fn tail_of(&mut self, head: usize) -> usize;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    seq: BiDegreeSequence,
    matching: Vec<usize>,
    inverse: Vec<usize>,
    tail_owner: Vec<usize>,
    head_owner: Vec<usize>,
}

impl Digraph {
    /// Builds a digraph from a tail -> head permutation.
    pub fn from_matching(seq: BiDegreeSequence, matching: Vec<usize>) -> Result<Self> {
        let m = seq.m();
        if matching.len() != m {
            return Err(Error::LengthMismatch {
                left: matching.len(),
                right: m,
            });
        }
        let mut inverse = vec![usize::MAX; m];
        for (e, &f) in matching.iter().enumerate() {
            if f >= m || inverse[f] != usize::MAX {
                return Err(Error::Parse(format!("matching is not a bijection at tail {e}")));
            }
            inverse[f] = e;
        }
        let tail_owner = seq.tail_owners();
        let head_owner = seq.head_owners();
        Ok(Self {
            seq,
            matching,
            inverse,
            tail_owner,
            head_owner,
        })
    }

    /// Rebuilds a digraph from an edge list, assigning half-edges of each
    /// vertex in order of appearance.
    pub fn from_edges(seq: BiDegreeSequence, edges: &[(usize, usize)]) -> Result<Self> {
        let m = seq.m();
        if edges.len() != m {
            return Err(Error::LengthMismatch {
                left: edges.len(),
                right: m,
            });
        }
        let n = seq.n();
        let mut next_tail: Vec<usize> = (0..n).map(|v| seq.tail_range(v).start).collect();
        let mut next_head: Vec<usize> = (0..n).map(|v| seq.head_range(v).start).collect();
        let mut matching = vec![usize::MAX; m];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parse(format!("edge ({u}, {v}) out of range")));
            }
            if next_tail[u] == seq.tail_range(u).end || next_head[v] == seq.head_range(v).end {
                return Err(Error::Parse(format!("edge ({u}, {v}) exceeds the degree sequence")));
            }
            matching[next_tail[u]] = next_head[v];
            next_tail[u] += 1;
            next_head[v] += 1;
        }
        Self::from_matching(seq, matching)
    }

    pub fn seq(&self) -> &BiDegreeSequence {
        &self.seq
    }

    pub fn n(&self) -> usize {
        self.seq.n()
    }

    pub fn m(&self) -> usize {
        self.seq.m()
    }

    pub fn matching(&self) -> &[usize] {
        &self.matching
    }

    /// Tail matched to head `f`.
    pub fn tail_for_head(&self, f: usize) -> usize {
        self.inverse[f]
    }

    pub fn tail_owners(&self) -> &[usize] {
        &self.tail_owner
    }

    pub fn head_owners(&self) -> &[usize] {
        &self.head_owner
    }

    /// Out-neighbors of `v` with multiplicity, in tail order.
    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.seq
            .tail_range(v)
            .map(move |e| self.head_owner[self.matching[e]])
    }

    /// In-neighbors of `v` with multiplicity, in head order.
    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.seq
            .head_range(v)
            .map(move |f| self.tail_owner[self.inverse[f]])
    }

    /// Edges `(tail vertex, head vertex)` in tail order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.matching
            .iter()
            .enumerate()
            .map(move |(e, &f)| (self.tail_owner[e], self.head_owner[f]))
    }

    /// Multiplicity `m(y, x)` of the edge `y -> x`.
    pub fn multiplicity(&self, y: usize, x: usize) -> usize {
        self.out_neighbors(y).filter(|&w| w == x).count()
    }

    pub fn is_simple(&self) -> bool {
        let mut mark = vec![usize::MAX; self.n()];
        for v in 0..self.n() {
            for w in self.out_neighbors(v) {
                if w == v || mark[w] == v {
                    return false;
                }
                mark[w] = v;
            }
        }
        true
    }
}

impl Reveal for &Digraph {
    fn seq(&self) -> &BiDegreeSequence {
        &self.seq
    }
    fn tail_owner(&self, tail: usize) -> usize {
        self.tail_owner[tail]
    }
    fn head_owner(&self, head: usize) -> usize {
        self.head_owner[head]
    }
    fn head_of(&mut self, tail: usize) -> usize {
        self.matching[tail]
    }
    fn tail_of(&mut self, head: usize) -> usize {
        self.inverse[head]
    }
}

/// Uniform matching by a Fisher–Yates shuffle of the heads.
pub fn sample_dcm(seq: &BiDegreeSequence, seed: u64) -> Digraph {
    let mut rng = seeding::substream(seed, &[tag::GRAPH]);
    let mut heads: Vec<usize> = (0..seq.m()).collect();
    heads.shuffle(&mut rng);
    Digraph::from_matching(seq.clone(), heads).expect("shuffle is a bijection")
}

/// Rejection sampling of a simple realization (uniform over simple digraphs
/// with the given degrees).
pub fn sample_simple_dcm(seq: &BiDegreeSequence, seed: u64, max_tries: usize) -> Result<Digraph> {
    for attempt in 0..max_tries {
        let g = sample_dcm(seq, seeding::derive(seed, &[tag::GRAPH, attempt as u64]));
        if g.is_simple() {
            return Ok(g);
        }
    }
    Err(Error::SimpleUnreachable { tries: max_tries })
}
