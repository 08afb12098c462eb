use rand::Rng as _;

use super::{Digraph, Reveal};
use crate::degseq::BiDegreeSequence;
use crate::seeding::{self, tag, Rng};

const UNMATCHED: usize = usize::MAX;

/// A partial matching revealed one pair at a time.
///
/// Asking for the partner of an unmatched half-edge pairs it with a
/// uniformly random unmatched half-edge of the other kind, so any reveal
/// order produces a uniform bijection once [`complete`](Self::complete)d.
#[derive(Debug, Clone)]
pub struct LazyMatching {
    seq: BiDegreeSequence,
    tail_owner: Vec<usize>,
    head_owner: Vec<usize>,
    tail_to_head: Vec<usize>,
    head_to_tail: Vec<usize>,
    free_heads: Vec<usize>,
    free_head_pos: Vec<usize>,
    free_tails: Vec<usize>,
    free_tail_pos: Vec<usize>,
    rng: Rng,
}

impl LazyMatching {
    pub fn new(seq: &BiDegreeSequence, seed: u64) -> Self {
        let m = seq.m();
        Self {
            tail_owner: seq.tail_owners(),
            head_owner: seq.head_owners(),
            seq: seq.clone(),
            tail_to_head: vec![UNMATCHED; m],
            head_to_tail: vec![UNMATCHED; m],
            free_heads: (0..m).collect(),
            free_head_pos: (0..m).collect(),
            free_tails: (0..m).collect(),
            free_tail_pos: (0..m).collect(),
            rng: seeding::substream(seed, &[tag::GRAPH, 0x1a2]),
        }
    }

    pub fn rng_mut(&mut self) -> &mut Rng {
        &mut self.rng
    }

    pub fn matched(&self) -> usize {
        self.seq.m() - self.free_tails.len()
    }

    pub fn is_tail_matched(&self, e: usize) -> bool {
        self.tail_to_head[e] != UNMATCHED
    }

    pub fn is_head_matched(&self, f: usize) -> bool {
        self.head_to_tail[f] != UNMATCHED
    }

    /// Pairs two unmatched half-edges.
    pub fn pair(&mut self, e: usize, f: usize) {
        debug_assert!(!self.is_tail_matched(e) && !self.is_head_matched(f));
        remove(&mut self.free_tails, &mut self.free_tail_pos, e);
        remove(&mut self.free_heads, &mut self.free_head_pos, f);
        self.tail_to_head[e] = f;
        self.head_to_tail[f] = e;
    }

    /// Matches the remaining tails in index order and returns the graph.
    pub fn complete(mut self) -> Digraph {
        for e in 0..self.seq.m() {
            self.head_of(e);
        }
        Digraph::from_matching(self.seq, self.tail_to_head).expect("complete matching")
    }
}

fn remove(list: &mut Vec<usize>, pos: &mut [usize], x: usize) {
    let i = pos[x];
    list.swap_remove(i);
    if i < list.len() {
        pos[list[i]] = i;
    }
    pos[x] = UNMATCHED;
}

impl Reveal for LazyMatching {
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
        if self.tail_to_head[tail] == UNMATCHED {
            let f = self.free_heads[self.rng.random_range(0..self.free_heads.len())];
            self.pair(tail, f);
        }
        self.tail_to_head[tail]
    }
    fn tail_of(&mut self, head: usize) -> usize {
        if self.head_to_tail[head] == UNMATCHED {
            let e = self.free_tails[self.rng.random_range(0..self.free_tails.len())];
            self.pair(e, head);
        }
        self.head_to_tail[head]
    }
}

/// Order in which tails are matched during sequential generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Priority {
    /// Tails in index order.
    Index,
    /// Breadth-first from `root` along out-edges; when the explored part is
    /// exhausted, restart from the lowest vertex with unmatched tails.
    Bfs { root: usize },
}

/// Generates a DCM by matching one tail at a time with a uniformly random
/// unmatched head. Returns the graph and the number of collisions: steps
/// whose head belongs to a vertex exposed in an earlier step (for
/// [`Priority::Bfs`] the current root counts as exposed).
pub fn sequential_generate(seq: &BiDegreeSequence, priority: Priority, seed: u64) -> (Digraph, usize) {
    let mut env = LazyMatching::new(seq, seed);
    let n = seq.n();
    let mut exposed = vec![false; n];
    let mut collisions = 0usize;
    let mut step = |env: &mut LazyMatching, exposed: &mut [bool], e: usize| -> usize {
        let f = env.head_of(e);
        let w = env.head_owner[f];
        if exposed[w] {
            collisions += 1;
        }
        exposed[env.tail_owner[e]] = true;
        exposed[w] = true;
        w
    };
    match priority {
        Priority::Index => {
            for e in 0..seq.m() {
                step(&mut env, &mut exposed, e);
            }
        }
        Priority::Bfs { root } => {
            let mut queue = std::collections::VecDeque::new();
            let mut queued = vec![false; n];
            let mut next_root = Some(root);
            let mut scan = 0usize;
            while let Some(r) = next_root.take() {
                exposed[r] = true;
                queued[r] = true;
                queue.push_back(r);
                while let Some(u) = queue.pop_front() {
                    for e in seq.tail_range(u) {
                        let w = step(&mut env, &mut exposed, e);
                        if !queued[w] {
                            queued[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
                while scan < n && (queued[scan] || seq.d_out(scan) == 0) {
                    scan += 1;
                }
                if scan < n {
                    next_root = Some(scan);
                }
            }
        }
    }
    (env.complete(), collisions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_vertex_two_loops_collides_once() {
        let s = BiDegreeSequence::new(&[(2, 2)]).unwrap();
        let (g, c) = sequential_generate(&s, Priority::Index, 3);
        assert_eq!(c, 1);
        assert_eq!(g.multiplicity(0, 0), 2);
        // BFS from the vertex: both pairings return to the exposed root.
        let (_, c) = sequential_generate(&s, Priority::Bfs { root: 0 }, 3);
        assert_eq!(c, 2);
    }

    #[test]
    fn lazy_reveal_is_consistent() {
        let s = crate::degseq::gen_powerlaw_seq(300, 2.5, 2, 8).unwrap();
        let mut env = LazyMatching::new(&s, 1);
        let f = env.head_of(5);
        assert_eq!(env.tail_of(f), 5);
        assert_eq!(env.head_of(5), f);
        assert_eq!(env.matched(), 1);
        let g = env.complete();
        assert_eq!(g.matching()[5], f);
    }

    #[test]
    fn bfs_generation_covers_all_tails() {
        let s = crate::degseq::gen_powerlaw_seq(400, 2.5, 2, 2).unwrap();
        let (g, _) = sequential_generate(&s, Priority::Bfs { root: 17 }, 4);
        for v in 0..g.n() {
            assert_eq!(g.out_neighbors(v).count(), 2);
        }
    }
}
