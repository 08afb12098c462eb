//! Marked Galton–Watson trees and their coupling with in-neighborhoods.

use std::collections::{HashMap, VecDeque};

use rand::Rng as _;
use serde::Serialize;

use super::{Direction, LazyMatching, Neighborhood, Reveal};
use crate::degseq::BiDegreeSequence;
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    /// Vertex label `l(a)`.
    pub mark: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub first_child: usize,
    pub n_children: usize,
}

/// Rooted tree in BFS order; children of a node are contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkedTree {
    pub nodes: Vec<TreeNode>,
    pub direction: Direction,
    /// Horizon the tree was grown to (nodes at this depth are unexpanded).
    pub depth: usize,
}

impl MarkedTree {
    fn with_root(root: usize, direction: Direction, depth: usize) -> Self {
        Self {
            nodes: vec![TreeNode {
                mark: root,
                parent: None,
                depth: 0,
                first_child: 0,
                n_children: 0,
            }],
            direction,
            depth,
        }
    }

    fn push_child(&mut self, parent: usize, mark: usize) {
        let idx = self.nodes.len();
        let p = &mut self.nodes[parent];
        if p.n_children == 0 {
            p.first_child = idx;
        }
        p.n_children += 1;
        let depth = p.depth + 1;
        self.nodes.push(TreeNode {
            mark,
            parent: Some(parent),
            depth,
            first_child: 0,
            n_children: 0,
        });
    }

    pub fn root_mark(&self) -> usize {
        self.nodes[0].mark
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, a: usize) -> std::ops::Range<usize> {
        let node = &self.nodes[a];
        node.first_child..node.first_child + node.n_children
    }

    /// Indices of nodes at depth exactly `h`.
    pub fn level(&self, h: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.depth == h)
            .map(|(i, _)| i)
    }

    /// Same marks and same parent structure, node by node in BFS order.
    pub fn matches_neighborhood(&self, nb: &Neighborhood) -> bool {
        self.nodes.len() == nb.vertices.len()
            && self
                .nodes
                .iter()
                .zip(nb.vertices.iter().zip(&nb.parents))
                .all(|(a, (&v, &p))| a.mark == v && a.parent == p)
    }
}

/// Marked tree grown to depth `h`.
///
/// In-variant: a node marked `z` gets `d_z^-` children, each marked
/// independently with law `mu_out`. Out-variant swaps in and out degrees.
pub fn sample_gw_tree(
    seq: &BiDegreeSequence,
    root: usize,
    h: usize,
    direction: Direction,
    seed: u64,
    budget: Option<usize>,
) -> Result<MarkedTree> {
    let mut rng = seeding::substream(seed, &[tag::TREE]);
    let owners = match direction {
        Direction::In => seq.tail_owners(),
        Direction::Out => seq.head_owners(),
    };
    sample_gw_tree_with(seq, &owners, root, h, direction, &mut rng, budget)
}

/// As [`sample_gw_tree`], with a caller-owned RNG and a precomputed owner
/// table (`tail_owners` for in-trees, `head_owners` for out-trees) so that
/// marks are drawn by picking a uniform half-edge.
pub fn sample_gw_tree_with(
    seq: &BiDegreeSequence,
    owners: &[usize],
    root: usize,
    h: usize,
    direction: Direction,
    rng: &mut impl rand::Rng,
    budget: Option<usize>,
) -> Result<MarkedTree> {
    let mut tree = MarkedTree::with_root(root, direction, h);
    let m = owners.len();
    let mut a = 0;
    while a < tree.nodes.len() {
        let node = tree.nodes[a];
        if node.depth < h {
            let k = match direction {
                Direction::In => seq.d_in(node.mark),
                Direction::Out => seq.d_out(node.mark),
            };
            for _ in 0..k {
                let mark = owners[rng.random_range(0..m)];
                tree.push_child(a, mark);
            }
            if let Some(b) = budget {
                if tree.nodes.len() > b {
                    return Err(Error::BudgetExceeded { budget: b });
                }
            }
        }
        a += 1;
    }
    Ok(tree)
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingOutcome {
    pub neighborhood: Neighborhood,
    pub tree: MarkedTree,
    pub success: bool,
    /// Pairing step (1-based) at which a proposed mark was already in use.
    pub tau: Option<usize>,
    /// Total pairings performed while exploring the neighborhood.
    pub pairings: usize,
}

/// Grows the in-neighborhood `B_y^-(h)` and the in-tree `T_y^-(h)` from one
/// random stream.
///
/// Each unmatched head is offered a tail drawn uniformly among all `m`
/// tails. The tree accepts the proposal as a new leaf; the graph accepts it
/// if the tail is free and otherwise redraws among free tails. The first
/// proposal whose vertex is already in the tree ends the coupling: the tree
/// is frozen there while the graph exploration runs to completion. The
/// returned matching holds the revealed pairs and can be completed into a
/// full DCM sample.
pub fn coupled_exploration(
    seq: &BiDegreeSequence,
    y: usize,
    h: usize,
    seed: u64,
) -> (CouplingOutcome, LazyMatching) {
    let mut env = LazyMatching::new(seq, seed);
    let m = seq.m();
    let mut tree = MarkedTree::with_root(y, Direction::In, h);
    let mut coupled = true;
    let mut tau = None;
    let mut step = 0usize;

    let mut index: HashMap<usize, usize> = HashMap::from([(y, 0)]);
    let mut vertices = vec![y];
    let mut parents = vec![None];
    let mut dist = vec![0usize];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        if dist[i] >= h {
            continue;
        }
        let u = vertices[i];
        for f in seq.head_range(u) {
            step += 1;
            let proposal = env.rng_mut().random_range(0..m);
            let mark = env.tail_owner(proposal);
            if coupled {
                if index.contains_key(&mark) {
                    coupled = false;
                    tau = Some(step);
                } else {
                    // While coupled, tree node indices equal vertex indices.
                    tree.push_child(i, mark);
                }
            }
            let e = if env.is_tail_matched(proposal) {
                env.tail_of(f)
            } else {
                env.pair(proposal, f);
                proposal
            };
            edges.push((e, f));
            let w = env.tail_owner(e);
            if !index.contains_key(&w) {
                index.insert(w, vertices.len());
                vertices.push(w);
                parents.push(Some(i));
                dist.push(dist[i] + 1);
                queue.push_back(vertices.len() - 1);
            }
        }
    }

    let boundary = vertices
        .iter()
        .zip(&dist)
        .filter(|(_, &d)| d == h)
        .map(|(&v, _)| v)
        .collect();
    let tree_excess = 1 + edges.len() - vertices.len();
    let neighborhood = Neighborhood {
        root: y,
        direction: Direction::In,
        depth: h,
        vertices,
        parents,
        dist,
        edges,
        boundary,
        tree_excess,
    };
    (
        CouplingOutcome {
            neighborhood,
            tree,
            success: coupled,
            tau,
            pairings: step,
        },
        env,
    )
}
