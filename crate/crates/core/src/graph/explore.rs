use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::{Digraph, Direction, Reveal};
use crate::error::{Error, Result};

/// Ball of radius `depth` around `root` along out- or in-edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neighborhood {
    pub root: usize,
    pub direction: Direction,
    pub depth: usize,
    /// Vertices in BFS discovery order; `vertices[0] == root`.
    pub vertices: Vec<usize>,
    /// Index into `vertices` of the first-arrival parent.
    pub parents: Vec<Option<usize>>,
    pub dist: Vec<usize>,
    /// Revealed `(tail, head)` pairs: all edges leaving (out) or entering
    /// (in) a vertex at distance `< depth`.
    pub edges: Vec<(usize, usize)>,
    /// Vertices at distance exactly `depth`.
    pub boundary: Vec<usize>,
    pub tree_excess: usize,
}

impl Neighborhood {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }
}

/// BFS exploration on any matching source, lowest half-edge first within a
/// vertex. With a [`LazyMatching`](super::LazyMatching) this is the BFS
/// sequential generation; the number of collisions equals the returned
/// tree-excess.
pub fn explore<R: Reveal>(
    env: &mut R,
    root: usize,
    depth: usize,
    direction: Direction,
    budget: Option<usize>,
) -> Result<Neighborhood> {
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut vertices = vec![root];
    let mut parents = vec![None];
    let mut dist = vec![0usize];
    let mut edges = Vec::new();
    index.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if dist[i] >= depth {
            continue;
        }
        let u = vertices[i];
        let range = match direction {
            Direction::Out => env.seq().tail_range(u),
            Direction::In => env.seq().head_range(u),
        };
        for half in range {
            let (pair, w) = match direction {
                Direction::Out => {
                    let f = env.head_of(half);
                    ((half, f), env.head_owner(f))
                }
                Direction::In => {
                    let e = env.tail_of(half);
                    ((e, half), env.tail_owner(e))
                }
            };
            edges.push(pair);
            if !index.contains_key(&w) {
                index.insert(w, vertices.len());
                vertices.push(w);
                parents.push(Some(i));
                dist.push(dist[i] + 1);
                queue.push_back(vertices.len() - 1);
                if let Some(b) = budget {
                    if vertices.len() > b {
                        return Err(Error::BudgetExceeded { budget: b });
                    }
                }
            }
        }
    }
    let boundary = vertices
        .iter()
        .zip(&dist)
        .filter(|(_, &d)| d == depth)
        .map(|(&v, _)| v)
        .collect();
    let tree_excess = 1 + edges.len() - vertices.len();
    Ok(Neighborhood {
        root,
        direction,
        depth,
        vertices,
        parents,
        dist,
        edges,
        boundary,
        tree_excess,
    })
}

pub fn bfs_neighborhood(g: &Digraph, v: usize, depth: usize, direction: Direction) -> Neighborhood {
    explore(&mut &*g, v, depth, direction, None).expect("no budget")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeExcessReport {
    pub depth: usize,
    pub max_tx: usize,
    /// Vertices whose out-ball has tree-excess above 1.
    pub violating: Vec<usize>,
    /// Number of vertices whose out-ball is not a tree.
    pub positive: usize,
}

impl TreeExcessReport {
    /// Every out-ball has tree-excess at most 1.
    pub fn holds(&self) -> bool {
        self.max_tx <= 1
    }
}

pub fn tree_excess_event(g: &Digraph, depth: usize) -> TreeExcessReport {
    let tx: Vec<usize> = (0..g.n())
        .into_par_iter()
        .map(|x| bfs_neighborhood(g, x, depth, Direction::Out).tree_excess)
        .collect();
    TreeExcessReport {
        depth,
        max_tx: tx.iter().copied().max().unwrap_or(0),
        violating: (0..g.n()).filter(|&x| tx[x] > 1).collect(),
        positive: tx.iter().filter(|&&t| t > 0).count(),
    }
}
