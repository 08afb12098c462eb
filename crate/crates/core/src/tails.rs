//! Extremes and tails of the stationary ranking.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degseq::{classify_tail, TailCheck, TailClassification};
use crate::error::{invalid, Error, Result};
use crate::graph::{Digraph, Reveal};
use crate::measure::EmpiricalMeasure;
use crate::walk::DistVector;

pub use crate::limits::psi_measure;

/// Relative slack when comparing path weights against `w_min`.
const WEIGHT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    weight: f64,
    tail: usize,
    depth: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    /// Max-heap on weight, then on the lowest tail index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| other.tail.cmp(&self.tail))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// First arrival of a vertex during a weighted expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub vertex: usize,
    /// Index of the parent arrival; `None` for the root.
    pub parent: Option<usize>,
    /// Cumulative weight of the tree path reaching the vertex.
    pub weight: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub root: usize,
    pub w_min: f64,
    /// Revealed `(tail, head)` pairs in expansion order.
    pub pairs: Vec<(usize, usize)>,
    /// Spanning tree of first arrivals; `tree[0]` is the root.
    pub tree: Vec<Arrival>,
}

impl Expansion {
    /// Number of revealed edges.
    pub fn kappa(&self) -> usize {
        self.pairs.len()
    }
}

/// Reveals out-paths from `root` with cumulative weight at least `w_min`,
/// heaviest unmatched tail first (ties to the lowest tail index).
///
/// A tail `e` of a reached vertex `v` has weight `w(v) / d_v^+`, where
/// `w(v)` is the weight of the tree path reaching `v` (`w(root) = 1`).
/// Revealing `e` adds an edge; its head extends the tree only if the head's
/// vertex was not reached before. With a [`LazyMatching`] source the graph is
/// generated along the way.
///
/// [`LazyMatching`]: crate::graph::LazyMatching
pub fn weighted_expand<R: Reveal>(
    env: &mut R,
    root: usize,
    w_min: f64,
    max_depth: Option<usize>,
    budget: Option<usize>,
) -> Result<Expansion> {
    if !(w_min > 0.0 && w_min <= 1.0) {
        return Err(invalid("w_min", format!("must lie in (0, 1], got {w_min}")));
    }
    let cut = w_min * (1.0 - WEIGHT_RTOL);
    let mut tree = vec![Arrival {
        vertex: root,
        parent: None,
        weight: 1.0,
        depth: 0,
    }];
    let mut reached: HashMap<usize, usize> = HashMap::from([(root, 0)]);
    let mut heap = BinaryHeap::new();
    let push_tails = |heap: &mut BinaryHeap<Frontier>, env: &R, arrival: &Arrival| {
        if max_depth.is_some_and(|d| arrival.depth >= d) {
            return;
        }
        let range = env.seq().tail_range(arrival.vertex);
        let weight = arrival.weight / range.len() as f64;
        if weight < cut {
            return;
        }
        for tail in range {
            heap.push(Frontier {
                weight,
                tail,
                depth: arrival.depth + 1,
            });
        }
    };
    push_tails(&mut heap, env, &tree[0]);
    let mut pairs = Vec::new();
    while let Some(top) = heap.pop() {
        let head = env.head_of(top.tail);
        pairs.push((top.tail, head));
        if let Some(b) = budget {
            if pairs.len() > b {
                return Err(Error::BudgetExceeded { budget: b });
            }
        }
        let w = env.head_owner(head);
        if !reached.contains_key(&w) {
            let parent = reached[&env.tail_owner(top.tail)];
            let arrival = Arrival {
                vertex: w,
                parent: Some(parent),
                weight: top.weight,
                depth: top.depth,
            };
            reached.insert(w, tree.len());
            tree.push(arrival);
            push_tails(&mut heap, env, &arrival);
        }
    }
    assert!(
        pairs.len() as f64 <= 2.0 / w_min,
        "expansion revealed {} edges, above 2 / w_min",
        pairs.len()
    );
    Ok(Expansion {
        root,
        w_min,
        pairs,
        tree,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub a: f64,
    /// In-degree threshold defining the roots (`n^a` unless overridden).
    pub threshold: f64,
    /// Vertices with in-degree above the threshold, ascending.
    pub roots: Vec<usize>,
    /// Union of the roots' revealed pairs, sorted by tail.
    pub matched_pairs: Vec<(usize, usize)>,
    /// Owners of the matched half-edges together with the roots, ascending.
    pub touched_vertices: Vec<usize>,
    /// Per-root expansions, in root order.
    pub expansions: Vec<Expansion>,
}

impl Skeleton {
    /// `sum_z 2 d_z^- / threshold`, the summed per-root edge bound.
    pub fn edge_bound(&self, g: &Digraph) -> f64 {
        self.roots
            .iter()
            .map(|&z| 2.0 * g.seq().d_in(z) as f64 / self.threshold)
            .sum()
    }

    /// CSV rows `root,tail,head` in root order, then expansion order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.expansions
            .iter()
            .flat_map(|x| x.pairs.iter().map(move |&(e, f)| (x.root, e, f)))
    }
}

/// Expands every vertex with `d_z^- > n^a` (or the override threshold) with
/// `w_min = threshold / d_z^-` and no depth limit.
pub fn build_skeleton(
    g: &Digraph,
    a: f64,
    threshold: Option<f64>,
    budget: Option<usize>,
) -> Result<Skeleton> {
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid("a", format!("must lie in (0, 1), got {a}")));
    }
    let threshold = threshold.unwrap_or((g.n() as f64).powf(a));
    if !(threshold > 0.0) {
        return Err(invalid("threshold", format!("must be > 0, got {threshold}")));
    }
    let seq = g.seq();
    let roots: Vec<usize> = (0..g.n())
        .filter(|&z| seq.d_in(z) as f64 > threshold)
        .collect();
    let expansions = roots
        .par_iter()
        .map(|&z| weighted_expand(&mut &*g, z, threshold / seq.d_in(z) as f64, None, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut matched_pairs: Vec<(usize, usize)> =
        expansions.iter().flat_map(|x| x.pairs.iter().copied()).collect();
    matched_pairs.sort_unstable();
    matched_pairs.dedup();
    let mut touched: Vec<usize> = matched_pairs
        .iter()
        .flat_map(|&(e, f)| [g.tail_owners()[e], g.head_owners()[f]])
        .chain(roots.iter().copied())
        .collect();
    touched.sort_unstable();
    touched.dedup();
    let skeleton = Skeleton {
        a,
        threshold,
        roots,
        matched_pairs,
        touched_vertices: touched,
        expansions,
    };
    assert!(
        skeleton.matched_pairs.len() as f64 <= skeleton.edge_bound(g) * (1.0 + 1e-12),
        "skeleton exceeds its edge bound"
    );
    Ok(skeleton)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeReport {
    pub pi_max: f64,
    pub argmax: usize,
    /// Several vertices attain `pi_max` exactly.
    pub argmax_tie: bool,
    pub delta_minus: usize,
    pub delta_argmax: usize,
    pub delta_tie: bool,
    /// `pi_max / (max_in / m)`.
    pub ratio_lower: f64,
    /// `pi_max / (log n * max_in / m)`.
    pub ratio_upper: f64,
    pub argmax_coincide: bool,
    /// `ratio_lower >= 0.9`.
    pub lower_flag: bool,
    /// `ratio_upper <= 30`.
    pub upper_flag: bool,
}

pub fn extreme_report(g: &Digraph, pi: &DistVector) -> ExtremeReport {
    let seq = g.seq();
    let (argmax, pi_max) = pi.max();
    let argmax_tie = pi.probs().iter().filter(|&&p| p == pi_max).count() > 1;
    let (delta_argmax, delta_tie) = seq.argmax_in();
    let delta_minus = seq.max_in();
    let scale = delta_minus as f64 / seq.m() as f64;
    let ratio_lower = pi_max / scale;
    let log_n = (g.n() as f64).ln();
    let ratio_upper = if log_n > 0.0 {
        ratio_lower / log_n
    } else {
        f64::INFINITY
    };
    ExtremeReport {
        pi_max,
        argmax,
        argmax_tie,
        delta_minus,
        delta_argmax,
        delta_tie,
        ratio_lower,
        ratio_upper,
        argmax_coincide: argmax == delta_argmax,
        lower_flag: ratio_lower >= 0.9,
        upper_flag: pi_max <= 30.0 * log_n * scale,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub a: f64,
    pub tail_phi: f64,
    pub tail_psi: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass_phi: bool,
    pub pass_psi: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailVerdict {
    /// Grid rows followed by the cutoff row.
    pub rows: Vec<VerdictRow>,
    pub phi: TailClassification,
    pub psi: TailClassification,
}

impl TailVerdict {
    pub fn phi_passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass_phi)
    }

    pub fn psi_passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass_psi)
    }

    /// Only the upper bands (and the cutoff) for `psi`.
    pub fn psi_upper_passes(&self) -> bool {
        self.rows.iter().all(|r| r.tail_psi <= r.hi)
    }
}

/// Band checks for the in-degree measure `phi` and a ranking measure `psi`
/// side by side.
pub fn tail_compare(
    phi: &EmpiricalMeasure,
    psi: &EmpiricalMeasure,
    kappa: f64,
    eps: f64,
    grid: &[f64],
) -> Result<TailVerdict> {
    let cp = classify_tail(phi, kappa, eps, grid)?;
    let cs = classify_tail(psi, kappa, eps, grid)?;
    let all = |c: &TailClassification| -> Vec<TailCheck> {
        c.grid.iter().copied().chain(c.cutoff).collect()
    };
    let rows = all(&cp)
        .into_iter()
        .zip(all(&cs))
        .map(|(p, s)| VerdictRow {
            a: p.a,
            tail_phi: p.tail,
            tail_psi: s.tail,
            lo: s.lo,
            hi: s.hi,
            pass_phi: p.pass,
            pass_psi: s.pass,
        })
        .collect();
    Ok(TailVerdict {
        rows,
        phi: cp,
        psi: cs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankLink {
    /// `n^a / (2 m / n)`.
    pub threshold: f64,
    pub checked: usize,
    pub passing: usize,
    /// `passing / checked`, or 1 for an empty skeleton.
    pub fraction: f64,
}

/// Fraction of skeleton vertices `v` with `n pi(v) >= n^a / (2 m / n)`.
pub fn skeleton_rank_link(g: &Digraph, pi: &DistVector, skeleton: &Skeleton) -> RankLink {
    let n = g.n() as f64;
    let threshold = n.powf(skeleton.a) / (2.0 * g.m() as f64 / n);
    let checked = skeleton.touched_vertices.len();
    let passing = skeleton
        .touched_vertices
        .iter()
        .filter(|&&v| n * pi.get(v) >= threshold)
        .count();
    RankLink {
        threshold,
        checked,
        passing,
        fraction: if checked == 0 {
            1.0
        } else {
            passing as f64 / checked as f64
        },
    }
}
