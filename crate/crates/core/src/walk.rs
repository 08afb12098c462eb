//! Simple random walk and PageRank surfer on a [`Digraph`].
//!
//! All quantities are computed by pushing distributions through the
//! transition operator `P(y, x) = m(y, x) / d_y^+`; no single trajectories
//! are simulated.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degseq::entropic;
use crate::error::{invalid, Error, Result};
use crate::graph::Digraph;
use crate::seeding::{self, tag};

/// Vertex count above which transition products run in parallel.
const PAR_THRESHOLD: usize = 1 << 15;

/// Probability vector over the vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistVector {
    probs: Vec<f64>,
}

impl DistVector {
    /// Normalizes a nonnegative vector with positive mass. Vectors already
    /// summing to 1 within `1e-12` are kept bit-for-bit.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("probs", "empty distribution"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("probs", "entries must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("probs", "zero total mass"));
        }
        if (total - 1.0).abs() > 1e-12 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn dirac(n: usize, v: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[v] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.probs
    }

    pub fn get(&self, v: usize) -> f64 {
        self.probs[v]
    }

    /// Largest entry and its lowest-index argmax.
    pub fn max(&self) -> (usize, f64) {
        let mut best = (0, self.probs[0]);
        for (v, &p) in self.probs.iter().enumerate().skip(1) {
            if p > best.1 {
                best = (v, p);
            }
        }
        best
    }

    pub fn min(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Total variation distance `(1/2) sum |mu - nu|`.
pub fn tv(mu: &DistVector, nu: &DistVector) -> Result<f64> {
    tv_slices(mu.probs(), nu.probs())
}

fn tv_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(tv_raw(a, b))
}

fn tv_raw(a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    (0.5 * s).min(1.0)
}

/// Sparse transition operator in pull form: the value at `x` sums
/// `mu(y) / d_y^+` over the tails matched into the heads of `x`.
#[derive(Debug, Clone)]
pub struct Transition {
    head_off: Vec<usize>,
    src: Vec<usize>,
    inv_out: Vec<f64>,
}

impl Transition {
    pub fn new(g: &Digraph) -> Result<Self> {
        let seq = g.seq();
        if let Some(v) = (0..g.n()).find(|&v| seq.d_out(v) == 0) {
            return Err(Error::DanglingVertex { vertex: v });
        }
        let mut head_off = Vec::with_capacity(g.n() + 1);
        head_off.push(0);
        for v in 0..g.n() {
            head_off.push(seq.head_range(v).end);
        }
        let src = (0..g.m())
            .map(|f| g.tail_owners()[g.tail_for_head(f)])
            .collect();
        let inv_out = seq.out_degrees().iter().map(|&d| 1.0 / d as f64).collect();
        Ok(Self {
            head_off,
            src,
            inv_out,
        })
    }

    pub fn n(&self) -> usize {
        self.inv_out.len()
    }

    /// `out = mu P`, with `scratch` of length `n`.
    pub fn apply_into(&self, mu: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        for ((s, m), w) in scratch.iter_mut().zip(mu).zip(&self.inv_out) {
            *s = m * w;
        }
        let scratch = &*scratch;
        let row = |x: usize| -> f64 {
            self.src[self.head_off[x]..self.head_off[x + 1]]
                .iter()
                .map(|&y| scratch[y])
                .sum()
        };
        if self.n() >= PAR_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(x, o)| *o = row(x));
        } else {
            out.iter_mut().enumerate().for_each(|(x, o)| *o = row(x));
        }
    }

    pub fn apply(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        let mut scratch = vec![0.0; self.n()];
        self.apply_into(mu, &mut out, &mut scratch);
        out
    }
}

/// One step of the walk: `(mu P)(x) = sum_y mu(y) m(y, x) / d_y^+`.
pub fn apply_p(g: &Digraph, mu: &DistVector) -> Result<DistVector> {
    if mu.len() != g.n() {
        return Err(Error::LengthMismatch {
            left: mu.len(),
            right: g.n(),
        });
    }
    let p = Transition::new(g)?;
    Ok(DistVector {
        probs: p.apply(mu.probs()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stationary {
    pub pi: DistVector,
    pub iters: usize,
    /// `TV(pi P, pi)` of the returned vector.
    pub residual: f64,
    /// Whether the iteration switched to averaged (lazy) steps after the
    /// residual stalled.
    pub lazy: bool,
}

/// Default tolerance: `1e-10` up to `n = 1e4`, `1e-8` above.
pub fn default_tol(n: usize) -> f64 {
    if n <= 10_000 {
        1e-10
    } else {
        1e-8
    }
}

/// Power iteration from `mu_in`.
///
/// If the residual fails to decrease on two consecutive steps the iteration
/// switches to the averaged step `mu <- (mu + mu P) / 2`, which has the same
/// fixed points and does not oscillate on periodic chains.
pub fn stationary(g: &Digraph, tol: f64, max_iters: usize) -> Result<Stationary> {
    let p = Transition::new(g)?;
    stationary_with(&p, g.seq().mu_in(), tol, max_iters)
}

pub fn stationary_with(p: &Transition, start: Vec<f64>, tol: f64, max_iters: usize) -> Result<Stationary> {
    let n = p.n();
    let mut mu = start;
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut prev_residual = f64::INFINITY;
    let mut stalls = 0;
    let mut lazy = false;
    let mut residual = f64::INFINITY;
    for iter in 0..=max_iters {
        p.apply_into(&mu, &mut next, &mut scratch);
        residual = tv_raw(&next, &mu);
        if residual <= tol {
            let pi = DistVector::new(mu)?;
            return Ok(Stationary {
                pi,
                iters: iter,
                residual,
                lazy,
            });
        }
        if iter == max_iters {
            break;
        }
        if !lazy {
            if residual >= prev_residual {
                stalls += 1;
            } else {
                stalls = 0;
            }
            if stalls >= 2 {
                lazy = true;
            }
        }
        prev_residual = residual;
        if lazy {
            mu.iter_mut().zip(&next).for_each(|(a, b)| *a = 0.5 * (*a + b));
        } else {
            std::mem::swap(&mut mu, &mut next);
        }
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        residual,
    })
}

/// Uniform start pushed `t` steps: `mu_t(y) = (1/n) sum_x P^t(x, y)`.
pub fn mu_t(g: &Digraph, t: usize) -> Result<DistVector> {
    let p = Transition::new(g)?;
    let n = g.n();
    let mut mu = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for _ in 0..t {
        p.apply_into(&mu, &mut next, &mut scratch);
        std::mem::swap(&mut mu, &mut next);
    }
    Ok(DistVector { probs: mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMode {
    All,
    /// `k` distinct starts drawn uniformly; the profile is then a lower
    /// bound on the worst case.
    Sample(usize),
}

impl StartMode {
    /// Every vertex up to `n = 2^12`, 64 sampled starts above.
    pub fn default_for(n: usize) -> Self {
        if n <= 1 << 12 {
            StartMode::All
        } else {
            StartMode::Sample(64)
        }
    }

    fn starts(self, n: usize, seed: u64) -> (Vec<usize>, bool) {
        match self {
            StartMode::Sample(k) if k < n => {
                let mut rng = seeding::substream(seed, &[tag::WALK]);
                let mut v = index::sample(&mut rng, n, k).into_vec();
                v.sort_unstable();
                (v, true)
            }
            _ => ((0..n).collect(), false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixRow {
    pub t: usize,
    pub rho: f64,
    pub d_tv: f64,
    pub starts_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixProfile {
    pub rows: Vec<MixRow>,
    pub t_ent: f64,
    /// Starts were sampled, so `d_tv` bounds the worst case from below.
    pub sampled: bool,
    /// `max_x TV(P^T(x, .), P^(T+1)(x, .))` at the last profiled time `T`.
    pub step_change: f64,
    /// The last row is still above 1/4.
    pub non_mixing: bool,
    /// Consecutive distributions at the last time are far apart while the
    /// profile is stuck: the chain looks periodic.
    pub periodic_suspect: bool,
}

/// TV distance to `pi` after `floor(rho T_ent)` steps, maximized over the
/// chosen starts.
pub fn mix_profile(
    g: &Digraph,
    pi: &DistVector,
    rhos: &[f64],
    start_mode: StartMode,
    seed: u64,
) -> Result<MixProfile> {
    if let Some(r) = rhos.iter().find(|&&r| !(r > 0.0)) {
        return Err(invalid("rho", format!("must be > 0, got {r}")));
    }
    let t_ent = entropic(g.seq(), 0.0)?.t_ent;
    let mut rhos = rhos.to_vec();
    rhos.sort_by(f64::total_cmp);
    let times: Vec<usize> = rhos.iter().map(|r| (r * t_ent).floor() as usize).collect();
    let p = Transition::new(g)?;
    let (starts, sampled) = start_mode.starts(g.n(), seed);
    let t_max = times.last().copied().unwrap_or(0);

    let per_start: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|&x| {
            let n = g.n();
            let mut mu = vec![0.0; n];
            mu[x] = 1.0;
            let mut next = vec![0.0; n];
            let mut scratch = vec![0.0; n];
            let mut out = Vec::with_capacity(times.len());
            let mut t = 0;
            for &target in &times {
                while t < target {
                    p.apply_into(&mu, &mut next, &mut scratch);
                    std::mem::swap(&mut mu, &mut next);
                    t += 1;
                }
                out.push(tv_raw(&mu, pi.probs()));
            }
            p.apply_into(&mu, &mut next, &mut scratch);
            (out, tv_raw(&mu, &next))
        })
        .collect();

    let rows: Vec<MixRow> = times
        .iter()
        .zip(&rhos)
        .enumerate()
        .map(|(i, (&t, &rho))| MixRow {
            t,
            rho,
            d_tv: per_start.iter().map(|(v, _)| v[i]).fold(0.0, f64::max),
            starts_used: starts.len(),
        })
        .collect();
    let step_change = per_start.iter().map(|(_, s)| *s).fold(0.0, f64::max);
    let last = rows.last().map(|r| r.d_tv).unwrap_or(0.0);
    let stuck = rows.len() < 2 || rows[rows.len() - 2].d_tv - last < 1e-9;
    let _ = t_max;
    Ok(MixProfile {
        non_mixing: last > 0.25,
        periodic_suspect: step_change > 0.5 && stuck && last > 0.25,
        rows,
        t_ent,
        sampled,
        step_change,
    })
}

/// Smallest `t` with `max_x TV(P^t(x, .), pi) < eps` over the chosen
/// starts. Per-start distances are nonincreasing in `t`, so the answer is
/// the largest per-start crossing time.
pub fn mixing_time(
    g: &Digraph,
    pi: &DistVector,
    eps: f64,
    start_mode: StartMode,
    seed: u64,
    cap: usize,
) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("must lie in (0, 1), got {eps}")));
    }
    let p = Transition::new(g)?;
    let (starts, _) = start_mode.starts(g.n(), seed);
    let crossings: Vec<Option<usize>> = starts
        .par_iter()
        .map(|&x| {
            let n = g.n();
            let mut mu = vec![0.0; n];
            mu[x] = 1.0;
            let mut next = vec![0.0; n];
            let mut scratch = vec![0.0; n];
            for t in 0..=cap {
                if tv_raw(&mu, pi.probs()) < eps {
                    return Some(t);
                }
                p.apply_into(&mu, &mut next, &mut scratch);
                std::mem::swap(&mut mu, &mut next);
            }
            None
        })
        .collect();
    crossings
        .into_iter()
        .try_fold(0usize, |acc, c| c.map(|t| acc.max(t)))
        .ok_or(Error::NoConvergence {
            iters: cap,
            residual: eps,
        })
}

// ---------------------------------------------------------------------------
// PageRank

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    /// Teleporting probability; `1 - alpha` is the damping factor.
    pub alpha: f64,
    pub lambda: DistVector,
}

impl PageRankParams {
    pub fn new(alpha: f64, lambda: DistVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("alpha", format!("must lie in [0, 1], got {alpha}")));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn uniform(alpha: f64, n: usize) -> Result<Self> {
        Self::new(alpha, DistVector::uniform(n))
    }
}

/// Stationary law of `P_{alpha,lambda} = (1 - alpha) P + alpha 1 lambda`.
///
/// For `alpha > 0` this sums `sum_k alpha (1 - alpha)^k lambda P^k` until the
/// remaining geometric mass is below `tol / 4`; for `alpha = 0` it is the
/// stationary distribution of `P`.
pub fn pagerank(g: &Digraph, params: &PageRankParams, tol: f64) -> Result<DistVector> {
    if params.lambda.len() != g.n() {
        return Err(Error::LengthMismatch {
            left: params.lambda.len(),
            right: g.n(),
        });
    }
    let alpha = params.alpha;
    if alpha == 0.0 {
        return Ok(stationary(g, tol, 100_000)?.pi);
    }
    if alpha == 1.0 {
        return Ok(params.lambda.clone());
    }
    let p = Transition::new(g)?;
    let n = g.n();
    let mut term = params.lambda.probs().to_vec();
    let mut acc: Vec<f64> = term.iter().map(|x| alpha * x).collect();
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut weight = alpha;
    let mut remaining = 1.0 - alpha;
    while remaining >= tol / 4.0 {
        p.apply_into(&term, &mut next, &mut scratch);
        std::mem::swap(&mut term, &mut next);
        weight *= 1.0 - alpha;
        remaining *= 1.0 - alpha;
        acc.iter_mut().zip(&term).for_each(|(a, t)| *a += weight * t);
    }
    DistVector::new(acc)
}

/// `TV(pi P_{alpha,lambda}, pi)`.
pub fn pagerank_residual(g: &Digraph, params: &PageRankParams, pi: &DistVector) -> Result<f64> {
    let p = Transition::new(g)?;
    let a = params.alpha;
    let moved: Vec<f64> = p
        .apply(pi.probs())
        .iter()
        .zip(params.lambda.probs())
        .map(|(x, l)| (1.0 - a) * x + a * l)
        .collect();
    tv_slices(&moved, pi.probs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRankBounds {
    pub alpha: f64,
    /// `alpha (1 - alpha) lambda_min max_in / max_out`.
    pub lower_bound: f64,
    pub max_pr: f64,
    pub argmax: usize,
    pub lower_holds: bool,
    /// `max_pr / (log n (lambda_max + max_in / m))`.
    pub upper_ratio: f64,
}

pub fn pagerank_bounds_check(g: &Digraph, params: &PageRankParams, pi_pr: &DistVector) -> PageRankBounds {
    let seq = g.seq();
    let a = params.alpha;
    let lambda_min = params.lambda.min();
    let (_, lambda_max) = params.lambda.max();
    let lower_bound = a * (1.0 - a) * lambda_min * seq.max_in() as f64 / seq.max_out() as f64;
    let (argmax, max_pr) = pi_pr.max();
    let scale = (g.n() as f64).ln() * (lambda_max + seq.max_in() as f64 / seq.m() as f64);
    PageRankBounds {
        alpha: a,
        lower_bound,
        max_pr,
        argmax,
        // relative slack for the final renormalization only
        lower_holds: lower_bound <= max_pr * (1.0 + 1e-12),
        upper_ratio: if scale > 0.0 { max_pr / scale } else { f64::INFINITY },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degseq::BiDegreeSequence;

    fn gadget() -> Digraph {
        let seq = BiDegreeSequence::new(&[(2, 2), (2, 2)]).unwrap();
        Digraph::from_edges(seq, &[(0, 1), (0, 1), (1, 0), (1, 0)]).unwrap()
    }

    #[test]
    fn gadget_swaps_diracs() {
        let g = gadget();
        let out = apply_p(&g, &DistVector::dirac(2, 0)).unwrap();
        assert_eq!(out.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn regular_graph_preserves_uniform() {
        let seq = BiDegreeSequence::regular(200, 3).unwrap();
        let g = crate::graph::sample_dcm(&seq, 4);
        let out = apply_p(&g, &DistVector::uniform(200)).unwrap();
        for &p in out.probs() {
            assert!((p - 1.0 / 200.0).abs() < 1e-15);
        }
        let s = stationary(&g, 1e-12, 1000).unwrap();
        assert!(s.pi.probs().iter().all(|&p| (p - 1.0 / 200.0).abs() < 1e-12));
    }

    #[test]
    fn dangling_vertex_rejected() {
        let seq = BiDegreeSequence::new(&[(1, 0), (0, 1)]).unwrap();
        let g = Digraph::from_edges(seq, &[(1, 0)]).unwrap();
        assert!(matches!(
            apply_p(&g, &DistVector::uniform(2)),
            Err(Error::DanglingVertex { vertex: 0 })
        ));
    }

    #[test]
    fn tv_examples() {
        let a = DistVector::new(vec![0.5, 0.5, 0.0]).unwrap();
        let b = DistVector::new(vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(tv(&a, &a).unwrap(), 0.0);
        assert_eq!(tv(&a, &b).unwrap(), 0.5);
        assert_eq!(tv(&DistVector::dirac(3, 0), &DistVector::dirac(3, 1)).unwrap(), 1.0);
        assert!(tv(&a, &DistVector::uniform(2)).is_err());
    }

    #[test]
    fn dist_vector_normalizes() {
        let d = DistVector::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(d.probs(), &[0.25, 0.75]);
        assert!(DistVector::new(vec![0.0, 0.0]).is_err());
        assert!(DistVector::new(vec![-1.0, 2.0]).is_err());
    }

    #[test]
    fn periodic_gadget_flagged() {
        let g = gadget();
        let s = stationary(&g, 1e-12, 100).unwrap();
        assert_eq!(s.pi.probs(), &[0.5, 0.5]);
        let prof = mix_profile(&g, &s.pi, &[1.0, 5.0, 10.0], StartMode::All, 0).unwrap();
        assert!(prof.non_mixing);
        assert!(prof.periodic_suspect);
        assert_eq!(prof.step_change, 1.0);
    }

    #[test]
    fn stationary_handles_periodic_start() {
        // Bipartite 2-periodic chain started off-equilibrium.
        let seq = BiDegreeSequence::new(&[(2, 2), (2, 2), (2, 2), (2, 2)]).unwrap();
        let g = Digraph::from_edges(
            seq,
            &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (2, 1), (3, 0), (3, 1)],
        )
        .unwrap();
        let p = Transition::new(&g).unwrap();
        let s = stationary_with(&p, vec![1.0, 0.0, 0.0, 0.0], 1e-12, 10_000).unwrap();
        assert!(s.lazy);
        for &x in s.pi.probs() {
            assert!((x - 0.25).abs() < 1e-11);
        }
    }

    #[test]
    fn mixing_time_weak_criterion() {
        let seq = crate::degseq::gen_powerlaw_seq(500, 2.5, 2, 1).unwrap();
        let g = crate::graph::sample_dcm(&seq, 1);
        let pi = stationary(&g, 1e-12, 10_000).unwrap().pi;
        let t99 = mixing_time(&g, &pi, 0.99, StartMode::All, 0, 200).unwrap();
        let t50 = mixing_time(&g, &pi, 0.5, StartMode::All, 0, 200).unwrap();
        let t10 = mixing_time(&g, &pi, 0.1, StartMode::All, 0, 200).unwrap();
        assert!(t99 <= 5);
        assert!(t99 <= t50 && t50 <= t10);
        assert!(mixing_time(&g, &pi, 1.0, StartMode::All, 0, 10).is_err());
    }

    #[test]
    fn mu_t_basics() {
        let seq = BiDegreeSequence::regular(40, 2).unwrap();
        let g = crate::graph::sample_dcm(&seq, 3);
        assert_eq!(mu_t(&g, 0).unwrap(), DistVector::uniform(40));
        let one = mu_t(&g, 1).unwrap();
        assert!(one.probs().iter().all(|&p| (p - 1.0 / 40.0).abs() < 1e-15));
    }

    #[test]
    fn pagerank_extremes() {
        let seq = crate::degseq::gen_powerlaw_seq(300, 2.5, 2, 5).unwrap();
        let g = crate::graph::sample_dcm(&seq, 5);
        let lambda = DistVector::new((1..=300).map(|i| i as f64).collect()).unwrap();
        let one = pagerank(&g, &PageRankParams::new(1.0, lambda.clone()).unwrap(), 1e-12).unwrap();
        assert_eq!(one, lambda);
        let zero = pagerank(&g, &PageRankParams::new(0.0, lambda.clone()).unwrap(), 1e-12).unwrap();
        let pi = stationary(&g, 1e-12, 10_000).unwrap().pi;
        assert!(tv(&zero, &pi).unwrap() < 1e-11);
        let params = PageRankParams::new(0.25, lambda).unwrap();
        let pr = pagerank(&g, &params, 1e-12).unwrap();
        assert!(pagerank_residual(&g, &params, &pr).unwrap() <= 1e-12);
        assert!(PageRankParams::uniform(1.5, 3).is_err());
    }

    #[test]
    fn pagerank_lower_bound_trivial_at_endpoints() {
        let seq = crate::degseq::gen_powerlaw_seq(100, 2.5, 2, 5).unwrap();
        let g = crate::graph::sample_dcm(&seq, 5);
        for a in [0.0, 1.0] {
            let params = PageRankParams::uniform(a, 100).unwrap();
            let pr = pagerank(&g, &params, 1e-12).unwrap();
            let b = pagerank_bounds_check(&g, &params, &pr);
            assert_eq!(b.lower_bound, 0.0);
            assert!(b.lower_holds);
        }
    }
}
