//! Bulk limit law of `n pi(v)`.
//!
//! The limit `L_n` is `(n/m) sum_{k <= d_I^-} Z_k` with `I` uniform and the
//! `Z_k` i.i.d. solutions of the fixed-point equation
//! `Z = (1/d_J^+) sum_{k <= d_J^-} Z_k`, `J ~ mu_out`. The fixed point is
//! approximated by population dynamics.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degseq::BiDegreeSequence;
use crate::error::{invalid, Error, Result};
use crate::graph::{Direction, MarkedTree};
use crate::measure::EmpiricalMeasure;
use crate::seeding::{self, tag};
use crate::walk::DistVector;

/// Pool slots per RNG substream.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSettings {
    pub pool_size: usize,
    pub generations: usize,
    /// Smallest accepted pool.
    pub min_pool: usize,
    /// Inter-generation W1 below which the pool counts as converged.
    pub tol: f64,
    /// Rescale the pool to mean 1 after each generation. The fixed point is
    /// only determined up to scale; without rescaling the pool mean performs
    /// a random walk of step size `std / sqrt(pool_size)`.
    pub renormalize: bool,
}

impl Default for PopulationSettings {
    fn default() -> Self {
        Self {
            pool_size: 100_000,
            generations: 30,
            min_pool: 1000,
            tol: 1e-3,
            renormalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    pub pool: Vec<f64>,
    pub generation: usize,
    pub pool_size: usize,
    /// `W1(pool_g, pool_{g+1})` for each generation step.
    pub w1_history: Vec<f64>,
    /// `(mean, std)` of each freshly resampled pool, before rescaling: the
    /// mean is the one-step drift from the previous (mean-1) pool.
    pub moments: Vec<(f64, f64)>,
    /// Last inter-generation W1 fell below the tolerance.
    pub converged: bool,
}

impl PopulationState {
    pub fn mean(&self) -> f64 {
        moments(&self.pool).0
    }

    pub fn std(&self) -> f64 {
        moments(&self.pool).1
    }

    /// Mean ratio of successive inter-generation distances over the first
    /// `steps` ratios; a monitoring heuristic for geometric contraction.
    pub fn contraction_ratio(&self, steps: usize) -> Option<f64> {
        let h = &self.w1_history;
        if h.len() < steps + 1 {
            return None;
        }
        let ratios: Vec<f64> = h
            .windows(2)
            .take(steps)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect();
        if ratios.is_empty() {
            return Some(0.0);
        }
        Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }

    pub fn measure(&self) -> EmpiricalMeasure {
        EmpiricalMeasure::new(self.pool.clone()).expect("pool is nonempty and nonnegative")
    }
}

/// Population dynamics from the all-ones pool with the default floor.
pub fn sfpe_population(
    seq: &BiDegreeSequence,
    pool_size: usize,
    generations: usize,
    seed: u64,
) -> Result<PopulationState> {
    let settings = PopulationSettings {
        pool_size,
        generations,
        ..Default::default()
    };
    sfpe_population_with(seq, &settings, seed)
}

pub fn sfpe_population_with(
    seq: &BiDegreeSequence,
    settings: &PopulationSettings,
    seed: u64,
) -> Result<PopulationState> {
    if seq.min_out() < 2 {
        return Err(invalid("seq", "population dynamics needs every out-degree >= 2"));
    }
    if settings.pool_size < settings.min_pool {
        return Err(invalid(
            "pool_size",
            format!("must be >= {}, got {}", settings.min_pool, settings.pool_size),
        ));
    }
    let owners = seq.tail_owners();
    let m = seq.m();
    let size = settings.pool_size;
    let mut pool = vec![1.0; size];
    let mut next = vec![0.0; size];
    let mut w1_history = Vec::with_capacity(settings.generations);
    let mut history = Vec::with_capacity(settings.generations);
    for g in 0..settings.generations {
        let prev = &pool;
        next.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let mut rng = seeding::substream(seed, &[tag::POOL, g as u64, c as u64]);
            for slot in chunk {
                let j = owners[rng.random_range(0..m)];
                let s: f64 = (0..seq.d_in(j)).map(|_| prev[rng.random_range(0..size)]).sum();
                *slot = s / seq.d_out(j) as f64;
            }
        });
        let (mean, std) = moments(&next);
        history.push((mean, std));
        if settings.renormalize && mean > 0.0 && mean != 1.0 {
            next.iter_mut().for_each(|z| *z /= mean);
        }
        w1_history.push(w1_sorted_copies(&pool, &next));
        std::mem::swap(&mut pool, &mut next);
    }
    let converged = w1_history.last().is_some_and(|&w| w < settings.tol);
    Ok(PopulationState {
        pool,
        generation: settings.generations,
        pool_size: size,
        w1_history,
        moments: history,
        converged,
    })
}

fn moments(pool: &[f64]) -> (f64, f64) {
    let n = pool.len() as f64;
    let mean = pool.iter().sum::<f64>() / n;
    let var = pool.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn w1_sorted_copies(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.par_sort_unstable_by(f64::total_cmp);
    b.par_sort_unstable_by(f64::total_cmp);
    w1_equal(&a, &b)
}

fn w1_equal(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// Draws `n_samples` values of `(n/m) sum_{k <= d_I^-} Z_k`.
pub fn sample_ln(
    seq: &BiDegreeSequence,
    pop: &PopulationState,
    n_samples: usize,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    if n_samples == 0 {
        return Err(Error::EmptyMeasure);
    }
    let n = seq.n();
    let (nf, mf) = (n as f64, seq.m() as f64);
    let size = pop.pool.len();
    let mut out = vec![0.0; n_samples];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut rng = seeding::substream(seed, &[tag::SAMPLE_LN, c as u64]);
        for x in chunk {
            let i = rng.random_range(0..n);
            let s: f64 = (0..seq.d_in(i)).map(|_| pop.pool[rng.random_range(0..size)]).sum();
            *x = s * nf / mf;
        }
    });
    EmpiricalMeasure::new(out)
}

/// `M_y(h) = sum_{a at depth h} d^-_{l(a)} prod_{i=1..h} 1/d^+_{l(a_i)}`,
/// the product running over the path from the root (excluded) to `a`.
pub fn martingale_m(tree: &MarkedTree, seq: &BiDegreeSequence, h: usize) -> Result<f64> {
    if tree.direction != Direction::In {
        return Err(invalid("tree", "martingale is defined on in-trees"));
    }
    if tree.depth < h {
        return Err(Error::DepthExceeded {
            built: tree.depth,
            requested: h,
        });
    }
    let mut weight = vec![0.0; tree.len()];
    weight[0] = 1.0;
    let mut total = 0.0;
    for (a, node) in tree.nodes.iter().enumerate() {
        if let Some(p) = node.parent {
            weight[a] = weight[p] / seq.d_out(node.mark) as f64;
        }
        if node.depth == h {
            total += seq.d_in(node.mark) as f64 * weight[a];
        }
    }
    Ok(total)
}

/// Exact Wasserstein-1 distance between two empirical measures on the line.
pub fn w1(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
    let (a, b) = (mu.sorted(), nu.sorted());
    if a.len() == b.len() {
        return w1_equal(a, b);
    }
    // Integral of |F - G| over the merged breakpoints.
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut x = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        total += (i as f64 / na - j as f64 / nb).abs() * (next - x);
        x = next;
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
    }
    total
}

/// Multiset `{n pi(v)}`. Computed as `pi(v) / (1/n)` so that `pi(v) = 1/n`
/// maps to exactly 1.
pub fn psi_measure(pi: &DistVector) -> EmpiricalMeasure {
    let unit = 1.0 / pi.len() as f64;
    EmpiricalMeasure::new(pi.probs().iter().map(|p| p / unit).collect()).expect("distribution is nonempty")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkSettings {
    pub population: PopulationSettings,
    /// Number of `L_n` draws; `None` uses `n`.
    pub n_samples: Option<usize>,
}

impl Default for BulkSettings {
    fn default() -> Self {
        Self {
            population: PopulationSettings::default(),
            n_samples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkComparison {
    pub n: usize,
    pub w1: f64,
    pub psi: EmpiricalMeasure,
    pub ln_hat: EmpiricalMeasure,
    pub population_converged: bool,
    pub population_mean: f64,
}

/// `W1(psi_n, L_n-hat)` for a graph with stationary law `pi`.
pub fn bulk_compare(
    seq: &BiDegreeSequence,
    pi: &DistVector,
    settings: &BulkSettings,
    seed: u64,
) -> Result<BulkComparison> {
    if pi.len() != seq.n() {
        return Err(Error::LengthMismatch {
            left: pi.len(),
            right: seq.n(),
        });
    }
    let pop = sfpe_population_with(seq, &settings.population, seed)?;
    let ln_hat = sample_ln(seq, &pop, settings.n_samples.unwrap_or(seq.n()), seed)?;
    let psi = psi_measure(pi);
    Ok(BulkComparison {
        n: seq.n(),
        w1: w1(&psi, &ln_hat),
        psi,
        ln_hat,
        population_converged: pop.converged,
        population_mean: pop.mean(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_gw_tree;

    fn em(v: &[f64]) -> EmpiricalMeasure {
        EmpiricalMeasure::new(v.to_vec()).unwrap()
    }

    #[test]
    fn w1_examples() {
        assert_eq!(w1(&em(&[0.3, 2.0]), &em(&[2.0, 0.3])), 0.0);
        assert_eq!(w1(&em(&[1.5]), &em(&[4.0])), 2.5);
        assert_eq!(w1(&em(&[0.0, 1.0]), &em(&[0.0, 0.0])), 0.5);
    }

    #[test]
    fn w1_unequal_sizes() {
        // {0, 2} vs {1}: integral of |F - G| = 0.5 + 0.5
        assert!((w1(&em(&[0.0, 2.0]), &em(&[1.0])) - 1.0).abs() < 1e-15);
        // Duplicating a measure leaves it unchanged as a law.
        let a = em(&[0.1, 0.7, 3.0]);
        let b = em(&[0.1, 0.1, 0.7, 0.7, 3.0, 3.0]);
        assert!(w1(&a, &b).abs() < 1e-15);
        assert_eq!(w1(&em(&[1.0]), &em(&[3.0, 3.0])), 2.0);
    }

    #[test]
    fn regular_pool_is_constant() {
        let seq = BiDegreeSequence::regular(50, 3).unwrap();
        let pop = sfpe_population(&seq, 2000, 5, 1).unwrap();
        assert!(pop.pool.iter().all(|&z| z == 1.0));
        assert!(pop.converged);
        let ln = sample_ln(&seq, &pop, 1000, 2).unwrap();
        assert!(ln.sorted().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn population_preconditions() {
        let seq = BiDegreeSequence::regular(50, 3).unwrap();
        assert!(sfpe_population(&seq, 10, 5, 1).is_err());
        let bad = BiDegreeSequence::new(&[(1, 1), (3, 3)]).unwrap();
        assert!(sfpe_population(&bad, 2000, 5, 1).is_err());
    }

    #[test]
    fn population_is_reproducible() {
        let seq = crate::degseq::gen_powerlaw_seq(1000, 2.5, 2, 3).unwrap();
        let a = sfpe_population(&seq, 5000, 4, 9).unwrap();
        let b = sfpe_population(&seq, 5000, 4, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_in_degree_gives_zero_samples() {
        let seq = BiDegreeSequence::new(&[(0, 2), (4, 2)]).unwrap();
        let pop = sfpe_population(&seq, 1000, 3, 1).unwrap();
        let ln = sample_ln(&seq, &pop, 500, 4).unwrap();
        let zeros = ln.sorted().iter().filter(|&&x| x == 0.0).count();
        assert!(zeros > 150 && zeros < 350);
    }

    #[test]
    fn martingale_basics() {
        let seq = BiDegreeSequence::regular(30, 3).unwrap();
        let t = sample_gw_tree(&seq, 0, 4, Direction::In, 1, None).unwrap();
        assert_eq!(martingale_m(&t, &seq, 0).unwrap(), 3.0);
        for h in 1..=4 {
            assert!((martingale_m(&t, &seq, h).unwrap() - 3.0).abs() < 1e-12);
        }
        assert!(matches!(
            martingale_m(&t, &seq, 5),
            Err(Error::DepthExceeded { built: 4, requested: 5 })
        ));
        let out = sample_gw_tree(&seq, 0, 2, Direction::Out, 1, None).unwrap();
        assert!(martingale_m(&out, &seq, 1).is_err());
    }

    #[test]
    fn psi_maps_uniform_to_ones() {
        for n in [3, 49, 100, 1000] {
            let psi = psi_measure(&DistVector::uniform(n));
            assert!(psi.sorted().iter().all(|&x| x == 1.0), "n = {n}");
        }
        let psi = psi_measure(&DistVector::dirac(4, 2));
        assert_eq!(psi.sorted(), &[0.0, 0.0, 0.0, 4.0]);
    }

    #[test]
    fn bulk_regular_is_exactly_zero() {
        let seq = BiDegreeSequence::regular(300, 3).unwrap();
        let g = crate::graph::sample_dcm(&seq, 1);
        let pi = crate::walk::stationary(&g, 1e-12, 1000).unwrap().pi;
        let settings = BulkSettings {
            population: PopulationSettings {
                pool_size: 1000,
                generations: 3,
                ..Default::default()
            },
            n_samples: None,
        };
        let r = bulk_compare(&seq, &pi, &settings, 5).unwrap();
        assert_eq!(r.w1, 0.0);
    }
}
