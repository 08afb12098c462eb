//! Bi-degree sequences: construction, moment validation, entropic time, and
//! tail classification of degree and ranking measures.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measure::EmpiricalMeasure;
use crate::seeding::{self, tag};

/// Per-vertex `(in, out)` degrees with equal totals.
///
/// Half-edges are numbered contiguously per vertex in vertex order: the
/// tails of `v` are `tail_offset(v)..tail_offset(v + 1)` and likewise for
/// heads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiDegreeSequence {
    in_deg: Vec<usize>,
    out_deg: Vec<usize>,
    tail_off: Vec<usize>,
    head_off: Vec<usize>,
}

impl BiDegreeSequence {
    pub fn new(pairs: &[(usize, usize)]) -> Result<Self> {
        let (in_deg, out_deg) = pairs.iter().copied().unzip();
        Self::from_degrees(in_deg, out_deg)
    }

    pub fn from_degrees(in_deg: Vec<usize>, out_deg: Vec<usize>) -> Result<Self> {
        if in_deg.is_empty() {
            return Err(Error::MalformedSequence("no vertices".into()));
        }
        if in_deg.len() != out_deg.len() {
            return Err(Error::MalformedSequence(format!(
                "{} in-degrees but {} out-degrees",
                in_deg.len(),
                out_deg.len()
            )));
        }
        let offsets = |d: &[usize]| {
            let mut off = Vec::with_capacity(d.len() + 1);
            off.push(0);
            let mut acc = 0usize;
            for &x in d {
                acc += x;
                off.push(acc);
            }
            off
        };
        let head_off = offsets(&in_deg);
        let tail_off = offsets(&out_deg);
        let (m_in, m_out) = (head_off[in_deg.len()], tail_off[out_deg.len()]);
        if m_in != m_out {
            return Err(Error::MalformedSequence(format!(
                "in-degree sum {m_in} differs from out-degree sum {m_out}"
            )));
        }
        Ok(Self {
            in_deg,
            out_deg,
            tail_off,
            head_off,
        })
    }

    /// Every vertex gets `(d_in, d_out)`; requires `d_in == d_out`.
    pub fn regular(n: usize, d: usize) -> Result<Self> {
        Self::from_degrees(vec![d; n], vec![d; n])
    }

    /// Eulerian sequence `d_v^+ = d_v^-`.
    pub fn eulerian(degrees: Vec<usize>) -> Result<Self> {
        Self::from_degrees(degrees.clone(), degrees)
    }

    pub fn n(&self) -> usize {
        self.in_deg.len()
    }

    pub fn m(&self) -> usize {
        self.tail_off[self.n()]
    }

    pub fn d_in(&self, v: usize) -> usize {
        self.in_deg[v]
    }

    pub fn d_out(&self, v: usize) -> usize {
        self.out_deg[v]
    }

    pub fn in_degrees(&self) -> &[usize] {
        &self.in_deg
    }

    pub fn out_degrees(&self) -> &[usize] {
        &self.out_deg
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.in_deg.iter().copied().zip(self.out_deg.iter().copied())
    }

    pub fn max_in(&self) -> usize {
        self.in_deg.iter().copied().max().unwrap_or(0)
    }

    pub fn max_out(&self) -> usize {
        self.out_deg.iter().copied().max().unwrap_or(0)
    }

    pub fn min_out(&self) -> usize {
        self.out_deg.iter().copied().min().unwrap_or(0)
    }

    /// Lowest-index vertex attaining the maximum in-degree, and whether the
    /// maximum is attained more than once.
    pub fn argmax_in(&self) -> (usize, bool) {
        let max = self.max_in();
        let mut hits = self.in_deg.iter().enumerate().filter(|(_, &d)| d == max);
        let first = hits.next().map(|(v, _)| v).unwrap_or(0);
        (first, hits.next().is_some())
    }

    pub fn tail_range(&self, v: usize) -> std::ops::Range<usize> {
        self.tail_off[v]..self.tail_off[v + 1]
    }

    pub fn head_range(&self, v: usize) -> std::ops::Range<usize> {
        self.head_off[v]..self.head_off[v + 1]
    }

    /// `owner[e]` for every tail `e`.
    pub fn tail_owners(&self) -> Vec<usize> {
        owners(&self.out_deg, self.m())
    }

    /// `owner[f]` for every head `f`.
    pub fn head_owners(&self) -> Vec<usize> {
        owners(&self.in_deg, self.m())
    }

    /// `mu_in(v) = d_v^- / m`.
    pub fn mu_in(&self) -> Vec<f64> {
        let m = self.m() as f64;
        self.in_deg.iter().map(|&d| d as f64 / m).collect()
    }

    /// `mu_out(v) = d_v^+ / m`.
    pub fn mu_out(&self) -> Vec<f64> {
        let m = self.m() as f64;
        self.out_deg.iter().map(|&d| d as f64 / m).collect()
    }

    /// Mean offspring of the in-tree: `(1/m) sum_v d_v^- d_v^+`.
    pub fn nu(&self) -> f64 {
        self.pairs().map(|(i, o)| (i * o) as f64).sum::<f64>() / self.m() as f64
    }

    /// `A = sum_v (d_v^-/m) (d_v^-/d_v^+)^2`, the second moment of
    /// `d_J^- / d_J^+` with `J ~ mu_out`.
    pub fn second_moment_ratio(&self) -> f64 {
        let m = self.m() as f64;
        self.pairs()
            .filter(|&(_, o)| o > 0)
            .map(|(i, o)| {
                let r = i as f64 / o as f64;
                i as f64 / m * r * r
            })
            .sum()
    }

    /// Empirical in-degree distribution as a measure on the half-line.
    pub fn in_degree_measure(&self) -> EmpiricalMeasure {
        EmpiricalMeasure::from_counts(self.in_deg.iter().copied()).expect("n >= 1")
    }
}

fn owners(deg: &[usize], m: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    for (v, &d) in deg.iter().enumerate() {
        out.extend(std::iter::repeat_n(v, d));
    }
    out
}

/// Constants `(eta, C, K)` of the moment assumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionParams {
    pub eta: f64,
    pub c: f64,
    pub k: usize,
}

impl AssumptionParams {
    pub fn new(eta: f64, c: f64, k: usize) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(invalid("eta", format!("must be > 0, got {eta}")));
        }
        if !(c > 0.0) {
            return Err(invalid("C", format!("must be > 0, got {c}")));
        }
        if k < 2 {
            return Err(invalid("K", format!("must be >= 2, got {k}")));
        }
        Ok(Self { eta, c, k })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub m: usize,
    pub min_out: usize,
    pub max_in: usize,
    pub max_out: usize,
    /// `sum_v (d_v^-)^(2 + eta)`.
    pub moment_sum: f64,
    /// `C * n`.
    pub moment_bound: f64,
    pub min_out_ok: bool,
    pub max_out_ok: bool,
    pub moment_ok: bool,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.min_out_ok && self.max_out_ok && self.moment_ok
    }
}

pub fn validate(seq: &BiDegreeSequence, params: &AssumptionParams) -> ValidationReport {
    let p = 2.0 + params.eta;
    let moment_sum: f64 = seq.in_degrees().iter().map(|&d| (d as f64).powf(p)).sum();
    let moment_bound = params.c * seq.n() as f64;
    let (min_out, max_out) = (seq.min_out(), seq.max_out());
    ValidationReport {
        n: seq.n(),
        m: seq.m(),
        min_out,
        max_in: seq.max_in(),
        max_out,
        moment_sum,
        moment_bound,
        min_out_ok: min_out >= 2,
        max_out_ok: max_out <= params.k,
        moment_ok: moment_sum <= moment_bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropicSummary {
    /// Entropy per step in nats.
    pub entropy: f64,
    /// `log(n) / entropy`, in steps (not floored).
    pub t_ent: f64,
    pub eps: f64,
    /// `floor(eps * log n / (20 log max_out))`.
    pub h_eps: usize,
}

pub fn entropic(seq: &BiDegreeSequence, eps: f64) -> Result<EntropicSummary> {
    if let Some((v, &d)) = seq.out_degrees().iter().enumerate().find(|(_, &d)| d < 2) {
        return Err(Error::DegenerateEntropy {
            vertex: v,
            out_degree: d,
        });
    }
    if !(eps >= 0.0) {
        return Err(invalid("eps", format!("must be >= 0, got {eps}")));
    }
    // Integer in-degree mass per out-degree keeps the result invariant
    // under duplicating every vertex.
    let mut mass: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, o) in seq.pairs() {
        *mass.entry(o).or_default() += i;
    }
    let weighted: f64 = mass.iter().map(|(&o, &w)| w as f64 * (o as f64).ln()).sum();
    let entropy = weighted / seq.m() as f64;
    let log_n = (seq.n() as f64).ln();
    let h = eps * log_n / (20.0 * (seq.max_out() as f64).ln());
    Ok(EntropicSummary {
        entropy,
        t_ent: log_n / entropy,
        eps,
        h_eps: h.floor() as usize,
    })
}

// ---------------------------------------------------------------------------
// Tail classification

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    PowerLaw,
    KappaLight,
    Extremal,
    None,
}

/// One band check: `lo <= tail <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub a: f64,
    pub tail: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailClassification {
    pub kind: TailKind,
    pub kappa: Option<f64>,
    pub eps: f64,
    pub grid: Vec<TailCheck>,
    /// Upper cutoff check at `n^(1/kappa + eps)`; tail must be 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<TailCheck>,
}

impl TailClassification {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Grid points `{0.25, 0.5, 0.75, 0.9} / kappa`, all inside `(0, 1/kappa)`.
pub fn default_grid(kappa: f64) -> Vec<f64> {
    [0.25, 0.5, 0.75, 0.9].iter().map(|f| f / kappa).collect()
}

fn check_grid(kappa: f64, eps: f64, grid: &[f64]) -> Result<()> {
    if !(kappa > 0.0) {
        return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be > 0, got {eps}")));
    }
    if let Some(a) = grid.iter().find(|&&a| !(a > 0.0 && a < 1.0 / kappa)) {
        return Err(invalid(
            "grid",
            format!("point {a} outside (0, 1/kappa) = (0, {})", 1.0 / kappa),
        ));
    }
    Ok(())
}

/// Band check of the power-law definition at finite `n`: for every grid
/// point `a`, `n^(-a kappa - eps) <= mu(n^a, inf) <= n^(-a kappa + eps)`, and
/// no mass above `n^(1/kappa + eps)`.
pub fn classify_tail(
    measure: &EmpiricalMeasure,
    kappa: f64,
    eps: f64,
    grid: &[f64],
) -> Result<TailClassification> {
    check_grid(kappa, eps, grid)?;
    let n = measure.len() as f64;
    let rows: Vec<TailCheck> = grid
        .iter()
        .map(|&a| {
            let tail = measure.tail(n.powf(a));
            let lo = n.powf(-a * kappa - eps);
            let hi = n.powf(-a * kappa + eps);
            TailCheck {
                a,
                tail,
                lo,
                hi,
                pass: lo <= tail && tail <= hi,
            }
        })
        .collect();
    let a_cut = 1.0 / kappa + eps;
    let cut_tail = measure.tail(n.powf(a_cut));
    let cutoff = TailCheck {
        a: a_cut,
        tail: cut_tail,
        lo: 0.0,
        hi: 0.0,
        pass: cut_tail == 0.0,
    };
    let ok = cutoff.pass && rows.iter().all(|r| r.pass);
    Ok(TailClassification {
        kind: if ok { TailKind::PowerLaw } else { TailKind::None },
        kappa: Some(kappa),
        eps,
        grid: rows,
        cutoff: Some(cutoff),
    })
}

/// Size-biased tail bound `sum_{k > n^a} k phi(k) <= n^(-a (kappa - 1) + eps)`
/// on every grid point.
pub fn is_kappa_light(
    seq: &BiDegreeSequence,
    kappa: f64,
    eps: f64,
    grid: &[f64],
) -> Result<TailClassification> {
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be > 0, got {eps}")));
    }
    if let Some(a) = grid.iter().find(|&&a| !(a > 0.0)) {
        return Err(invalid("grid", format!("point {a} is not positive")));
    }
    let n = seq.n() as f64;
    let phi = seq.in_degree_measure();
    let rows: Vec<TailCheck> = grid
        .iter()
        .map(|&a| {
            let tail = phi.size_biased_tail(n.powf(a));
            let hi = n.powf(-a * (kappa - 1.0) + eps);
            TailCheck {
                a,
                tail,
                lo: 0.0,
                hi,
                pass: tail <= hi,
            }
        })
        .collect();
    let ok = rows.iter().all(|r| r.pass);
    Ok(TailClassification {
        kind: if ok {
            TailKind::KappaLight
        } else {
            TailKind::None
        },
        kappa: Some(kappa),
        eps,
        grid: rows,
        cutoff: None,
    })
}

/// A unique vertex attains the maximum in-degree and every other in-degree
/// is at most `margin * max_in / log n`.
pub fn is_extremal(seq: &BiDegreeSequence, margin: f64) -> bool {
    extremal_classification(seq, margin).kind == TailKind::Extremal
}

pub fn extremal_classification(seq: &BiDegreeSequence, margin: f64) -> TailClassification {
    let n = seq.n() as f64;
    let (w, tie) = seq.argmax_in();
    let max_in = seq.max_in() as f64;
    let runner_up = seq
        .in_degrees()
        .iter()
        .enumerate()
        .filter(|&(v, _)| v != w)
        .map(|(_, &d)| d)
        .max()
        .unwrap_or(0) as f64;
    let hi = if n > 1.0 { margin * max_in / n.ln() } else { 0.0 };
    let pass = !tie && max_in > 0.0 && runner_up <= hi;
    TailClassification {
        kind: if pass {
            TailKind::Extremal
        } else {
            TailKind::None
        },
        kappa: None,
        eps: margin,
        grid: vec![TailCheck {
            a: if n > 1.0 && max_in > 0.0 {
                max_in.ln() / n.ln()
            } else {
                0.0
            },
            tail: runner_up,
            lo: 0.0,
            hi,
            pass,
        }],
        cutoff: None,
    }
}

// ---------------------------------------------------------------------------
// Generators

/// The density `f(t) ∝ min{1, t^(-1-kappa)}` on `[0, inf)` scaled by `scale`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledPowerLaw {
    pub kappa: f64,
    pub scale: f64,
}

impl ScaledPowerLaw {
    fn norm(&self) -> f64 {
        1.0 + 1.0 / self.kappa
    }

    /// Inverse CDF of the unscaled density, then scaled.
    pub fn quantile(&self, u: f64) -> f64 {
        let z = self.norm();
        let uz = u * z;
        let t = if uz <= 1.0 {
            uz
        } else {
            let base = 1.0 - self.kappa * (uz - 1.0);
            if base <= 0.0 {
                f64::INFINITY
            } else {
                base.powf(-1.0 / self.kappa)
            }
        };
        self.scale * t
    }

    /// `P(scale * X >= x)`.
    pub fn survival(&self, x: f64) -> f64 {
        let t = x / self.scale;
        let z = self.norm();
        if t <= 1.0 {
            1.0 - t / z
        } else {
            t.powf(-self.kappa) / (self.kappa * z)
        }
    }

    /// `E[floor(scale * X)] = sum_{k >= 1} P(scale * X >= k)`.
    pub fn floored_mean(&self) -> f64 {
        let body_end = self.scale.floor() as u64;
        let mut sum = 0.0;
        for k in 1..=body_end {
            sum += self.survival(k as f64);
        }
        // Power-law part: explicit sum then an Euler-Maclaurin tail.
        let start = body_end + 1;
        let explicit = 200_000u64;
        for k in start..start + explicit {
            sum += self.survival(k as f64);
        }
        let cut = (start + explicit) as f64 - 0.5;
        let coef = self.scale.powf(self.kappa) / (self.kappa * self.norm());
        sum += coef * cut.powf(1.0 - self.kappa) / (self.kappa - 1.0);
        sum
    }

    /// Scale whose floored mean equals `mean`.
    pub fn calibrated(kappa: f64, mean: f64) -> Self {
        let (mut lo, mut hi) = (1e-6_f64, 1e6_f64);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if (Self { kappa, scale: mid }).floored_mean() < mean {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo < 1.0 + 1e-13 {
                break;
            }
        }
        Self {
            kappa,
            scale: (lo * hi).sqrt(),
        }
    }
}

const REPAIR_ATTEMPTS: usize = 100;

/// Power-law in-degrees with constant out-degree `d_out`.
///
/// In-degrees are `floor(s X)` with `X` drawn by inverse CDF from
/// `f(t) ∝ min{1, t^(-1-kappa)}` and `s` calibrated so that the mean is
/// `d_out`; draws are capped at `n d_out`. The total is then balanced to
/// `n d_out` by unit increments or decrements on uniformly chosen vertices
/// of positive in-degree.
pub fn gen_powerlaw_seq(n: usize, kappa: f64, d_out: usize, seed: u64) -> Result<BiDegreeSequence> {
    if n < 2 {
        return Err(invalid("n", format!("must be >= 2, got {n}")));
    }
    if !(kappa > 2.0) {
        return Err(invalid("kappa", format!("must be > 2, got {kappa}")));
    }
    if d_out < 2 {
        return Err(invalid("d_out", format!("must be >= 2, got {d_out}")));
    }
    let law = ScaledPowerLaw::calibrated(kappa, d_out as f64);
    let target = n * d_out;
    for attempt in 0..REPAIR_ATTEMPTS {
        let mut rng = seeding::substream(seed, &[tag::DEGSEQ, attempt as u64]);
        let mut d_in: Vec<usize> = (0..n)
            .map(|_| {
                let x = law.quantile(rng.random::<f64>()).floor();
                if x >= target as f64 {
                    target
                } else {
                    x as usize
                }
            })
            .collect();
        if balance(&mut d_in, target, &mut rng) {
            return BiDegreeSequence::from_degrees(d_in, vec![d_out; n]);
        }
    }
    Err(Error::RepairOverflow {
        attempts: REPAIR_ATTEMPTS,
    })
}

/// Unit repairs on uniformly chosen vertices with positive degree until the
/// total is `target`. Returns false when no positive vertex exists.
fn balance(deg: &mut [usize], target: usize, rng: &mut impl rand::Rng) -> bool {
    let mut positive: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] > 0).collect();
    let mut pos = vec![usize::MAX; deg.len()];
    for (i, &v) in positive.iter().enumerate() {
        pos[v] = i;
    }
    let mut total: usize = deg.iter().sum();
    while total != target {
        if positive.is_empty() {
            return false;
        }
        let v = positive[rng.random_range(0..positive.len())];
        if total < target {
            deg[v] += 1;
            total += 1;
        } else {
            deg[v] -= 1;
            total -= 1;
            if deg[v] == 0 {
                let i = pos[v];
                positive.swap_remove(i);
                if i < positive.len() {
                    pos[positive[i]] = i;
                }
                pos[v] = usize::MAX;
            }
        }
    }
    true
}

/// One hub of in-degree `hub_in` at vertex 0, all other in-degrees in
/// `1..=max_other`, out-degrees all `d_out`, balanced to `n d_out` without
/// touching the hub.
pub fn gen_extremal_seq(
    n: usize,
    hub_in: usize,
    max_other: usize,
    d_out: usize,
    seed: u64,
) -> Result<BiDegreeSequence> {
    let target = n * d_out;
    if hub_in > target || max_other == 0 || n < 2 {
        return Err(invalid("hub_in", "hub larger than the edge count"));
    }
    let rest_target = target - hub_in;
    if rest_target < n - 1 || rest_target > (n - 1) * max_other {
        return Err(invalid(
            "max_other",
            format!("cannot place {rest_target} heads on {} vertices", n - 1),
        ));
    }
    let mut rng = seeding::substream(seed, &[tag::DEGSEQ, 0xe7]);
    let mut rest: Vec<usize> = (1..n).map(|_| rng.random_range(1..=max_other)).collect();
    let mut total: usize = rest.iter().sum();
    while total != rest_target {
        let i = rng.random_range(0..rest.len());
        if total < rest_target && rest[i] < max_other {
            rest[i] += 1;
            total += 1;
        } else if total > rest_target && rest[i] > 1 {
            rest[i] -= 1;
            total -= 1;
        }
    }
    let mut d_in = Vec::with_capacity(n);
    d_in.push(hub_in);
    d_in.extend(rest);
    BiDegreeSequence::from_degrees(d_in, vec![d_out; n])
}
