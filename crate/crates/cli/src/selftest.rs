//! Exact invariants that any build must satisfy, run in a few seconds.

use dcmlab::degseq::{entropic, gen_powerlaw_seq};
use dcmlab::graph::sample_dcm;
use dcmlab::limits::{bulk_compare, psi_measure, BulkSettings, PopulationSettings};
use dcmlab::tails::build_skeleton;
use dcmlab::walk::{apply_p, pagerank, pagerank_bounds_check, stationary, tv, DistVector, PageRankParams};
use dcmlab::{BiDegreeSequence, Digraph};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: dcmlab::Error) -> String {
    e.to_string()
}

fn matching_realizes_degrees() -> Result<(), String> {
    for s in 0..5 {
        let seq = gen_powerlaw_seq(500, 2.5, 2, s).map_err(err)?;
        let g = sample_dcm(&seq, s);
        let mut seen = vec![false; g.m()];
        for &f in g.matching() {
            ensure(!seen[f], || format!("head {f} matched twice"))?;
            seen[f] = true;
        }
        let mut indeg = vec![0; g.n()];
        for (_, x) in g.edges() {
            indeg[x] += 1;
        }
        ensure(indeg == seq.in_degrees(), || "in-degrees not realized".into())?;
    }
    Ok(())
}

fn two_vertex_chain() -> Result<(), String> {
    let seq = BiDegreeSequence::new(&[(2, 2), (1, 1)]).map_err(err)?;
    let g = Digraph::from_edges(seq, &[(0, 0), (0, 1), (1, 0)]).map_err(err)?;
    let pi = stationary(&g, 1e-14, 10_000).map_err(err)?.pi;
    let want = [2.0 / 3.0, 1.0 / 3.0];
    ensure(
        pi.probs().iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-12),
        || format!("got {:?}", pi.probs()),
    )
}

fn eulerian_identity() -> Result<(), String> {
    let d: Vec<usize> = (0..1000).map(|v| 2 + (v * 7919) % 13).collect();
    let seq = BiDegreeSequence::eulerian(d).map_err(err)?;
    let g = sample_dcm(&seq, 1);
    let pi = stationary(&g, 1e-12, 100_000).map_err(err)?.pi;
    let mu_in = DistVector::new(seq.mu_in()).map_err(err)?;
    let d_tv = tv(&pi, &mu_in).map_err(err)?;
    ensure(d_tv <= 1e-9, || format!("TV(pi, mu_in) = {d_tv:e}"))?;
    let want = seq.max_in() as f64 / seq.m() as f64;
    ensure((pi.max().1 - want).abs() <= 1e-9, || format!("pi_max {} vs {want}", pi.max().1))
}

fn regular_is_uniform_with_zero_w1() -> Result<(), String> {
    let seq = BiDegreeSequence::regular(200, 3).map_err(err)?;
    let g = sample_dcm(&seq, 2);
    let pi = stationary(&g, 1e-10, 10_000).map_err(err)?.pi;
    ensure(psi_measure(&pi).sorted().iter().all(|&x| x == 1.0), || "pi not uniform".into())?;
    let settings = BulkSettings {
        population: PopulationSettings {
            pool_size: 1000,
            generations: 3,
            ..Default::default()
        },
        n_samples: None,
    };
    let w1 = bulk_compare(&seq, &pi, &settings, 2).map_err(err)?.w1;
    ensure(w1 == 0.0, || format!("w1 = {w1:e}"))
}

fn pagerank_extremes() -> Result<(), String> {
    let seq = gen_powerlaw_seq(300, 2.5, 2, 3).map_err(err)?;
    let g = sample_dcm(&seq, 3);
    let lambda = DistVector::new(seq.mu_in()).map_err(err)?;
    let one = pagerank(&g, &PageRankParams::new(1.0, lambda.clone()).map_err(err)?, 1e-12).map_err(err)?;
    ensure(one == lambda, || "alpha = 1 does not return lambda".into())?;
    let zero = pagerank(&g, &PageRankParams::new(0.0, lambda).map_err(err)?, 1e-10).map_err(err)?;
    let pi = stationary(&g, 1e-10, 100_000).map_err(err)?.pi;
    let d = tv(&zero, &pi).map_err(err)?;
    ensure(d <= 1e-9, || format!("alpha = 0 differs from pi by {d:e}"))
}

fn pagerank_lower_bound() -> Result<(), String> {
    for s in 0..5 {
        let seq = gen_powerlaw_seq(1000, 2.5, 2, 10 + s).map_err(err)?;
        let g = sample_dcm(&seq, s);
        let params = PageRankParams::uniform(0.15 + 0.15 * s as f64, 1000).map_err(err)?;
        let pr = pagerank(&g, &params, 1e-12).map_err(err)?;
        let b = pagerank_bounds_check(&g, &params, &pr);
        ensure(b.lower_holds, || format!("seed {s}: {} < {}", b.max_pr, b.lower_bound))?;
    }
    Ok(())
}

fn mass_is_conserved() -> Result<(), String> {
    let seq = gen_powerlaw_seq(2000, 2.5, 3, 4).map_err(err)?;
    let g = sample_dcm(&seq, 4);
    let mut mu = DistVector::dirac(2000, 17);
    for _ in 0..20 {
        mu = apply_p(&g, &mu).map_err(err)?;
    }
    let total: f64 = mu.probs().iter().sum();
    ensure((total - 1.0).abs() <= 1e-12, || format!("mass {total}"))?;
    let pi = stationary(&g, 1e-10, 100_000).map_err(err)?.pi;
    let mean = psi_measure(&pi).mean();
    ensure((mean - 1.0).abs() <= 1e-9, || format!("psi mean {mean}"))
}

fn skeleton_edge_bounds() -> Result<(), String> {
    let seq = gen_powerlaw_seq(5000, 2.5, 2, 5).map_err(err)?;
    let g = sample_dcm(&seq, 5);
    let sk = build_skeleton(&g, 0.25, None, None).map_err(err)?;
    for x in &sk.expansions {
        ensure(x.kappa() as f64 <= 2.0 / x.w_min, || format!("root {}", x.root))?;
    }
    ensure(sk.matched_pairs.len() as f64 <= sk.edge_bound(&g), || "edge bound".into())
}

fn entropic_scale_invariance() -> Result<(), String> {
    let seq = gen_powerlaw_seq(1000, 2.5, 3, 6).map_err(err)?;
    let twice = |v: &[usize]| v.iter().chain(v).copied().collect::<Vec<_>>();
    let big = BiDegreeSequence::from_degrees(twice(seq.in_degrees()), twice(seq.out_degrees())).map_err(err)?;
    let (a, b) = (entropic(&seq, 0.0).map_err(err)?, entropic(&big, 0.0).map_err(err)?);
    ensure(a.entropy == b.entropy, || format!("{} vs {}", a.entropy, b.entropy))?;
    ensure(b.t_ent == 2000f64.ln() / a.entropy, || "T_ent not log(2n)/H".into())
}

const CHECKS: &[(&str, Check)] = &[
    ("matching realizes the degree sequence", matching_realizes_degrees),
    ("two-vertex chain has stationary law (2/3, 1/3)", two_vertex_chain),
    ("Eulerian stationary law is the in-degree law", eulerian_identity),
    ("regular graph: uniform pi and zero bulk W1", regular_is_uniform_with_zero_w1),
    ("PageRank at alpha 1 and 0", pagerank_extremes),
    ("PageRank lower bound", pagerank_lower_bound),
    ("transition conserves mass", mass_is_conserved),
    ("skeleton expansions respect their edge bounds", skeleton_edge_bounds),
    ("entropic time under vertex duplication", entropic_scale_invariance),
];

pub fn run() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let r = f();
            CheckResult {
                name,
                pass: r.is_ok(),
                detail: r.err(),
            }
        })
        .collect()
}
