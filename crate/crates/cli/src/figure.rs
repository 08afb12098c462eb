//! Simulation protocol for maximum stationary and PageRank values:
//! power-law in-degrees, constant out-degree, `samples_per_n` graphs per
//! size.
//!
//! Table A holds per-size means of `pi_max`, `pi` at the max in-degree
//! vertex and the PageRank counterparts, plus the means of the per-sample
//! ratios. Table B is the pooled log2-binned histogram of `n pi(v)` and
//! `n PR(v)`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dcmlab::graph::sample_dcm;
use dcmlab::walk::{default_tol, pagerank, stationary, PageRankParams};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::runner::{build_sequence, lambda, write_json, CheckOutcome, Outcome, RunSpec, VERSION};

/// Values below `2^MIN_EXP` share the first bin.
const MIN_EXP: i32 = -20;

#[derive(Debug, Clone, Serialize)]
pub struct TableARow {
    pub n: usize,
    pub samples: usize,
    pub pi_max: f64,
    pub pi_delta: f64,
    pub pr_max: f64,
    pub pr_delta: f64,
    pub ratio_pi: f64,
    pub ratio_pr: f64,
}

struct Sample {
    pi_max: f64,
    pi_delta: f64,
    pr_max: f64,
    pr_delta: f64,
    hist_pi: Vec<u64>,
    hist_pr: Vec<u64>,
}

fn top_exp(n: usize) -> i32 {
    (n as f64).log2().ceil() as i32
}

/// Bin 0 is `[0, 2^MIN_EXP)`; bin `j >= 1` is `[2^(MIN_EXP + j - 1), 2^(MIN_EXP + j))`.
fn bin_edges(n: usize) -> Vec<(f64, f64)> {
    let mut edges = vec![(0.0, 2f64.powi(MIN_EXP))];
    edges.extend((MIN_EXP..=top_exp(n)).map(|k| (2f64.powi(k), 2f64.powi(k + 1))));
    edges
}

fn histogram(values: impl Iterator<Item = f64>, n: usize) -> Vec<u64> {
    let bins = bin_edges(n).len();
    let mut h = vec![0u64; bins];
    let floor = 2f64.powi(MIN_EXP);
    for x in values {
        let j = if x < floor {
            0
        } else {
            ((x.log2().floor() as i32 - MIN_EXP + 1) as usize).min(bins - 1)
        };
        h[j] += 1;
    }
    h
}

fn one_sample(cfg: &Config, spec: &RunSpec) -> CliResult<Sample> {
    let seq = build_sequence(cfg, None, spec.n, spec.seed)?;
    let g = sample_dcm(&seq, spec.seed);
    let n = seq.n();
    let tol = cfg.params.tol.unwrap_or_else(|| default_tol(n));
    let pi = stationary(&g, tol, cfg.params.max_iters)?.pi;
    let params = PageRankParams::new(cfg.params.alpha, lambda(cfg.params.lambda, &seq)?)?;
    let pr = pagerank(&g, &params, tol)?;
    let (hub, _) = seq.argmax_in();
    let s = Sample {
        pi_max: pi.max().1,
        pi_delta: pi.get(hub),
        pr_max: pr.max().1,
        pr_delta: pr.get(hub),
        hist_pi: histogram(pi.probs().iter().map(|p| n as f64 * p), n),
        hist_pr: histogram(pr.probs().iter().map(|p| n as f64 * p), n),
    };
    if !(s.pi_delta <= s.pi_max && s.pr_delta <= s.pr_max) {
        return Err(CliError::Runtime(format!(
            "n {n} seed {}: value at the max in-degree vertex exceeds the maximum",
            spec.seed
        )));
    }
    Ok(s)
}

pub fn execute(cfg: &Config, out: &Path) -> CliResult<Outcome> {
    fs::create_dir_all(out)?;
    let per_n = cfg.params.samples_per_n;
    let mut index = 0usize;
    let mut table_a = Vec::new();
    let mut csv_a = String::from("n,samples,pi_max,pi_delta,pr_max,pr_delta,ratio_pi,ratio_pr\n");
    let mut csv_b = String::from("n,lo,hi,count_pi,count_pr\n");
    for &n in &cfg.n {
        let specs: Vec<RunSpec> = (0..per_n)
            .map(|i| RunSpec {
                index: index + i,
                n,
                seed: cfg.seeds.base.wrapping_add((index + i) as u64),
            })
            .collect();
        index += per_n;
        let samples = specs
            .par_iter()
            .map(|s| one_sample(cfg, s))
            .collect::<CliResult<Vec<Sample>>>()?;
        let k = samples.len() as f64;
        let mean = |f: &dyn Fn(&Sample) -> f64| samples.iter().map(f).sum::<f64>() / k;
        let row = TableARow {
            n,
            samples: samples.len(),
            pi_max: mean(&|s| s.pi_max),
            pi_delta: mean(&|s| s.pi_delta),
            pr_max: mean(&|s| s.pr_max),
            pr_delta: mean(&|s| s.pr_delta),
            ratio_pi: mean(&|s| s.pi_max / s.pi_delta),
            ratio_pr: mean(&|s| s.pr_max / s.pr_delta),
        };
        writeln!(
            csv_a,
            "{},{},{},{},{},{},{},{}",
            row.n, row.samples, row.pi_max, row.pi_delta, row.pr_max, row.pr_delta, row.ratio_pi, row.ratio_pr
        )
        .expect("string write");
        let edges = bin_edges(n);
        for (j, (lo, hi)) in edges.iter().enumerate() {
            let c_pi: u64 = samples.iter().map(|s| s.hist_pi[j]).sum();
            let c_pr: u64 = samples.iter().map(|s| s.hist_pr[j]).sum();
            writeln!(csv_b, "{n},{lo:e},{hi:e},{c_pi},{c_pr}").expect("string write");
        }
        table_a.push(row);
    }
    fs::write(out.join("table_a.csv"), &csv_a)?;
    fs::write(out.join("table_b.csv"), &csv_b)?;

    let check = cfg.check.as_ref().map(|c| {
        let [lo, hi] = c.ratio_band;
        let passing = table_a.iter().filter(|r| (lo..=hi).contains(&r.ratio_pi)).count();
        let fraction = passing as f64 / table_a.len() as f64;
        CheckOutcome {
            passing,
            total: table_a.len(),
            fraction,
            min_fraction: 1.0,
            pass: passing == table_a.len(),
        }
    });
    let summary = json!({
        "tool": "dcmlab",
        "version": VERSION,
        "kind": "figure-sim",
        "config": cfg,
        "tables": { "a": "table_a.csv", "b": "table_b.csv" },
        "table_a": table_a,
        "check": check,
    });
    let path = out.join("summary.json");
    write_json(&path, &summary)?;
    Ok(Outcome {
        summary: path,
        failed_runs: 0,
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_cover_the_range() {
        let n = 1000;
        let e = bin_edges(n);
        assert_eq!(e[0], (0.0, 2f64.powi(MIN_EXP)));
        assert_eq!(e.last().unwrap().1, 1024.0 * 2.0);
        for w in e.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        let h = histogram([0.0, 1e-9, 1.0, 1.5, 2.0, 999.0, 1e6].into_iter(), n);
        assert_eq!(h.iter().sum::<u64>(), 7);
        assert_eq!(h[0], 2);
        let one = (0 - MIN_EXP + 1) as usize;
        assert_eq!(h[one], 2);
        assert_eq!(h[one + 1], 1);
        assert_eq!(*h.last().unwrap(), 1);
    }
}
