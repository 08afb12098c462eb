//! Acceptance criteria. Prints one PASS/FAIL line per criterion.
//!
//! Statistical criteria run through the `dcmlab` binary where a subcommand
//! covers them, so the runner is exercised end to end. Set
//! `ACCEPTANCE_ONLY=4,7` to run a subset.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use dcmlab::degseq::gen_powerlaw_seq;
use dcmlab::graph::{sample_dcm, sample_gw_tree, sequential_generate, Direction, Priority};
use dcmlab::limits::martingale_m;
use dcmlab::walk::{
    apply_p, pagerank, pagerank_bounds_check, stationary, stationary_with, tv, DistVector, PageRankParams,
};
use dcmlab::{BiDegreeSequence, Digraph};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tempfile::TempDir;

/// Criteria whose desk-scale pass rate sits below the registered
/// threshold. They still print FAIL when they fail; only an unexpected
/// failure makes the target exit nonzero.
const KNOWN_SHORTFALLS: &[u32] = &[5];

type Verdict = (bool, String);

// ---------------------------------------------------------------------------
// Helpers

fn dcmlab(kind: &str, config: &str, dir: &Path) -> (Option<i32>, Value) {
    let cfg = dir.join(format!("{kind}.json"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join(kind);
    let status = Command::new(env!("CARGO_BIN_EXE_dcmlab"))
        .args(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()].iter().fold(
            vec![kind],
            |mut v, a| {
                v.push(a);
                v
            },
        ))
        .env_remove("DCMLAB_JOBS")
        .output()
        .expect("binary runs");
    let summary = fs::read_to_string(out.join("summary.json"))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .unwrap_or(Value::Null);
    if summary.is_null() {
        eprintln!("{}", String::from_utf8_lossy(&status.stderr));
    }
    (status.status.code(), summary)
}

/// Rows of an aggregate CSV as maps from column name to text.
fn csv_rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let text = fs::read_to_string(path).unwrap_or_default();
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return vec![];
    };
    let cols: Vec<&str> = header.split(',').collect();
    lines
        .map(|l| cols.iter().map(|c| c.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn dense_p(g: &Digraph) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(g.n(), g.n());
    for (y, x) in g.edges() {
        p[(y, x)] += 1.0 / g.seq().d_out(y) as f64;
    }
    p
}

fn dense_stationary(p: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = p.nrows();
    let a = p.transpose() - DMatrix::identity(n, n);
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    if n > 1 && sv[1] < 1e-9 {
        return None;
    }
    let mut a = a;
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b)
}

fn dense_pagerank(p: &DMatrix<f64>, alpha: f64, lambda: &[f64]) -> DVector<f64> {
    let n = p.nrows();
    let a = (DMatrix::identity(n, n) - p * (1.0 - alpha)).transpose();
    let b = DVector::from_iterator(n, lambda.iter().map(|l| alpha * l));
    a.lu().solve(&b).expect("invertible")
}

fn max_abs_diff(a: &[f64], b: &DVector<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_small_graph(rng: &mut ChaCha8Rng) -> Digraph {
    let n = rng.random_range(2..=8);
    let out: Vec<usize> = (0..n).map(|_| rng.random_range(1..=3)).collect();
    let mut inn = vec![0; n];
    for _ in 0..out.iter().sum::<usize>() {
        inn[rng.random_range(0..n)] += 1;
    }
    sample_dcm(&BiDegreeSequence::from_degrees(inn, out).unwrap(), rng.random())
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

// ---------------------------------------------------------------------------
// Criteria

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut e_apply, mut e_pi, mut e_pr) = (0f64, 0f64, 0f64);
    let mut compared = 0;
    for i in 0..200 {
        let g = random_small_graph(&mut rng);
        let p = dense_p(&g);
        let mu = DistVector::new((0..g.n()).map(|_| rng.random::<f64>() + 0.01).collect()).unwrap();
        let want = p.transpose() * DVector::from_column_slice(mu.probs());
        e_apply = e_apply.max(max_abs_diff(apply_p(&g, &mu).unwrap().probs(), &want));
        if let Some(want) = dense_stationary(&p) {
            let got = stationary(&g, 1e-13, 1_000_000).unwrap();
            e_pi = e_pi.max(max_abs_diff(got.pi.probs(), &want));
            compared += 1;
        }
        let alpha = if i % 2 == 0 { 0.25 } else { rng.random_range(0.01..0.99) };
        let got = pagerank(&g, &PageRankParams::new(alpha, mu.clone()).unwrap(), 1e-13).unwrap();
        e_pr = e_pr.max(max_abs_diff(got.probs(), &dense_pagerank(&p, alpha, mu.probs())));
    }
    (
        e_apply <= 1e-12 && e_pi <= 1e-8 && e_pr <= 1e-8,
        format!("apply_P err {e_apply:.1e}, stationary err {e_pi:.1e} ({compared} irreducible), pagerank err {e_pr:.1e} over 200 graphs"),
    )
}

fn eulerian_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_tv, mut worst_max) = (0f64, 0f64);
    for i in 0..50 {
        let n = [10, 100, 1000, 10_000][i % 4];
        let d: Vec<usize> = (0..n)
            .map(|_| 2 + (rng.random::<f64>().powf(-1.0 / 1.5).floor() as usize - 1).min(n / 4))
            .collect();
        let seq = BiDegreeSequence::eulerian(d).unwrap();
        let g = sample_dcm(&seq, i as u64);
        let mu_in = DistVector::new(seq.mu_in()).unwrap();
        let from_uniform =
            stationary_with(&dcmlab::walk::Transition::new(&g).unwrap(), vec![1.0 / n as f64; n], 1e-13, 1_000_000)
                .unwrap();
        let s = stationary(&g, 1e-10, 100_000).unwrap();
        worst_tv = worst_tv
            .max(tv(&from_uniform.pi, &mu_in).unwrap())
            .max(tv(&s.pi, &mu_in).unwrap());
        let want = seq.max_in() as f64 / seq.m() as f64;
        worst_max = worst_max.max((s.pi.max().1 - want).abs());
    }
    (
        worst_tv <= 1e-9 && worst_max <= 1e-9,
        format!("max TV(pi, mu_in) {worst_tv:.1e}, max |pi_max - max_in/m| {worst_max:.1e} over 50 sequences"),
    )
}

/// All bi-degree sequences with `1 <= m <= 4` and no isolated vertex, up to
/// relabeling, listed in nonincreasing order of `(d_in, d_out)`.
fn small_sequences() -> Vec<BiDegreeSequence> {
    fn extend(
        m: usize,
        rest_in: usize,
        rest_out: usize,
        max: (usize, usize),
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if rest_in == 0 && rest_out == 0 {
            out.push(cur.clone());
            return;
        }
        for i in (0..=m).rev() {
            for o in (0..=m).rev() {
                if i + o == 0 || (i, o) > max || i > rest_in || o > rest_out {
                    continue;
                }
                cur.push((i, o));
                extend(m, rest_in - i, rest_out - o, (i, o), cur, out);
                cur.pop();
            }
        }
    }
    let mut all = Vec::new();
    for m in 1..=4 {
        extend(m, m, m, (m, m), &mut vec![], &mut all);
    }
    all.iter().map(|p| BiDegreeSequence::new(p).unwrap()).collect()
}

fn chi_square_p(samples: impl Iterator<Item = Digraph>, m: usize) -> f64 {
    let classes: usize = (1..=m).product();
    if classes == 1 {
        return 1.0;
    }
    let mut counts = vec![0u64; m.pow(m as u32)];
    let mut total = 0u64;
    for g in samples {
        let key = g.matching().iter().fold(0, |acc, &f| acc * m + f);
        counts[key] += 1;
        total += 1;
    }
    let expected = total as f64 / classes as f64;
    let observed = counts.iter().filter(|&&c| c > 0).count();
    let stat: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum::<f64>()
        + (classes - observed) as f64 * expected;
    ChiSquared::new((classes - 1) as f64).unwrap().sf(stat)
}

fn matching_uniformity() -> Verdict {
    const SAMPLES: u64 = 100_000;
    let seqs = small_sequences();
    let mut min_p = f64::INFINITY;
    let mut failures = Vec::new();
    let mut tests = 0;
    for (k, seq) in seqs.iter().enumerate() {
        let m = seq.m();
        // The bijection depends only on m and the seed, so every test gets
        // its own seed range; shared seeds would repeat the same draw.
        let seeds = |j: u64| {
            let base = (3 * k as u64 + j) * SAMPLES;
            base..base + SAMPLES
        };
        let ps = [
            ("sample_dcm", chi_square_p(seeds(0).map(|s| sample_dcm(seq, s)), m)),
            (
                "sequential/index",
                chi_square_p(seeds(1).map(|s| sequential_generate(seq, Priority::Index, s).0), m),
            ),
            (
                "sequential/bfs",
                chi_square_p(seeds(2).map(|s| sequential_generate(seq, Priority::Bfs { root: 0 }, s).0), m),
            ),
        ];
        for (name, p) in ps {
            tests += 1;
            min_p = min_p.min(p);
            if !(p > 1e-3) {
                failures.push(format!("seq #{k} {name} p = {p:.2e}"));
            }
        }
    }
    (
        failures.is_empty(),
        format!(
            "{} sequences, {tests} tests, min p {min_p:.3e}{}",
            seqs.len(),
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    )
}

fn cutoff_band(dir: &Path) -> Verdict {
    let (code, s) = dcmlab(
        "mix-profile",
        r#"{"sequence": {"source": "powerlaw", "kappa": 2.5, "d_out": 2}, "n": [4096],
            "seeds": {"base": 0, "count": 20},
            "params": {"rho": [0.5, 1.0, 1.5], "start_mode": {"sample": 64}},
            "check": {"min_fraction": 0.9}}"#,
        dir,
    );
    let rows = csv_rows(&dir.join("mix-profile/mix-profile.csv"));
    let c = &s["check"];
    (
        code == Some(0) && rows.len() == 60,
        format!(
            "{}/{} seeds with d(0.5 T) >= 0.75 and d(1.5 T) <= 0.25 (need 18), {} profile rows",
            c["passing"], c["total"], rows.len()
        ),
    )
}

fn pi_max_sandwich(dir: &Path) -> Verdict {
    let (code, s) = dcmlab(
        "stationary",
        r#"{"sequence": {"source": "powerlaw", "kappa": 2.5, "d_out": 2}, "n": [10000],
            "seeds": {"base": 0, "count": 50}, "check": {"min_fraction": 0.9}}"#,
        dir,
    );
    let rows = csv_rows(&dir.join("stationary/stationary.csv"));
    let upper = rows.iter().filter(|r| r["upper_flag"] == "true").count();
    let lower = rows.iter().filter(|r| r["lower_flag"] == "true").count();
    let c = &s["check"];
    (
        code == Some(0),
        format!(
            "{}/{} seeds inside (need 45); lower side {lower}/50, upper side {upper}/50",
            c["passing"], c["total"]
        ),
    )
}

fn bulk_w1(dir: &Path) -> Verdict {
    let (code, s) = dcmlab(
        "bulk-w1",
        r#"{"sequence": {"source": "powerlaw", "kappa": 2.5, "d_out": 3}, "n": [10000],
            "seeds": {"base": 0, "count": 20}, "check": {"min_fraction": 0.9, "w1_max": 0.15}}"#,
        dir,
    );
    let reg_dir = dir.join("regular");
    fs::create_dir_all(&reg_dir).unwrap();
    let mut exact = true;
    for d in [2, 3, 5] {
        let (code, _) = dcmlab(
            "bulk-w1",
            &format!(
                r#"{{"sequence": {{"source": "regular", "d": {d}}}, "n": [100, 1000, 4096],
                    "params": {{"pool_size": 1000, "generations": 5}}}}"#
            ),
            &reg_dir,
        );
        let rows = csv_rows(&reg_dir.join("bulk-w1/bulk-w1.csv"));
        exact &= code == Some(0) && rows.len() == 3 && rows.iter().all(|r| r["w1"] == "0");
    }
    let c = &s["check"];
    let w1: Vec<f64> = csv_rows(&dir.join("bulk-w1/bulk-w1.csv"))
        .iter()
        .map(|r| r["w1"].parse().unwrap())
        .collect();
    let worst = w1.iter().copied().fold(0.0, f64::max);
    (
        code == Some(0) && exact,
        format!(
            "{}/{} seeds with W1 <= 0.15 (need 18, worst {worst:.3}); regular sequences W1 = 0 exactly: {exact}",
            c["passing"], c["total"]
        ),
    )
}

fn power_law_transfer(dir: &Path) -> Verdict {
    let (code, _) = dcmlab(
        "tails",
        r#"{"sequence": {"source": "powerlaw", "kappa": 2.5, "d_out": 2}, "n": [100000],
            "seeds": {"base": 0, "count": 20},
            "params": {"kappa": 2.5, "eps": 0.4, "grid": [0.1, 0.2, 0.3], "alpha": 0.25, "lambda": "uniform"}}"#,
        dir,
    );
    let rows = csv_rows(&dir.join("tails/tails.csv"));
    let psi = rows.iter().filter(|r| r["psi_pass"] == "true").count();
    let pr = rows.iter().filter(|r| r["pr_pass"] == "true").count();
    (
        code == Some(0) && rows.len() == 20 && psi >= 16 && pr >= 16,
        format!("stationary {psi}/20, PageRank {pr}/20 pass every band (need 16 each)"),
    )
}

fn skeleton_bound(dir: &Path) -> Verdict {
    let (code, s) = dcmlab(
        "skeleton",
        r#"{"sequence": {"source": "powerlaw", "kappa": 2.5, "d_out": 2}, "n": [10000],
            "seeds": {"base": 0, "count": 50}, "params": {"a": 0.25},
            "check": {"min_fraction": 0.95, "size_slack": 0.3}}"#,
        dir,
    );
    let runs = s["runs"].as_array().cloned().unwrap_or_default();
    let kappa_ok = !runs.is_empty() && runs.iter().all(|r| r["result"]["kappa_bound_holds"] == Value::Bool(true));
    let c = &s["check"];
    (
        code == Some(0) && kappa_ok,
        format!(
            "{}/{} seeds with |edges| <= n^(1 - a kappa + 0.3) (need 48); kappa <= 2/w_min on every expansion: {kappa_ok}",
            c["passing"], c["total"]
        ),
    )
}

fn martingale_statistics() -> Verdict {
    // Mild non-regular sequence: in-degrees 1..=4, out-degrees 2..=3.
    let n = 2000;
    let out: Vec<usize> = (0..n).map(|v| 2 + v % 2).collect();
    let m: usize = out.iter().sum();
    let mut inn: Vec<usize> = (0..n).map(|v| 1 + (v * 7) % 4).collect();
    let mut total: usize = inn.iter().sum();
    let mut v = 0;
    while total != m {
        if total > m && inn[v] > 1 {
            inn[v] -= 1;
            total -= 1;
        } else if total < m && inn[v] < 4 {
            inn[v] += 1;
            total += 1;
        }
        v = (v + 1) % n;
    }
    let seq = BiDegreeSequence::from_degrees(inn, out).unwrap();
    let a = seq.second_moment_ratio();
    let mut worst_z = 0f64;
    let mut var_ok = true;
    for y in 0..4 {
        let dy = seq.d_in(y) as f64;
        let trees: Vec<_> = (0..10_000u64)
            .map(|s| sample_gw_tree(&seq, y, 6, Direction::In, s, None).unwrap())
            .collect();
        for h in 0..=6 {
            let x: Vec<f64> = trees.iter().map(|t| martingale_m(t, &seq, h).unwrap()).collect();
            let (mean, se) = mean_se(&x);
            let z = if se > 0.0 { (mean - dy).abs() / se } else if mean == dy { 0.0 } else { f64::INFINITY };
            worst_z = worst_z.max(z);
            let k = x.len() as f64;
            let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
            let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / k;
            let var = m2 * k / (k - 1.0);
            let var_se = ((m4 - m2 * m2) / k).sqrt();
            var_ok &= var <= 2.0 * (a - 1.0) * dy + 3.0 * var_se;
        }
    }
    (
        worst_z <= 3.0 && var_ok,
        format!("worst |mean - d_y| = {worst_z:.2} se over 4 roots x 7 depths; variance bound holds: {var_ok}"),
    )
}

fn pagerank_inequalities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut instances = 0;
    let mut lower_ok = true;
    for s in 0..60u64 {
        let n = [500, 2000, 10_000][s as usize % 3];
        let seq = gen_powerlaw_seq(n, 2.5, 2 + (s as usize % 2), s).unwrap();
        let g = sample_dcm(&seq, s);
        let alpha = rng.random_range(0.01..0.99);
        let lambda = if s % 2 == 0 {
            DistVector::uniform(n)
        } else {
            DistVector::new((0..n).map(|_| rng.random::<f64>() + 1e-3).collect()).unwrap()
        };
        let params = PageRankParams::new(alpha, lambda).unwrap();
        let pr = pagerank(&g, &params, 1e-12).unwrap();
        lower_ok &= pagerank_bounds_check(&g, &params, &pr).lower_holds;
        instances += 1;
    }
    for _ in 0..200 {
        let g = random_small_graph(&mut rng);
        let alpha = rng.random_range(0.001..0.999);
        let lambda = DistVector::new((0..g.n()).map(|_| rng.random::<f64>() + 1e-3).collect()).unwrap();
        let params = PageRankParams::new(alpha, lambda).unwrap();
        let pr = pagerank(&g, &params, 1e-13).unwrap();
        lower_ok &= pagerank_bounds_check(&g, &params, &pr).lower_holds;
        instances += 1;
    }
    let mut alpha_one = true;
    let mut alpha_zero = 0f64;
    for s in 0..20u64 {
        let seq = gen_powerlaw_seq(3000, 2.5, 2, 100 + s).unwrap();
        let g = sample_dcm(&seq, s);
        let lambda = DistVector::new((0..3000).map(|_| rng.random::<f64>()).collect()).unwrap();
        let one = pagerank(&g, &PageRankParams::new(1.0, lambda.clone()).unwrap(), 1e-10).unwrap();
        alpha_one &= one == lambda;
        let tol = 1e-10;
        let zero = pagerank(&g, &PageRankParams::new(0.0, lambda).unwrap(), tol).unwrap();
        let pi = stationary(&g, tol, 100_000).unwrap().pi;
        alpha_zero = alpha_zero.max(tv(&zero, &pi).unwrap());
    }
    let mut zero_dense = 0f64;
    for _ in 0..100 {
        let g = random_small_graph(&mut rng);
        let Some(want) = dense_stationary(&dense_p(&g)) else {
            continue;
        };
        let zero = pagerank(&g, &PageRankParams::uniform(0.0, g.n()).unwrap(), 1e-12).unwrap();
        zero_dense = zero_dense.max(max_abs_diff(zero.probs(), &want));
    }
    (
        lower_ok && alpha_one && alpha_zero <= 1e-10 && zero_dense <= 1e-8,
        format!(
            "lower bound on {instances} instances: {lower_ok}; alpha = 1 returns lambda exactly: {alpha_one}; \
             alpha = 0 vs pi TV {alpha_zero:.1e}, vs dense oracle {zero_dense:.1e}"
        ),
    )
}

fn figure_protocol(dir: &Path) -> Verdict {
    let (code, s) = dcmlab(
        "figure-sim",
        r#"{"sequence": {"source": "powerlaw", "kappa": 2.5, "d_out": 2}, "n": [1000, 10000],
            "seeds": {"base": 0}, "params": {"samples_per_n": 500, "alpha": 0.25, "lambda": "uniform"},
            "check": {"ratio_band": [1.0, 10.0]}}"#,
        dir,
    );
    let a = csv_rows(&dir.join("figure-sim/table_a.csv"));
    let b = csv_rows(&dir.join("figure-sim/table_b.csv"));
    let ns: HashSet<&str> = b.iter().map(|r| r["n"].as_str()).collect();
    let ratios: Vec<String> = a.iter().map(|r| format!("n={}: {:.3}", r["n"], r["ratio_pi"].parse::<f64>().unwrap())).collect();
    (
        code == Some(0) && a.len() == 2 && ns.len() == 2 && s["check"]["pass"] == Value::Bool(true),
        format!("500 samples per n, both tables written; mean pi_max/pi(argmax d^-) {}", ratios.join(", ")),
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let only: Option<HashSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_path_buf();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Verdict>)> = vec![
        (1, "exact oracle equivalence", Box::new(oracle_equivalence)),
        (2, "Eulerian identity", Box::new(eulerian_identity)),
        (3, "matching uniformity", Box::new(matching_uniformity)),
        (4, "cutoff band", Box::new({ let d = dir.clone(); move || cutoff_band(&d) })),
        (5, "pi_max sandwich", Box::new({ let d = dir.clone(); move || pi_max_sandwich(&d) })),
        (6, "bulk W1", Box::new({ let d = dir.clone(); move || bulk_w1(&d) })),
        (7, "power-law transfer", Box::new({ let d = dir.clone(); move || power_law_transfer(&d) })),
        (8, "skeleton bound", Box::new({ let d = dir.clone(); move || skeleton_bound(&d) })),
        (9, "martingale statistics", Box::new(martingale_statistics)),
        (10, "PageRank inequalities", Box::new(pagerank_inequalities)),
        (11, "figure protocol", Box::new({ let d = dir.clone(); move || figure_protocol(&d) })),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    let mut ran = 0;
    for (id, name, f) in &criteria {
        if only.as_ref().is_some_and(|o| !o.contains(id)) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = f();
        let secs = start.elapsed().as_secs_f64();
        ran += 1;
        passed += ok as usize;
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if !ok && KNOWN_SHORTFALLS.contains(id) { " [known desk-scale shortfall]" } else { "" };
        println!("{tag} {id:>2} {name}: {detail} ({secs:.1} s){note}");
        if !ok && !KNOWN_SHORTFALLS.contains(id) {
            unexpected.push(*id);
        }
    }
    println!("acceptance: {passed}/{ran} criteria pass");
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
