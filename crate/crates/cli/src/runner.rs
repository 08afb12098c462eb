//! Executes a resolved config: one job per `(n, seed)` pair, per-run
//! artifacts under `runs/`, then an aggregate CSV and `summary.json`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use dcmlab::degseq::{classify_tail, entropic, gen_extremal_seq, gen_powerlaw_seq, validate, TailKind};
use dcmlab::graph::sample_dcm;
use dcmlab::limits::{bulk_compare, psi_measure, BulkSettings, PopulationSettings};
use dcmlab::tails::{build_skeleton, extreme_report, skeleton_rank_link, tail_compare};
use dcmlab::walk::{
    default_tol, mix_profile, pagerank, pagerank_bounds_check, pagerank_residual, stationary, DistVector,
    PageRankParams, StartMode,
};
use dcmlab::{io, AssumptionParams, BiDegreeSequence};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Check, Config, Kind, LambdaSpec, SequenceSource};
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunSpec {
    pub index: usize,
    pub n: usize,
    pub seed: u64,
}

/// `seeds.count` runs per size, seeded `base + run_index` in size-major
/// order.
pub fn plan(cfg: &Config, file_n: Option<usize>) -> Vec<RunSpec> {
    let sizes = match file_n {
        Some(n) => vec![n],
        None => cfg.n.clone(),
    };
    sizes
        .iter()
        .flat_map(|&n| std::iter::repeat_n(n, cfg.seeds.count))
        .enumerate()
        .map(|(index, n)| RunSpec {
            index,
            n,
            seed: cfg.seeds.base.wrapping_add(index as u64),
        })
        .collect()
}

pub fn load_file_sequence(cfg: &Config) -> CliResult<Option<BiDegreeSequence>> {
    match &cfg.sequence {
        SequenceSource::File { path } => {
            let f = File::open(path)
                .map_err(|e| CliError::config("sequence.path", format!("cannot open {}: {e}", path.display())))?;
            let seq = io::read_sequence(BufReader::new(f))
                .map_err(|e| CliError::config("sequence.path", e.to_string()))?;
            Ok(Some(seq))
        }
        _ => Ok(None),
    }
}

pub fn build_sequence(cfg: &Config, file: Option<&BiDegreeSequence>, n: usize, seed: u64) -> CliResult<BiDegreeSequence> {
    let seq = match &cfg.sequence {
        SequenceSource::Powerlaw { kappa, d_out } => gen_powerlaw_seq(n, *kappa, *d_out, seed)?,
        SequenceSource::Regular { d } => BiDegreeSequence::regular(n, *d)?,
        SequenceSource::Extremal {
            hub_exponent,
            max_other,
            d_out,
        } => {
            let hub = (n as f64).powf(*hub_exponent).round() as usize;
            gen_extremal_seq(n, hub, *max_other, *d_out, seed)?
        }
        SequenceSource::File { .. } => file.expect("file sequence loaded").clone(),
    };
    Ok(seq)
}

pub fn lambda(spec: LambdaSpec, seq: &BiDegreeSequence) -> CliResult<DistVector> {
    Ok(match spec {
        LambdaSpec::Uniform => DistVector::uniform(seq.n()),
        LambdaSpec::InDegree => DistVector::new(seq.mu_in())?,
        LambdaSpec::OutDegree => DistVector::new(seq.mu_out())?,
    })
}

/// What one run contributes to the summary and the aggregate CSV.
struct RunResult {
    record: Value,
    files: Vec<String>,
    rows: Vec<String>,
    pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub passing: usize,
    pub total: usize,
    pub fraction: f64,
    pub min_fraction: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: PathBuf,
    pub failed_runs: usize,
    pub check: Option<CheckOutcome>,
}

impl Outcome {
    /// Runtime failures take precedence over threshold failures.
    pub fn into_result(self) -> CliResult<Self> {
        if self.failed_runs > 0 {
            return Err(CliError::Runtime(format!(
                "{} run(s) failed; partial results in {}",
                self.failed_runs,
                self.summary.display()
            )));
        }
        if let Some(c) = &self.check {
            if !c.pass {
                return Err(CliError::Check(format!(
                    "{}/{} runs passed ({:.3} < {}); see {}",
                    c.passing,
                    c.total,
                    c.fraction,
                    c.min_fraction,
                    self.summary.display()
                )));
            }
        }
        Ok(self)
    }
}

fn header(kind: Kind) -> &'static str {
    match kind {
        Kind::Generate => "n,seed,m,max_in,max_out,entropy,t_ent,simple,tail_kind",
        Kind::Stationary => {
            "n,seed,iters,residual,lazy,pi_max,argmax,delta_minus,delta_argmax,ratio_lower,ratio_upper,argmax_coincide,lower_flag,upper_flag"
        }
        Kind::MixProfile => "n,seed,t,rho,d_tv,starts_used",
        Kind::Pagerank => "n,seed,alpha,max_pr,argmax,lower_bound,lower_holds,upper_ratio,residual",
        Kind::BulkW1 => "n,seed,w1,population_converged,population_mean",
        Kind::Tails => "n,seed,phi_pass,psi_pass,pr_pass,ratio_lower,lower_flag,upper_flag,argmax_coincide",
        Kind::Skeleton => "n,seed,roots,edges,edge_bound,size_bound,touched,rank_fraction",
        Kind::Validate => "n,seed,min_out_ok,max_out_ok,moment_ok,moment_sum,moment_bound,tail_kind",
        Kind::FigureSim => unreachable!("figure-sim writes its own tables"),
    }
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> dcmlab::Result<()>) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn tail_kind_name(k: TailKind) -> &'static str {
    match k {
        TailKind::PowerLaw => "power_law",
        TailKind::KappaLight => "kappa_light",
        TailKind::Extremal => "extremal",
        TailKind::None => "none",
    }
}

/// Runs every planned job on the current rayon pool and writes the
/// artifacts under `out`.
pub fn execute(kind: Kind, cfg: &Config, out: &Path) -> CliResult<Outcome> {
    if kind == Kind::FigureSim {
        return crate::figure::execute(cfg, out);
    }
    let file = load_file_sequence(cfg)?;
    let runs = plan(cfg, file.as_ref().map(|s| s.n()));
    let run_dir = out.join("runs");
    fs::create_dir_all(&run_dir)?;

    let results: Vec<CliResult<RunResult>> = runs
        .par_iter()
        .map(|spec| {
            let seq = build_sequence(cfg, file.as_ref(), spec.n, spec.seed)?;
            run_one(kind, cfg, spec, &seq, &run_dir)
        })
        .collect();

    let csv_name = format!("{}.csv", kind.name());
    let mut csv = String::from(header(kind));
    csv.push('\n');
    let mut records = Vec::with_capacity(runs.len());
    let (mut passing, mut failed) = (0, 0);
    for (spec, r) in runs.iter().zip(results) {
        match r {
            Ok(r) => {
                for row in &r.rows {
                    csv.push_str(row);
                    csv.push('\n');
                }
                passing += r.pass as usize;
                records.push(json!({
                    "index": spec.index, "n": spec.n, "seed": spec.seed,
                    "files": r.files, "pass": r.pass, "result": r.record,
                }));
            }
            Err(e) => {
                failed += 1;
                records.push(json!({
                    "index": spec.index, "n": spec.n, "seed": spec.seed, "error": e.to_string(),
                }));
            }
        }
    }
    fs::write(out.join(&csv_name), csv)?;

    let total = runs.len();
    // validate is a check mode even without an explicit threshold.
    let check = match (&cfg.check, kind) {
        (Some(c), _) => Some(c.clone()),
        (None, Kind::Validate) => Some(Check {
            min_fraction: 1.0,
            ..Check::default()
        }),
        _ => None,
    }
    .map(|c| {
        let fraction = passing as f64 / total as f64;
        CheckOutcome {
            passing,
            total,
            fraction,
            min_fraction: c.min_fraction,
            pass: fraction >= c.min_fraction,
        }
    });
    let summary = json!({
        "tool": "dcmlab",
        "version": VERSION,
        "kind": kind.name(),
        "config": cfg,
        "runs": records,
        "aggregate": {
            "csv": csv_name,
            "total": total,
            "failed": failed,
            "passing": passing,
            "pass_rule": pass_rule(kind),
        },
        "check": check,
    });
    let path = out.join("summary.json");
    write_json(&path, &summary)?;
    Ok(Outcome {
        summary: path,
        failed_runs: failed,
        check,
    })
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn pass_rule(kind: Kind) -> &'static str {
    match kind {
        Kind::Generate => "in-degrees classify as power law for params.kappa",
        Kind::Stationary => "0.9 max_in/m <= pi_max <= 30 log(n) max_in/m",
        Kind::MixProfile => "first profiled d_tv >= 0.75 and last <= 0.25",
        Kind::Pagerank => "lower bound on max PageRank holds",
        Kind::BulkW1 => "w1 <= check.w1_max",
        Kind::Tails => "stationary and PageRank measures pass every band",
        Kind::Skeleton => "skeleton edges <= n^(1 - a kappa + check.size_slack)",
        Kind::Validate => "moment assumption holds",
        Kind::FigureSim => "per-n mean ratio inside check.ratio_band",
    }
}

fn stem(spec: &RunSpec) -> String {
    format!("n{}_s{}", spec.n, spec.seed)
}

fn tol_for(cfg: &Config, n: usize) -> f64 {
    cfg.params.tol.unwrap_or_else(|| default_tol(n))
}

fn run_one(kind: Kind, cfg: &Config, spec: &RunSpec, seq: &BiDegreeSequence, dir: &Path) -> CliResult<RunResult> {
    let p = &cfg.params;
    let (n, seed) = (seq.n(), spec.seed);
    let lead = format!("{n},{seed}");
    let stem = stem(spec);
    let file = |suffix: &str| (dir.join(format!("{stem}_{suffix}")), format!("runs/{stem}_{suffix}"));
    let tol = tol_for(cfg, n);
    let kappa = cfg.kappa();

    match kind {
        Kind::Validate => {
            let params = AssumptionParams::new(p.eta, p.c, p.k).map_err(|e| CliError::config("params", e.to_string()))?;
            let r = validate(seq, &params);
            let tail = classify_tail(&seq.in_degree_measure(), kappa, p.eps, &p.grid)?;
            let row = format!(
                "{lead},{},{},{},{},{},{}",
                r.min_out_ok,
                r.max_out_ok,
                r.moment_ok,
                r.moment_sum,
                r.moment_bound,
                tail_kind_name(tail.kind)
            );
            Ok(RunResult {
                pass: r.passes(),
                record: json!({ "validation": r, "tail": tail }),
                files: vec![],
                rows: vec![row],
            })
        }
        Kind::Generate => {
            let g = sample_dcm(seq, seed);
            let (seq_path, seq_rel) = file("sequence.txt");
            let (edge_path, edge_rel) = file("edges.txt");
            write_with(&seq_path, |w| io::write_sequence(seq, w))?;
            write_with(&edge_path, |w| io::write_edges(&g, w))?;
            let ent = entropic(seq, p.eps).ok();
            let tail = classify_tail(&seq.in_degree_measure(), kappa, p.eps, &p.grid)?;
            let row = format!(
                "{lead},{},{},{},{},{},{},{}",
                seq.m(),
                seq.max_in(),
                seq.max_out(),
                ent.map_or(f64::NAN, |e| e.entropy),
                ent.map_or(f64::NAN, |e| e.t_ent),
                g.is_simple(),
                tail_kind_name(tail.kind)
            );
            Ok(RunResult {
                pass: tail.kind == TailKind::PowerLaw,
                record: json!({
                    "m": seq.m(), "max_in": seq.max_in(), "max_out": seq.max_out(),
                    "entropic": ent, "simple": g.is_simple(), "tail": tail,
                }),
                files: vec![seq_rel, edge_rel],
                rows: vec![row],
            })
        }
        Kind::Stationary => {
            let g = sample_dcm(seq, seed);
            let s = stationary(&g, tol, p.max_iters)?;
            let (path, rel) = file("pi.csv");
            write_with(&path, |w| io::write_distribution(&s.pi, w))?;
            let r = extreme_report(&g, &s.pi);
            let deviation = s
                .pi
                .probs()
                .iter()
                .map(|x| (n as f64 * x - 1.0).abs())
                .fold(0.0, f64::max);
            let row = format!(
                "{lead},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.iters,
                s.residual,
                s.lazy,
                r.pi_max,
                r.argmax,
                r.delta_minus,
                r.delta_argmax,
                r.ratio_lower,
                r.ratio_upper,
                r.argmax_coincide,
                r.lower_flag,
                r.upper_flag
            );
            Ok(RunResult {
                pass: r.lower_flag && r.upper_flag,
                record: json!({
                    "tol": tol, "iters": s.iters, "residual": s.residual, "lazy": s.lazy,
                    "uniform": deviation <= 1e-9, "max_uniform_deviation": deviation,
                    "extremes": r,
                }),
                files: vec![rel],
                rows: vec![row],
            })
        }
        Kind::MixProfile => {
            let g = sample_dcm(seq, seed);
            let s = stationary(&g, tol, p.max_iters)?;
            let mode = p.start_mode.unwrap_or_else(|| StartMode::default_for(n));
            let prof = mix_profile(&g, &s.pi, &p.rho, mode, seed)?;
            let (path, rel) = file("profile.csv");
            write_with(&path, |w| io::write_profile(&prof, w))?;
            let rows = prof
                .rows
                .iter()
                .map(|r| format!("{lead},{},{},{},{}", r.t, r.rho, r.d_tv, r.starts_used))
                .collect();
            let first = prof.rows.first().map_or(0.0, |r| r.d_tv);
            let last = prof.rows.last().map_or(1.0, |r| r.d_tv);
            Ok(RunResult {
                pass: first >= 0.75 && last <= 0.25,
                record: json!({ "tol": tol, "start_mode": mode, "profile": prof }),
                files: vec![rel],
                rows,
            })
        }
        Kind::Pagerank => {
            let g = sample_dcm(seq, seed);
            let params = PageRankParams::new(p.alpha, lambda(p.lambda, seq)?)
                .map_err(|e| CliError::config("params.alpha", e.to_string()))?;
            let pr = pagerank(&g, &params, tol)?;
            let residual = pagerank_residual(&g, &params, &pr)?;
            let b = pagerank_bounds_check(&g, &params, &pr);
            let (path, rel) = file("pagerank.csv");
            write_with(&path, |w| io::write_distribution(&pr, w))?;
            let row = format!(
                "{lead},{},{},{},{},{},{},{}",
                b.alpha, b.max_pr, b.argmax, b.lower_bound, b.lower_holds, b.upper_ratio, residual
            );
            Ok(RunResult {
                pass: b.lower_holds,
                record: json!({ "tol": tol, "residual": residual, "bounds": b }),
                files: vec![rel],
                rows: vec![row],
            })
        }
        Kind::BulkW1 => {
            let g = sample_dcm(seq, seed);
            let s = stationary(&g, tol, p.max_iters)?;
            let settings = BulkSettings {
                population: PopulationSettings {
                    pool_size: p.pool_size,
                    generations: p.generations,
                    ..Default::default()
                },
                n_samples: p.n_samples,
            };
            let b = bulk_compare(seq, &s.pi, &settings, seed)?;
            let (path, rel) = file("quantiles.csv");
            write_with(&path, |w| write_quantiles(&b.psi, &b.ln_hat, w))?;
            let row = format!("{lead},{},{},{}", b.w1, b.population_converged, b.population_mean);
            let w1_max = cfg.check.as_ref().map_or(Check::default().w1_max, |c| c.w1_max);
            Ok(RunResult {
                pass: b.w1 <= w1_max,
                record: json!({
                    "tol": tol, "w1": b.w1, "psi_mean": b.psi.mean(),
                    "population_converged": b.population_converged,
                    "population_mean": b.population_mean,
                }),
                files: vec![rel],
                rows: vec![row],
            })
        }
        Kind::Tails => {
            let g = sample_dcm(seq, seed);
            let s = stationary(&g, tol, p.max_iters)?;
            let params = PageRankParams::new(p.alpha, lambda(p.lambda, seq)?)
                .map_err(|e| CliError::config("params.alpha", e.to_string()))?;
            let pr = pagerank(&g, &params, tol)?;
            let phi = seq.in_degree_measure();
            let v_pi = tail_compare(&phi, &psi_measure(&s.pi), kappa, p.eps, &p.grid)?;
            let v_pr = tail_compare(&phi, &psi_measure(&pr), kappa, p.eps, &p.grid)?;
            let (pi_path, pi_rel) = file("tails_pi.csv");
            let (pr_path, pr_rel) = file("tails_pagerank.csv");
            write_with(&pi_path, |w| io::write_verdict(&v_pi, w))?;
            write_with(&pr_path, |w| io::write_verdict(&v_pr, w))?;
            let r = extreme_report(&g, &s.pi);
            let row = format!(
                "{lead},{},{},{},{},{},{},{}",
                v_pi.phi_passes(),
                v_pi.psi_passes(),
                v_pr.psi_passes(),
                r.ratio_lower,
                r.lower_flag,
                r.upper_flag,
                r.argmax_coincide
            );
            Ok(RunResult {
                pass: v_pi.psi_passes() && v_pr.psi_passes(),
                record: json!({
                    "tol": tol, "kappa": kappa, "eps": p.eps,
                    "phi_passes": v_pi.phi_passes(),
                    "psi_passes": v_pi.psi_passes(),
                    "pagerank_passes": v_pr.psi_passes(),
                    "stationary": v_pi.rows, "pagerank": v_pr.rows,
                    "extremes": r,
                }),
                files: vec![pi_rel, pr_rel],
                rows: vec![row],
            })
        }
        Kind::Skeleton => {
            let g = sample_dcm(seq, seed);
            let sk = build_skeleton(&g, p.a, p.threshold, p.budget)?;
            let s = stationary(&g, tol, p.max_iters)?;
            let link = skeleton_rank_link(&g, &s.pi, &sk);
            let (path, rel) = file("skeleton.csv");
            write_with(&path, |w| io::write_skeleton(&sk, w))?;
            let slack = cfg.check.as_ref().map_or(Check::default().size_slack, |c| c.size_slack);
            let size_bound = (n as f64).powf(1.0 - p.a * kappa + slack);
            let edges = sk.matched_pairs.len();
            let row = format!(
                "{lead},{},{edges},{},{size_bound},{},{}",
                sk.roots.len(),
                sk.edge_bound(&g),
                sk.touched_vertices.len(),
                link.fraction
            );
            Ok(RunResult {
                pass: edges as f64 <= size_bound,
                record: json!({
                    "a": sk.a, "threshold": sk.threshold, "roots": sk.roots.len(),
                    "edges": edges, "edge_bound": sk.edge_bound(&g), "size_bound": size_bound,
                    "kappa_bound_holds": sk.expansions.iter().all(|x| x.kappa() as f64 <= 2.0 / x.w_min),
                    "rank_link": link,
                }),
                files: vec![rel],
                rows: vec![row],
            })
        }
        Kind::FigureSim => unreachable!("handled by figure::execute"),
    }
}

/// `psi` and `L_n` quantiles at levels `1/100 .. 99/100`.
fn write_quantiles(
    psi: &dcmlab::EmpiricalMeasure,
    ln: &dcmlab::EmpiricalMeasure,
    w: &mut impl Write,
) -> dcmlab::Result<()> {
    let q = |m: &dcmlab::EmpiricalMeasure, u: f64| {
        let s = m.sorted();
        s[((u * s.len() as f64) as usize).min(s.len() - 1)]
    };
    writeln!(w, "level,psi,ln_hat")?;
    for k in 1..100 {
        let u = k as f64 / 100.0;
        writeln!(w, "{u},{},{}", q(psi, u), q(ln, u))?;
    }
    Ok(())
}
