//! Experiment configuration: one JSON document per experiment.
//!
//! Every field has a default, so `{}` is a valid config. The parsed value
//! is the resolved config and is embedded verbatim in run summaries.

use std::path::{Path, PathBuf};

use dcmlab::walk::StartMode;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Largest `n` figure-sim accepts without `allow_large`.
pub const FIGURE_MAX_N: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Generate,
    Stationary,
    MixProfile,
    Pagerank,
    BulkW1,
    Tails,
    Skeleton,
    FigureSim,
    Validate,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Generate => "generate",
            Kind::Stationary => "stationary",
            Kind::MixProfile => "mix-profile",
            Kind::Pagerank => "pagerank",
            Kind::BulkW1 => "bulk-w1",
            Kind::Tails => "tails",
            Kind::Skeleton => "skeleton",
            Kind::FigureSim => "figure-sim",
            Kind::Validate => "validate",
        }
    }
}

/// Where each run's degree sequence comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSource {
    /// Power-law in-degrees with constant out-degree.
    Powerlaw { kappa: f64, d_out: usize },
    /// Every in- and out-degree equal to `d`.
    Regular { d: usize },
    /// One hub of in-degree `round(n^hub_exponent)`, others at most
    /// `max_other`.
    Extremal {
        #[serde(default = "default_hub_exponent")]
        hub_exponent: f64,
        #[serde(default = "default_max_other")]
        max_other: usize,
        d_out: usize,
    },
    /// A sequence file (`n m` header, then `d_in d_out` lines). The `n`
    /// list is ignored.
    File { path: PathBuf },
}

fn default_hub_exponent() -> f64 {
    0.4
}

fn default_max_other() -> usize {
    3
}

impl Default for SequenceSource {
    fn default() -> Self {
        SequenceSource::Powerlaw { kappa: 2.5, d_out: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSpec {
    Uniform,
    /// `mu_in`, proportional to in-degree.
    InDegree,
    /// `mu_out`, proportional to out-degree.
    OutDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub base: u64,
    pub count: usize,
}

impl Default for Seeds {
    fn default() -> Self {
        Self { base: 0, count: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub lambda: LambdaSpec,
    /// Tail index for band checks; defaults to the generator's.
    pub kappa: Option<f64>,
    pub eps: f64,
    pub grid: Vec<f64>,
    pub rho: Vec<f64>,
    /// `None` picks all starts up to `n = 4096` and 64 sampled ones above.
    pub start_mode: Option<StartMode>,
    /// `None` picks `1e-10` up to `n = 1e4` and `1e-8` above.
    pub tol: Option<f64>,
    pub max_iters: usize,
    /// Skeleton exponent.
    pub a: f64,
    pub threshold: Option<f64>,
    pub budget: Option<usize>,
    pub pool_size: usize,
    pub generations: usize,
    pub n_samples: Option<usize>,
    /// Moment assumption constants used by `validate`.
    pub eta: f64,
    pub c: f64,
    pub k: usize,
    pub samples_per_n: usize,
    pub allow_large: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            lambda: LambdaSpec::Uniform,
            kappa: None,
            eps: 0.4,
            grid: vec![0.1, 0.2, 0.3],
            rho: vec![0.5, 1.0, 1.5],
            start_mode: None,
            tol: None,
            max_iters: 100_000,
            a: 0.25,
            threshold: None,
            budget: None,
            pool_size: 100_000,
            generations: 30,
            n_samples: None,
            eta: 0.25,
            c: 100.0,
            k: 10,
            samples_per_n: 500,
            allow_large: false,
        }
    }
}

/// Pass thresholds; when present the run exits with status 3 if the
/// fraction of passing runs falls below `min_fraction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Check {
    pub min_fraction: f64,
    /// bulk-w1: per-run bound on W1.
    pub w1_max: f64,
    /// skeleton: allowed excess exponent in `n^(1 - a kappa + slack)`.
    pub size_slack: f64,
    /// figure-sim: band for the per-n mean of `pi_max / pi(argmax in-degree)`.
    pub ratio_band: [f64; 2],
}

impl Default for Check {
    fn default() -> Self {
        Self {
            min_fraction: 0.9,
            w1_max: 0.15,
            size_slack: 0.3,
            ratio_band: [1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Optional; must match the subcommand when given.
    pub kind: Option<Kind>,
    pub sequence: SequenceSource,
    pub n: Vec<usize>,
    pub seeds: Seeds,
    pub out: Option<PathBuf>,
    pub params: Params,
    pub check: Option<Check>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            kind: None,
            sequence: SequenceSource::default(),
            n: vec![1000],
            seeds: Seeds::default(),
            out: None,
            params: Params::default(),
            check: None,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "config".to_string() } else { path };
            CliError::config(field, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Tail index for band checks.
    pub fn kappa(&self) -> f64 {
        match (self.params.kappa, &self.sequence) {
            (Some(k), _) => k,
            (None, SequenceSource::Powerlaw { kappa, .. }) => *kappa,
            _ => 2.5,
        }
    }

    /// Fills the kind and the tail index, then checks every domain.
    pub fn resolve(mut self, kind: Kind) -> CliResult<Self> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(CliError::config(
                    "kind",
                    format!("is `{}` but the subcommand is `{}`", k.name(), kind.name()),
                ));
            }
        }
        self.kind = Some(kind);
        self.params.kappa = Some(self.kappa());
        self.validate(kind)?;
        Ok(self)
    }

    fn validate(&self, kind: Kind) -> CliResult<()> {
        let bad = |field: &str, reason: String| Err(CliError::config(field, reason));
        let p = &self.params;
        if self.seeds.count == 0 {
            return bad("seeds.count", "must be >= 1".into());
        }
        match &self.sequence {
            SequenceSource::Powerlaw { kappa, d_out } => {
                if !(*kappa > 2.0) {
                    return bad("sequence.kappa", format!("must be > 2, got {kappa}"));
                }
                if *d_out < 2 {
                    return bad("sequence.d_out", format!("must be >= 2, got {d_out}"));
                }
            }
            SequenceSource::Regular { d } => {
                if *d == 0 {
                    return bad("sequence.d", "must be >= 1".into());
                }
            }
            SequenceSource::Extremal {
                hub_exponent,
                max_other,
                d_out,
            } => {
                if !(*hub_exponent > 0.0 && *hub_exponent < 1.0) {
                    return bad("sequence.hub_exponent", format!("must lie in (0, 1), got {hub_exponent}"));
                }
                if *max_other == 0 {
                    return bad("sequence.max_other", "must be >= 1".into());
                }
                if *d_out == 0 {
                    return bad("sequence.d_out", "must be >= 1".into());
                }
            }
            SequenceSource::File { .. } => {}
        }
        if !matches!(self.sequence, SequenceSource::File { .. }) {
            if self.n.is_empty() {
                return bad("n", "must list at least one size".into());
            }
            if let Some(n) = self.n.iter().find(|&&n| n < 2) {
                return bad("n", format!("sizes must be >= 2, got {n}"));
            }
        }
        if !(0.0..=1.0).contains(&p.alpha) {
            return bad("params.alpha", format!("must lie in [0, 1], got {}", p.alpha));
        }
        let kappa = self.kappa();
        if !(kappa > 0.0) {
            return bad("params.kappa", format!("must be > 0, got {kappa}"));
        }
        if !(p.eps > 0.0) {
            return bad("params.eps", format!("must be > 0, got {}", p.eps));
        }
        if let Some(a) = p.grid.iter().find(|&&a| !(a > 0.0 && a < 1.0 / kappa)) {
            return bad("params.grid", format!("point {a} outside (0, 1/kappa) = (0, {})", 1.0 / kappa));
        }
        if p.rho.is_empty() {
            return bad("params.rho", "must list at least one value".into());
        }
        if let Some(r) = p.rho.iter().find(|&&r| !(r > 0.0)) {
            return bad("params.rho", format!("values must be > 0, got {r}"));
        }
        if let Some(StartMode::Sample(0)) = p.start_mode {
            return bad("params.start_mode", "sample size must be >= 1".into());
        }
        if let Some(tol) = p.tol {
            if !(tol > 0.0 && tol < 1.0) {
                return bad("params.tol", format!("must lie in (0, 1), got {tol}"));
            }
        }
        if p.max_iters == 0 {
            return bad("params.max_iters", "must be >= 1".into());
        }
        if !(p.a > 0.0 && p.a < 1.0) {
            return bad("params.a", format!("must lie in (0, 1), got {}", p.a));
        }
        if let Some(t) = p.threshold {
            if !(t > 0.0) {
                return bad("params.threshold", format!("must be > 0, got {t}"));
            }
        }
        if p.pool_size < 1000 {
            return bad("params.pool_size", format!("must be >= 1000, got {}", p.pool_size));
        }
        if p.generations == 0 {
            return bad("params.generations", "must be >= 1".into());
        }
        if p.n_samples == Some(0) {
            return bad("params.n_samples", "must be >= 1".into());
        }
        if !(p.eta > 0.0) {
            return bad("params.eta", format!("must be > 0, got {}", p.eta));
        }
        if !(p.c > 0.0) {
            return bad("params.c", format!("must be > 0, got {}", p.c));
        }
        if p.k < 2 {
            return bad("params.k", format!("must be >= 2, got {}", p.k));
        }
        if p.samples_per_n == 0 {
            return bad("params.samples_per_n", "must be >= 1".into());
        }
        if let Some(c) = &self.check {
            if !(0.0..=1.0).contains(&c.min_fraction) {
                return bad("check.min_fraction", format!("must lie in [0, 1], got {}", c.min_fraction));
            }
            if !(c.ratio_band[0] <= c.ratio_band[1]) {
                return bad("check.ratio_band", "lower end exceeds upper end".into());
            }
        }
        if kind == Kind::FigureSim {
            if !matches!(self.sequence, SequenceSource::Powerlaw { .. }) {
                return bad("sequence.source", "figure-sim needs the powerlaw generator".into());
            }
            if let Some(n) = self.n.iter().find(|&&n| n > FIGURE_MAX_N) {
                if !p.allow_large {
                    return bad(
                        "n",
                        format!("{n} exceeds {FIGURE_MAX_N}; set params.allow_large to run it"),
                    );
                }
            }
        }
        Ok(())
    }
}
