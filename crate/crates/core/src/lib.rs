//! Directed configuration model (DCM) laboratory.
//!
//! Samples random multigraphs with a prescribed bi-degree sequence and
//! measures how the stationary distribution of the simple random walk (and
//! of the PageRank surfer) relates to the in-degrees: extremes, bulk limit
//! law, tail exponents, and cutoff at the entropic time.
//!
//! Modules:
//! - [`degseq`]: bi-degree sequences, moment checks, entropic time, tail
//!   classification and generators.
//! - [`graph`]: half-edge matchings, sequential generation, neighborhoods,
//!   marked Galton–Watson trees and their coupling with the graph.
//! - [`walk`]: transition operator, stationary distribution, total
//!   variation profiles, PageRank.
//! - [`limits`]: population dynamics for the bulk limit law, the in-tree
//!   martingale and Wasserstein-1 comparisons.
//! - [`tails`]: weighted out-neighborhood expansion, skeletons and extreme
//!   value reports.

pub mod degseq;
pub mod error;
pub mod graph;
pub mod io;
pub mod limits;
pub mod measure;
pub mod seeding;
pub mod tails;
pub mod walk;

pub use degseq::{AssumptionParams, BiDegreeSequence, EntropicSummary};
pub use error::{Error, Result};
pub use graph::Digraph;
pub use measure::EmpiricalMeasure;
pub use walk::DistVector;
