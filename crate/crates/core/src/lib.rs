//! Spectral graph partitioning under the gap assumption.
//!
//! The pipeline embeds the nodes of a graph with the bottom-`k` eigenvectors of
//! its normalized Laplacian (Shi–Malik or Ng–Jordan–Weiss rows), clusters the
//! degree-weighted points with Lloyd's algorithm, and then checks the
//! outcome against the approximation guarantees that hold for well-clustered
//! graphs. Small instances are certified against exhaustive oracles for the
//! `k`-way conductance and the optimal k-means cost.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command-line
//! front-end live in the `specgap` crate.

#![no_std]
#![warn(clippy::std_instead_of_alloc)]
#![warn(clippy::std_instead_of_core)]

extern crate alloc;

mod error;
mod exact;

pub mod embed;
pub mod gen;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod partition;
pub mod spectra;
pub mod theory;
pub mod wkmeans;

pub use self::{
    embed::{embed_njw, embed_sm, Embedding, EmbeddingKind},
    error::{Error, Result},
    exact::{ratio_to_f64, Rational},
    graph::Graph,
    linalg::{eig_sym, Eigen, Matrix, SymMatrix},
    oracle::{certified_gaps, gaps, GapReport, GapSource},
    partition::{avg_conductance, match_partitions, max_conductance, Matching, Partition},
    spectra::{bottom_k, normalized_laplacian, SpectralBasis},
    wkmeans::{best_of, cluster_cost, lloyd, ClusteringResult, LloydConfig},
};
