//! Continuous-time classical and quantum walks on weighted networks.
//!
//! The crate computes how far the long-time behaviour of a quantum walk
//! departs from its classical counterpart (the *quantumness* `ε`), the
//! transfer matrices and time-averaged states of a Hamiltonian, and
//! community partitions built by agglomerating nodes under transport,
//! fidelity or purity closeness.
//!
//! ```
//! use qwalk::{fixtures, walk};
//!
//! let g = fixtures::karate();
//! let eps = walk::quantumness_uniform_degree_form(&g).unwrap();
//! assert!((eps - 0.1204).abs() < 1e-3);
//! ```

pub mod community;
pub mod error;
pub mod fixtures;
pub mod generators;
pub mod graph;
pub mod metrics;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Graph, LabeledGraph};
pub use spectral::{Hamiltonian, SpectralDecomposition};

/// Chapters of the guide in `book/`, compiled here so their snippets run as
/// doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/quantumness.md")]
    mod quantumness {}
    #[doc = include_str!("../../../book/src/time-averages.md")]
    mod time_averages {}
    #[doc = include_str!("../../../book/src/closeness.md")]
    mod closeness {}
    #[doc = include_str!("../../../book/src/communities.md")]
    mod communities {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
