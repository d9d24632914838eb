//! Quantum community detection: closeness measures, agglomerative
//! clustering and modularity-based selection of a partition.

mod closeness;
mod dendrogram;
mod modularity;
mod partition;

pub use closeness::{
    closeness_fidelity, closeness_purity, closeness_transport, dephase, gauss_legendre, perturb_closeness,
    phased_uniform, purity, ClosenessKind, ClosenessMatrix, Measure, Phases, TimeMode,
};
pub use dendrogram::{agglomerate, Dendrogram, Merge};
pub use modularity::{best_partition, frustration, modularity, signed_modularity};
pub use partition::Partition;

use crate::error::Result;
use crate::spectral::Hamiltonian;

/// Output of [`detect`].
#[derive(Debug, Clone)]
pub struct Detection {
    pub closeness: ClosenessMatrix,
    pub dendrogram: Dendrogram,
    pub partition: Partition,
    pub modularity: f64,
}

/// Closeness, agglomeration and maximal-modularity cut in one call.
/// `jitter > 0` multiplies each closeness pair by `1 + U[0, jitter)` first.
pub fn detect(h: &Hamiltonian, measure: Measure, phases: Phases, jitter: f64, seed: u64) -> Result<Detection> {
    let closeness = perturb_closeness(&measure.compute(h, phases)?, jitter, seed)?;
    let dendrogram = agglomerate(closeness.matrix())?;
    let (partition, modularity) = best_partition(&dendrogram, closeness.matrix())?;
    Ok(Detection { closeness, dendrogram, partition, modularity })
}
