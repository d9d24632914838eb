//! Seeded random network generators and the two experiment drivers built on
//! them: weight randomization toward a target quantumness and random
//! perturbation of Hamiltonian hopping phases.
//!
//! All randomness comes from [`ChaCha12Rng`] seeded with a `u64`.
//! Replicates use [`substream`], which selects an independent ChaCha stream
//! per `(seed, replicate)` pair, so parallel runs are reproducible.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{CMatrix, Hamiltonian};

/// Independent generator for replicate `replicate` of a run seeded `seed`.
pub fn substream(seed: u64, replicate: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Seed for replicate `replicate`, for APIs that take a plain seed.
pub fn replicate_seed(seed: u64, replicate: u64) -> u64 {
    substream(seed, replicate).random()
}

fn max_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Inverse of the row-major enumeration of pairs `i < j`.
fn pair_from_index(n: usize, mut p: usize) -> (usize, usize) {
    let mut i = 0;
    while p >= n - 1 - i {
        p -= n - 1 - i;
        i += 1;
    }
    (i, i + 1 + p)
}

fn check_m(n: usize, m: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least two nodes, got {n}")));
    }
    if m == 0 || m > max_pairs(n) {
        return Err(Error::InvalidParameter(format!("{m} edges infeasible for {n} nodes")));
    }
    Ok(())
}

/// Uniform random graph with exactly `m` edges, before giant-component
/// extraction (isolated nodes included).
pub fn gen_er_full(n: usize, m: usize, seed: u64) -> Result<Graph> {
    check_m(n, m)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut picks = index::sample(&mut rng, max_pairs(n), m).into_vec();
    picks.sort_unstable();
    Graph::unweighted(n, picks.into_iter().map(|p| pair_from_index(n, p)))
}

/// Uniform random graph with `m` edges, reduced to its giant component.
pub fn gen_er(n: usize, m: usize, seed: u64) -> Result<Graph> {
    Ok(gen_er_full(n, m, seed)?.giant_component()?.0)
}

/// Ring `0–1–…–(n−1)–0` plus `m − n` uniformly chosen extra edges.
pub fn gen_ws(n: usize, m: usize, seed: u64) -> Result<Graph> {
    gen_ws_lattice(n, m, 1, seed)
}

/// Ring lattice linking every node to its `k` nearest neighbours on each
/// side (`k·n` edges), plus `m − k·n` uniformly chosen extra edges.
pub fn gen_ws_lattice(n: usize, m: usize, k: usize, seed: u64) -> Result<Graph> {
    if k == 0 || n < 2 * k + 1 {
        return Err(Error::InvalidParameter(format!("ring half-width {k} needs more than {} nodes", 2 * k)));
    }
    if m < k * n || m > max_pairs(n) {
        return Err(Error::InvalidParameter(format!("{m} edges infeasible for a width-{k} ring on {n} nodes")));
    }
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    for i in 0..n {
        for s in 1..=k {
            let j = (i + s) % n;
            edges.insert((i.min(j), i.max(j)));
        }
    }
    let ring = edges.len();
    let extra = m - ring;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let free = max_pairs(n) - ring;
    if extra * 2 > free {
        let mut candidates: Vec<(usize, usize)> =
            (0..max_pairs(n)).map(|p| pair_from_index(n, p)).filter(|e| !edges.contains(e)).collect();
        let picks = index::sample(&mut rng, candidates.len(), extra);
        let chosen: Vec<(usize, usize)> = picks.iter().map(|p| candidates[p]).collect();
        candidates.clear();
        edges.extend(chosen);
    } else {
        while edges.len() < m {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i != j {
                edges.insert((i.min(j), i.max(j)));
            }
        }
    }
    let mut list: Vec<(usize, usize)> = edges.into_iter().collect();
    list.sort_unstable();
    Graph::unweighted(n, list)
}

/// Points uniform on the unit square joined by their `m` closest pairs,
/// before giant-component extraction. Also returns the points.
pub fn gen_rg_full(n: usize, m: usize, seed: u64) -> Result<(Graph, Vec<[f64; 2]>)> {
    check_m(n, m)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(max_pairs(n));
    for i in 0..n {
        for j in i + 1..n {
            let (dx, dy) = (pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
            pairs.push((dx * dx + dy * dy, i, j));
        }
    }
    let cmp = |a: &(f64, usize, usize), b: &(f64, usize, usize)| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2)));
    if m < pairs.len() {
        pairs.select_nth_unstable_by(m - 1, cmp);
        pairs.truncate(m);
    }
    pairs.sort_unstable_by(cmp);
    let g = Graph::unweighted(n, pairs.into_iter().map(|(_, i, j)| (i, j)))?;
    Ok((g, pts))
}

/// Random geometric graph with `m` edges, reduced to its giant component.
pub fn gen_rg(n: usize, m: usize, seed: u64) -> Result<Graph> {
    Ok(gen_rg_full(n, m, seed)?.0.giant_component()?.0)
}

/// Preferential attachment: a clique on `m_attach + 1` nodes, then each new
/// node links to `m_attach` distinct existing nodes chosen with probability
/// proportional to their current degree.
pub fn gen_ba(n: usize, m_attach: usize, seed: u64) -> Result<Graph> {
    if m_attach < 2 || m_attach >= n {
        return Err(Error::InvalidParameter(format!("attachment {m_attach} needs 2 <= m < n = {n}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(max_pairs(m_attach + 1) + (n - m_attach - 1) * m_attach);
    // every edge endpoint once: uniform draws from it are degree-proportional
    let mut ends = Vec::with_capacity(2 * edges.capacity());
    for i in 0..=m_attach {
        for j in i + 1..=m_attach {
            edges.push((i, j));
            ends.extend([i, j]);
        }
    }
    let mut targets = Vec::with_capacity(m_attach);
    for v in m_attach + 1..n {
        targets.clear();
        while targets.len() < m_attach {
            let t = ends[rng.random_range(0..ends.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    Graph::unweighted(n, edges)
}

/// Stochastic block model: independent edges with probability `p_intra`
/// inside a block and `p_inter` across. Returns the blocks as the planted
/// partition. Isolated nodes are kept.
pub fn gen_planted(sizes: &[usize], p_intra: f64, p_inter: f64, seed: u64) -> Result<(Graph, Partition)> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParameter("every community needs at least one node".into()));
    }
    for p in [p_intra, p_inter] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
    }
    let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
    let n = labels.len();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if labels[i] == labels[j] { p_intra } else { p_inter };
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok((Graph::unweighted(n, edges)?, Partition::new(labels)?))
}

/// `(p_intra, p_inter)` giving mean intra-community degree `k_intra` and an
/// expected fraction `inter_fraction` of edges between communities.
pub fn planted_probabilities(sizes: &[usize], k_intra: f64, inter_fraction: f64) -> Result<(f64, f64)> {
    let n: usize = sizes.iter().sum();
    let intra_pairs: usize = sizes.iter().map(|&s| max_pairs(s)).sum();
    let inter_pairs = max_pairs(n) - intra_pairs;
    if intra_pairs == 0 || !(0.0..1.0).contains(&inter_fraction) {
        return Err(Error::InvalidParameter("no intra-community pairs or inter fraction outside [0, 1)".into()));
    }
    let e_in = k_intra * n as f64 / 2.0;
    let p_in = e_in / intra_pairs as f64;
    let e_out = e_in * inter_fraction / (1.0 - inter_fraction);
    let p_out = if inter_pairs == 0 { 0.0 } else { e_out / inter_pairs as f64 };
    if p_in > 1.0 || p_out > 1.0 {
        return Err(Error::InvalidParameter("requested density exceeds a complete graph".into()));
    }
    Ok((p_in, p_out))
}

/// Dense Hermitian matrix with entries uniform in `[-½, ½]` (real diagonal,
/// complex off-diagonal).
pub fn random_hermitian(n: usize, seed: u64) -> Hamiltonian {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.random::<f64>() - 0.5, 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Hamiltonian::new(m).expect("Hermitian by construction")
}

/// Result of [`randomize_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct Randomized {
    pub graph: Graph,
    pub epsilon: f64,
    pub converged: bool,
    /// Number of accepted weight changes.
    pub accepted: usize,
}

/// Greedy Monte Carlo on edge weights: pick a uniform edge, double or halve
/// its weight, keep the change iff the uniform-state quantumness gets no
/// further from `target_eps`. Stops within `0.01` of the target or after
/// `max_iters` proposals; the topology never changes.
pub fn randomize_weights(g: &Graph, target_eps: f64, max_iters: usize, seed: u64) -> Result<Randomized> {
    if !(0.0..1.0).contains(&target_eps) {
        return Err(Error::InvalidParameter(format!("target quantumness {target_eps} outside [0, 1)")));
    }
    if g.first_isolated().is_some() || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n() as f64;
    let mut w: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
    let mut d = g.degrees();
    let mut s1: f64 = d.iter().map(|x| x.sqrt()).sum();
    let mut s2: f64 = d.iter().sum();
    let eps_of = |s1: f64, s2: f64| 1.0 - s1 * s1 / (n * s2);
    let mut eps = eps_of(s1, s2);
    let mut accepted = 0;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let edges = g.edges();
    for _ in 0..max_iters {
        if (eps - target_eps).abs() <= 0.01 {
            break;
        }
        let k = rng.random_range(0..edges.len());
        let factor = if rng.random::<bool>() { 2.0 } else { 0.5 };
        let new_w = w[k] * factor;
        if !new_w.is_normal() {
            continue;
        }
        let delta = new_w - w[k];
        let (i, j) = (edges[k].i, edges[k].j);
        let (di, dj) = (d[i] + delta, d[j] + delta);
        let s1n = s1 - d[i].sqrt() - d[j].sqrt() + di.sqrt() + dj.sqrt();
        let s2n = s2 + 2.0 * delta;
        let eps_n = eps_of(s1n, s2n);
        if (eps_n - target_eps).abs() <= (eps - target_eps).abs() {
            w[k] = new_w;
            d[i] = di;
            d[j] = dj;
            s1 = s1n;
            s2 = s2n;
            eps = eps_n;
            accepted += 1;
        }
    }
    let graph = g.with_weights(&w)?;
    // recompute from scratch so the reported value carries no drift
    let epsilon = crate::walk::degree_moment_quantumness(&graph.degrees());
    Ok(Randomized { graph, epsilon, converged: (epsilon - target_eps).abs() <= 0.01, accepted })
}

/// Gaussian phase noise on hopping terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePerturbSpec {
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
}

impl PhasePerturbSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {}", self.sigma)));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("need at least one sample".into()));
        }
        Ok(())
    }
}

/// One perturbed copy: `H'_ij = H_ij e^{iφ_ij}`, `φ_ij ~ N(0, σ²)` for every
/// `i < j`, `H'_ji = conj(H'_ij)`, diagonal untouched.
pub fn perturb_phases_once(h: &Hamiltonian, sigma: f64, rng: &mut impl Rng) -> Hamiltonian {
    if sigma == 0.0 {
        return h.clone();
    }
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let n = h.n();
    let mut m = h.matrix().clone();
    for i in 0..n {
        for j in i + 1..n {
            let phi: f64 = normal.sample(rng);
            let z = m[(i, j)] * Complex64::from_polar(1.0, phi);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Hamiltonian::new(m).expect("Hermitian by construction")
}

/// `spec.samples` independently perturbed copies; sample `s` uses
/// `substream(spec.seed, s)`.
pub fn perturb_phases(h: &Hamiltonian, spec: &PhasePerturbSpec) -> Result<Vec<Hamiltonian>> {
    spec.validate()?;
    Ok((0..spec.samples as u64)
        .into_par_iter()
        .map(|s| perturb_phases_once(h, spec.sigma, &mut substream(spec.seed, s)))
        .collect())
}

/// Serializable generator call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum GenSpec {
    Ba { n: usize, m_attach: usize, seed: u64 },
    Er { n: usize, m: usize, seed: u64 },
    Ws { n: usize, m: usize, k: usize, seed: u64 },
    Rg { n: usize, m: usize, seed: u64 },
    Planted { sizes: Vec<usize>, p_intra: f64, p_inter: f64, seed: u64 },
}

impl GenSpec {
    /// Generated graph and, for the planted model, the planted partition.
    pub fn generate(&self) -> Result<(Graph, Option<Partition>)> {
        Ok(match self {
            GenSpec::Ba { n, m_attach, seed } => (gen_ba(*n, *m_attach, *seed)?, None),
            GenSpec::Er { n, m, seed } => (gen_er(*n, *m, *seed)?, None),
            GenSpec::Ws { n, m, k, seed } => (gen_ws_lattice(*n, *m, *k, *seed)?, None),
            GenSpec::Rg { n, m, seed } => (gen_rg(*n, *m, *seed)?, None),
            GenSpec::Planted { sizes, p_intra, p_inter, seed } => {
                let (g, p) = gen_planted(sizes, *p_intra, *p_inter, *seed)?;
                (g, Some(p))
            }
        })
    }

    /// Same call with another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        match &mut s {
            GenSpec::Ba { seed: x, .. }
            | GenSpec::Er { seed: x, .. }
            | GenSpec::Ws { seed: x, .. }
            | GenSpec::Rg { seed: x, .. }
            | GenSpec::Planted { seed: x, .. } => *x = seed,
        }
        s
    }
}

/// Sample variance of the degree sequence.
pub fn degree_variance(g: &Graph) -> f64 {
    let d = g.degrees();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Adjacency as a real Hamiltonian `H = A`, the hopping model used by the
/// community benchmarks.
pub fn adjacency_hamiltonian(g: &Graph) -> Hamiltonian {
    Hamiltonian::from_real(&g.adjacency()).expect("adjacency is symmetric")
}
