//! Dense Hermitian eigendecomposition and grouping of (near-)degenerate
//! eigenvalues into eigenspace projectors.
//!
//! Every long-time average in this crate depends on the *distinct* energies
//! of a Hamiltonian, not on individual eigenvectors. Exact degeneracies
//! (identical disconnected components, symmetric subgraphs) come out of the
//! eigensolver split by rounding noise, so eigenvalues closer than a
//! tolerance are chained into one group and treated as a single eigenspace.
//! The projector onto a group is basis-free, which is what makes the
//! downstream averages well defined.

use std::fs;
use std::ops::Range;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
}

impl Hamiltonian {
    /// Validates Hermiticity to `1e-12 · max|H_ij|` and finiteness.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidParameter(format!(
                "Hamiltonian must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = max_abs(&matrix);
        let dev = hermitian_deviation(&matrix);
        if dev > 1e-12 * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { matrix })
    }

    /// Builds from a real symmetric matrix.
    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    /// `H_ij = A_ij`: the hopping Hamiltonian read directly off a graph.
    pub fn from_adjacency(g: &Graph) -> Self {
        Self { matrix: g.adjacency().map(|x| Complex64::new(x, 0.0)) }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    /// `c · H`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { matrix: self.matrix.map(|z| z * c) }
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A set of consecutive eigenvalues treated as one eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGroup {
    /// Mean of the member eigenvalues.
    pub energy: f64,
    /// Indices into the ascending eigenvalue list.
    pub members: Range<usize>,
}

/// Ascending eigenvalues, orthonormal eigenvectors (columns) and eigenspace
/// groups.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    groups: Vec<EigenGroup>,
    /// For each eigenvalue index, the group it belongs to.
    group_of: Vec<usize>,
}

impl SpectralDecomposition {
    /// Eigendecomposition grouped with [`default_degeneracy_tolerance`].
    pub fn of(h: &Hamiltonian) -> Result<Self> {
        let dec = eig_hermitian(h)?;
        let tol = default_degeneracy_tolerance(&dec.eigenvalues);
        Ok(group_eigenspaces(dec, tol))
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn groups(&self) -> &[EigenGroup] {
        &self.groups
    }

    /// Group index of eigenvalue `k`.
    pub fn group_of(&self, k: usize) -> usize {
        self.group_of[k]
    }

    /// Energy used for eigenvalue `k` in time averages: its group's energy,
    /// so that members of one eigenspace never dephase.
    pub fn group_energy_of(&self, k: usize) -> f64 {
        self.groups[self.group_of[k]].energy
    }

    /// Orthogonal projector `Λ_k` onto group `k`.
    pub fn projector(&self, k: usize) -> CMatrix {
        let cols = self.groups[k].members.clone();
        let v = self.eigenvectors.columns(cols.start, cols.len());
        v * v.adjoint()
    }

    /// `Λ_k ψ` for every group.
    pub fn project_vector(&self, psi: &DVector<Complex64>) -> Vec<DVector<Complex64>> {
        let coeffs = self.eigenvectors.adjoint() * psi;
        self.groups
            .iter()
            .map(|g| {
                let v = self.eigenvectors.columns(g.members.start, g.members.len());
                v * coeffs.rows(g.members.start, g.members.len())
            })
            .collect()
    }

    /// `Σ_k E_k Λ_k`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.n();
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(self.eigenvalues[k], 0.0);
        }
        let out = &scaled * self.eigenvectors.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }
}

/// Default grouping tolerance `1e-8 · (E_max − E_min + 1)`.
pub fn default_degeneracy_tolerance(eigenvalues: &[f64]) -> f64 {
    match (eigenvalues.first(), eigenvalues.last()) {
        (Some(lo), Some(hi)) => 1e-8 * (hi - lo + 1.0),
        _ => 1e-8,
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, every eigenvalue
/// its own group. Real matrices go through the real symmetric solver.
///
/// Each eigenpair is checked against `‖Hv − λv‖₂ ≤ 1e-10 · ‖H‖₂`.
pub fn eig_hermitian(h: &Hamiltonian) -> Result<SpectralDecomposition> {
    let n = h.n();
    let (values, vectors): (Vec<f64>, CMatrix) = if h.is_real() {
        let eig = h.matrix.map(|z| z.re).symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let eig = h.matrix.clone().symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        let mut col = vectors.column(old).clone_owned();
        // fix the phase: largest-magnitude component real positive
        if let Some(pivot) = col.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
            if pivot.norm() > 0.0 {
                col *= pivot.conj() / pivot.norm();
            }
        }
        eigenvectors.set_column(new, &col);
    }

    let norm2 = eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let tolerance = 1e-10 * norm2.max(f64::MIN_POSITIVE);
    let hv = &h.matrix * &eigenvectors;
    for k in 0..n {
        let lambda = Complex64::new(eigenvalues[k], 0.0);
        let r: f64 = hv
            .column(k)
            .iter()
            .zip(eigenvectors.column(k).iter())
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if r > tolerance && norm2 > 0.0 {
            return Err(Error::EigenResidual { residual: r, tolerance });
        }
    }

    let groups = (0..n).map(|k| EigenGroup { energy: eigenvalues[k], members: k..k + 1 }).collect();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, groups, group_of: (0..n).collect() })
}

/// Chains consecutive eigenvalues whose gap is at most `tol` into groups.
pub fn group_eigenspaces(dec: SpectralDecomposition, tol: f64) -> SpectralDecomposition {
    let n = dec.eigenvalues.len();
    let mut groups: Vec<EigenGroup> = Vec::new();
    let mut group_of = vec![0; n];
    let mut start = 0;
    for k in 0..n {
        let last = k + 1 == n || dec.eigenvalues[k + 1] - dec.eigenvalues[k] > tol;
        if last {
            let members = start..k + 1;
            let energy = dec.eigenvalues[members.clone()].iter().sum::<f64>() / members.len() as f64;
            for slot in &mut group_of[members.clone()] {
                *slot = groups.len();
            }
            groups.push(EigenGroup { energy, members });
            start = k + 1;
        }
    }
    SpectralDecomposition { groups, group_of, ..dec }
}

#[derive(Serialize, Deserialize)]
struct HamiltonianJson {
    n: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

/// Parses `{"n": int, "entries": [[i, j, re, im], ...]}` holding the upper
/// triangle including the diagonal; the lower triangle is the conjugate.
pub fn parse_hamiltonian_json(text: &str) -> Result<Hamiltonian> {
    let raw: HamiltonianJson = serde_json::from_str(text)?;
    let n = raw.n;
    let mut m = CMatrix::from_element(n, n, ZERO);
    let mut seen = std::collections::HashSet::new();
    for (i, j, re, im) in raw.entries {
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if i > j {
            return Err(Error::InvalidParameter(format!("entry ({i}, {j}) is below the diagonal")));
        }
        if i == j && im != 0.0 {
            return Err(Error::InvalidParameter(format!("diagonal entry {i} has imaginary part {im}")));
        }
        if !seen.insert((i, j)) {
            return Err(Error::InvalidParameter(format!("duplicate entry ({i}, {j})")));
        }
        let z = Complex64::new(re, im);
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
    }
    Hamiltonian::new(m)
}

pub fn hamiltonian_to_json(h: &Hamiltonian) -> String {
    let n = h.n();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            let z = h.get(i, j);
            if z != ZERO {
                entries.push((i, j, z.re, z.im));
            }
        }
    }
    serde_json::to_string(&HamiltonianJson { n, entries }).expect("serialization cannot fail")
}

pub fn load_hamiltonian(path: impl AsRef<Path>) -> Result<Hamiltonian> {
    parse_hamiltonian_json(&fs::read_to_string(path)?)
}
