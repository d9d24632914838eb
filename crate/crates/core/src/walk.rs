//! Continuous-time classical and quantum walks on a graph.
//!
//! The classical walk is generated by `H_C = L D⁻¹` (uniform escape rate from
//! every node) and the quantum walk by the similar Hermitian matrix
//! `H_Q = D^{-½} L D^{-½}`. Both share the spectrum; the ground state of
//! `H_Q` is `√P_C` where `P_C` is the classical stationary distribution.
//!
//! The long-time average of the quantum walk splits into the classical
//! stationary distribution plus a normalized quantum correction,
//!
//! ```text
//! P_Q = (1 − ε) P_C + ε P̃_Q,     ε = 1 − ⟨φ₀|ρ(0)|φ₀⟩,
//! ```
//!
//! and `ε` (the quantumness) is bounded above by `E/Δ` and by an entropy
//! bound on the normalized degrees.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::shannon_entropy;
use crate::spectral::{CMatrix, Hamiltonian, SpectralDecomposition};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Non-negative vector summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates non-negativity (to `-1e-12`) and normalization (to `1e-9`).
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite() || *x < -1e-12) {
            return Err(Error::InvalidParameter("probabilities must be finite and non-negative".into()));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {s}, not 1")));
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, trace 1 (to `1e-9`) and positivity (smallest
    /// eigenvalue `≥ -1e-9`).
    pub fn new(rho: CMatrix) -> Result<Self> {
        let h = Hamiltonian::new(rho.clone())?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("density matrix trace is {tr}")));
        }
        let dec = crate::spectral::eig_hermitian(&h)?;
        if dec.eigenvalues().first().is_some_and(|&l| l < -1e-9) {
            return Err(Error::InvalidParameter("density matrix is not positive semidefinite".into()));
        }
        Ok(Self(rho))
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &DVector<Complex64>) -> Self {
        Self(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.0[(i, i)].re).collect()
    }
}

/// Initial state of a quantum walk.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `|ψ⟩ = Σ_k |k⟩ / √n` with all phases zero.
    UniformSuperposition,
    /// `|i⟩⟨i|`.
    Localized(usize),
    Custom(DensityMatrix),
}

/// Resolved state: pure states are kept as vectors.
pub(crate) enum State {
    Pure(DVector<Complex64>),
    Mixed(CMatrix),
}

impl InitialState {
    pub(crate) fn resolve(&self, n: usize) -> Result<State> {
        match self {
            InitialState::UniformSuperposition => {
                Ok(State::Pure(DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0))))
            }
            InitialState::Localized(i) => {
                if *i >= n {
                    return Err(Error::IndexOutOfRange { index: *i, n });
                }
                let mut v = DVector::zeros(n);
                v[*i] = ONE;
                Ok(State::Pure(v))
            }
            InitialState::Custom(rho) => {
                if rho.n() != n {
                    return Err(Error::LengthMismatch(rho.n(), n));
                }
                Ok(State::Mixed(rho.0.clone()))
            }
        }
    }

    pub fn density_matrix(&self, n: usize) -> Result<DensityMatrix> {
        Ok(match self.resolve(n)? {
            State::Pure(psi) => DensityMatrix::pure(&psi),
            State::Mixed(rho) => DensityMatrix(rho),
        })
    }
}

impl State {
    fn matrix(&self) -> CMatrix {
        match self {
            State::Pure(psi) => psi * psi.adjoint(),
            State::Mixed(rho) => rho.clone(),
        }
    }
}

fn checked_degrees(g: &Graph) -> Result<Vec<f64>> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    if let Some(i) = g.first_isolated() {
        return Err(Error::IsolatedNode(i));
    }
    Ok(g.degrees())
}

/// `H_C = L D⁻¹`: columns sum to zero, diagonal one.
pub fn classical_generator(g: &Graph) -> Result<DMatrix<f64>> {
    let d = checked_degrees(g)?;
    let mut h = g.laplacian();
    for (j, mut col) in h.column_iter_mut().enumerate() {
        col /= d[j];
    }
    for i in 0..g.n() {
        h[(i, i)] = 1.0;
    }
    Ok(h)
}

/// `H_Q = D^{-½} L D^{-½}`: real symmetric with unit diagonal.
pub fn quantum_generator(g: &Graph) -> Result<Hamiltonian> {
    let d = checked_degrees(g)?;
    let n = g.n();
    let mut h = CMatrix::identity(n, n);
    for e in g.edges() {
        let v = Complex64::new(-e.weight / (d[e.i] * d[e.j]).sqrt(), 0.0);
        h[(e.i, e.j)] = v;
        h[(e.j, e.i)] = v;
    }
    Hamiltonian::new(h)
}

/// `(P_C)_i = d_i / Σ_j d_j`.
pub fn stationary_classical(g: &Graph) -> Result<ProbabilityVector> {
    let d = checked_degrees(g)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let total: f64 = d.iter().sum();
    Ok(ProbabilityVector(d.iter().map(|x| x / total).collect()))
}

/// Long-time average occupation `(P_Q)_i = Σ_k ⟨i|Λ_k ρ(0) Λ_k|i⟩`.
pub fn longtime_distribution(dec: &SpectralDecomposition, rho0: &InitialState) -> Result<ProbabilityVector> {
    let parts = eigenspace_occupations(dec, rho0)?;
    let n = dec.n();
    let mut p = vec![0.0; n];
    for part in &parts {
        for i in 0..n {
            p[i] += part[i];
        }
    }
    Ok(ProbabilityVector(p))
}

/// `diag(Λ_k ρ Λ_k)` for each eigenspace `k`.
fn eigenspace_occupations(dec: &SpectralDecomposition, rho0: &InitialState) -> Result<Vec<Vec<f64>>> {
    let n = dec.n();
    Ok(match rho0.resolve(n)? {
        State::Pure(psi) => dec
            .project_vector(&psi)
            .into_iter()
            .map(|u| u.iter().map(|z| z.norm_sqr()).collect())
            .collect(),
        State::Mixed(rho) => {
            let v = dec.eigenvectors();
            let rho_e = v.adjoint() * &rho * v;
            dec.groups()
                .iter()
                .map(|g| {
                    let r = g.members.clone();
                    let vk = v.columns(r.start, r.len());
                    let block = rho_e.view((r.start, r.start), (r.len(), r.len()));
                    let m = vk * block * vk.adjoint();
                    (0..n).map(|i| m[(i, i)].re).collect()
                })
                .collect()
        }
    })
}

fn ground_weight(dec: &SpectralDecomposition, rho0: &InitialState) -> Result<f64> {
    let ground = dec.groups().first().ok_or(Error::EmptyGraph)?;
    if ground.members.len() != 1 {
        return Err(Error::Disconnected);
    }
    let phi0 = dec.eigenvectors().column(0);
    Ok(match rho0.resolve(dec.n())? {
        State::Pure(psi) => phi0.dotc(&psi).norm_sqr(),
        State::Mixed(rho) => (phi0.adjoint() * &rho * phi0)[(0, 0)].re,
    })
}

/// Quantumness `ε = 1 − ⟨φ₀|ρ(0)|φ₀⟩`. Requires a unique ground state.
pub fn quantumness(dec: &SpectralDecomposition, rho0: &InitialState) -> Result<f64> {
    Ok((1.0 - ground_weight(dec, rho0)?).clamp(0.0, 1.0))
}

/// Quantumness of the uniform superposition from degrees alone,
/// `ε = 1 − ⟨√d⟩² / ⟨d⟩`.
pub fn quantumness_uniform_degree_form(g: &Graph) -> Result<f64> {
    let d = checked_degrees(g)?;
    Ok(degree_moment_quantumness(&d))
}

/// `1 − ⟨√d⟩² / ⟨d⟩` for any non-negative degree sequence (zeros allowed).
pub fn degree_moment_quantumness(degrees: &[f64]) -> f64 {
    let n = degrees.len() as f64;
    let mean_sqrt = degrees.iter().map(|d| d.sqrt()).sum::<f64>() / n;
    let mean = degrees.iter().sum::<f64>() / n;
    (1.0 - mean_sqrt * mean_sqrt / mean).max(0.0)
}

/// Normalized non-classical part `(P̃_Q)_i = (1/ε) Σ_{k≠0} ⟨i|Λ_k ρ Λ_k|i⟩`.
pub fn quantum_correction(dec: &SpectralDecomposition, rho0: &InitialState) -> Result<ProbabilityVector> {
    let eps = quantumness(dec, rho0)?;
    if eps <= 1e-12 {
        return Err(Error::NoQuantumCorrection(eps));
    }
    let parts = eigenspace_occupations(dec, rho0)?;
    let n = dec.n();
    let mut p = vec![0.0; n];
    for part in parts.iter().skip(1) {
        for i in 0..n {
            p[i] += part[i];
        }
    }
    Ok(ProbabilityVector(p.into_iter().map(|x| x / eps).collect()))
}

/// Energy above the ground state, spectral gap and the bound check
/// `ε ≤ E/Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGap {
    pub energy: f64,
    pub gap: f64,
    pub bound_ok: bool,
}

impl EnergyGap {
    pub fn ratio(&self) -> f64 {
        self.energy / self.gap
    }
}

/// `E = tr(H ρ) − E₀` and `Δ = E₁ − E₀` (distinct eigenvalues). For `H_Q`
/// the ground energy is zero, so these are the plain energy and the
/// smallest nonzero eigenvalue.
pub fn energy_gap_bound(dec: &SpectralDecomposition, rho0: &InitialState) -> Result<EnergyGap> {
    let groups = dec.groups();
    if groups.len() < 2 {
        return Err(Error::InvalidParameter("spectrum has a single eigenspace; gap undefined".into()));
    }
    let e0 = groups[0].energy;
    let gap = groups[1].energy - e0;
    let parts = eigenspace_occupations(dec, rho0)?;
    let energy: f64 = parts
        .iter()
        .zip(groups)
        .map(|(part, g)| (g.energy - e0) * part.iter().sum::<f64>())
        .sum::<f64>()
        .max(0.0);
    let eps = quantumness(dec, rho0)?;
    Ok(EnergyGap { energy, gap, bound_ok: eps <= energy / gap + 1e-9 })
}

/// Closed form of the uniform-superposition energy,
/// `E = 1 − (1/N) Σ_ij A_ij / √(d_i d_j)`.
pub fn uniform_energy(g: &Graph) -> Result<f64> {
    let d = checked_degrees(g)?;
    let s: f64 = g.edges().iter().map(|e| 2.0 * e.weight / (d[e.i] * d[e.j]).sqrt()).sum();
    Ok(1.0 - s / g.n() as f64)
}

/// Entropy bound `1 − exp(H₁(d/Σd)) / N` on the uniform-state quantumness.
pub fn entropy_bound(g: &Graph) -> Result<f64> {
    let d = checked_degrees(g)?;
    let total: f64 = d.iter().sum();
    let p: Vec<f64> = d.iter().map(|x| x / total).collect();
    Ok(1.0 - shannon_entropy(&p).exp() / g.n() as f64)
}

/// Long-time summary of the walk on a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkReport {
    pub p_classical: ProbabilityVector,
    pub p_quantum: ProbabilityVector,
    /// Absent when `ε = 0`.
    pub quantum_correction: Option<ProbabilityVector>,
    pub epsilon: f64,
    pub energy: f64,
    pub gap: f64,
    pub entropy_bound: f64,
}

/// Builds `H_Q` for a connected graph and evaluates every long-time quantity.
pub fn walk_report(g: &Graph, rho0: &InitialState) -> Result<WalkReport> {
    let p_classical = stationary_classical(g)?;
    let h = quantum_generator(g)?;
    let dec = SpectralDecomposition::of(&h)?;
    let eg = energy_gap_bound(&dec, rho0)?;
    let epsilon = quantumness(&dec, rho0)?;
    let quantum_correction = match quantum_correction(&dec, rho0) {
        Ok(p) => Some(p),
        Err(Error::NoQuantumCorrection(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(WalkReport {
        p_classical,
        p_quantum: longtime_distribution(&dec, rho0)?,
        quantum_correction,
        epsilon,
        energy: eg.energy,
        gap: eg.gap,
        entropy_bound: entropy_bound(g)?,
    })
}

/// Same report for an arbitrary Hamiltonian; the "classical" term is the
/// node distribution of the (unique) ground state.
pub fn walk_report_for_hamiltonian(h: &Hamiltonian, rho0: &InitialState) -> Result<WalkReport> {
    let dec = SpectralDecomposition::of(h)?;
    if dec.groups()[0].members.len() != 1 {
        return Err(Error::Disconnected);
    }
    let pc: Vec<f64> = dec.eigenvectors().column(0).iter().map(|z| z.norm_sqr()).collect();
    let eg = energy_gap_bound(&dec, rho0)?;
    let epsilon = quantumness(&dec, rho0)?;
    let quantum_correction = match quantum_correction(&dec, rho0) {
        Ok(p) => Some(p),
        Err(Error::NoQuantumCorrection(_)) => None,
        Err(e) => return Err(e),
    };
    let entropy_bound = 1.0 - shannon_entropy(&pc).exp() / h.n() as f64;
    Ok(WalkReport {
        p_classical: ProbabilityVector(pc),
        p_quantum: longtime_distribution(&dec, rho0)?,
        quantum_correction,
        epsilon,
        energy: eg.energy,
        gap: eg.gap,
        entropy_bound,
    })
}

/// Averaging window: `[0, t]` or the `t → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Finite(f64),
    Infinite,
}

/// `(1/t) ∫₀ᵗ e^{−iωs} ds`, with a second-order series for `|ωt| < 1e-6`.
pub fn time_average_kernel(omega: f64, t: f64) -> Complex64 {
    let x = omega * t;
    if x.abs() < 1e-6 {
        Complex64::new(1.0 - x * x / 6.0, -x / 2.0)
    } else {
        // (e^{-ix} - 1)/(-ix) with the half-angle form for the imaginary part
        let h = (x / 2.0).sin();
        Complex64::new(x.sin() / x, -2.0 * h * h / x)
    }
}

/// `R_ab(t) = |⟨a|e^{−iHt}|b⟩|²`.
pub fn transfer_matrix(dec: &SpectralDecomposition, t: f64) -> DMatrix<f64> {
    propagator(dec, t).map(|z| z.norm_sqr())
}

/// `e^{−iHt}` from the spectral decomposition.
pub fn propagator(dec: &SpectralDecomposition, t: f64) -> CMatrix {
    let v = dec.eigenvectors();
    let mut vp = v.clone();
    for (k, mut col) in vp.column_iter_mut().enumerate() {
        col *= Complex64::new(0.0, -dec.eigenvalues()[k] * t).exp();
    }
    &vp * v.adjoint()
}

/// Time-averaged transfer matrix `R̄(t) = (1/t)∫₀ᵗ R(s) ds`, or the mixing
/// matrix `Σ_k |⟨a|Λ_k|b⟩|²` at infinity.
pub fn avg_transfer_matrix(dec: &SpectralDecomposition, horizon: Horizon) -> Result<DMatrix<f64>> {
    let n = dec.n();
    let v = dec.eigenvectors();
    match horizon {
        Horizon::Infinite => {
            let mut r = DMatrix::zeros(n, n);
            for g in dec.groups() {
                let vk = v.columns(g.members.start, g.members.len());
                let p = vk * vk.adjoint();
                r.zip_apply(&p, |x, z| *x += z.norm_sqr());
            }
            Ok(r)
        }
        Horizon::Finite(t) => {
            check_time(t)?;
            if t == 0.0 {
                return Ok(DMatrix::identity(n, n));
            }
            let kernel = pair_kernel(dec, t);
            let vh = v.adjoint();
            let mut r = DMatrix::zeros(n, n);
            for a in 0..n {
                // x[(j, b)] = V_aj conj(V_bj) = (v_j v_j†)_ab
                let mut x = vh.clone();
                for j in 0..n {
                    let s = v[(a, j)];
                    x.row_mut(j).iter_mut().for_each(|z| *z *= s);
                }
                let y = &kernel * x.map(|z| z.conj());
                for b in 0..n {
                    let s: Complex64 = x.column(b).iter().zip(y.column(b).iter()).map(|(p, q)| p * q).sum();
                    r[(a, b)] = s.re;
                }
            }
            Ok(r)
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// `K_jk = kernel(E_j − E_k, t)` using group energies.
fn pair_kernel(dec: &SpectralDecomposition, t: f64) -> CMatrix {
    let n = dec.n();
    CMatrix::from_fn(n, n, |j, k| {
        if dec.group_of(j) == dec.group_of(k) {
            ONE
        } else {
            time_average_kernel(dec.group_energy_of(j) - dec.group_energy_of(k), t)
        }
    })
}

/// Time-averaged state `ρ̄(t) = Σ_jk K(E_j−E_k, t) Λ_j ρ(0) Λ_k`; at infinity
/// `Σ_k Λ_k ρ(0) Λ_k`.
pub fn avg_density(dec: &SpectralDecomposition, rho0: &InitialState, horizon: Horizon) -> Result<DensityMatrix> {
    let n = dec.n();
    let rho = rho0.resolve(n)?.matrix();
    Ok(DensityMatrix(avg_density_matrix(dec, &rho, horizon)?))
}

pub(crate) fn avg_density_matrix(dec: &SpectralDecomposition, rho: &CMatrix, horizon: Horizon) -> Result<CMatrix> {
    let n = dec.n();
    let v = dec.eigenvectors();
    let mut rho_e = v.adjoint() * rho * v;
    match horizon {
        Horizon::Infinite => {
            for j in 0..n {
                for k in 0..n {
                    if dec.group_of(j) != dec.group_of(k) {
                        rho_e[(j, k)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
        Horizon::Finite(t) => {
            check_time(t)?;
            if t == 0.0 {
                return Ok(rho.clone());
            }
            rho_e.component_mul_assign(&pair_kernel(dec, t));
        }
    }
    Ok(v * rho_e * v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generators::random_hermitian;

    fn star(n: usize) -> Graph {
        Graph::unweighted(n, (1..n).map(|i| (0, i))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn edge() -> Graph {
        Graph::unweighted(2, [(0, 1)]).unwrap()
    }

    fn k3() -> Graph {
        Graph::unweighted(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn dec_of(g: &Graph) -> SpectralDecomposition {
        SpectralDecomposition::of(&quantum_generator(g).unwrap()).unwrap()
    }

    #[test]
    fn classical_generator_examples() {
        let hc = classical_generator(&edge()).unwrap();
        assert_eq!(hc, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let hc = classical_generator(&k3()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(hc[(i, j)], if i == j { 1.0 } else { -0.5 });
            }
        }
        let g = fixtures::karate();
        let hc = classical_generator(&g).unwrap();
        for col in hc.column_iter() {
            assert!(col.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_generator_examples() {
        let hq = quantum_generator(&edge()).unwrap();
        assert_eq!(hq.get(0, 1).re, -1.0);
        let hq = quantum_generator(&star(3)).unwrap();
        assert!((hq.get(0, 1).re + 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(hq.get(1, 2).re, 0.0);
        let hq = quantum_generator(&fixtures::karate()).unwrap();
        assert!((0..34).all(|i| hq.get(i, i) == ONE));
    }

    #[test]
    fn isolated_node_rejected() {
        let g = Graph::unweighted(3, [(0, 1)]).unwrap();
        assert!(matches!(classical_generator(&g), Err(Error::IsolatedNode(2))));
        assert!(matches!(quantum_generator(&g), Err(Error::IsolatedNode(2))));
    }

    #[test]
    fn stationary_examples() {
        let p = stationary_classical(&Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap()).unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.5, 0.25]);
        let p = stationary_classical(&cycle(7)).unwrap();
        assert!(p.as_slice().iter().all(|&x| (x - 1.0 / 7.0).abs() < 1e-15));
        let p = stationary_classical(&star(5)).unwrap();
        assert_eq!(p.as_slice(), &[0.5, 0.125, 0.125, 0.125, 0.125]);
        assert!(matches!(stationary_classical(&fixtures::two_triangles()), Err(Error::Disconnected)));
    }

    #[test]
    fn ground_state_reproduces_classical() {
        let g = fixtures::karate();
        let dec = dec_of(&g);
        let phi0 = dec.eigenvectors().column(0).clone_owned();
        let rho0 = InitialState::Custom(DensityMatrix::pure(&phi0));
        let pq = longtime_distribution(&dec, &rho0).unwrap();
        let pc = stationary_classical(&g).unwrap();
        for i in 0..34 {
            assert!((pq[i] - pc[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn regular_graph_is_classical() {
        let g = cycle(9);
        let dec = dec_of(&g);
        let u = InitialState::UniformSuperposition;
        let p = longtime_distribution(&dec, &u).unwrap();
        assert!(p.as_slice().iter().all(|&x| (x - 1.0 / 9.0).abs() < 1e-12));
        assert!(quantumness(&dec, &u).unwrap() < 1e-12);
        assert!(matches!(quantum_correction(&dec, &u), Err(Error::NoQuantumCorrection(_))));
        assert!(energy_gap_bound(&dec, &u).unwrap().energy < 1e-12);
        assert!(entropy_bound(&g).unwrap().abs() < 1e-12);
    }

    #[test]
    fn localized_single_edge() {
        let dec = dec_of(&edge());
        let p = longtime_distribution(&dec, &InitialState::Localized(0)).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let rho = avg_density(&dec, &InitialState::Localized(0), Horizon::Infinite).unwrap();
        let half = CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        assert!((rho.matrix() - half).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn star_quantumness() {
        let g = star(5);
        let eps = quantumness(&dec_of(&g), &InitialState::UniformSuperposition).unwrap();
        assert!((eps - 0.1).abs() < 1e-12);
        assert!((quantumness_uniform_degree_form(&g).unwrap() - 0.1).abs() < 1e-15);
        // entropy of (1/2, 1/8 x4) evaluated directly
        let h1 = 0.5 * 2f64.ln() + 4.0 * 0.125 * 8f64.ln();
        let bound = entropy_bound(&g).unwrap();
        assert!((bound - (1.0 - h1.exp() / 5.0)).abs() < 1e-15);
        assert!(bound >= 0.1);
    }

    #[test]
    fn karate_table_values() {
        let g = fixtures::karate();
        let dec = dec_of(&g);
        let u = InitialState::UniformSuperposition;
        let eps = quantumness(&dec, &u).unwrap();
        assert!((eps - 0.1204).abs() < 0.005, "{eps}");
        let eg = energy_gap_bound(&dec, &u).unwrap();
        assert!((eg.ratio() - 1.3471).abs() < 0.01, "{}", eg.ratio());
        assert!(eg.bound_ok);
        assert!((eg.energy - uniform_energy(&g).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn decomposition_identity_karate() {
        let g = fixtures::karate();
        let r = walk_report(&g, &InitialState::UniformSuperposition).unwrap();
        let qc = r.quantum_correction.as_ref().unwrap();
        for i in 0..g.n() {
            let rhs = (1.0 - r.epsilon) * r.p_classical[i] + r.epsilon * qc[i];
            assert!((r.p_quantum[i] - rhs).abs() < 1e-8);
        }
        assert!(r.epsilon <= r.entropy_bound + 1e-9);
        assert!(r.epsilon <= r.energy / r.gap + 1e-9);
    }

    #[test]
    fn disconnected_quantumness_refused() {
        let dec = dec_of(&fixtures::two_triangles());
        assert!(matches!(quantumness(&dec, &InitialState::UniformSuperposition), Err(Error::Disconnected)));
    }

    #[test]
    fn transfer_examples() {
        let dec = dec_of(&edge());
        let r0 = transfer_matrix(&dec, 0.0);
        assert!((r0 - DMatrix::<f64>::identity(2, 2)).abs().max() < 1e-15);
        for &t in &[0.3, 1.0, 2.7] {
            let r = transfer_matrix(&dec, t);
            assert!((r[(0, 1)] - 0.5 * (1.0 - (2.0 * t).cos())).abs() < 1e-14);
        }
        let rinf = avg_transfer_matrix(&dec, Horizon::Infinite).unwrap();
        assert!(rinf.iter().all(|&x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn mixing_matrix_block_diagonal() {
        let dec = dec_of(&fixtures::two_triangles());
        let r = avg_transfer_matrix(&dec, Horizon::Infinite).unwrap();
        for a in 0..3 {
            for b in 3..6 {
                assert!(r[(a, b)].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn double_stochastic_random() {
        let h = random_hermitian(20, 5);
        let dec = SpectralDecomposition::of(&h).unwrap();
        for m in [
            transfer_matrix(&dec, 1.7),
            avg_transfer_matrix(&dec, Horizon::Finite(3.0)).unwrap(),
            avg_transfer_matrix(&dec, Horizon::Infinite).unwrap(),
        ] {
            for i in 0..20 {
                assert!((m.row(i).sum() - 1.0).abs() < 1e-9);
                assert!((m.column(i).sum() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kernel_branches_agree() {
        // the series and the closed form meet continuously near the switch
        for &w in &[1.0, -3.0] {
            let below = time_average_kernel(w, 0.999e-6 / w.abs());
            let above = time_average_kernel(w, 1.001e-6 / w.abs());
            assert!((below - above).norm() < 1e-9);
        }
        assert_eq!(time_average_kernel(0.0, 5.0), ONE);
        // large-argument value against the definition
        let k = time_average_kernel(2.0, 3.0);
        let exact = Complex64::new((6.0f64).sin() / 6.0, ((6.0f64).cos() - 1.0) / 6.0);
        assert!((k - exact).norm() < 1e-15);
    }

    #[test]
    fn commuting_state_is_stationary() {
        let h = random_hermitian(8, 21);
        let dec = SpectralDecomposition::of(&h).unwrap();
        let v = dec.eigenvectors();
        // mixture of two eigenprojectors commutes with H
        let rho = (v.column(0) * v.column(0).adjoint()) * Complex64::new(0.3, 0.0)
            + (v.column(5) * v.column(5).adjoint()) * Complex64::new(0.7, 0.0);
        let s = InitialState::Custom(DensityMatrix::new(rho.clone()).unwrap());
        for horizon in [Horizon::Finite(0.7), Horizon::Finite(40.0), Horizon::Infinite] {
            let avg = avg_density(&dec, &s, horizon).unwrap();
            assert!((avg.matrix() - &rho).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn density_validation() {
        let bad = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad).is_err());
        let neg = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)],
        );
        assert!(DensityMatrix::new(neg).is_err());
    }
}
