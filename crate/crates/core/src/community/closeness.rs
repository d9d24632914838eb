//! Node-level closeness measures derived from a quantum walk.
//!
//! Each measure is the gain (or loss) of a walk quantity when two
//! communities are merged. At node level:
//!
//! * transport: `c(a,b) = 2·R̄ˢʸᵐ_ab(t)`, the symmetrized time-averaged
//!   transfer probability; at short times this is `∝ |H_ab|²`;
//! * fidelity: `c(a,b) = 2 Re(ρ̄_ab(t) ρ_ba(0))` for a uniform pure start;
//! * purity: `c(a,b) = ` time average of `2|ρ_ab(s)|²`.
//!
//! Community closeness is the block mean of these entries, computed by
//! [`agglomerate`](super::agglomerate).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::generators::substream;
use crate::spectral::{CMatrix, Hamiltonian, SpectralDecomposition};
use crate::walk::{avg_density_matrix, avg_transfer_matrix, Horizon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosenessKind {
    TransportShort,
    TransportT,
    TransportInf,
    FidelityT,
    FidelityInf,
    PurityT,
    PurityInf,
}

/// Symmetric node-pair closeness with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosenessMatrix {
    kind: ClosenessKind,
    matrix: DMatrix<f64>,
}

impl ClosenessMatrix {
    /// Symmetrizes and zeroes the diagonal.
    pub fn new(kind: ClosenessKind, matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::LengthMismatch(matrix.nrows(), matrix.ncols()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut m = (&matrix + matrix.transpose()) * 0.5;
        m.fill_diagonal(0.0);
        Ok(Self { kind, matrix: m })
    }

    pub fn kind(&self) -> ClosenessKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }
}

/// Averaging window of a closeness measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMode {
    /// Leading short-time order (transport only).
    Short,
    Finite(f64),
    Infinite,
}

/// Phases of the uniform initial superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phases {
    Zero,
    /// Average over `samples` independent uniform phase vectors.
    Random { samples: usize, seed: u64 },
}

/// Transport closeness. Short mode returns `|H_ij|²` (the common `2t²/3`
/// factor does not change any merge).
pub fn closeness_transport(h: &Hamiltonian, mode: TimeMode) -> Result<ClosenessMatrix> {
    match mode {
        TimeMode::Short => ClosenessMatrix::new(ClosenessKind::TransportShort, h.matrix().map(|z| z.norm_sqr())),
        TimeMode::Finite(t) => {
            let r = avg_transfer_matrix(&SpectralDecomposition::of(h)?, Horizon::Finite(t))?;
            ClosenessMatrix::new(ClosenessKind::TransportT, r * 2.0)
        }
        TimeMode::Infinite => {
            let r = avg_transfer_matrix(&SpectralDecomposition::of(h)?, Horizon::Infinite)?;
            ClosenessMatrix::new(ClosenessKind::TransportInf, r * 2.0)
        }
    }
}

fn horizon(mode: TimeMode, what: &str) -> Result<Horizon> {
    match mode {
        TimeMode::Short => Err(Error::InvalidParameter(format!("{what} closeness has no short-time mode"))),
        TimeMode::Finite(t) => Ok(Horizon::Finite(t)),
        TimeMode::Infinite => Ok(Horizon::Infinite),
    }
}

/// `ψ_k = e^{iθ_k} / √n`.
pub fn phased_uniform(theta: &[f64]) -> DVector<Complex64> {
    let norm = 1.0 / (theta.len() as f64).sqrt();
    DVector::from_iterator(theta.len(), theta.iter().map(|&t| Complex64::from_polar(norm, t)))
}

fn random_phases(n: usize, seed: u64, sample: u64) -> Vec<f64> {
    let mut rng: ChaCha12Rng = substream(seed, sample);
    (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}

fn fidelity_for(dec: &SpectralDecomposition, psi: &DVector<Complex64>, hz: Horizon) -> Result<DMatrix<f64>> {
    let rho0 = psi * psi.adjoint();
    let avg = avg_density_matrix(dec, &rho0, hz)?;
    let n = dec.n();
    Ok(DMatrix::from_fn(n, n, |a, b| 2.0 * (avg[(a, b)] * rho0[(b, a)]).re))
}

/// Fidelity closeness for a uniform pure initial state, with zero phases or
/// averaged over random phases.
pub fn closeness_fidelity(h: &Hamiltonian, mode: TimeMode, phases: Phases) -> Result<ClosenessMatrix> {
    let hz = horizon(mode, "fidelity")?;
    let kind = if matches!(hz, Horizon::Infinite) { ClosenessKind::FidelityInf } else { ClosenessKind::FidelityT };
    let dec = SpectralDecomposition::of(h)?;
    let n = h.n();
    let m = match phases {
        Phases::Zero => fidelity_for(&dec, &phased_uniform(&vec![0.0; n]), hz)?,
        Phases::Random { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidParameter("phase samples must be at least 1".into()));
            }
            let parts: Vec<DMatrix<f64>> = (0..samples as u64)
                .into_par_iter()
                .map(|s| fidelity_for(&dec, &phased_uniform(&random_phases(n, seed, s)), hz))
                .collect::<Result<_>>()?;
            parts.into_iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m) / samples as f64
        }
    };
    ClosenessMatrix::new(kind, m)
}

/// Purity closeness for the uniform zero-phase start.
///
/// Finite windows integrate `2 p_a(s) p_b(s)` (valid for pure states) with
/// composite Gauss–Legendre quadrature; panels are sized to the spectral
/// width, so the cost grows linearly with `t·(E_max − E_min)`. The infinite
/// limit is the closed form
/// `2(|ρ̄_ab|² + s_a s_b − Σ_k |u_k(a)|²|u_k(b)|²)` with `u_k = Λ_k ψ` and
/// `s_a = Σ_k |u_k(a)|²`, which assumes no two distinct energy differences
/// coincide.
pub fn closeness_purity(h: &Hamiltonian, mode: TimeMode) -> Result<ClosenessMatrix> {
    let hz = horizon(mode, "purity")?;
    let dec = SpectralDecomposition::of(h)?;
    let n = h.n();
    let psi = phased_uniform(&vec![0.0; n]);
    match hz {
        Horizon::Infinite => {
            let u = dec.project_vector(&psi);
            let g = u.len();
            let rho_bar = u.iter().fold(CMatrix::zeros(n, n), |acc, uk| acc + uk * uk.adjoint());
            let w = DMatrix::from_fn(n, g, |a, k| u[k][a].norm_sqr());
            let s: DVector<f64> = w.column_sum();
            let m = rho_bar.map(|z| z.norm_sqr()) + &s * s.transpose() - &w * w.transpose();
            ClosenessMatrix::new(ClosenessKind::PurityInf, m * 2.0)
        }
        Horizon::Finite(t) => {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidParameter(format!("time must be finite and non-negative, got {t}")));
            }
            let p_at = |s: f64| -> DVector<f64> {
                let v = dec.eigenvectors();
                let mut c = v.adjoint() * &psi;
                for (k, z) in c.iter_mut().enumerate() {
                    *z *= Complex64::new(0.0, -dec.eigenvalues()[k] * s).exp();
                }
                (v * c).map(|z| z.norm_sqr())
            };
            if t == 0.0 {
                let p = p_at(0.0);
                return ClosenessMatrix::new(ClosenessKind::PurityT, &p * p.transpose() * 2.0);
            }
            let e = dec.eigenvalues();
            let omega = 2.0 * (e[n - 1] - e[0]);
            let panels = ((t * omega / 2.0).ceil() as usize).max(1);
            let width = t / panels as f64;
            let (x, wq) = gauss_legendre(10);
            let nodes: Vec<(f64, f64)> = (0..panels)
                .flat_map(|p| {
                    let mid = (p as f64 + 0.5) * width;
                    x.iter().zip(&wq).map(move |(&xi, &wi)| (mid + 0.5 * width * xi, 0.5 * width * wi)).collect::<Vec<_>>()
                })
                .collect();
            let acc = nodes
                .par_iter()
                .map(|&(s, w)| {
                    let p = p_at(s);
                    &p * p.transpose() * w
                })
                .reduce(|| DMatrix::zeros(n, n), |a, b| a + b);
            ClosenessMatrix::new(ClosenessKind::PurityT, acc * (2.0 / t))
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * pm - pm1) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Multiplies each pair `(i, j)` by `1 + J_ij` with `J_ij ~ U[0, magnitude)`
/// drawn once per unordered pair, breaking exact ties in the closeness.
pub fn perturb_closeness(c: &ClosenessMatrix, magnitude: f64, seed: u64) -> Result<ClosenessMatrix> {
    if !(magnitude.is_finite() && magnitude >= 0.0) {
        return Err(Error::InvalidParameter(format!("jitter magnitude must be non-negative, got {magnitude}")));
    }
    if magnitude == 0.0 {
        return Ok(c.clone());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut m = c.matrix.clone();
    let n = c.n();
    for i in 0..n {
        for j in i + 1..n {
            let f = 1.0 + rng.random_range(0.0..magnitude);
            m[(i, j)] *= f;
            m[(j, i)] *= f;
        }
    }
    Ok(ClosenessMatrix { kind: c.kind, matrix: m })
}

/// State with all coherences between different communities removed.
pub fn dephase(rho: &CMatrix, p: &Partition) -> CMatrix {
    let a = p.assignment();
    CMatrix::from_fn(rho.nrows(), rho.ncols(), |i, j| if a[i] == a[j] { rho[(i, j)] } else { Complex64::new(0.0, 0.0) })
}

/// `tr(ρ²)`.
pub fn purity(rho: &CMatrix) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

/// Closeness measure selector as written on the command line:
/// `transport-short`, `transport-inf`, `transport-t=T`, `fidelity-inf`,
/// `fidelity-t=T`, `purity-inf`, `purity-t=T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Transport(TimeMode),
    Fidelity(TimeMode),
    Purity(TimeMode),
}

impl Measure {
    pub fn compute(&self, h: &Hamiltonian, phases: Phases) -> Result<ClosenessMatrix> {
        match *self {
            Measure::Transport(m) => closeness_transport(h, m),
            Measure::Fidelity(m) => closeness_fidelity(h, m, phases),
            Measure::Purity(m) => closeness_purity(h, m),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown closeness measure {s:?}"));
        let (name, mode) = s.split_once('-').ok_or_else(bad)?;
        let mode = match mode {
            "short" => TimeMode::Short,
            "inf" => TimeMode::Infinite,
            m => {
                let t: f64 = m.strip_prefix("t=").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                if !(t.is_finite() && t >= 0.0) {
                    return Err(bad());
                }
                TimeMode::Finite(t)
            }
        };
        match (name, mode) {
            ("transport", m) => Ok(Measure::Transport(m)),
            ("fidelity", TimeMode::Short) | ("purity", TimeMode::Short) => Err(bad()),
            ("fidelity", m) => Ok(Measure::Fidelity(m)),
            ("purity", m) => Ok(Measure::Purity(m)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, mode) = match self {
            Measure::Transport(m) => ("transport", m),
            Measure::Fidelity(m) => ("fidelity", m),
            Measure::Purity(m) => ("purity", m),
        };
        match mode {
            TimeMode::Short => write!(f, "{name}-short"),
            TimeMode::Infinite => write!(f, "{name}-inf"),
            TimeMode::Finite(t) => write!(f, "{name}-t={t}"),
        }
    }
}
