//! Partition comparison, entropies and the scaling fits used to summarize
//! quantumness across network ensembles. Logarithms are natural throughout.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::generators::{gen_ba, gen_er_full, gen_rg_full, gen_ws, replicate_seed};
use crate::graph::Graph;
use crate::walk::degree_moment_quantumness;

/// Normalized mutual information `2 I(X, Y) / (H(X) + H(Y))`.
///
/// Two single-community partitions give 1; a single-community partition
/// against a non-trivial one gives 0.
pub fn nmi(x: &Partition, y: &Partition) -> Result<f64> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch(x.n(), y.n()));
    }
    let n = x.n() as f64;
    let entropy = |counts: &mut dyn Iterator<Item = usize>| -> f64 {
        counts.map(|c| c as f64 / n).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
    };
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let (mut cx, mut cy) = (vec![0usize; x.k()], vec![0usize; y.k()]);
    for (&a, &b) in x.assignment().iter().zip(y.assignment()) {
        *joint.entry((a, b)).or_default() += 1;
        cx[a] += 1;
        cy[b] += 1;
    }
    let hx = entropy(&mut cx.into_iter());
    let hy = entropy(&mut cy.into_iter());
    if hx + hy == 0.0 {
        return Ok(1.0);
    }
    let hxy = entropy(&mut joint.into_values());
    Ok((2.0 * (hx + hy - hxy) / (hx + hy)).clamp(0.0, 1.0))
}

/// `−Σ p ln p`, skipping zero entries.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Rényi entropy `ln(Σ p^q) / (1 − q)`; `q = 1` is Shannon, `q = ∞` is
/// `−ln max p`. Evaluated in log space so large `q` does not underflow.
pub fn renyi_entropy(p: &[f64], q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::InvalidParameter(format!("Rényi order must be non-negative, got {q}")));
    }
    let support: Vec<f64> = p.iter().copied().filter(|&x| x > 0.0).collect();
    if support.is_empty() {
        return Err(Error::InvalidParameter("distribution has no support".into()));
    }
    if q == 1.0 {
        return Ok(shannon_entropy(p));
    }
    let max = support.iter().copied().fold(0.0, f64::max);
    if q.is_infinite() {
        return Ok(-max.ln());
    }
    if q == 0.0 {
        return Ok((support.len() as f64).ln());
    }
    // ln Σ p^q = q ln max + ln Σ (p/max)^q
    let log_sum = q * max.ln() + support.iter().map(|&x| (x / max).powf(q)).sum::<f64>().ln();
    Ok(log_sum / (1.0 - q))
}

/// Fitted scaling parameters. Absent fields were not part of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitResult {
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub kappa3: Option<f64>,
    /// RMS residual of the log-log regression.
    pub residual: f64,
}

/// Least-squares line through `(ln x, ln y)`: returns `(a, b, rms)` for
/// `y ≈ a·x^b`. Needs at least two distinct positive `x`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if n < 2.0 || sxx <= 1e-300 {
        return Err(Error::DegenerateFit("need at least two distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let intercept = my - b * mx;
    let rms = (lx.iter().zip(&ly).map(|(a, c)| (c - intercept - b * a).powi(2)).sum::<f64>() / n).sqrt();
    Ok((intercept.exp(), b, rms))
}

/// Network model for the quantumness-vs-degree sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ba,
    Er,
    Ws,
    Rg,
}

/// How a realization is turned into one quantumness value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// `1 − ⟨√d⟩²/⟨d⟩` over the full generated degree sequence, isolated
    /// nodes included.
    DegreeMoments,
    /// Uniform-state quantumness of the giant component.
    GiantComponent,
}

/// Generated graph at mean degree `mean_degree`, before extraction.
pub fn model_graph(model: Model, n: usize, mean_degree: f64, seed: u64) -> Result<Graph> {
    let m = (n as f64 * mean_degree / 2.0).round() as usize;
    match model {
        Model::Er => gen_er_full(n, m, seed),
        Model::Rg => Ok(gen_rg_full(n, m, seed)?.0),
        Model::Ws => gen_ws(n, m, seed),
        Model::Ba => gen_ba(n, (mean_degree / 2.0).round() as usize, seed),
    }
}

/// One row of a quantumness-vs-degree sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mean_degree: f64,
    pub epsilon: f64,
    pub std_err: f64,
}

/// Ensemble-mean quantumness at each mean degree; replicate `r` uses
/// `replicate_seed(seed, r)`.
pub fn quantumness_sweep(
    model: Model,
    n: usize,
    mean_degrees: &[f64],
    replicates: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<Vec<SweepRow>> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("need at least one replicate".into()));
    }
    mean_degrees
        .iter()
        .map(|&k| {
            let eps: Vec<f64> = (0..replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let g = model_graph(model, n, k, replicate_seed(seed, r))?;
                    Ok(match estimator {
                        Estimator::DegreeMoments => degree_moment_quantumness(&g.degrees()),
                        Estimator::GiantComponent => degree_moment_quantumness(&g.giant_component()?.0.degrees()),
                    })
                })
                .collect::<Result<_>>()?;
            let r = eps.len() as f64;
            let mean = eps.iter().sum::<f64>() / r;
            let var = if eps.len() > 1 { eps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (r - 1.0) } else { 0.0 };
            Ok(SweepRow { mean_degree: k, epsilon: mean, std_err: (var / r).sqrt() })
        })
        .collect()
}

/// Fits `ε ≈ κ₁ ⟨d⟩^{−κ₂}` to a sweep.
pub fn fit_sweep(rows: &[SweepRow]) -> Result<FitResult> {
    let mut distinct: Vec<f64> = rows.iter().map(|r| r.mean_degree).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit("need at least three distinct mean degrees".into()));
    }
    let x: Vec<f64> = rows.iter().map(|r| r.mean_degree).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let (a, b, rms) = fit_power_law(&x, &y)?;
    Ok(FitResult { kappa1: Some(a), kappa2: Some(-b), kappa3: None, residual: rms })
}

/// Sweep then fit.
pub fn fit_quantumness_vs_degree(
    model: Model,
    n: usize,
    mean_degrees: &[f64],
    replicates: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<FitResult> {
    fit_sweep(&quantumness_sweep(model, n, mean_degrees, replicates, seed, estimator)?)
}

/// `κ₃ = −slope` of `ln(P̃_Q / P_C)` against `ln d` over nodes with `d ≥ 2`.
pub fn fit_kappa3(p_c: &[f64], p_qc: &[f64], degrees: &[f64]) -> Result<FitResult> {
    if p_c.len() != p_qc.len() || p_c.len() != degrees.len() {
        return Err(Error::LengthMismatch(p_c.len(), degrees.len()));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = degrees
        .iter()
        .zip(p_c.iter().zip(p_qc))
        .filter(|(d, (c, q))| **d >= 2.0 && **c > 0.0 && **q > 0.0)
        .map(|(d, (c, q))| (*d, q / c))
        .unzip();
    let (_, b, rms) = fit_power_law(&x, &y)?;
    Ok(FitResult { kappa1: None, kappa2: None, kappa3: Some(-b), residual: rms })
}

/// CSV table with a header row.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut out = String::new();
    let mut header: Option<Vec<String>> = None;
    for row in rows {
        let value = serde_json::to_value(row)?;
        let obj = value.as_object().ok_or_else(|| Error::InvalidParameter("CSV rows must be objects".into()))?;
        if header.is_none() {
            let keys: Vec<String> = obj.keys().cloned().collect();
            out.push_str(&keys.join(","));
            out.push('\n');
            header = Some(keys);
        }
        let cells: Vec<String> = header
            .as_ref()
            .expect("set above")
            .iter()
            .map(|k| match &obj[k] {
                serde_json::Value::Null => String::new(),
                serde_json::Value::String(s) => s.clone(),
                v => v.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}
