use nalgebra::DMatrix;

use super::dendrogram::Dendrogram;
use super::partition::Partition;
use crate::error::{Error, Result};

fn check(adj: &DMatrix<f64>, p: &Partition) -> Result<()> {
    if adj.nrows() != adj.ncols() {
        return Err(Error::LengthMismatch(adj.nrows(), adj.ncols()));
    }
    if adj.nrows() != p.n() {
        return Err(Error::LengthMismatch(adj.nrows(), p.n()));
    }
    Ok(())
}

/// Newman modularity `Q = (1/2m) Σ_ij (A_ij − k_i k_j / 2m) δ(σ_i, σ_j)`
/// with `2m = Σ_ij A_ij`. Requires non-negative entries.
pub fn modularity(adj: &DMatrix<f64>, p: &Partition) -> Result<f64> {
    check(adj, p)?;
    if adj.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidParameter("modularity needs non-negative weights; use signed_modularity".into()));
    }
    unsigned(adj, p).ok_or(Error::ZeroWeight)
}

fn unsigned(adj: &DMatrix<f64>, p: &Partition) -> Option<f64> {
    let two_m = adj.sum();
    if two_m <= 0.0 {
        return None;
    }
    let k: Vec<f64> = adj.row_iter().map(|r| r.sum()).collect();
    let mut in_weight = vec![0.0; p.k()];
    let mut strength = vec![0.0; p.k()];
    let a = p.assignment();
    for j in 0..adj.ncols() {
        strength[a[j]] += k[j];
        for i in 0..adj.nrows() {
            if a[i] == a[j] {
                in_weight[a[i]] += adj[(i, j)];
            }
        }
    }
    let q: f64 = in_weight.iter().zip(&strength).map(|(w, s)| w / two_m - (s / two_m).powi(2)).sum();
    Some(q)
}

/// Modularity for mixed-sign weights: positive and negative parts are scored
/// separately and combined as `(2m⁺ Q⁺ − 2m⁻ Q⁻) / (2m⁺ + 2m⁻)`.
pub fn signed_modularity(adj: &DMatrix<f64>, p: &Partition) -> Result<f64> {
    check(adj, p)?;
    let pos = adj.map(|x| x.max(0.0));
    let neg = adj.map(|x| (-x).max(0.0));
    let (mp, mn) = (pos.sum(), neg.sum());
    if mp <= 0.0 && mn <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    let qp = unsigned(&pos, p).unwrap_or(0.0);
    let qn = unsigned(&neg, p).unwrap_or(0.0);
    Ok((mp * qp - mn * qn) / (mp + mn))
}

/// `−Σ_ij A_ij δ(σ_i, σ_j)`.
pub fn frustration(adj: &DMatrix<f64>, p: &Partition) -> Result<f64> {
    check(adj, p)?;
    let a = p.assignment();
    let mut s = 0.0;
    for j in 0..adj.ncols() {
        for i in 0..adj.nrows() {
            if a[i] == a[j] {
                s += adj[(i, j)];
            }
        }
    }
    Ok(-s)
}

/// Dendrogram level with the largest signed modularity; ties go to the
/// level with fewer communities. A single node or an all-zero matrix gives
/// the one-community partition with `Q = 0`.
pub fn best_partition(d: &Dendrogram, adj: &DMatrix<f64>) -> Result<(Partition, f64)> {
    if adj.nrows() != d.n() {
        return Err(Error::LengthMismatch(adj.nrows(), d.n()));
    }
    let n = d.n();
    if n <= 1 || adj.iter().all(|&x| x == 0.0) {
        return Ok((Partition::single(n), 0.0));
    }
    let levels = d.levels();
    let scores: Vec<f64> = {
        use rayon::prelude::*;
        levels.par_iter().map(|p| signed_modularity(adj, p)).collect::<Result<_>>()?
    };
    let scale = scores.iter().fold(0.0f64, |m, q| m.max(q.abs()));
    let mut best = levels.len() - 1;
    for i in (0..levels.len()).rev() {
        if scores[i] > scores[best] + 1e-12 * scale.max(1e-300) {
            best = i;
        }
    }
    Ok((levels[best].clone(), scores[best]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::agglomerate;

    fn two_k3() -> DMatrix<f64> {
        let mut a = DMatrix::zeros(6, 6);
        for (i, j) in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)] {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    /// Literal double sum over the modularity matrix.
    fn brute(a: &DMatrix<f64>, p: &Partition) -> f64 {
        let n = a.nrows();
        let two_m: f64 = a.iter().sum();
        let k: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).sum()).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if p.assignment()[i] == p.assignment()[j] {
                    q += a[(i, j)] - k[i] * k[j] / two_m;
                }
            }
        }
        q / two_m
    }

    #[test]
    fn modularity_examples() {
        let a = two_k3();
        let split = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(modularity(&a, &Partition::single(6)).unwrap(), 0.0);
        assert!((modularity(&a, &split).unwrap() - 0.5).abs() < 1e-15);
        assert!((brute(&a, &split) - 0.5).abs() < 1e-15);
        let scaled = &a * 3.7;
        assert!((modularity(&scaled, &split).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(modularity(&DMatrix::zeros(2, 2), &Partition::single(2)), Err(Error::ZeroWeight)));
    }

    #[test]
    fn signed_examples() {
        let a = two_k3();
        let split = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert!((signed_modularity(&a, &split).unwrap() - modularity(&a, &split).unwrap()).abs() < 1e-12);
        let neg = -&a;
        assert!(signed_modularity(&neg, &split).unwrap() < 0.0);
        assert!(signed_modularity(&DMatrix::zeros(3, 3), &Partition::single(3)).is_err());
    }

    #[test]
    fn signed_negation_four_nodes() {
        // positive links inside {0,1},{2,3}; equally strong negative links across
        let mut a = DMatrix::zeros(4, 4);
        for (i, j, w) in [(0, 1, 1.0), (2, 3, 1.0), (0, 2, -1.0), (1, 3, -1.0)] {
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        let p = Partition::new(vec![0, 0, 1, 1]).unwrap();
        let q = signed_modularity(&a, &p).unwrap();
        let q_neg = signed_modularity(&(-&a), &p).unwrap();
        // brute force from the positive/negative parts
        let pos = a.map(|x| x.max(0.0));
        let negp = a.map(|x| (-x).max(0.0));
        let expect = (pos.sum() * brute(&pos, &p) - negp.sum() * brute(&negp, &p)) / (pos.sum() + negp.sum());
        assert!((q - expect).abs() < 1e-15);
        assert!((q + q_neg).abs() < 1e-15);
    }

    #[test]
    fn frustration_examples() {
        let a = two_k3();
        assert_eq!(frustration(&a, &Partition::single(6)).unwrap(), -12.0);
        assert_eq!(frustration(&a, &Partition::singletons(6)).unwrap(), 0.0);
        assert_eq!(frustration(&a, &Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap()).unwrap(), -12.0);
    }

    #[test]
    fn best_partition_two_triangles() {
        let a = two_k3();
        let d = agglomerate(&a).unwrap();
        let (p, q) = best_partition(&d, &a).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 1, 1, 1]);
        assert!((q - 0.5).abs() < 1e-12);
        let (p1, q1) = best_partition(&agglomerate(&DMatrix::zeros(1, 1)).unwrap(), &DMatrix::zeros(1, 1)).unwrap();
        assert_eq!((p1.k(), q1), (1, 0.0));
    }
}
