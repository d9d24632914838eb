use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{Error, Result};

/// One merge: two or more current communities joined at `closeness`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub communities: Vec<Vec<usize>>,
    pub closeness: f64,
}

/// Full merge history from `n` singletons down to one community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DendrogramJson", into = "DendrogramJson")]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

#[derive(Serialize, Deserialize)]
struct DendrogramJson {
    n: usize,
    merges: Vec<Merge>,
}

impl TryFrom<DendrogramJson> for Dendrogram {
    type Error = Error;
    fn try_from(raw: DendrogramJson) -> Result<Self> {
        Dendrogram::new(raw.n, raw.merges)
    }
}

impl From<Dendrogram> for DendrogramJson {
    fn from(d: Dendrogram) -> Self {
        DendrogramJson { n: d.n, merges: d.merges }
    }
}

impl Dendrogram {
    /// Replays the merges, checking that each one joins at least two
    /// communities that exist at that point.
    pub fn new(n: usize, merges: Vec<Merge>) -> Result<Self> {
        let d = Self { n, merges };
        let mut current: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for (step, m) in d.merges.iter().enumerate() {
            if m.communities.len() < 2 {
                return Err(Error::InvalidPartition(format!("merge {step} joins fewer than two communities")));
            }
            for c in &m.communities {
                let mut sorted = c.clone();
                sorted.sort_unstable();
                let pos = current
                    .iter()
                    .position(|x| *x == sorted)
                    .ok_or_else(|| Error::InvalidPartition(format!("merge {step} names a non-existent community")))?;
                current.swap_remove(pos);
            }
            let mut joined: Vec<usize> = m.communities.concat();
            joined.sort_unstable();
            current.push(joined);
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Partitions after `0, 1, …, merges.len()` merges.
    pub fn levels(&self) -> Vec<Partition> {
        let mut label: Vec<usize> = (0..self.n).collect();
        let mut out = vec![Partition::singletons(self.n)];
        for m in &self.merges {
            let target = m.communities.iter().flatten().copied().min().expect("non-empty merge");
            for &i in m.communities.iter().flatten() {
                label[i] = target;
            }
            out.push(Partition::from_labels(&label));
        }
        out
    }

    /// Partition of the last level with at least `k` communities. When a
    /// simultaneous merge skips over `k`, the finer level is returned.
    pub fn cut_k(&self, k: usize) -> Result<Partition> {
        if k == 0 || k > self.n {
            return Err(Error::InvalidParameter(format!("cannot cut {} nodes into {k} communities", self.n)));
        }
        Ok(self.levels().into_iter().rev().find(|p| p.k() >= k).expect("level 0 has n communities"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialization cannot fail")
    }
}

/// Agglomerative clustering on a node-level closeness matrix.
///
/// Community closeness is the block mean `(1/|A||B|) Σ_{i∈A, j∈B} c_ij`,
/// recomputed from node entries at every step. All pairs within
/// `1e-9·|c_max|` (plus an absolute floor of `1e-14·max|c|`) of the current
/// maximum are merged at once: each connected component of that tie graph
/// becomes one merge record, ordered by smallest member.
pub fn agglomerate(base: &DMatrix<f64>) -> Result<Dendrogram> {
    let n = base.nrows();
    if base.ncols() != n {
        return Err(Error::LengthMismatch(base.nrows(), base.ncols()));
    }
    if base.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let floor = 1e-14 * base.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut communities: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while communities.len() > 1 {
        let k = communities.len();
        let mut owner = vec![0; n];
        for (c, nodes) in communities.iter().enumerate() {
            for &i in nodes {
                owner[i] = c;
            }
        }
        let mut sums = DMatrix::<f64>::zeros(k, k);
        for j in 0..n {
            for i in 0..n {
                sums[(owner[i], owner[j])] += base[(i, j)];
            }
        }
        let mut close = DMatrix::<f64>::from_element(k, k, f64::NEG_INFINITY);
        let mut cmax = f64::NEG_INFINITY;
        for a in 0..k {
            for b in a + 1..k {
                let c = sums[(a, b)] / (communities[a].len() * communities[b].len()) as f64;
                close[(a, b)] = c;
                cmax = cmax.max(c);
            }
        }
        let tol = 1e-9 * cmax.abs() + floor;
        let mut uf = UnionFind::new(k);
        let mut best = vec![f64::NEG_INFINITY; k];
        for a in 0..k {
            for b in a + 1..k {
                if close[(a, b)] >= cmax - tol {
                    uf.union(a, b);
                }
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                if close[(a, b)] >= cmax - tol {
                    let r = uf.find(a);
                    best[r] = best[r].max(close[(a, b)]);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
        for a in 0..k {
            groups[uf.find(a)].push(a);
        }
        // communities are kept sorted by smallest node, so a group's first
        // member carries its smallest node
        let mut next = Vec::new();
        let mut records = Vec::new();
        for (root, g) in groups.iter().enumerate() {
            if g.len() >= 2 {
                records.push((communities[g[0]][0], root, g.clone()));
            }
        }
        records.sort_by_key(|r| r.0);
        for (_, root, g) in &records {
            merges.push(Merge { communities: g.iter().map(|&a| communities[a].clone()).collect(), closeness: best[*root] });
        }
        for g in groups.iter().filter(|g| !g.is_empty()) {
            let mut joined: Vec<usize> = g.iter().flat_map(|&a| communities[a].iter().copied()).collect();
            joined.sort_unstable();
            next.push(joined);
        }
        next.sort_by_key(|c| c[0]);
        communities = next;
    }
    Dendrogram::new(n, merges)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks() -> DMatrix<f64> {
        // two strongly tied pairs {0,1} and {2,3}, weak cross links
        DMatrix::from_row_slice(4, 4, &[0.0, 5.0, 1.0, 0.5, 5.0, 0.0, 0.5, 1.0, 1.0, 0.5, 0.0, 5.0, 0.5, 1.0, 5.0, 0.0])
    }

    #[test]
    fn simultaneous_pairs() {
        let d = agglomerate(&blocks()).unwrap();
        assert_eq!(d.merges().len(), 3);
        assert_eq!(d.merges()[0].communities, vec![vec![0], vec![1]]);
        assert_eq!(d.merges()[1].communities, vec![vec![2], vec![3]]);
        assert_eq!(d.merges()[2].communities, vec![vec![0, 1], vec![2, 3]]);
        assert!((d.merges()[2].closeness - 0.75).abs() < 1e-15);
        assert_eq!(d.cut_k(2).unwrap().assignment(), &[0, 0, 1, 1]);
    }

    #[test]
    fn all_equal_merges_at_once() {
        let mut c = DMatrix::from_element(5, 5, 1.0);
        c.fill_diagonal(0.0);
        let d = agglomerate(&c).unwrap();
        assert_eq!(d.merges().len(), 1);
        assert_eq!(d.merges()[0].communities.len(), 5);
        // a cut that the multi-merge skips returns the finer level
        assert_eq!(d.cut_k(3).unwrap().k(), 5);
    }

    #[test]
    fn single_node() {
        let d = agglomerate(&DMatrix::zeros(1, 1)).unwrap();
        assert!(d.merges().is_empty());
        assert_eq!(d.levels(), vec![Partition::singletons(1)]);
    }

    #[test]
    fn levels_valid_and_decreasing() {
        let d = agglomerate(&blocks()).unwrap();
        let ks: Vec<usize> = d.levels().iter().map(Partition::k).collect();
        assert_eq!(ks, vec![4, 3, 2, 1]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let d = agglomerate(&blocks()).unwrap();
        let back: Dendrogram = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"n":3,"merges":[{"communities":[[0],[0,1]],"closeness":1.0}]}"#;
        assert!(serde_json::from_str::<Dendrogram>(bad).is_err());
    }
}
