use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard assignment of nodes to communities `0..k`, every id used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    assignment: Vec<usize>,
}

impl TryFrom<PartitionJson> for Partition {
    type Error = Error;
    fn try_from(raw: PartitionJson) -> Result<Self> {
        Partition::new(raw.assignment)
    }
}

impl From<Partition> for PartitionJson {
    fn from(p: Partition) -> Self {
        PartitionJson { assignment: p.assignment }
    }
}

impl Partition {
    /// Requires ids to form a contiguous range `0..k`.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; k];
        for &a in &assignment {
            used[a] = true;
        }
        if let Some(id) = used.iter().position(|u| !u) {
            return Err(Error::InvalidPartition(format!("community id {id} is unused")));
        }
        Ok(Self { assignment, k })
    }

    /// Relabels arbitrary labels by order of first appearance.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let assignment: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Self { k: ids.len(), assignment }
    }

    /// Communities given as node lists; they must cover `0..n` exactly once.
    pub fn from_communities(n: usize, communities: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (c, nodes) in communities.iter().enumerate() {
            if nodes.is_empty() {
                return Err(Error::InvalidPartition(format!("community {c} is empty")));
            }
            for &i in nodes {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                if assignment[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("node {i} appears twice")));
                }
                assignment[i] = c;
            }
        }
        if let Some(i) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidPartition(format!("node {i} is unassigned")));
        }
        Ok(Self { assignment, k: communities.len() })
    }

    pub fn singletons(n: usize) -> Self {
        Self { assignment: (0..n).collect(), k: n }
    }

    pub fn single(n: usize) -> Self {
        Self { assignment: vec![0; n], k: usize::from(n > 0) }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Number of communities.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Members of each community, in id order.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &a) in self.assignment.iter().enumerate() {
            out[a].push(i);
        }
        out
    }

    /// Same partition relabeled by order of first appearance.
    pub fn canonical(&self) -> Self {
        Self::from_labels(&self.assignment)
    }

    /// Equality up to relabeling.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Partition::new(vec![0, 2]).is_err());
        assert_eq!(Partition::new(vec![1, 0, 1]).unwrap().k(), 2);
        assert!(Partition::from_communities(3, &[vec![0], vec![1]]).is_err());
        assert!(Partition::from_communities(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(serde_json::from_str::<Partition>(r#"{"assignment":[0,3]}"#).is_err());
    }

    #[test]
    fn relabeling() {
        let p = Partition::from_labels(&["b", "a", "b"]);
        assert_eq!(p.assignment(), &[0, 1, 0]);
        let q = Partition::new(vec![1, 0, 1]).unwrap();
        assert!(p.same_grouping(&q));
        assert_eq!(q.communities(), vec![vec![1], vec![0, 2]]);
    }

    #[test]
    fn json_round_trip() {
        let p = Partition::new(vec![0, 0, 1]).unwrap();
        assert_eq!(p.to_json(), r#"{"assignment":[0,0,1]}"#);
        assert_eq!(serde_json::from_str::<Partition>(&p.to_json()).unwrap(), p);
    }
}
