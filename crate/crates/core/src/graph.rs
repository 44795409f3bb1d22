//! Minimum spanning tree over a similarity matrix.
//!
//! Edge weight is `1 - similarity`, so the tree links the most similar
//! documents. Equal weights are ordered by the (smaller id, larger id) pair.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::normalizer::NormalizationProfile;
use crate::shingler::ShingleParams;
use crate::similarity::{Combine, MetricKind, SimilarityMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: String,
    pub label: String,
    pub language: Option<String>,
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub a: String,
    pub b: String,
    pub weight: f64,
    pub similarity: f64,
}

/// Nodes sorted by id; edges sorted by `(a, b)` with `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReuseTree {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<TreeEdge>,
    pub metric: MetricKind,
    pub params: ShingleParams,
    pub profile: NormalizationProfile,
    pub combine: Combine,
    pub gram_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    EmptyMatrix,
    Asymmetric { a: String, b: String },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::EmptyMatrix => f.write_str("cannot build a tree over zero documents"),
            GraphError::Asymmetric { a, b } => {
                write!(f, "similarity matrix is not symmetric at ({a}, {b})")
            }
        }
    }
}

impl core::error::Error for GraphError {}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: alloc::vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal over the complete graph on `m` nodes. Ties are broken by `(i, j)`,
/// so callers pass nodes in the order that should win ties.
pub(crate) fn kruskal(m: usize, weight: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            candidates.push((weight(i, j), i, j));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut sets = DisjointSets::new(m);
    let mut chosen = Vec::with_capacity(m.saturating_sub(1));
    for (_, i, j) in candidates {
        if sets.union(i, j) {
            chosen.push((i, j));
            if chosen.len() + 1 == m {
                break;
            }
        }
    }
    chosen
}

pub fn minimum_spanning_tree(matrix: &SimilarityMatrix) -> Result<ReuseTree, GraphError> {
    let m = matrix.len();
    if m == 0 {
        return Err(GraphError::EmptyMatrix);
    }
    for i in 0..m {
        for j in i + 1..m {
            if matrix.get(i, j).to_bits() != matrix.get(j, i).to_bits() {
                return Err(GraphError::Asymmetric {
                    a: matrix.document_ids[i].clone(),
                    b: matrix.document_ids[j].clone(),
                });
            }
        }
    }

    // position in sorted-id order -> matrix row
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| matrix.document_ids[x].cmp(&matrix.document_ids[y]));
    let similarity = |i: usize, j: usize| matrix.get(order[i], order[j]);

    let mut edges: Vec<TreeEdge> = kruskal(m, |i, j| 1.0 - similarity(i, j))
        .into_iter()
        .map(|(i, j)| TreeEdge {
            a: matrix.document_ids[order[i]].clone(),
            b: matrix.document_ids[order[j]].clone(),
            weight: 1.0 - similarity(i, j),
            similarity: similarity(i, j),
        })
        .collect();
    edges.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));

    let nodes = order
        .iter()
        .map(|&row| {
            let id = matrix.document_ids[row].clone();
            TreeNode {
                label: id.clone(),
                id,
                language: None,
                group: None,
            }
        })
        .collect();

    Ok(ReuseTree {
        nodes,
        edges,
        metric: matrix.metric,
        params: matrix.params,
        profile: matrix.profile.clone(),
        combine: matrix.combine,
        gram_sizes: matrix.gram_sizes.clone(),
    })
}

impl ReuseTree {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn node(&self, id: &str) -> Option<&TreeNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Fills in display metadata for each node.
    pub fn annotate(&mut self, f: impl FnMut(&mut TreeNode)) {
        self.nodes.iter_mut().for_each(f);
    }

    /// `nodes - 1` edges between known nodes, with no cycle.
    pub fn is_spanning_tree(&self) -> bool {
        let index = |id: &str| self.nodes.iter().position(|n| n.id == id);
        if self.edges.len() + 1 != self.nodes.len() {
            return false;
        }
        let mut sets = DisjointSets::new(self.nodes.len());
        self.edges.iter().all(|e| match (index(&e.a), index(&e.b)) {
            (Some(a), Some(b)) => sets.union(a, b),
            _ => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn matrix(ids: &[&str], values: Vec<f64>) -> SimilarityMatrix {
        SimilarityMatrix {
            document_ids: ids.iter().map(|s| String::from(*s)).collect(),
            params: ShingleParams::contiguous(4).unwrap(),
            profile: NormalizationProfile::default(),
            metric: MetricKind::Dice,
            combine: Combine::Single,
            gram_sizes: vec![4],
            values,
            empty: Vec::new(),
        }
    }

    fn pairs(tree: &ReuseTree) -> Vec<(&str, &str)> {
        tree.edges
            .iter()
            .map(|e| (e.a.as_str(), e.b.as_str()))
            .collect()
    }

    #[test]
    fn three_documents() {
        // AB 0.9, AC 0.2, BC 0.5
        let mx = matrix(
            &["A", "B", "C"],
            vec![1.0, 0.9, 0.2, 0.9, 1.0, 0.5, 0.2, 0.5, 1.0],
        );
        let tree = minimum_spanning_tree(&mx).unwrap();
        assert_eq!(pairs(&tree), vec![("A", "B"), ("B", "C")]);
        assert!((tree.total_weight() - 0.6).abs() < 1e-12);
        assert!(tree.is_spanning_tree());
        for e in &tree.edges {
            assert_eq!(e.weight, 1.0 - e.similarity);
        }
    }

    #[test]
    fn single_and_pair() {
        let one = minimum_spanning_tree(&matrix(&["only"], vec![1.0])).unwrap();
        assert_eq!(one.nodes.len(), 1);
        assert!(one.edges.is_empty());
        assert!(one.is_spanning_tree());

        let two = minimum_spanning_tree(&matrix(&["b", "a"], vec![1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(pairs(&two), vec![("a", "b")]);
        assert_eq!(two.edges[0].weight, 1.0);
        assert_eq!(two.nodes[0].id, "a");
    }

    #[test]
    fn empty_and_asymmetric_are_errors() {
        assert_eq!(
            minimum_spanning_tree(&matrix(&[], vec![])),
            Err(GraphError::EmptyMatrix)
        );
        let bad = matrix(&["a", "b"], vec![1.0, 0.3, 0.4, 1.0]);
        assert!(matches!(
            minimum_spanning_tree(&bad),
            Err(GraphError::Asymmetric { .. })
        ));
    }

    #[test]
    fn ties_follow_id_order() {
        // every pair equally similar: star from the lexicographically first id
        let ids = ["d", "c", "b", "a"];
        let mut values = vec![0.5; 16];
        for i in 0..4 {
            values[i * 4 + i] = 1.0;
        }
        let tree = minimum_spanning_tree(&matrix(&ids, values)).unwrap();
        assert_eq!(pairs(&tree), vec![("a", "b"), ("a", "c"), ("a", "d")]);
    }

    #[test]
    fn scaling_weights_keeps_edges() {
        let w = [
            [0.0, 0.3, 0.7, 0.1],
            [0.3, 0.0, 0.2, 0.9],
            [0.7, 0.2, 0.0, 0.4],
            [0.1, 0.9, 0.4, 0.0],
        ];
        let base = kruskal(4, |i, j| w[i][j]);
        for c in [0.5, 3.0, 17.25] {
            assert_eq!(kruskal(4, |i, j| c * w[i][j]), base);
        }
    }

    #[test]
    fn structure_check_catches_cycles() {
        let mx = matrix(
            &["A", "B", "C"],
            vec![1.0, 0.9, 0.2, 0.9, 1.0, 0.5, 0.2, 0.5, 1.0],
        );
        let mut tree = minimum_spanning_tree(&mx).unwrap();
        tree.edges[1] = TreeEdge {
            a: "A".into(),
            b: "B".into(),
            weight: 0.1,
            similarity: 0.9,
        };
        assert!(!tree.is_spanning_tree());
    }
}
