//! Jaccard and Dice over shingle sets, and the pairwise corpus matrix.
//!
//! Counts are kept as integers until the final division, so a given pair of
//! sets always produces the same bits.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::normalizer::NormalizationProfile;
use crate::shingler::{ShingleParams, ShingleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Jaccard,
    Dice,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Jaccard => "jaccard",
            MetricKind::Dice => "dice",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jaccard" => Ok(MetricKind::Jaccard),
            "dice" => Ok(MetricKind::Dice),
            _ => Err(SimilarityError::UnknownMetric(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimilarityError {
    /// The two sets were built under different parameters or profiles.
    ParamMismatch {
        left: String,
        right: String,
    },
    /// Matrices over different n disagree on the document list.
    DocumentMismatch,
    UnknownMetric(String),
}

impl SimilarityError {
    pub fn code(&self) -> &'static str {
        match self {
            SimilarityError::ParamMismatch { .. } => "param-mismatch",
            SimilarityError::DocumentMismatch => "document-mismatch",
            SimilarityError::UnknownMetric(_) => "invalid-metric",
        }
    }
}

impl fmt::Display for SimilarityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimilarityError::ParamMismatch { left, right } => {
                write!(
                    f,
                    "cannot compare `{left}` with `{right}`: parameter bundles differ"
                )
            }
            SimilarityError::DocumentMismatch => {
                f.write_str("shingle sets for different n cover different documents")
            }
            SimilarityError::UnknownMetric(m) => write!(f, "unknown metric `{m}`"),
        }
    }
}

impl core::error::Error for SimilarityError {}

/// Intersection and set sizes of a pair of key sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Overlap {
    pub shared: usize,
    pub left: usize,
    pub right: usize,
}

impl Overlap {
    pub fn union(&self) -> usize {
        self.left + self.right - self.shared
    }

    /// `|A∩B| / |A∪B|`, 0 when both are empty.
    pub fn jaccard(&self) -> f64 {
        match self.union() {
            0 => 0.0,
            union => self.shared as f64 / union as f64,
        }
    }

    /// `2|A∩B| / (|A|+|B|)`, 0 when both are empty.
    pub fn dice(&self) -> f64 {
        match self.left + self.right {
            0 => 0.0,
            total => (2 * self.shared) as f64 / total as f64,
        }
    }

    pub fn metric(&self, kind: MetricKind) -> f64 {
        match kind {
            MetricKind::Jaccard => self.jaccard(),
            MetricKind::Dice => self.dice(),
        }
    }
}

fn check_bundle(a: &ShingleSet, b: &ShingleSet) -> Result<(), SimilarityError> {
    if a.same_bundle(b) {
        return Ok(());
    }
    Err(SimilarityError::ParamMismatch {
        left: alloc::format!("{} [{}]", a.params, a.profile),
        right: alloc::format!("{} [{}]", b.params, b.profile),
    })
}

/// Merge-walks the two sorted key sequences.
pub fn overlap(a: &ShingleSet, b: &ShingleSet) -> Result<Overlap, SimilarityError> {
    check_bundle(a, b)?;
    let mut shared = 0;
    let mut left = a.keys().peekable();
    let mut right = b.keys().peekable();
    while let (Some(x), Some(y)) = (left.peek(), right.peek()) {
        match x.cmp(y) {
            Ordering::Less => {
                left.next();
            }
            Ordering::Greater => {
                right.next();
            }
            Ordering::Equal => {
                shared += 1;
                left.next();
                right.next();
            }
        }
    }
    Ok(Overlap {
        shared,
        left: a.len(),
        right: b.len(),
    })
}

pub fn jaccard(a: &ShingleSet, b: &ShingleSet) -> Result<f64, SimilarityError> {
    overlap(a, b).map(|o| o.jaccard())
}

pub fn dice(a: &ShingleSet, b: &ShingleSet) -> Result<f64, SimilarityError> {
    overlap(a, b).map(|o| o.dice())
}

/// How per-n matrices are folded into one value per pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    /// One gram size.
    Single,
    /// Arithmetic mean over several gram sizes.
    Mean,
}

/// Symmetric pairwise metric values, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub document_ids: Vec<String>,
    pub params: ShingleParams,
    pub profile: NormalizationProfile,
    pub metric: MetricKind,
    pub combine: Combine,
    /// Gram sizes that went into each cell.
    pub gram_sizes: Vec<usize>,
    pub values: Vec<f64>,
    /// Documents with no shingles at all. Their diagonal is 1 by convention
    /// and every other cell in their row is 0.
    pub empty: Vec<String>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.document_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.document_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.document_ids.iter().position(|d| d == id)
    }

    pub fn value(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.len();
        &self.values[i * m..(i + 1) * m]
    }
}

fn pairwise(sets: &[ShingleSet], metric: MetricKind) -> Result<Vec<f64>, SimilarityError> {
    let m = sets.len();
    if let Some(first) = sets.first() {
        for s in &sets[1..] {
            check_bundle(first, s)?;
        }
    }
    let mut values = alloc::vec![0.0; m * m];
    for i in 0..m {
        values[i * m + i] = 1.0;
        for j in i + 1..m {
            let v = overlap(&sets[i], &sets[j])?.metric(metric);
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
    }
    Ok(values)
}

/// All pairs of `sets` under one metric. Every set must share one bundle.
pub fn similarity_matrix(
    sets: &[ShingleSet],
    metric: MetricKind,
) -> Result<SimilarityMatrix, SimilarityError> {
    let values = pairwise(sets, metric)?;
    let (params, profile) = match sets.first() {
        Some(s) => (s.params, s.profile.clone()),
        None => (
            ShingleParams::contiguous(4).expect("valid"),
            NormalizationProfile::none(),
        ),
    };
    Ok(SimilarityMatrix {
        document_ids: sets.iter().map(|s| s.document_id.clone()).collect(),
        params,
        profile,
        metric,
        combine: Combine::Single,
        gram_sizes: alloc::vec![params.n],
        values,
        empty: sets
            .iter()
            .filter(|s| s.is_empty())
            .map(|s| s.document_id.clone())
            .collect(),
    })
}

/// Mean of the per-n matrices. `per_n[g]` holds one set per document, in the
/// same document order for every g.
pub fn mean_similarity_matrix(
    per_n: &[Vec<ShingleSet>],
    metric: MetricKind,
) -> Result<SimilarityMatrix, SimilarityError> {
    let Some(first) = per_n.first() else {
        return similarity_matrix(&[], metric);
    };
    let ids: Vec<&str> = first.iter().map(|s| s.document_id.as_str()).collect();
    let mut matrices = Vec::with_capacity(per_n.len());
    for sets in per_n {
        let same_docs =
            sets.len() == ids.len() && sets.iter().zip(&ids).all(|(s, id)| s.document_id == *id);
        if !same_docs {
            return Err(SimilarityError::DocumentMismatch);
        }
        matrices.push(similarity_matrix(sets, metric)?);
    }
    let mut combined = matrices[0].clone();
    for (cell, value) in combined.values.iter_mut().enumerate() {
        let sum: f64 = matrices.iter().map(|mx| mx.values[cell]).sum();
        *value = sum / matrices.len() as f64;
    }
    combined.combine = Combine::Mean;
    combined.gram_sizes = matrices.iter().map(|mx| mx.params.n).collect();
    combined.empty = ids
        .iter()
        .enumerate()
        .filter(|&(i, _)| per_n.iter().all(|sets| sets[i].is_empty()))
        .map(|(_, id)| String::from(*id))
        .collect();
    Ok(combined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalizer::normalize;
    use crate::scanner::tokenize_aksaras;
    use crate::shingler::contiguous_shingles;

    fn set(id: &str, keys: &[&str]) -> ShingleSet {
        let mut s = ShingleSet::new(
            id,
            ShingleParams::contiguous(2).unwrap(),
            NormalizationProfile::none(),
        );
        for (i, k) in keys.iter().enumerate() {
            s.occurrences
                .entry((*k).into())
                .or_default()
                .push(alloc::vec![i, i + 1]);
        }
        s
    }

    fn phrase(id: &str, text: &str) -> ShingleSet {
        let s = normalize(
            &tokenize_aksaras(id, text),
            &NormalizationProfile::default(),
        );
        contiguous_shingles(&s, 4)
    }

    #[test]
    fn commentary_pair() {
        let a = phrase("a", "ihānukto 'pi buddho viśe");
        let b = phrase("b", "atrānukto pi budho viśe");
        let o = overlap(&a, &b).unwrap();
        assert_eq!(
            o,
            Overlap {
                shared: 4,
                left: 6,
                right: 6
            }
        );
        assert_eq!(o.union(), 8);
        assert_eq!(jaccard(&a, &b).unwrap(), 0.5);
        assert!((dice(&a, &b).unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn trivial_cases() {
        let a = set("a", &["x", "y"]);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(dice(&a, &a).unwrap(), 1.0);
        let b = set("b", &["z"]);
        assert_eq!(jaccard(&a, &b).unwrap(), 0.0);
        assert_eq!(dice(&a, &b).unwrap(), 0.0);
        let e = set("e", &[]);
        assert_eq!(jaccard(&e, &e).unwrap(), 0.0);
        assert_eq!(dice(&e, &e).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_params_are_rejected() {
        let a = set("a", &["x"]);
        let mut b = set("b", &["x"]);
        b.params = ShingleParams::contiguous(3).unwrap();
        let err = jaccard(&a, &b).unwrap_err();
        assert_eq!(err.code(), "param-mismatch");
        let mut c = set("c", &["x"]);
        c.profile = NormalizationProfile::default();
        assert!(dice(&a, &c).is_err());
    }

    #[test]
    fn two_document_matrix() {
        let sets = [set("a", &["x", "y"]), set("b", &["y", "z"])];
        let mx = similarity_matrix(&sets, MetricKind::Dice).unwrap();
        assert_eq!(mx.values, alloc::vec![1.0, 0.5, 0.5, 1.0]);
        assert_eq!(mx.value("b", "a"), Some(0.5));
        assert!(mx.empty.is_empty());
    }

    #[test]
    fn empty_documents_are_flagged() {
        let sets = [set("a", &["x"]), set("e", &[])];
        let mx = similarity_matrix(&sets, MetricKind::Jaccard).unwrap();
        assert_eq!(mx.values, alloc::vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(mx.empty, alloc::vec![String::from("e")]);
    }

    #[test]
    fn mean_over_sizes() {
        let n2 = alloc::vec![set("a", &["x", "y"]), set("b", &["y", "z"])];
        let mut n3 = alloc::vec![set("a", &["p"]), set("b", &["p"])];
        for s in &mut n3 {
            s.params = ShingleParams::contiguous(3).unwrap();
        }
        let mx = mean_similarity_matrix(&[n2.clone(), n3], MetricKind::Dice).unwrap();
        assert_eq!(mx.get(0, 1), 0.75);
        assert_eq!(mx.combine, Combine::Mean);
        assert_eq!(mx.gram_sizes, alloc::vec![2, 3]);

        let swapped = alloc::vec![n2[1].clone(), n2[0].clone()];
        assert_eq!(
            mean_similarity_matrix(&[n2, swapped], MetricKind::Dice),
            Err(SimilarityError::DocumentMismatch)
        );
    }
}
