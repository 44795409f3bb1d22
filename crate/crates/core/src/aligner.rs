//! Shared shingles of two documents, projected back onto source byte ranges
//! for side-by-side highlighting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::normalizer::{normalize, NormalizationProfile};
use crate::scanner::{tokenize_aksaras, tokenize_characters, Span};
use crate::shingler::{character_shingles_of, shingle, ShingleParams, ShingleSet, Unit};
use crate::similarity::{overlap, Overlap, SimilarityError};

/// Gram sizes reported in [`ComparisonReport::counts_by_n`].
pub const REPORTED_SIZES: [usize; 4] = [2, 3, 4, 5];

/// A document's id and full source text.
#[derive(Debug, Clone, Copy)]
pub struct SourceDocument<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

impl<'a> SourceDocument<'a> {
    pub fn new(id: &'a str, text: &'a str) -> Self {
        SourceDocument { id, text }
    }
}

/// One occurrence of a shared key in A paired with one occurrence in B.
///
/// `span_*` is the hull of the occurrence; `parts_*` splits it where skip
/// mode jumped over units, so skipped units are not highlighted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSpan {
    pub key: String,
    pub n: usize,
    pub span_a: Span,
    pub span_b: Span,
    pub parts_a: Vec<Span>,
    pub parts_b: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub doc_a: String,
    pub doc_b: String,
    pub params: ShingleParams,
    pub profile: NormalizationProfile,
    pub overlap: Overlap,
    pub shared_keys: Vec<String>,
    pub matches: Vec<MatchSpan>,
    pub merged_a: Vec<Span>,
    pub merged_b: Vec<Span>,
    pub counts_by_n: BTreeMap<usize, usize>,
}

impl ComparisonReport {
    pub fn jaccard(&self) -> f64 {
        self.overlap.jaccard()
    }

    pub fn dice(&self) -> f64 {
        self.overlap.dice()
    }
}

/// Exact key intersection.
pub fn shared_shingles(
    a: &ShingleSet,
    b: &ShingleSet,
) -> Result<BTreeSet<String>, SimilarityError> {
    overlap(a, b)?;
    Ok(a.keys()
        .filter(|k| b.contains(k))
        .map(String::from)
        .collect())
}

/// Shingles `text` and returns the source span of every unit the positions
/// in the set refer to.
pub fn shingle_with_spans(
    doc: SourceDocument<'_>,
    params: &ShingleParams,
    profile: &NormalizationProfile,
) -> (ShingleSet, Vec<Span>) {
    match params.unit {
        Unit::Aksara => {
            let stream = normalize(&tokenize_aksaras(doc.id, doc.text), profile);
            let spans = stream.aksaras.iter().map(|a| a.span).collect();
            (shingle(&stream, params), spans)
        }
        Unit::Character => {
            let chars = tokenize_characters(doc.text);
            let spans = chars.iter().map(|g| g.span).collect();
            (character_shingles_of(doc.id, &chars, params.n), spans)
        }
    }
}

/// Hulls of the maximal runs of consecutive positions.
fn occurrence_parts(positions: &[usize], spans: &[Span]) -> Vec<Span> {
    let mut parts: Vec<Span> = Vec::new();
    let mut previous: Option<usize> = None;
    for &p in positions {
        let span = spans[p];
        match (previous, parts.last_mut()) {
            (Some(prev), Some(last)) if p == prev + 1 => *last = last.hull(span),
            _ => parts.push(span),
        }
        previous = Some(p);
    }
    parts
}

/// Sorted union of ranges; touching ranges are joined.
pub fn merge_spans(spans: impl IntoIterator<Item = Span>) -> Vec<Span> {
    let mut sorted: Vec<Span> = spans.into_iter().filter(|s| !s.is_empty()).collect();
    sorted.sort();
    let mut merged: Vec<Span> = Vec::with_capacity(sorted.len());
    for span in sorted {
        match merged.last_mut() {
            Some(last) if span.start <= last.end => last.end = last.end.max(span.end),
            _ => merged.push(span),
        }
    }
    merged
}

/// Full pairwise comparison of two documents under one parameter bundle.
pub fn compare(
    a: SourceDocument<'_>,
    b: SourceDocument<'_>,
    params: &ShingleParams,
    profile: &NormalizationProfile,
) -> ComparisonReport {
    let (set_a, spans_a) = shingle_with_spans(a, params, profile);
    let (set_b, spans_b) = shingle_with_spans(b, params, profile);
    let overlap = overlap(&set_a, &set_b).expect("both sets built from one bundle");

    let mut shared_keys = Vec::new();
    let mut matches = Vec::new();
    for (key, occ_a) in &set_a.occurrences {
        let Some(occ_b) = set_b.occurrences.get(key) else {
            continue;
        };
        shared_keys.push(key.clone());
        for pa in occ_a {
            let parts_a = occurrence_parts(pa, &spans_a);
            for pb in occ_b {
                let parts_b = occurrence_parts(pb, &spans_b);
                matches.push(MatchSpan {
                    key: key.clone(),
                    n: params.n,
                    span_a: spans_a[pa[0]].hull(spans_a[pa[pa.len() - 1]]),
                    span_b: spans_b[pb[0]].hull(spans_b[pb[pb.len() - 1]]),
                    parts_a: parts_a.clone(),
                    parts_b,
                });
            }
        }
    }

    let merged_a = merge_spans(matches.iter().flat_map(|m| m.parts_a.iter().copied()));
    let merged_b = merge_spans(matches.iter().flat_map(|m| m.parts_b.iter().copied()));

    let mut counts_by_n = BTreeMap::new();
    for n in REPORTED_SIZES {
        let Ok(sized) = params.with_n(n) else {
            continue;
        };
        let shared = if sized == *params {
            overlap.shared
        } else {
            let (x, _) = shingle_with_spans(a, &sized, profile);
            let (y, _) = shingle_with_spans(b, &sized, profile);
            crate::similarity::overlap(&x, &y)
                .expect("both sets built from one bundle")
                .shared
        };
        counts_by_n.insert(n, shared);
    }

    ComparisonReport {
        doc_a: a.id.into(),
        doc_b: b.id.into(),
        params: *params,
        profile: set_a.profile.clone(),
        overlap,
        shared_keys,
        matches,
        merged_a,
        merged_b,
        counts_by_n,
    }
}
