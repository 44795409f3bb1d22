//! Corpus-level operations shared by the CLI and the server.

use aksara_core::aligner::REPORTED_SIZES;
use aksara_core::similarity::{mean_similarity_matrix, similarity_matrix, Combine};
use aksara_core::{
    compare, minimum_spanning_tree, normalize, ComparisonReport, MetricKind, NormalizationProfile,
    ReuseTree, ShingleParams, ShingleSet, SimilarityMatrix, SourceDocument, Span,
};
use serde::Serialize;

use crate::corpus::CorpusIndex;
use crate::error::Result;

/// One fully specified corpus question.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub params: ShingleParams,
    pub profile: NormalizationProfile,
    pub metric: MetricKind,
    pub combine: Combine,
}

impl Query {
    pub fn new(params: ShingleParams, profile: NormalizationProfile) -> Self {
        Query {
            params,
            profile,
            metric: MetricKind::Dice,
            combine: Combine::Single,
        }
    }

    pub fn metric(mut self, metric: MetricKind) -> Self {
        self.metric = metric;
        self
    }

    pub fn combine(mut self, combine: Combine) -> Self {
        self.combine = combine;
        self
    }

    /// Bundles that feed the matrix: the requested one, or every reported
    /// size valid for the mode.
    pub fn bundles(&self) -> Vec<ShingleParams> {
        match self.combine {
            Combine::Single => vec![self.params],
            Combine::Mean => REPORTED_SIZES
                .iter()
                .filter_map(|&n| self.params.with_n(n).ok())
                .collect(),
        }
    }
}

fn corpus_sets(
    index: &CorpusIndex,
    params: &ShingleParams,
    profile: &NormalizationProfile,
) -> Result<Vec<ShingleSet>> {
    index
        .documents()
        .iter()
        .map(|d| {
            Ok(ShingleSet::clone(&*index.shingles(
                &d.record.id,
                params,
                profile,
            )?))
        })
        .collect()
}

/// Pairwise matrix in manifest order.
pub fn matrix(index: &CorpusIndex, query: &Query) -> Result<SimilarityMatrix> {
    let per_n = query
        .bundles()
        .iter()
        .map(|p| corpus_sets(index, p, &query.profile))
        .collect::<Result<Vec<_>>>()?;
    Ok(match query.combine {
        Combine::Single => similarity_matrix(&per_n[0], query.metric)?,
        Combine::Mean => mean_similarity_matrix(&per_n, query.metric)?,
    })
}

/// Minimum spanning tree with manifest metadata on the nodes.
pub fn tree(index: &CorpusIndex, query: &Query) -> Result<ReuseTree> {
    let mut tree = minimum_spanning_tree(&matrix(index, query)?)?;
    tree.annotate(|node| {
        let Ok(doc) = index.document(&node.id) else {
            return;
        };
        let record = &doc.record;
        if !record.title.is_empty() {
            node.label = record.title.clone();
        }
        node.language = (!record.language.is_empty()).then(|| record.language.clone());
        node.group = record.display_group().map(String::from);
    });
    Ok(tree)
}

pub fn comparison(
    index: &CorpusIndex,
    a: &str,
    b: &str,
    params: &ShingleParams,
    profile: &NormalizationProfile,
) -> Result<ComparisonReport> {
    let doc_a = index.document(a)?;
    let doc_b = index.document(b)?;
    Ok(compare(
        SourceDocument::new(a, &doc_a.text),
        SourceDocument::new(b, &doc_b.text),
        params,
        profile,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenView {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocumentView {
    pub id: String,
    pub title: String,
    pub language: String,
    pub text: String,
    pub profile: NormalizationProfile,
    pub aksaras: Vec<TokenView>,
}

/// Source text plus its normalized akṣaras with byte spans into that text.
pub fn document_view(
    index: &CorpusIndex,
    id: &str,
    profile: &NormalizationProfile,
) -> Result<DocumentView> {
    let doc = index.document(id)?;
    let stream = normalize(&doc.stream, profile);
    Ok(DocumentView {
        id: doc.record.id.clone(),
        title: doc.record.title.clone(),
        language: doc.record.language.clone(),
        text: doc.text.clone(),
        profile: stream.profile.clone(),
        aksaras: stream
            .aksaras
            .iter()
            .map(|a| {
                let Span { start, end } = a.span;
                TokenView {
                    surface: a.surface(),
                    start,
                    end,
                }
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::DocumentRecord;
    use aksara_core::Mode;

    fn index(texts: &[(&str, &str)]) -> CorpusIndex {
        CorpusIndex::from_texts(
            "t",
            NormalizationProfile::default(),
            texts.iter().map(|(id, text)| {
                (
                    DocumentRecord {
                        id: id.to_string(),
                        path: format!("{id}.txt").into(),
                        title: format!("Title {id}"),
                        language: "Sanskrit".into(),
                        century: None,
                        notes: String::new(),
                        group: None,
                    },
                    text.to_string(),
                )
            }),
        )
    }

    #[test]
    fn mean_bundles_skip_invalid_sizes() {
        let q = Query::new(
            ShingleParams::fuzzy(3).unwrap(),
            NormalizationProfile::default(),
        )
        .combine(Combine::Mean);
        let sizes: Vec<usize> = q.bundles().iter().map(|p| p.n).collect();
        assert_eq!(sizes, [3, 4, 5]);
        assert!(q.bundles().iter().all(|p| p.mode == Mode::Fuzzy));
    }

    #[test]
    fn tree_nodes_carry_metadata() {
        let idx = index(&[
            ("b", "ihānukto 'pi buddho viśe"),
            ("a", "atrānukto pi budho viśe"),
        ]);
        let q = Query::new(
            ShingleParams::contiguous(4).unwrap(),
            NormalizationProfile::default(),
        );
        let t = tree(&idx, &q).unwrap();
        assert_eq!(t.nodes[0].id, "a");
        assert_eq!(t.nodes[0].label, "Title a");
        assert_eq!(t.nodes[0].group.as_deref(), Some("Sanskrit"));
        assert_eq!(t.edges.len(), 1);
        assert!((t.edges[0].similarity - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_ids_are_reported() {
        let idx = index(&[("a", "ka")]);
        let p = ShingleParams::contiguous(2).unwrap();
        assert!(comparison(&idx, "a", "zz", &p, &NormalizationProfile::default()).is_err());
        assert!(document_view(&idx, "zz", &NormalizationProfile::default()).is_err());
    }

    #[test]
    fn document_view_spans_point_into_text() {
        let idx = index(&[("a", "ihānukto 'pi")]);
        let view = document_view(&idx, "a", &NormalizationProfile::default()).unwrap();
        let surfaces: Vec<&str> = view.aksaras.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["i", "hā", "nu", "kto", "pi"]);
        assert_eq!(&view.text[view.aksaras[1].start..view.aksaras[1].end], "hā");
    }
}
