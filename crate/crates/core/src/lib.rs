//! Text-reuse detection over IAST-romanized Sanskrit and neighbouring
//! languages, using akṣaras (orthographic syllables) as the token unit.
//!
//! The pipeline is
//!
//! 1. [`scanner`]: text to graphemes and akṣaras, keeping source byte spans;
//! 2. [`normalizer`]: orthographic folding (gemination, avagraha, nasals…);
//! 3. [`shingler`]: contiguous, fuzzy (vowel-masked) and skip n-akṣara sets;
//! 4. [`similarity`]: Jaccard / Dice and the pairwise corpus matrix;
//! 5. [`graph`]: minimum spanning tree over `1 - similarity`;
//! 6. [`aligner`]: shared shingles mapped back onto both source texts.
//!
//! Everything here is `no_std` + `alloc` and free of IO.
//!
//! ```
//! use aksara_core::{scanner::tokenize_aksaras, shingler::contiguous_shingles};
//!
//! let stream = tokenize_aksaras("doc", "akṣaraḥ kartā");
//! assert_eq!(stream.surfaces(), ["a", "kṣa", "raḥ", "ka", "rtā"]);
//! let bigrams = contiguous_shingles(&stream, 2);
//! let keys: Vec<&str> = bigrams.keys().collect();
//! assert_eq!(keys, ["akṣa", "kartā", "kṣaraḥ", "raḥka"]);
//! ```

#![no_std]

extern crate alloc;

pub mod aligner;
pub mod graph;
pub mod normalizer;
pub mod scanner;
pub mod shingler;
pub mod similarity;

pub use aligner::{compare, ComparisonReport, MatchSpan, SourceDocument};
pub use graph::{minimum_spanning_tree, GraphError, ReuseTree, TreeEdge, TreeNode};
pub use normalizer::{normalize, NormalizationProfile, Rule};
pub use scanner::{Aksara, Grapheme, GraphemeKind, Span, TokenStream};
pub use shingler::{Mode, ParamError, ShingleParams, ShingleSet, Unit};
pub use similarity::{MetricKind, SimilarityError, SimilarityMatrix};

/// Tokenize, normalize and shingle one document. Character units read the raw
/// text and ignore `profile`.
pub fn shingle_text(
    id: &str,
    text: &str,
    params: &ShingleParams,
    profile: &NormalizationProfile,
) -> ShingleSet {
    aligner::shingle_with_spans(SourceDocument::new(id, text), params, profile).0
}
