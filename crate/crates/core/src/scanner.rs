//! IAST scanning: graphemes and akṣaras with byte-span provenance.
//!
//! Input is lowercased and canonically composed before matching, but every
//! grapheme keeps the byte range of the *original* text it was read from.
//! When composition merges several source codepoints into one, the first
//! resulting character owns the whole source range and any further characters
//! from the same combining run get an empty range at its end.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::canonical_combining_class;
use unicode_normalization::UnicodeNormalization;

use crate::normalizer::NormalizationProfile;

/// Half-open byte range into a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub const fn len(&self) -> usize {
        self.end - self.start
    }

    pub const fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Smallest span covering both.
    pub fn hull(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphemeKind {
    Vowel,
    Consonant,
    Anusvara,
    Visarga,
    Avagraha,
    Other,
}

impl GraphemeKind {
    pub fn is_coda(self) -> bool {
        matches!(self, GraphemeKind::Anusvara | GraphemeKind::Visarga)
    }
}

/// One alphabet unit (or one separator codepoint) of the source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grapheme {
    pub kind: GraphemeKind,
    pub surface: String,
    pub span: Span,
}

impl Grapheme {
    pub fn new(kind: GraphemeKind, surface: impl Into<String>, span: Span) -> Self {
        Grapheme {
            kind,
            surface: surface.into(),
            span,
        }
    }
}

/// Orthographic syllable: `avagraha? consonant* vowel (anusvāra|visarga)?`.
///
/// A degenerate akṣara has no nucleus; it only ever closes a document whose
/// last consonants have no vowel to attach to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Aksara {
    pub prefix: Option<Grapheme>,
    pub onset: Vec<Grapheme>,
    pub nucleus: Option<Grapheme>,
    pub coda: Option<Grapheme>,
    pub span: Span,
}

impl Aksara {
    pub fn is_degenerate(&self) -> bool {
        self.nucleus.is_none()
    }

    fn parts(&self) -> impl Iterator<Item = &Grapheme> {
        self.prefix
            .iter()
            .chain(self.onset.iter())
            .chain(self.nucleus.iter())
            .chain(self.coda.iter())
    }

    /// Number of graphemes making up this akṣara.
    pub fn grapheme_count(&self) -> usize {
        self.parts().count()
    }

    pub fn surface(&self) -> String {
        let mut out = String::new();
        self.write_surface(&mut out);
        out
    }

    pub(crate) fn write_surface(&self, out: &mut String) {
        for g in self.parts() {
            out.push_str(&g.surface);
        }
    }
}

/// The akṣara sequence of one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub document_id: String,
    pub aksaras: Vec<Aksara>,
    pub source_len: usize,
    /// Normalization rules already applied; empty for a fresh scan.
    pub profile: NormalizationProfile,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.aksaras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aksaras.is_empty()
    }

    pub fn surfaces(&self) -> Vec<String> {
        self.aksaras.iter().map(Aksara::surface).collect()
    }
}

const VOWELS: &[&str] = &[
    "a", "ā", "i", "ī", "u", "ū", "ṛ", "ṝ", "ḹ", "e", "ē", "ai", "o", "ō", "au",
];

// ḷ is read as the Dravidian consonant, never as the vocalic liquid.
const CONSONANTS: &[&str] = &[
    "k", "kh", "g", "gh", "ṅ", "c", "ch", "j", "jh", "ñ", "ṭ", "ṭh", "ḍ", "ḍh", "ṇ", "t", "th",
    "d", "dh", "n", "p", "ph", "b", "bh", "m", "y", "r", "l", "ḷ", "v", "ś", "ṣ", "s", "h", "ḻ",
    "ṟ", "ṉ",
];

const ANUSVARAS: &[&str] = &["ṃ", "ṁ", "m\u{310}"];
const VISARGAS: &[&str] = &["ḥ"];
const AVAGRAHAS: &[&str] = &["'"];

const MAX_UNIT_CHARS: usize = 2;

fn lookup(unit: &str) -> Option<GraphemeKind> {
    let tables: [(&[&str], GraphemeKind); 5] = [
        (VOWELS, GraphemeKind::Vowel),
        (CONSONANTS, GraphemeKind::Consonant),
        (ANUSVARAS, GraphemeKind::Anusvara),
        (VISARGAS, GraphemeKind::Visarga),
        (AVAGRAHAS, GraphemeKind::Avagraha),
    ];
    tables
        .iter()
        .find(|(table, _)| table.contains(&unit))
        .map(|&(_, kind)| kind)
}

/// Lowercase + NFC, one source span per output character.
pub fn canonicalize(text: &str) -> String {
    canonical_chars(text).into_iter().map(|(c, _)| c).collect()
}

fn canonical_chars(text: &str) -> Vec<(char, Span)> {
    let mut out = Vec::with_capacity(text.len());
    let mut run = String::new();
    let mut run_start = 0;
    for (offset, c) in text.char_indices() {
        if canonical_combining_class(c) == 0 && !run.is_empty() {
            flush_run(&run, Span::new(run_start, offset), &mut out);
            run.clear();
        }
        if run.is_empty() {
            run_start = offset;
        }
        run.extend(c.to_lowercase());
    }
    if !run.is_empty() {
        flush_run(&run, Span::new(run_start, text.len()), &mut out);
    }
    out
}

fn flush_run(run: &str, span: Span, out: &mut Vec<(char, Span)>) {
    for (i, c) in run.chars().nfc().enumerate() {
        let owned = if i == 0 {
            span
        } else {
            Span::new(span.end, span.end)
        };
        out.push((c, owned));
    }
}

fn longest_match(chars: &[(char, Span)]) -> Vec<Grapheme> {
    let mut out = Vec::new();
    let mut unit = String::new();
    let mut i = 0;
    while i < chars.len() {
        let mut matched = None;
        for len in (1..=MAX_UNIT_CHARS.min(chars.len() - i)).rev() {
            unit.clear();
            unit.extend(chars[i..i + len].iter().map(|&(c, _)| c));
            if let Some(kind) = lookup(&unit) {
                matched = Some((kind, len));
                break;
            }
        }
        let (kind, len) = matched.unwrap_or((GraphemeKind::Other, 1));
        let surface: String = chars[i..i + len].iter().map(|&(c, _)| c).collect();
        let span = Span::new(chars[i].1.start, chars[i + len - 1].1.end);
        out.push(Grapheme::new(kind, surface, span));
        i += len;
    }
    out
}

#[derive(Default)]
struct Builder {
    prefix: Option<Grapheme>,
    onset: Vec<Grapheme>,
    coda_open: bool,
    aksaras: Vec<Aksara>,
}

impl Builder {
    fn pending(&self) -> bool {
        self.prefix.is_some() || !self.onset.is_empty()
    }

    fn close(&mut self, nucleus: Option<Grapheme>) {
        let prefix = self.prefix.take();
        let onset = core::mem::take(&mut self.onset);
        let mut span: Option<Span> = None;
        for g in prefix.iter().chain(onset.iter()).chain(nucleus.iter()) {
            span = Some(span.map_or(g.span, |s| s.hull(g.span)));
        }
        if let Some(span) = span {
            self.aksaras.push(Aksara {
                prefix,
                onset,
                nucleus,
                coda: None,
                span,
            });
        }
    }

    /// Feeds one grapheme; returns false when it cannot belong to any
    /// akṣara (a stray mark), in which case it is treated as a separator.
    fn feed(&mut self, g: &Grapheme) -> bool {
        match g.kind {
            GraphemeKind::Other => return true,
            GraphemeKind::Avagraha => {
                if self.pending() {
                    return false;
                }
                self.prefix = Some(g.clone());
                self.coda_open = false;
            }
            GraphemeKind::Consonant => {
                self.onset.push(g.clone());
                self.coda_open = false;
            }
            GraphemeKind::Vowel => {
                self.close(Some(g.clone()));
                self.coda_open = true;
            }
            GraphemeKind::Anusvara | GraphemeKind::Visarga => {
                if !self.coda_open {
                    return false;
                }
                let last = self
                    .aksaras
                    .last_mut()
                    .expect("coda_open implies an akṣara");
                last.span = last.span.hull(g.span);
                last.coda = Some(g.clone());
                self.coda_open = false;
            }
        }
        true
    }

    fn finish(mut self) -> Vec<Aksara> {
        if self.pending() {
            self.close(None);
        }
        self.aksaras
    }
}

/// Groups graphemes into akṣaras, demoting marks that cannot attach to
/// anything (an avagraha inside a cluster, a second coda) to `Other`.
fn segment(graphemes: &mut [Grapheme]) -> Vec<Aksara> {
    let mut builder = Builder::default();
    for g in graphemes.iter_mut() {
        if !builder.feed(g) {
            g.kind = GraphemeKind::Other;
        }
    }
    builder.finish()
}

/// Longest-match scan of `text` against the IAST alphabet. Every codepoint
/// ends up in exactly one grapheme; anything that is not a usable alphabet
/// unit is `Other`.
pub fn scan_graphemes(text: &str) -> Vec<Grapheme> {
    let mut graphemes = longest_match(&canonical_chars(text));
    segment(&mut graphemes);
    graphemes
}

/// Splits `text` into akṣaras, reading across separators as one continuous
/// stream.
pub fn tokenize_aksaras(document_id: &str, text: &str) -> TokenStream {
    let mut graphemes = longest_match(&canonical_chars(text));
    let aksaras = segment(&mut graphemes);
    TokenStream {
        document_id: document_id.into(),
        aksaras,
        source_len: text.len(),
        profile: NormalizationProfile::none(),
    }
}

/// Phonemic characters with separators removed: the character n-gram baseline.
pub fn tokenize_characters(text: &str) -> Vec<Grapheme> {
    scan_graphemes(text)
        .into_iter()
        .filter(|g| g.kind != GraphemeKind::Other)
        .collect()
}
