//! Shingle sets: contiguous, vowel-masked (fuzzy) and k-skip n-akṣaras, plus
//! character n-grams as a baseline.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::normalizer::NormalizationProfile;
use crate::scanner::{tokenize_characters, Aksara, Grapheme, TokenStream};

/// Replaces the nucleus of masked akṣaras in fuzzy keys. Not an IAST letter,
/// so a masked key never equals an unmasked surface.
pub const MASK: char = '•';

/// Fuzzy mode keeps the vowels of the first two akṣaras of a window and masks
/// the remaining `n - 2`.
const FUZZY_KEPT_POSITIONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Contiguous,
    Fuzzy,
    Skip,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Contiguous => "contiguous",
            Mode::Fuzzy => "fuzzy",
            Mode::Skip => "skip",
        }
    }
}

impl FromStr for Mode {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "contiguous" => Ok(Mode::Contiguous),
            "fuzzy" => Ok(Mode::Fuzzy),
            "skip" => Ok(Mode::Skip),
            _ => Err(ParamError::UnknownMode(s.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Aksara,
    Character,
}

impl Unit {
    pub fn name(self) -> &'static str {
        match self {
            Unit::Aksara => "aksara",
            Unit::Character => "character",
        }
    }
}

impl FromStr for Unit {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aksara" => Ok(Unit::Aksara),
            "character" => Ok(Unit::Character),
            _ => Err(ParamError::UnknownUnit(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamError {
    ZeroN,
    FuzzyTooShort { n: usize },
    SkipTooShort { n: usize },
    SkipWithoutGap,
    CharacterMode(Mode),
    UnknownMode(String),
    UnknownUnit(String),
    Malformed(String),
}

impl ParamError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ParamError::ZeroN
            | ParamError::FuzzyTooShort { .. }
            | ParamError::SkipTooShort { .. } => "invalid-n",
            ParamError::SkipWithoutGap => "invalid-k",
            ParamError::CharacterMode(_) | ParamError::UnknownMode(_) => "invalid-mode",
            ParamError::UnknownUnit(_) => "invalid-unit",
            ParamError::Malformed(_) => "invalid-params",
        }
    }
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::ZeroN => f.write_str("n must be at least 1"),
            ParamError::FuzzyTooShort { n } => write!(f, "fuzzy mode needs n >= 3, got {n}"),
            ParamError::SkipTooShort { n } => write!(f, "skip mode needs n >= 2, got {n}"),
            ParamError::SkipWithoutGap => f.write_str("skip mode needs k >= 1"),
            ParamError::CharacterMode(mode) => {
                write!(
                    f,
                    "character unit supports only contiguous mode, not {}",
                    mode.name()
                )
            }
            ParamError::UnknownMode(m) => write!(f, "unknown mode `{m}`"),
            ParamError::UnknownUnit(u) => write!(f, "unknown unit `{u}`"),
            ParamError::Malformed(s) => write!(f, "malformed parameters `{s}`"),
        }
    }
}

impl core::error::Error for ParamError {}

/// Gram size, mode, skip distance and unit. Construct with [`ShingleParams::new`]
/// so the combination is always valid; `k` is forced to 0 outside skip mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShingleParams {
    pub n: usize,
    pub mode: Mode,
    pub k: usize,
    pub unit: Unit,
}

impl ShingleParams {
    pub fn new(n: usize, mode: Mode, k: usize, unit: Unit) -> Result<Self, ParamError> {
        if n == 0 {
            return Err(ParamError::ZeroN);
        }
        if unit == Unit::Character && mode != Mode::Contiguous {
            return Err(ParamError::CharacterMode(mode));
        }
        let k = match mode {
            Mode::Contiguous => 0,
            Mode::Fuzzy if n < 3 => return Err(ParamError::FuzzyTooShort { n }),
            Mode::Fuzzy => 0,
            Mode::Skip if n < 2 => return Err(ParamError::SkipTooShort { n }),
            Mode::Skip if k == 0 => return Err(ParamError::SkipWithoutGap),
            Mode::Skip => k,
        };
        Ok(ShingleParams { n, mode, k, unit })
    }

    pub fn contiguous(n: usize) -> Result<Self, ParamError> {
        Self::new(n, Mode::Contiguous, 0, Unit::Aksara)
    }

    pub fn fuzzy(n: usize) -> Result<Self, ParamError> {
        Self::new(n, Mode::Fuzzy, 0, Unit::Aksara)
    }

    pub fn skip(n: usize, k: usize) -> Result<Self, ParamError> {
        Self::new(n, Mode::Skip, k, Unit::Aksara)
    }

    pub fn characters(n: usize) -> Result<Self, ParamError> {
        Self::new(n, Mode::Contiguous, 0, Unit::Character)
    }

    /// Same mode, skip distance and unit at a different gram size.
    pub fn with_n(&self, n: usize) -> Result<Self, ParamError> {
        Self::new(n, self.mode, self.k, self.unit)
    }

    /// Largest allowed distance between consecutive chosen positions.
    fn max_step(&self) -> usize {
        self.k + 1
    }
}

/// `n=4,mode=contiguous,k=0,unit=aksara`
impl fmt::Display for ShingleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={},mode={},k={},unit={}",
            self.n,
            self.mode.name(),
            self.k,
            self.unit.name()
        )
    }
}

impl FromStr for ShingleParams {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || ParamError::Malformed(s.into());
        let (mut n, mut mode, mut k, mut unit) = (None, Mode::Contiguous, 0, Unit::Aksara);
        for field in s.split(',') {
            let (name, value) = field.split_once('=').ok_or_else(malformed)?;
            match name.trim() {
                "n" => n = Some(value.trim().parse().map_err(|_| malformed())?),
                "k" => k = value.trim().parse().map_err(|_| malformed())?,
                "mode" => mode = value.trim().parse()?,
                "unit" => unit = value.trim().parse()?,
                _ => return Err(malformed()),
            }
        }
        ShingleParams::new(n.ok_or_else(malformed)?, mode, k, unit)
    }
}

/// The distinct shingle keys of one document, with every position tuple each
/// key was read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShingleSet {
    pub document_id: String,
    pub params: ShingleParams,
    pub profile: NormalizationProfile,
    pub occurrences: BTreeMap<String, Vec<Vec<usize>>>,
}

impl ShingleSet {
    pub fn new(document_id: &str, params: ShingleParams, profile: NormalizationProfile) -> Self {
        ShingleSet {
            document_id: document_id.into(),
            params,
            profile,
            occurrences: BTreeMap::new(),
        }
    }

    /// Keys in sorted order.
    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.occurrences.keys().map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.occurrences.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// Total number of windows read, counting repeats.
    pub fn window_count(&self) -> usize {
        self.occurrences.values().map(Vec::len).sum()
    }

    pub fn same_bundle(&self, other: &ShingleSet) -> bool {
        self.params == other.params && self.profile == other.profile
    }

    fn record(&mut self, key: String, positions: Vec<usize>) {
        self.occurrences.entry(key).or_default().push(positions);
    }
}

/// Surface of one akṣara with its vowel replaced by [`MASK`].
pub fn masked_surface(aksara: &Aksara) -> String {
    let mut out = String::new();
    for g in aksara.prefix.iter().chain(aksara.onset.iter()) {
        out.push_str(&g.surface);
    }
    if aksara.nucleus.is_some() {
        out.push(MASK);
    }
    if let Some(coda) = &aksara.coda {
        out.push_str(&coda.surface);
    }
    out
}

/// Fuzzy key of a window of akṣaras.
pub fn fuzzy_key(window: &[&Aksara]) -> String {
    let mut key = String::new();
    for (i, a) in window.iter().enumerate() {
        if i < FUZZY_KEPT_POSITIONS {
            a.write_surface(&mut key);
        } else {
            key.push_str(&masked_surface(a));
        }
    }
    key
}

fn plain_key(window: &[&Aksara]) -> String {
    let mut key = String::new();
    for a in window {
        a.write_surface(&mut key);
    }
    key
}

/// All strictly increasing `n`-tuples of indices below `len` whose
/// consecutive members differ by at most `max_step`, ordered by start index
/// then lexicographically. `max_step == 1` gives the contiguous windows.
pub(crate) fn windows(len: usize, n: usize, max_step: usize) -> Vec<Vec<usize>> {
    fn extend(
        len: usize,
        n: usize,
        max_step: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        let last = *current.last().expect("seeded with a start index");
        for next in last + 1..=(last + max_step).min(len.saturating_sub(1)) {
            current.push(next);
            extend(len, n, max_step, current, out);
            current.pop();
        }
    }

    let mut out = Vec::new();
    if n == 0 || max_step == 0 || len < n {
        return out;
    }
    let mut current = Vec::with_capacity(n);
    for start in 0..=len - n {
        current.push(start);
        extend(len, n, max_step, &mut current, &mut out);
        current.pop();
    }
    out
}

fn shingle_stream(
    stream: &TokenStream,
    params: ShingleParams,
    key_of: impl Fn(&[&Aksara]) -> String,
) -> ShingleSet {
    let mut set = ShingleSet::new(&stream.document_id, params, stream.profile.clone());
    let mut window: Vec<&Aksara> = Vec::with_capacity(params.n);
    for positions in windows(stream.aksaras.len(), params.n, params.max_step()) {
        window.clear();
        window.extend(positions.iter().map(|&i| &stream.aksaras[i]));
        set.record(key_of(&window), positions);
    }
    set
}

/// One key per window of `n` consecutive akṣaras. `n == 0` yields an empty set.
pub fn contiguous_shingles(stream: &TokenStream, n: usize) -> ShingleSet {
    let params = ShingleParams {
        n,
        mode: Mode::Contiguous,
        k: 0,
        unit: Unit::Aksara,
    };
    shingle_stream(stream, params, plain_key)
}

/// Contiguous windows with the vowels of the last `n - 2` akṣaras masked.
pub fn fuzzy_shingles(stream: &TokenStream, n: usize) -> Result<ShingleSet, ParamError> {
    let params = ShingleParams::fuzzy(n)?;
    Ok(shingle_stream(stream, params, fuzzy_key))
}

/// k-skip-n-grams: every `n` akṣaras whose consecutive positions are at most
/// `k + 1` apart. Includes the contiguous windows.
pub fn skip_shingles(stream: &TokenStream, n: usize, k: usize) -> Result<ShingleSet, ParamError> {
    let params = ShingleParams::skip(n, k)?;
    Ok(shingle_stream(stream, params, plain_key))
}

/// Contiguous character n-grams over the separator-free character sequence.
pub fn character_shingles(document_id: &str, text: &str, n: usize) -> ShingleSet {
    character_shingles_of(document_id, &tokenize_characters(text), n)
}

pub(crate) fn character_shingles_of(document_id: &str, chars: &[Grapheme], n: usize) -> ShingleSet {
    let params = ShingleParams {
        n,
        mode: Mode::Contiguous,
        k: 0,
        unit: Unit::Character,
    };
    let mut set = ShingleSet::new(document_id, params, NormalizationProfile::none());
    for positions in windows(chars.len(), n, 1) {
        let key: String = positions
            .iter()
            .map(|&i| chars[i].surface.as_str())
            .collect();
        set.record(key, positions);
    }
    set
}

/// Shingles an already normalized stream under `params`. Character params
/// need the source text; use [`crate::shingle_text`] for those.
pub fn shingle(stream: &TokenStream, params: &ShingleParams) -> ShingleSet {
    match params.mode {
        Mode::Contiguous => contiguous_shingles(stream, params.n),
        Mode::Fuzzy => shingle_stream(stream, *params, fuzzy_key),
        Mode::Skip => shingle_stream(stream, *params, plain_key),
    }
}
