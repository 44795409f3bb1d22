//! Orthographic normalization of akṣara streams.
//!
//! Rules always run in the canonical order of [`Rule::ALL`], whatever order
//! they were configured in. Normalized akṣaras keep their original source
//! spans.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scanner::{Aksara, Grapheme, GraphemeKind, TokenStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    StripAvagraha,
    Degeminate,
    NasalToAnusvara,
    FoldDravidianVowels,
    FoldAnusvaraVariants,
    MergeBV,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::StripAvagraha,
        Rule::Degeminate,
        Rule::NasalToAnusvara,
        Rule::FoldDravidianVowels,
        Rule::FoldAnusvaraVariants,
        Rule::MergeBV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::StripAvagraha => "strip-avagraha",
            Rule::Degeminate => "degeminate",
            Rule::NasalToAnusvara => "nasal-to-anusvara",
            Rule::FoldDravidianVowels => "fold-dravidian-vowels",
            Rule::FoldAnusvaraVariants => "fold-anusvara-variants",
            Rule::MergeBV => "merge-b-v",
        }
    }

    fn apply(self, aksaras: &mut [Aksara]) {
        match self {
            Rule::StripAvagraha => aksaras.iter_mut().for_each(|a| a.prefix = None),
            Rule::Degeminate => aksaras.iter_mut().for_each(degeminate),
            Rule::NasalToAnusvara => nasal_to_anusvara(aksaras),
            Rule::FoldDravidianVowels => {
                for nucleus in aksaras.iter_mut().filter_map(|a| a.nucleus.as_mut()) {
                    match nucleus.surface.as_str() {
                        "ē" => nucleus.surface = "e".into(),
                        "ō" => nucleus.surface = "o".into(),
                        _ => {}
                    }
                }
            }
            Rule::FoldAnusvaraVariants => {
                for coda in aksaras.iter_mut().filter_map(|a| a.coda.as_mut()) {
                    if coda.kind == GraphemeKind::Anusvara {
                        coda.surface = ANUSVARA.into();
                    }
                }
            }
            Rule::MergeBV => {
                for c in aksaras.iter_mut().flat_map(|a| a.onset.iter_mut()) {
                    if c.surface == "b" {
                        c.surface = "v".into();
                    }
                }
            }
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRule(pub String);

impl fmt::Display for UnknownRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown normalization rule `{}`", self.0)
    }
}

impl core::error::Error for UnknownRule {}

impl FromStr for Rule {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// A set of enabled rules. Always stored in canonical pipeline order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Rule>", into = "Vec<Rule>")]
pub struct NormalizationProfile {
    rules: Vec<Rule>,
}

impl NormalizationProfile {
    /// No rules: normalization is the identity.
    pub fn none() -> Self {
        NormalizationProfile { rules: Vec::new() }
    }

    pub fn all() -> Self {
        Rule::ALL.into_iter().collect()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn contains(&self, rule: Rule) -> bool {
        self.rules.contains(&rule)
    }

    pub fn with(mut self, rule: Rule) -> Self {
        if !self.contains(rule) {
            self.rules.push(rule);
            self.rules.sort();
        }
        self
    }

    pub fn without(mut self, rule: Rule) -> Self {
        self.rules.retain(|&r| r != rule);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Every rule except `merge-b-v`.
impl Default for NormalizationProfile {
    fn default() -> Self {
        NormalizationProfile::all().without(Rule::MergeBV)
    }
}

impl FromIterator<Rule> for NormalizationProfile {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        let mut rules: Vec<Rule> = iter.into_iter().collect();
        rules.sort();
        rules.dedup();
        NormalizationProfile { rules }
    }
}

impl From<Vec<Rule>> for NormalizationProfile {
    fn from(rules: Vec<Rule>) -> Self {
        rules.into_iter().collect()
    }
}

impl From<NormalizationProfile> for Vec<Rule> {
    fn from(profile: NormalizationProfile) -> Self {
        profile.rules
    }
}

/// Comma-separated rule names; `none` for the empty profile.
impl fmt::Display for NormalizationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rules.is_empty() {
            return f.write_str("none");
        }
        for (i, rule) in self.rules.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(rule.name())?;
        }
        Ok(())
    }
}

impl FromStr for NormalizationProfile {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "none" {
            return Ok(NormalizationProfile::none());
        }
        s.split(',').map(|r| r.trim().parse::<Rule>()).collect()
    }
}

const ANUSVARA: &str = "ṃ";

fn aspirated_partner(unaspirated: &str) -> Option<&'static str> {
    Some(match unaspirated {
        "k" => "kh",
        "g" => "gh",
        "c" => "ch",
        "j" => "jh",
        "ṭ" => "ṭh",
        "ḍ" => "ḍh",
        "t" => "th",
        "d" => "dh",
        "p" => "ph",
        "b" => "bh",
        _ => return None,
    })
}

fn is_stop(c: &str) -> bool {
    matches!(
        c,
        "k" | "kh"
            | "g"
            | "gh"
            | "c"
            | "ch"
            | "j"
            | "jh"
            | "ṭ"
            | "ṭh"
            | "ḍ"
            | "ḍh"
            | "t"
            | "th"
            | "d"
            | "dh"
            | "p"
            | "ph"
            | "b"
            | "bh"
    )
}

fn is_nasal(c: &str) -> bool {
    matches!(c, "n" | "ṇ" | "ṅ" | "ñ" | "m" | "ṉ")
}

fn nasal_closes_syllable(nasal: &str, next: &str) -> bool {
    if is_nasal(next) {
        return false;
    }
    if nasal == "m" {
        return true;
    }
    is_stop(next) || matches!(next, "ś" | "ṣ" | "s")
}

/// `ddh → dh`, `tt → t`; longer runs collapse left to right.
fn degeminate(aksara: &mut Aksara) {
    if aksara.onset.len() < 2 {
        return;
    }
    let mut out: Vec<Grapheme> = Vec::with_capacity(aksara.onset.len());
    for c in aksara.onset.drain(..) {
        let geminate = out.last().is_some_and(|prev| {
            aspirated_partner(&prev.surface)
                .is_some_and(|asp| c.surface == prev.surface || c.surface == asp)
        });
        if geminate {
            out.pop();
        }
        out.push(c);
    }
    aksara.onset = out;
}

/// Moves a syllable-closing nasal from the head of an onset cluster onto the
/// preceding akṣara as anusvāra.
fn nasal_to_anusvara(aksaras: &mut [Aksara]) {
    for i in 1..aksaras.len() {
        let (before, rest) = aksaras.split_at_mut(i);
        let prev = &mut before[i - 1];
        let cur = &mut rest[0];
        if prev.nucleus.is_none() || prev.coda.is_some() || cur.prefix.is_some() {
            continue;
        }
        let moves = match cur.onset.as_slice() {
            [nasal, next, ..] => {
                is_nasal(&nasal.surface) && nasal_closes_syllable(&nasal.surface, &next.surface)
            }
            _ => false,
        };
        if moves {
            let nasal = cur.onset.remove(0);
            prev.coda = Some(Grapheme::new(GraphemeKind::Anusvara, ANUSVARA, nasal.span));
        }
    }
}

/// Applies `profile` to a copy of `stream`.
pub fn normalize(stream: &TokenStream, profile: &NormalizationProfile) -> TokenStream {
    let mut out = stream.clone();
    normalize_in_place(&mut out, profile);
    out
}

pub fn normalize_in_place(stream: &mut TokenStream, profile: &NormalizationProfile) {
    for rule in profile.rules() {
        rule.apply(&mut stream.aksaras);
    }
    stream.profile = stream
        .profile
        .rules()
        .iter()
        .chain(profile.rules())
        .copied()
        .collect();
}
