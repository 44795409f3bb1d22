use std::collections::BTreeSet;

use aksara_core::aligner::{compare, merge_spans, shared_shingles, SourceDocument};
use aksara_core::graph::minimum_spanning_tree;
use aksara_core::normalizer::{normalize, NormalizationProfile, Rule};
use aksara_core::scanner::{
    canonicalize, scan_graphemes, tokenize_aksaras, tokenize_characters, GraphemeKind,
};
use aksara_core::shingler::{
    contiguous_shingles, fuzzy_key, fuzzy_shingles, skip_shingles, ShingleParams, ShingleSet,
};
use aksara_core::similarity::{
    dice, jaccard, overlap, similarity_matrix, Combine, MetricKind, SimilarityMatrix,
};
use aksara_core::{shingle_text, Span};
use proptest::prelude::*;

const UNITS: &[&str] = &[
    "a", "ā", "i", "ī", "u", "ū", "ṛ", "ṝ", "ḹ", "e", "ē", "ai", "o", "ō", "au", "k", "kh", "g",
    "gh", "ṅ", "c", "ch", "j", "jh", "ñ", "ṭ", "ṭh", "ḍ", "ḍh", "ṇ", "t", "th", "d", "dh", "n",
    "p", "ph", "b", "bh", "m", "y", "r", "l", "ḷ", "v", "ś", "ṣ", "s", "h", "ḻ", "ṟ", "ṉ", "ṃ",
    "ṁ", "m\u{310}", "ḥ", "'", " ", " ", " ", ",", "|", "||", "1", "[", "]", "-", "x", "\n", "A",
    "Ā", "Kh", "a\u{304}", "s\u{301}", "\u{310}", "İ",
];

fn iast() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(UNITS), 0..40).prop_map(|parts| parts.concat())
}

fn profile() -> impl Strategy<Value = NormalizationProfile> {
    prop::collection::vec(prop::sample::select(Rule::ALL.to_vec()), 0..6)
        .prop_map(|rules| rules.into_iter().collect())
}

fn non_separator_surface(text: &str) -> String {
    scan_graphemes(text)
        .into_iter()
        .filter(|g| g.kind != GraphemeKind::Other)
        .map(|g| g.surface)
        .collect()
}

fn key_set(set: &ShingleSet) -> BTreeSet<String> {
    set.keys().map(String::from).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn graphemes_cover_every_byte(text in iast()) {
        let graphemes = scan_graphemes(&text);
        let mut cursor = 0;
        for g in &graphemes {
            prop_assert!(!g.surface.is_empty());
            prop_assert_eq!(g.span.start, cursor);
            cursor = g.span.end;
        }
        prop_assert_eq!(cursor, text.len());
        let joined: String = graphemes.iter().map(|g| g.surface.as_str()).collect();
        prop_assert_eq!(joined, canonicalize(&text));
    }

    #[test]
    fn aksaras_round_trip_and_partition(text in iast()) {
        let stream = tokenize_aksaras("f", &text);
        let joined: String = stream.surfaces().concat();
        prop_assert_eq!(&joined, &non_separator_surface(&text));

        let graphemes: usize = stream.aksaras.iter().map(|a| a.grapheme_count()).sum();
        prop_assert_eq!(graphemes, tokenize_characters(&text).len());
        prop_assert!(stream.len() <= tokenize_characters(&text).len());

        for pair in stream.aksaras.windows(2) {
            prop_assert!(pair[0].span.end <= pair[1].span.start);
            prop_assert!(pair[0].span.start < pair[1].span.start);
        }
    }

    #[test]
    fn aksara_shape(text in iast()) {
        let stream = tokenize_aksaras("f", &text);
        let last = stream.len().saturating_sub(1);
        for (i, a) in stream.aksaras.iter().enumerate() {
            if a.is_degenerate() {
                prop_assert_eq!(i, last, "degenerate akṣara before the end");
                prop_assert!(a.coda.is_none());
                continue;
            }
            if let Some(p) = &a.prefix {
                prop_assert_eq!(p.kind, GraphemeKind::Avagraha);
            }
            prop_assert!(a.onset.iter().all(|c| c.kind == GraphemeKind::Consonant));
            prop_assert_eq!(a.nucleus.as_ref().unwrap().kind, GraphemeKind::Vowel);
            if let Some(c) = &a.coda {
                prop_assert!(c.kind.is_coda());
            }
        }
    }

    #[test]
    fn spans_slice_back_to_surfaces(text in iast()) {
        let stream = tokenize_aksaras("f", &text);
        for a in &stream.aksaras {
            let slice = &text[a.span.start..a.span.end];
            prop_assert_eq!(non_separator_surface(slice), a.surface());
        }
    }

    #[test]
    fn normalization_is_idempotent(text in iast(), profile in profile()) {
        let stream = tokenize_aksaras("f", &text);
        let once = normalize(&stream, &profile);
        let twice = normalize(&once, &profile);
        prop_assert_eq!(once.surfaces(), twice.surfaces());
    }

    #[test]
    fn normalization_keeps_count_and_spans(text in iast(), profile in profile()) {
        let stream = tokenize_aksaras("f", &text);
        let normalized = normalize(&stream, &profile);
        prop_assert_eq!(stream.len(), normalized.len());
        let before: Vec<Span> = stream.aksaras.iter().map(|a| a.span).collect();
        let after: Vec<Span> = normalized.aksaras.iter().map(|a| a.span).collect();
        prop_assert_eq!(before, after);
        prop_assert_eq!(normalize(&stream, &NormalizationProfile::none()).surfaces(), stream.surfaces());
    }

    #[test]
    fn occurrences_rebuild_their_keys(text in iast(), n in 1usize..5) {
        let stream = normalize(&tokenize_aksaras("f", &text), &NormalizationProfile::default());
        let set = contiguous_shingles(&stream, n);
        let windows = stream.len().saturating_sub(n - 1);
        prop_assert_eq!(set.window_count(), windows);
        prop_assert!(set.len() <= windows);
        for (key, occurrences) in &set.occurrences {
            for positions in occurrences {
                prop_assert_eq!(positions.len(), n);
                prop_assert!(positions.windows(2).all(|w| w[1] == w[0] + 1));
                let rebuilt: String = positions.iter().map(|&i| stream.aksaras[i].surface()).collect();
                prop_assert_eq!(&rebuilt, key);
            }
        }
        prop_assert_eq!(contiguous_shingles(&stream, n), set);
    }

    #[test]
    fn fuzzy_is_masked_contiguous(text in iast(), n in 3usize..6) {
        let stream = normalize(&tokenize_aksaras("f", &text), &NormalizationProfile::default());
        let plain = contiguous_shingles(&stream, n);
        let fuzzy = fuzzy_shingles(&stream, n).unwrap();
        let masked: BTreeSet<String> = plain
            .occurrences
            .values()
            .flatten()
            .map(|positions| {
                let window: Vec<_> = positions.iter().map(|&i| &stream.aksaras[i]).collect();
                fuzzy_key(&window)
            })
            .collect();
        prop_assert_eq!(key_set(&fuzzy), masked);
        prop_assert!(fuzzy.len() <= plain.len());
    }

    #[test]
    fn skip_grams_match_brute_force(len in 0usize..9, n in 2usize..4, k in 1usize..3) {
        // one distinct akṣara per position so keys identify position tuples
        let letters = ["ka", "kha", "ga", "gha", "ca", "cha", "ja", "jha", "ṭa"];
        let text = letters[..len].join(" ");
        let stream = tokenize_aksaras("f", &text);
        let set = skip_shingles(&stream, n, k).unwrap();

        let mut expected = BTreeSet::new();
        for mask in 0u32..(1 << len) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let chosen: Vec<usize> = (0..len).filter(|i| mask & (1 << i) != 0).collect();
            if chosen.windows(2).all(|w| w[1] - w[0] <= k + 1) {
                expected.insert(chosen.iter().map(|&i| letters[i]).collect::<String>());
            }
        }
        prop_assert_eq!(key_set(&set), expected);
        let contiguous = key_set(&contiguous_shingles(&stream, n));
        prop_assert!(contiguous.is_subset(&key_set(&set)));
    }
}

fn random_set(id: &str, keys: &BTreeSet<u8>) -> ShingleSet {
    let mut set = ShingleSet::new(
        id,
        ShingleParams::contiguous(2).unwrap(),
        NormalizationProfile::none(),
    );
    for (i, k) in keys.iter().enumerate() {
        set.occurrences
            .insert(format!("k{k}"), vec![vec![i, i + 1]]);
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metric_properties(
        a in prop::collection::btree_set(0u8..40, 0..25),
        b in prop::collection::btree_set(0u8..40, 0..25),
        extra in 0u8..40,
    ) {
        let (sa, sb) = (random_set("a", &a), random_set("b", &b));
        let j = jaccard(&sa, &sb).unwrap();
        let d = dice(&sa, &sb).unwrap();

        // independent counts
        let inter = a.intersection(&b).count();
        let union = a.union(&b).count();
        let j_direct = if union == 0 { 0.0 } else { inter as f64 / union as f64 };
        let d_direct = if a.len() + b.len() == 0 { 0.0 } else { 2.0 * inter as f64 / (a.len() + b.len()) as f64 };
        prop_assert_eq!(j, j_direct);
        prop_assert_eq!(d, d_direct);

        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(j <= d);
        prop_assert!((d - 2.0 * j / (1.0 + j)).abs() < 1e-12);
        prop_assert_eq!(j, jaccard(&sb, &sa).unwrap());
        prop_assert_eq!(d, dice(&sb, &sa).unwrap());
        if !a.is_empty() {
            prop_assert_eq!(jaccard(&sa, &sa).unwrap(), 1.0);
            prop_assert_eq!(dice(&sa, &sa).unwrap(), 1.0);
        }

        // adding a key of B to A never lowers either metric
        if b.contains(&extra) {
            let mut grown = a.clone();
            grown.insert(extra);
            let sg = random_set("a", &grown);
            prop_assert!(jaccard(&sg, &sb).unwrap() >= j);
            prop_assert!(dice(&sg, &sb).unwrap() >= d);
        }
    }
}

#[test]
fn matrix_matches_brute_force() {
    let docs: [(&str, &[u8]); 3] = [("x", &[1, 2, 3, 4]), ("y", &[3, 4, 5]), ("z", &[9])];
    let sets: Vec<ShingleSet> = docs
        .iter()
        .map(|(id, keys)| random_set(id, &keys.iter().copied().collect()))
        .collect();
    let mx = similarity_matrix(&sets, MetricKind::Jaccard).unwrap();
    for (i, (_, a)) in docs.iter().enumerate() {
        for (j, (_, b)) in docs.iter().enumerate() {
            let a: BTreeSet<u8> = a.iter().copied().collect();
            let b: BTreeSet<u8> = b.iter().copied().collect();
            let expected = if i == j {
                1.0
            } else {
                a.intersection(&b).count() as f64 / a.union(&b).count() as f64
            };
            assert_eq!(mx.get(i, j), expected, "cell ({i},{j})");
        }
    }
    assert_eq!(mx.get(0, 1), 0.4);

    // relabeling permutes rows and columns
    let perm = [2, 0, 1];
    let permuted: Vec<ShingleSet> = perm.iter().map(|&i| sets[i].clone()).collect();
    let pm = similarity_matrix(&permuted, MetricKind::Jaccard).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(pm.get(i, j), mx.get(perm[i], perm[j]));
        }
    }
}

/// Every labeled tree on `m` nodes, via Prüfer sequences.
fn all_spanning_trees(m: usize) -> Vec<Vec<(usize, usize)>> {
    if m == 1 {
        return vec![vec![]];
    }
    if m == 2 {
        return vec![vec![(0, 1)]];
    }
    let count = m.pow((m - 2) as u32);
    let mut trees = Vec::with_capacity(count);
    for code in 0..count {
        let mut seq = Vec::with_capacity(m - 2);
        let mut c = code;
        for _ in 0..m - 2 {
            seq.push(c % m);
            c /= m;
        }
        let mut degree = vec![1usize; m];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(m - 1);
        for &s in &seq {
            let leaf = (0..m).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf.min(s), leaf.max(s)));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..m).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        trees.push(edges);
    }
    trees
}

fn matrix_from(values: Vec<f64>, m: usize) -> SimilarityMatrix {
    SimilarityMatrix {
        document_ids: (0..m).map(|i| format!("d{i}")).collect(),
        params: ShingleParams::contiguous(4).unwrap(),
        profile: NormalizationProfile::default(),
        metric: MetricKind::Dice,
        combine: Combine::Single,
        gram_sizes: vec![4],
        values,
        empty: vec![],
    }
}

#[test]
fn prufer_enumeration_counts() {
    assert_eq!(all_spanning_trees(6).len(), 1296);
    assert_eq!(all_spanning_trees(4).len(), 16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mst_is_optimal(m in 1usize..7, raw in prop::collection::vec(0u8..11, 15)) {
        let mut values = vec![1.0; m * m];
        let mut next = raw.iter();
        for i in 0..m {
            for j in i + 1..m {
                let v = f64::from(*next.next().unwrap()) / 10.0;
                values[i * m + j] = v;
                values[j * m + i] = v;
            }
        }
        let mx = matrix_from(values, m);
        let tree = minimum_spanning_tree(&mx).unwrap();
        prop_assert!(tree.is_spanning_tree());

        let best = all_spanning_trees(m)
            .iter()
            .map(|edges| edges.iter().map(|&(i, j)| 1.0 - mx.get(i, j)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        prop_assert!((tree.total_weight() - best).abs() < 1e-9, "{} vs {}", tree.total_weight(), best);
        prop_assert_eq!(minimum_spanning_tree(&mx).unwrap(), tree);
    }
}

const PHRASES: &[&str] = &[
    "ihānukto 'pi buddho viśeṣaṇena spaṣṭam pratīyate",
    "atrānukto pi budho viśeṣeṇaiḥ sūcayati",
    "yasya jyā parameśvarāce",
    "amo parameśvara",
    "śriye saṃpataye",
    "śrī sanpattū",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn match_spans_rebuild_their_keys(a in iast(), b in iast(), n in 1usize..5) {
        // nasal-to-anusvara moves material across akṣara boundaries, so a
        // slice re-read in isolation can differ; leave it out here
        let profile = NormalizationProfile::default().without(Rule::NasalToAnusvara);
        let params = ShingleParams::contiguous(n).unwrap();
        let report = compare(SourceDocument::new("a", &a), SourceDocument::new("b", &b), &params, &profile);
        for m in &report.matches {
            for (text, span) in [(&a, m.span_a), (&b, m.span_b)] {
                let slice = &text[span.start..span.end];
                let rebuilt = normalize(&tokenize_aksaras("s", slice), &profile);
                prop_assert_eq!(rebuilt.len(), n);
                prop_assert_eq!(&rebuilt.surfaces().concat(), &m.key);
            }
        }
        let reversed: Vec<Span> = report.matches.iter().rev().flat_map(|m| m.parts_a.clone()).collect();
        prop_assert_eq!(merge_spans(reversed), report.merged_a.clone());
        for pair in report.merged_a.windows(2) {
            prop_assert!(pair[0].end < pair[1].start);
        }
    }
}

#[test]
fn report_metrics_agree_with_matrix() {
    let profile = NormalizationProfile::default();
    for n in 2..=5 {
        let params = ShingleParams::contiguous(n).unwrap();
        let sets: Vec<ShingleSet> = PHRASES
            .iter()
            .enumerate()
            .map(|(i, t)| shingle_text(&format!("p{i}"), t, &params, &profile))
            .collect();
        let jm = similarity_matrix(&sets, MetricKind::Jaccard).unwrap();
        let dm = similarity_matrix(&sets, MetricKind::Dice).unwrap();
        for i in 0..PHRASES.len() {
            for j in 0..PHRASES.len() {
                if i == j {
                    continue;
                }
                let report = compare(
                    SourceDocument::new(&sets[i].document_id, PHRASES[i]),
                    SourceDocument::new(&sets[j].document_id, PHRASES[j]),
                    &params,
                    &profile,
                );
                assert_eq!(report.jaccard(), jm.get(i, j));
                assert_eq!(report.dice(), dm.get(i, j));
                assert_eq!(report.shared_keys.len(), report.counts_by_n[&n]);
                let shared = shared_shingles(&sets[i], &sets[j]).unwrap();
                assert_eq!(shared.len(), overlap(&sets[i], &sets[j]).unwrap().shared);
            }
        }
    }
}

#[test]
fn longest_match_against_enumeration() {
    // every way to cut "khai" into alphabet units; the scanner must take the
    // cut whose first unit is longest at each step
    let alphabet = ["k", "kh", "h", "a", "ai", "i"];
    fn cuts<'a>(
        rest: &str,
        alphabet: &[&'a str],
        prefix: Vec<&'a str>,
        out: &mut Vec<Vec<&'a str>>,
    ) {
        if rest.is_empty() {
            out.push(prefix);
            return;
        }
        for unit in alphabet {
            if let Some(tail) = rest.strip_prefix(unit) {
                let mut next = prefix.clone();
                next.push(unit);
                cuts(tail, alphabet, next, out);
            }
        }
    }
    let mut all = Vec::new();
    cuts("khai", &alphabet, vec![], &mut all);
    assert_eq!(all.len(), 4);
    let greedy = all
        .iter()
        .max_by_key(|c| c.iter().map(|u| u.chars().count()).collect::<Vec<_>>())
        .unwrap();
    let scanned: Vec<String> = scan_graphemes("khai")
        .into_iter()
        .map(|g| g.surface)
        .collect();
    assert_eq!(scanned, *greedy);
    assert_eq!(scanned, ["kh", "ai"]);
}
